//
// Copyright (c) 2026 the snet authors.
// SPDX-License-Identifier: Apache-2.0
//
// Versioned key-value run configuration. Text files so runs are diffable;
// a full-default dump feeds back into an identical run.
//
#pragma once

#include <string>

#include "snet/netdef.hpp"

namespace snet {

struct ToolConfig {
  // dataset
  int64_t data_sequences = 200;
  int data_res = 64;
  int data_channels = 1;
  // teacher architecture knobs
  TeacherKnobs teacher;
  // dense training (teacher / students)
  int train_epochs = 20;
  double train_lr = 1e-3;
  int train_batch = 8;
  double train_alpha = 0.1;
  int train_pyramid_levels = 5;
  // sparsity-inducing fine-tuning
  int prune_epochs = 20;
  double prune_lr = 1e-4;
  double prune_lambda = 1e-4;
  int prune_batch = 8;
  bool prune_alternating = false;
  int64_t prune_prox_steps = 0;     // 0 = half of the run
  int64_t prune_orthant_steps = 0;  // 0 = remainder
  // plan
  double branch_threshold = 0.05;
  // eval / bench
  int bench_reps = 10;
  int bench_res = 64;

  std::string to_text() const;
  static ToolConfig from_text(const std::string& text);  // unknown key -> ConfigError
};

}  // namespace snet
