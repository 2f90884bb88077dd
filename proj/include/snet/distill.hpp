//
// Copyright (c) 2026 the snet authors.
// SPDX-License-Identifier: Apache-2.0
//
// Phase II training: the baseline student learns from ground truth alone;
// the distilled student additionally mimics the frozen teacher. Both runs
// consume identical batch sequences under the same seed, so their comparison
// is paired.
//
#pragma once

#include "snet/datagen.hpp"
#include "snet/netdef.hpp"

namespace snet {

enum class TrainMode { baseline, distill };

struct TrainConfig {
  int epochs = 20;
  double alpha = 0.1;  // ground-truth penalty weight in the distillation loss
  double lr = 1e-3;
  int batch = 8;
  uint64_t seed = 0;
  TrainMode mode = TrainMode::baseline;
  int pyramid_levels = 5;
};

struct EpochLog {
  int epoch = 0;
  double total = 0.0, stud = 0.0, dist = 0.0;
  double val_psnr = 0.0, val_ssim = 0.0;
  double seconds = 0.0;
};

struct RunLog {
  std::vector<EpochLog> epochs;
  uint64_t seed = 0;
  double wall_seconds = 0.0;
};

struct TrainResult {
  Checkpoint final_ckpt;
  Checkpoint best_ckpt;  // highest validation PSNR
  RunLog log;
};

// Laplacian-loss training from fresh fan-in init with AdaMax. Also used to
// train the dense teacher. Requires cfg.mode == baseline.
TrainResult train_baseline(const NetworkSpec& student, const Dataset& ds,
                           const TrainConfig& cfg);

// Knowledge-distillation training: per batch the teacher runs without
// gradient recording, and the composite loss drives the student. Teacher
// parameters are bit-identical before and after. Requires cfg.mode == distill.
TrainResult train_distilled(const NetworkSpec& student, const Checkpoint& teacher,
                            const Dataset& ds, const TrainConfig& cfg);

struct ValScore {
  double psnr_mean = 0.0;
  double ssim_mean = 0.0;
};

// Mean PSNR/SSIM of forward outputs against ground truth over a split,
// reduced in ascending sequence order.
ValScore validate(const Checkpoint& ckpt, const Dataset& ds, Split split);

// CSV: epoch,total,stud,dist,val_psnr,val_ssim,seconds
std::string runlog_csv(const RunLog& log);

}  // namespace snet
