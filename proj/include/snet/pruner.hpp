//
// Copyright (c) 2026 the snet authors.
// SPDX-License-Identifier: Apache-2.0
//
// Phase I analysis: exact per-layer densities of a sparse checkpoint, the
// compression plan derived from them (density == compression ratio, walked
// from the output layer back to the input), and branch-removal verdicts.
//
#pragma once

#include "snet/netdef.hpp"

namespace snet {

struct LayerDensity {
  int64_t nonzeros = 0;
  int64_t p_l = 0;
  double d = 0.0;  // nonzeros / p_l, exact rational in double
};

struct DensityReport {
  std::map<std::string, LayerDensity> per_layer;
  int64_t total_nonzeros = 0;
  int64_t total_weights = 0;
  double model_density = 0.0;  // weighted mean by p_l
};

// Exact count of coordinates != 0.0 (the optimizers produce exact zeros;
// no epsilon thresholds).
LayerDensity layer_density(const Tensor& weight, const LayerSpec& spec);

DensityReport model_density(const Checkpoint& ckpt);

struct CompressionPlan {
  // consumer layer id -> ratio applied to its input dimension (equivalently
  // to each producer's output channels).
  std::map<std::string, double> ratios;
  std::set<std::string> removed_branches;
  DensityReport provenance;
};

inline constexpr double kBranchRemovalThreshold = 0.05;

// Walks layers from the output back to the input, assigning each layer's
// density as its input-dimension ratio; boundary dimensions stay at 1; a
// removable branch whose mean layer density falls below `branch_threshold`
// is removed outright. Deterministic: same report -> identical plan.
CompressionPlan make_plan(const DensityReport& report, const NetworkSpec& spec,
                          double branch_threshold = kBranchRemovalThreshold);

struct CompressionSummary {
  int64_t params_before = 0;
  int64_t params_after = 0;
  double reduction_pct = 0.0;  // 100*(1 - after/before), one decimal
};

CompressionSummary summarize_compression(const NetworkSpec& teacher,
                                         const NetworkSpec& student);

std::string format_density_report(const DensityReport& report);
DensityReport parse_density_report(const std::string& text);
std::string format_plan(const CompressionPlan& plan);
CompressionPlan parse_plan(const std::string& text);

}  // namespace snet
