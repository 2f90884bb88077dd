//
// Copyright (c) 2026 the snet authors.
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include "snet/datagen.hpp"
#include "snet/netdef.hpp"

namespace snet {

inline constexpr double kPsnrCap = 100.0;

// 10*log10(peak^2/MSE) over all elements; identical images hit `cap`.
double psnr(const Tensor& a, const Tensor& b, double peak = 1.0, double cap = kPsnrCap);

// Mean local SSIM (Wang et al.): 11x11 Gaussian window sigma 1.5, valid
// region, C1=(K1*peak)^2, C2=(K2*peak)^2. Inputs are [C,H,W]; RGB is
// converted to Rec.601 luma first.
double ssim(const Tensor& a, const Tensor& b, int window = 11, double k1 = 0.01,
            double k2 = 0.03, double peak = 1.0, double sigma = 1.5);

struct BenchResult {
  double mean_sec = 0.0;
  double std_sec = 0.0;
  std::vector<double> reps_sec;
  int threads = 1;
};

// Times forward_interpolate only (2 untimed warmups, then `reps` >= 10 timed
// repetitions) on seeded random frames at the given resolution.
BenchResult bench_runtime(const Checkpoint& ckpt, int res, int reps);

struct EvalRecord {
  std::string model_id;
  std::string split;
  double psnr_mean = 0.0, psnr_std = 0.0;
  double ssim_mean = 0.0, ssim_std = 0.0;
  double runtime_mean_sec = -1.0;  // < 0 = not measured
  double params_m = 0.0;           // millions
};

enum class ReportFormat { text, csv, jsonl };

// Quality metrics of a checkpoint over a dataset split (per-sample PSNR/SSIM
// mean and std in ascending sequence order, parameter count). Runtime stays
// unmeasured; bench_runtime fills it separately.
EvalRecord evaluate_model(const Checkpoint& ckpt, const Dataset& ds, Split split,
                          const std::string& model_id);

// Deterministic function of the records: fixed column order, best value per
// column flagged ('*' in the text table, "best_*" fields in JSON-lines).
std::string emit_report(const std::vector<EvalRecord>& records, ReportFormat format);

std::vector<EvalRecord> parse_report_csv(const std::string& text);

}  // namespace snet
