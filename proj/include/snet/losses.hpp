//
// Copyright (c) 2026 the snet authors.
// SPDX-License-Identifier: Apache-2.0
//
// Training objectives. All losses are nonnegative scalars built from the
// differentiable primitives, so gradients flow wherever the inputs carry
// requires_grad.
//
#pragma once

#include "snet/ops.hpp"

namespace snet {

inline constexpr double kCharbonnierEps = 1e-3;
inline constexpr int kPyramidLevels = 5;
inline constexpr double kPruneLambda = 1e-4;
inline constexpr double kDistillAlpha = 0.1;

// mean over pixels of sqrt((pred-gt)^2 + eps^2); smooth everywhere, floor eps.
Tensor charbonnier(const Tensor& pred, const Tensor& gt, double eps = kCharbonnierEps);

// sum of |w| over the given weight tensors (biases are excluded by callers).
Tensor l1_norm(const std::vector<Tensor>& weights);

// charbonnier + lambda * l1_norm.
Tensor prune_loss(const Tensor& pred, const Tensor& gt, const std::vector<Tensor>& weights,
                  double lambda = kPruneLambda, double eps = kCharbonnierEps);

// Burt-Adelson pyramid: 5-tap binomial blur ([1,4,6,4,1]/16, reflect pad),
// downsample = blur + stride 2, upsample = zero-insert + blur x4 gain.
// levels[j] for j < n-1 holds Gauss_j - up(Gauss_{j+1}); the last level is
// the coarsest Gaussian, which makes the stack exactly invertible.
struct PyramidStack {
  std::vector<Tensor> levels;
  std::vector<Tensor> gaussians;
};
PyramidStack laplacian_pyramid(const Tensor& img, int levels);

// Reconstructs the input from a pyramid (test / verification path).
Tensor pyramid_reconstruct(const PyramidStack& p);

// sum_j 4^j * mean|Lap_j(A) - Lap_j(B)| over `levels` levels.
Tensor lap_loss(const Tensor& a, const Tensor& b, int levels = kPyramidLevels);

struct KdLoss {
  Tensor total;
  Tensor stud;
  Tensor dist;
};

// total = alpha * lap(I_out, I_gt) + lap(I_pred_teacher, I_out). The teacher
// prediction is detached: no gradient ever reaches teacher parameters.
KdLoss kd_total_loss(const Tensor& student_out, const Tensor& gt, const Tensor& teacher_pred,
                     double alpha = kDistillAlpha, int levels = kPyramidLevels);

}  // namespace snet
