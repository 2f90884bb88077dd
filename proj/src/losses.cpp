//
// Copyright (c) 2026 the snet authors.
// SPDX-License-Identifier: Apache-2.0
//
#include "snet/losses.hpp"

#include <cmath>

namespace snet {

namespace {

void require_same_shape(const Tensor& a, const Tensor& b, const char* who) {
  if (a.shape() != b.shape())
    throw ShapeError(std::string(who) + ": shape mismatch " + shape_to_string(a.shape()) +
                     " vs " + shape_to_string(b.shape()));
}

Tensor blur_kernel() {
  // 5-tap binomial [1,4,6,4,1]/16, separable outer product.
  static const double v[5] = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};
  std::vector<double> k(25);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) k[i * 5 + j] = v[i] * v[j];
  return Tensor::from_data({1, 1, 5, 5}, std::move(k), false);
}

// Per-channel 5x5 binomial blur with reflect padding.
Tensor blur5(const Tensor& x, int stride) {
  Tensor k = blur_kernel();
  const int64_t c = x.dim(1);
  if (c == 1) return conv2d(x, k, Tensor(), stride, PadMode::reflect);
  std::vector<Tensor> chans;
  chans.reserve(static_cast<size_t>(c));
  for (int64_t i = 0; i < c; ++i)
    chans.push_back(conv2d(slice_axis(x, 1, i, 1), k, Tensor(), stride, PadMode::reflect));
  return concat(chans, 1);
}

Tensor pyramid_up(const Tensor& g) { return mul_scalar(blur5(zero_upsample2(g), 1), 4.0); }

void check_pyramid_size(const Tensor& img, int levels, const char* who) {
  if (img.ndim() != 4)
    throw ShapeError(std::string(who) + ": expected [N,C,H,W], got " +
                     shape_to_string(img.shape()));
  if (levels < 1) throw ShapeError(std::string(who) + ": levels must be >= 1");
  const int64_t h = img.dim(2), w = img.dim(3);
  const int64_t div = int64_t{1} << (levels - 1);
  if (h % div || w % div)
    throw ShapeError(std::string(who) + ": spatial extents " + shape_to_string(img.shape()) +
                     " must be divisible by " + std::to_string(div));
  if (levels > 1) {
    // The last blur runs at scale 1/2^(levels-2); reflect padding of 2 needs
    // at least 3 pixels there.
    const int64_t smallest_blurred = std::min(h, w) >> (levels - 2);
    if (smallest_blurred < 3)
      throw ShapeError(std::string(who) + ": image " + shape_to_string(img.shape()) +
                       " too small for " + std::to_string(levels) + " pyramid levels");
  }
}

}  // namespace

Tensor charbonnier(const Tensor& pred, const Tensor& gt, double eps) {
  require_same_shape(pred, gt, "charbonnier");
  if (!(eps > 0)) throw NumericError("charbonnier: eps must be positive");
  Tensor d = sub(pred, gt);
  return mean(snet::sqrt(add_scalar(mul(d, d), eps * eps)));
}

Tensor l1_norm(const std::vector<Tensor>& weights) {
  if (weights.empty()) return Tensor::scalar(0.0);
  Tensor acc = sum(abs(weights[0]));
  for (size_t i = 1; i < weights.size(); ++i) acc = add(acc, sum(abs(weights[i])));
  return acc;
}

Tensor prune_loss(const Tensor& pred, const Tensor& gt, const std::vector<Tensor>& weights,
                  double lambda, double eps) {
  if (lambda < 0) throw NumericError("prune_loss: lambda must be >= 0");
  return add(charbonnier(pred, gt, eps), mul_scalar(l1_norm(weights), lambda));
}

PyramidStack laplacian_pyramid(const Tensor& img, int levels) {
  check_pyramid_size(img, levels, "laplacian_pyramid");
  PyramidStack p;
  p.gaussians.push_back(img);
  for (int j = 1; j < levels; ++j) p.gaussians.push_back(blur5(p.gaussians.back(), 2));
  for (int j = 0; j + 1 < levels; ++j)
    p.levels.push_back(sub(p.gaussians[static_cast<size_t>(j)],
                           pyramid_up(p.gaussians[static_cast<size_t>(j) + 1])));
  p.levels.push_back(p.gaussians.back());
  return p;
}

Tensor pyramid_reconstruct(const PyramidStack& p) {
  Tensor acc = p.levels.back();
  for (size_t j = p.levels.size() - 1; j-- > 0;) acc = add(p.levels[j], pyramid_up(acc));
  return acc;
}

Tensor lap_loss(const Tensor& a, const Tensor& b, int levels) {
  require_same_shape(a, b, "lap_loss");
  check_pyramid_size(a, levels, "lap_loss");
  PyramidStack pa = laplacian_pyramid(a, levels);
  PyramidStack pb = laplacian_pyramid(b, levels);
  Tensor acc;
  for (int j = 0; j < levels; ++j) {
    Tensor term = mean(abs(sub(pa.levels[static_cast<size_t>(j)],
                               pb.levels[static_cast<size_t>(j)])));
    const double weight = std::ldexp(1.0, 2 * j);  // 2^(2j)
    term = mul_scalar(term, weight);
    acc = j == 0 ? term : add(acc, term);
  }
  return acc;
}

KdLoss kd_total_loss(const Tensor& student_out, const Tensor& gt, const Tensor& teacher_pred,
                     double alpha, int levels) {
  require_same_shape(student_out, gt, "kd_total_loss");
  require_same_shape(student_out, teacher_pred, "kd_total_loss");
  if (alpha < 0) throw NumericError("kd_total_loss: alpha must be >= 0");
  KdLoss out;
  out.stud = lap_loss(student_out, gt, levels);
  out.dist = lap_loss(teacher_pred.detach(), student_out, levels);
  out.total = add(mul_scalar(out.stud, alpha), out.dist);
  return out;
}

}  // namespace snet
