//
// Copyright (c) 2026 the snet authors.
// SPDX-License-Identifier: Apache-2.0
//
#include "snet/gradcheck.hpp"

#include <cmath>
#include <limits>

namespace snet {

double grad_check(const std::function<Tensor(const Tensor&)>& f, const Tensor& theta, double h) {
  Tensor leaf = Tensor::from_data(theta.shape(), theta.values(), true);
  Tensor loss = f(leaf);
  backward(loss);
  std::vector<double> analytic = leaf.grad_values();

  auto eval = [&](const std::vector<double>& data) {
    NoGradGuard ng;
    Tensor t = Tensor::from_data(theta.shape(), data, false);
    return f(t).value();
  };

  double worst = 0.0;
  std::vector<double> bumped = theta.values();
  for (size_t i = 0; i < bumped.size(); ++i) {
    const double orig = bumped[i];
    bumped[i] = orig + h;
    const double up = eval(bumped);
    bumped[i] = orig - h;
    const double down = eval(bumped);
    bumped[i] = orig;
    const double fd = (up - down) / (2.0 * h);
    const double a = analytic[i];
    double err;
    if (std::isnan(fd) || std::isnan(a)) {
      err = std::numeric_limits<double>::infinity();
    } else {
      err = std::fabs(a - fd) / std::max(1.0, std::fabs(a));
    }
    worst = std::max(worst, err);
  }
  return worst;
}

}  // namespace snet
