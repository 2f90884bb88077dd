//
// Copyright (c) 2026 the snet authors.
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <functional>

#include "snet/tensor.hpp"

namespace snet {

// Compares the analytic gradient of the scalar-valued graph built by `f`
// against central finite differences, coordinate by coordinate. Returns
// max_i |analytic_i - fd_i| / max(1, |analytic_i|). NaN on either side of a
// comparison yields +inf so mismatches are never masked. `f` must be
// deterministic and rebuild its graph on every call.
double grad_check(const std::function<Tensor(const Tensor&)>& f, const Tensor& theta,
                  double h = 1e-4);

}  // namespace snet
