//
// Copyright (c) 2026 the snet authors.
// SPDX-License-Identifier: Apache-2.0
//
// Differentiable primitives. All ops are pure: they return fresh tensors and
// never mutate inputs. Binary ops accept equal shapes or a scalar (1-element)
// operand; anything else is a ShapeError.
//
#pragma once

#include "snet/tensor.hpp"

namespace snet {

enum class PadMode { zero, reflect };

// Same-padding 2D convolution, NCHW input, [C_out,C_in,kH,kW] weight, odd
// kernel extents. `bias` may be undefined. Output H' = (H+2p-k)/stride + 1
// with p = (k-1)/2. Inputs are checked finite.
Tensor conv2d(const Tensor& input, const Tensor& weight, const Tensor& bias, int stride,
              PadMode pad);

// 3D convolution over [N,C,T,H,W] with [C_out,C_in,q0,q1,q2] weight. Spatial
// axes are same-padded and strided like conv2d; the temporal axis has stride
// 1 and is same-padded when `time_same_pad` (q0 odd), valid otherwise.
Tensor conv3d(const Tensor& input, const Tensor& weight, const Tensor& bias, int stride,
              PadMode pad, bool time_same_pad = true);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor add_scalar(const Tensor& x, double c);
Tensor mul_scalar(const Tensor& x, double c);

Tensor prelu(const Tensor& x, const Tensor& slope);  // slope: scalar tensor
Tensor prelu(const Tensor& x, double slope);

// Half-pixel bilinear resize on the last two axes. factor must produce
// integral output extents (2.0 and 0.5 are the intended uses; they are exact
// inverses on constant images).
Tensor bilinear_resize(const Tensor& x, double factor);

// 2x2 mean pooling; spatial extents must be even.
Tensor avg_pool2(const Tensor& x);

// Zero-insertion x2 upsampling on the last two axes (pyramid expansion).
Tensor zero_upsample2(const Tensor& x);

Tensor concat(const std::vector<Tensor>& xs, size_t axis);
Tensor slice_axis(const Tensor& x, size_t axis, int64_t start, int64_t len);
Tensor reshape(const Tensor& x, const Shape& shape);

// [N,C,H,W] x K -> [N,C,K,H,W]
Tensor stack_time(const std::vector<Tensor>& frames);

Tensor sum(const Tensor& x);
Tensor mean(const Tensor& x);
Tensor abs(const Tensor& x);
Tensor sqrt(const Tensor& x);  // strictly positive inputs

}  // namespace snet
