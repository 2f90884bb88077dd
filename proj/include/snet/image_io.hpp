//
// Copyright (c) 2026 the snet authors.
// SPDX-License-Identifier: Apache-2.0
//
// 8-bit PNG I/O. The writer emits stored (uncompressed) deflate blocks so
// output bytes depend only on the pixel data, never on a zlib version; the
// reader inflates any standard non-interlaced 8-bit gray/RGB PNG.
//
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "snet/tensor.hpp"

namespace snet {

struct ImageU8 {
  int64_t width = 0;
  int64_t height = 0;
  int64_t channels = 1;  // 1 = gray, 3 = RGB
  std::vector<uint8_t> pixels;  // row-major, interleaved
};

std::string encode_png(const ImageU8& img);
void write_png(const ImageU8& img, const std::string& path);
ImageU8 decode_png(const std::string& bytes, const std::string& context);
ImageU8 read_png(const std::string& path);

// Round half away from zero onto the 8-bit grid; v must be in [0,1].
uint8_t quantize_unit(double v);

// Frame tensors are [C,H,W] with values in [0,1].
Tensor read_frame(const std::string& path);
void write_frame(const Tensor& frame, const std::string& path);

}  // namespace snet
