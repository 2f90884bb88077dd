//
// Copyright (c) 2026 the snet authors.
// SPDX-License-Identifier: Apache-2.0
//
// Synthetic quintuplet dataset. Scenes are analytic (band-limited sinusoid
// textures moved by closed-form warps, plus textured discs/squares for the
// multi-object kind), rendered with 4x4 supersampling at t = 0, 1, 1.5, 2, 3
// and quantized onto the 8-bit grid, so the t=1.5 ground truth is exact and
// in-memory frames match their PNG round-trip bit for bit.
//
#pragma once

#include <array>

#include "snet/tensor.hpp"

namespace snet {

enum class MotionKind { translate, rotate, multi, zoom };
enum class Split { train, val, test };

const char* to_string(MotionKind k);
MotionKind motion_kind_from_string(const std::string& s);
const char* to_string(Split s);
Split split_from_string(const std::string& s);

struct MotionMeta {
  MotionKind kind = MotionKind::translate;
  uint64_t texture_seed = 0;
  double vx = 0.0, vy = 0.0;  // px/frame (translate, and bg drift for multi)
  double omega = 0.0;         // rad/frame (rotate)
  double zoom = 1.0;          // scale factor per frame (zoom)
  double magnitude = 0.0;     // representative px/frame motion
};

// Frames at t = 0, 1, 1.5, 2, 3; frames[2] is the analytic ground truth.
struct Quintuplet {
  std::array<Tensor, 5> frames;
  MotionMeta meta;
};

// Renders the scene described by `meta` (pure function of meta, res,
// channels). Exposed separately so tests can pin velocities.
Quintuplet gen_sequence_from_meta(const MotionMeta& meta, int res, int channels);

// Draws motion parameters from `seed` (magnitudes log-uniform in 0.5..8
// px/frame) and renders.
Quintuplet gen_sequence(uint64_t seed, MotionKind kind, int res, int channels);

// Continuous (pre-quantization) scene value in [0,1]; test hook for the
// analytic-shift oracle.
double scene_value(const MotionMeta& meta, int res, int channels, int channel, double x,
                   double y, double t);

struct SeqInfo {
  uint64_t seed = 0;
  Split split = Split::train;
  MotionMeta meta;
};

struct DatasetManifest {
  int version = 1;
  uint64_t seed = 0;
  int64_t sequences = 0;
  int res = 0;
  int channels = 1;
  std::vector<SeqInfo> seqs;
};

struct Dataset {
  DatasetManifest manifest;
  std::vector<Quintuplet> seqs;

  std::vector<size_t> split_indices(Split s) const;
};

// Deterministic 80/10/10 split (val/test get at least one sequence each);
// requires n >= 10.
Dataset build_dataset(int64_t n, uint64_t seed, int res, int channels);

std::string manifest_text(const DatasetManifest& m);
DatasetManifest parse_dataset_manifest(const std::string& text);

// Frames as `seq{id}_t{0,1,15,2,3}.png` plus `manifest.txt` under dir.
void write_dataset(const Dataset& ds, const std::string& dir);
Dataset load_dataset(const std::string& dir);

struct Batch {
  Tensor frames;  // [B, 4C, H, W]: I0,I1,I2,I3 stacked on channels
  Tensor gt;      // [B, C, H, W]
};
Batch make_batch(const Dataset& ds, const std::vector<size_t>& idx);

}  // namespace snet
