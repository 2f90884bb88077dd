//
// Copyright (c) 2026 the snet authors.
// SPDX-License-Identifier: Apache-2.0
//
// Network descriptions and weights. A NetworkSpec is the branch-structured
// list of 5-tuple conv layers ([C_out, C_in, q0, q1, q2]; 2D layers use
// [C_out, C_in, kH, kW, 1]); a Checkpoint binds a spec to parameter tensors.
// Specs are immutable after construction; rewrites return new specs.
//
#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "snet/tensor.hpp"

namespace snet {

struct CompressionPlan;  // pruner.hpp

enum class LayerKind { conv2d, conv3d };

const char* to_string(LayerKind k);
LayerKind layer_kind_from_string(const std::string& s);

struct LayerSpec {
  std::string id;
  LayerKind kind = LayerKind::conv2d;
  int64_t c_out = 0;
  int64_t c_in = 0;
  int64_t q0 = 0, q1 = 0, q2 = 0;
  std::string branch;
  bool prunable = true;
  bool has_bias = true;  // uniform across serialized networks; in-memory only

  int64_t weight_count() const { return c_out * c_in * q0 * q1 * q2; }
  int64_t param_count() const { return weight_count() + (has_bias ? c_out : 0); }
  Shape weight_shape() const;
  Shape bias_shape() const { return {c_out}; }
};

struct BranchDef {
  std::string id;
  bool removable = false;
};

// Pseudo-producer names usable in a layer's input list.
inline constexpr const char* kInputFrames = "@frames";  // 4*channels, 2D
inline constexpr const char* kInputStack = "@stack";    // channels, 5-frame time stack

struct NetworkSpec {
  std::vector<LayerSpec> layers;
  std::vector<BranchDef> branches;
  // consumer id -> ordered producer blocks (layer ids or pseudo inputs).
  std::map<std::string, std::vector<std::string>> inputs;
  std::set<std::string> removed_branches;
  std::set<std::string> pinned_in;   // C_in fixed to image-derived channels
  std::set<std::string> pinned_out;  // C_out fixed to image channels
  int64_t image_channels = 1;

  bool has_layer(const std::string& id) const;
  const LayerSpec& layer(const std::string& id) const;
  std::vector<std::string> consumers_of(const std::string& id) const;
  int64_t block_channels(const std::string& producer) const;

  // Channel compatibility along every edge plus structural invariants.
  // Throws ShapeError/FormatError with the offending layer named.
  void validate() const;

  // Canonical text form; layer lines are `id kind C_out C_in q0 q1 q2 branch
  // prunable`, one per layer, in order.
  std::string manifest() const;
  static NetworkSpec parse_manifest(const std::string& text);
};

struct TeacherKnobs {
  int64_t image_channels = 1;
  int64_t base_width = 16;        // U-Net level-0 width (doubles per level)
  int64_t bottleneck_width = 128; // extra conv at 1/4 resolution
  int64_t branchb_width = 16;
  int64_t fusion_width = 16;
  int64_t refine_width = 12;
};

// Two-branch interpolator: branchA is a 3-level U-Net synthesis branch,
// branchB a shallow auxiliary branch, fusion merges their candidates into
// the intermediate frame, refine3d adds a 3D-conv residual over the 5-frame
// stack. Default knobs land in the 150k-400k parameter range.
NetworkSpec build_teacher(const TeacherKnobs& knobs = {});

// Applies a compression plan: channel counts rewritten (round-to-nearest,
// minimum 1), removed branches dropped, channel compatibility restored.
// Identity plans reproduce the input spec layer-for-layer.
NetworkSpec build_from_plan(const NetworkSpec& teacher, const CompressionPlan& plan);

struct LayerParams {
  Tensor weight;
  Tensor bias;
};

struct CheckpointMeta {
  int64_t epoch = 0;
  uint64_t seed = 0;
  std::string phase = "init";
  std::vector<double> loss_curve;
};

struct Checkpoint {
  NetworkSpec spec;
  std::map<std::string, LayerParams> params;
  CheckpointMeta meta;

  std::vector<Tensor> ordered_params() const;       // weight,bias per layer
  std::vector<Tensor> prunable_weights() const;     // weights of prunable layers
  void zero_grads() const;
};

// Fresh fan-in uniform init (+-sqrt(1/(C_in*q0*q1*q2))), zero biases,
// deterministic in `seed`. Values are f32-representable so save/load is
// exact.
Checkpoint init_checkpoint(const NetworkSpec& spec, uint64_t seed);

// Rounds every parameter to its f32 value; trainers call this before
// returning so in-memory results match their serialized form bit-exactly.
void canonicalize_f32(Checkpoint& ckpt);

struct ForwardResult {
  Tensor out;           // I_out = intermediate + residual (elementwise exact)
  Tensor intermediate;  // fusion output
  Tensor residual;      // refine3d output
};

// frames: [N, 4*channels, H, W] with H, W divisible by 4 (U-Net depth).
ForwardResult forward_interpolate(const Checkpoint& ckpt, const Tensor& frames);

struct ParamCount {
  std::map<std::string, int64_t> per_layer;
  int64_t total = 0;
};
ParamCount count_params(const NetworkSpec& spec);

// Versioned binary container: magic "SNET", u32 version, length-prefixed
// manifest text (spec + meta), per-layer little-endian f32 weight/bias blobs
// in spec order, CRC32 trailer. Round-trips are byte-identical.
void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);
std::string checkpoint_bytes(const Checkpoint& ckpt);

// SHA-256 over the serialized f32 parameter blobs.
std::string param_fingerprint(const Checkpoint& ckpt);

inline constexpr double kPreluSlope = 0.25;

}  // namespace snet
