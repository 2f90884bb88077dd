//
// Copyright (c) 2026 the snet authors.
// SPDX-License-Identifier: Apache-2.0
//
#include "snet/netdef.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

#include "snet/ops.hpp"
#include "snet/pruner.hpp"

namespace snet {

const char* to_string(LayerKind k) { return k == LayerKind::conv2d ? "conv2d" : "conv3d"; }

LayerKind layer_kind_from_string(const std::string& s) {
  if (s == "conv2d") return LayerKind::conv2d;
  if (s == "conv3d") return LayerKind::conv3d;
  throw FormatError("unknown layer kind '" + s + "'");
}

Shape LayerSpec::weight_shape() const {
  if (kind == LayerKind::conv2d) {
    if (q2 != 1)
      throw FormatError("layer " + id + ": conv2d must encode as [C_out,C_in,kH,kW,1]");
    return {c_out, c_in, q0, q1};
  }
  return {c_out, c_in, q0, q1, q2};
}

bool NetworkSpec::has_layer(const std::string& id) const {
  for (const auto& l : layers)
    if (l.id == id) return true;
  return false;
}

const LayerSpec& NetworkSpec::layer(const std::string& id) const {
  for (const auto& l : layers)
    if (l.id == id) return l;
  throw FormatError("unknown layer '" + id + "'");
}

std::vector<std::string> NetworkSpec::consumers_of(const std::string& id) const {
  std::vector<std::string> out;
  for (const auto& l : layers) {
    auto it = inputs.find(l.id);
    if (it == inputs.end()) continue;
    for (const auto& p : it->second)
      if (p == id) out.push_back(l.id);
  }
  return out;
}

int64_t NetworkSpec::block_channels(const std::string& producer) const {
  if (producer == kInputFrames) return 4 * image_channels;
  if (producer == kInputStack) return image_channels;
  return layer(producer).c_out;
}

void NetworkSpec::validate() const {
  if (image_channels < 1) throw FormatError("image_channels must be >= 1");
  std::set<std::string> branch_ids;
  for (const auto& b : branches)
    if (!branch_ids.insert(b.id).second) throw FormatError("duplicate branch '" + b.id + "'");
  for (const auto& r : removed_branches) {
    bool found = false;
    for (const auto& b : branches)
      if (b.id == r) {
        if (!b.removable) throw FormatError("branch '" + r + "' is not removable");
        found = true;
      }
    if (!found) throw FormatError("removed branch '" + r + "' does not exist");
  }
  std::set<std::string> ids;
  for (const auto& l : layers) {
    if (!ids.insert(l.id).second) throw FormatError("duplicate layer '" + l.id + "'");
    if (!branch_ids.count(l.branch))
      throw FormatError("layer " + l.id + " references unknown branch '" + l.branch + "'");
    if (removed_branches.count(l.branch))
      throw FormatError("layer " + l.id + " belongs to removed branch '" + l.branch + "'");
    if (l.c_out < 1 || l.c_in < 1 || l.q0 < 1 || l.q1 < 1 || l.q2 < 1)
      throw ShapeError("layer " + l.id + " has a zero-channel or zero-extent dimension");
    if (l.kind == LayerKind::conv2d && l.q2 != 1)
      throw FormatError("layer " + l.id + ": conv2d must have q2 == 1");
    if (l.weight_count() <= 0) throw ShapeError("layer " + l.id + ": empty weight tensor");
  }
  for (const auto& l : layers) {
    auto it = inputs.find(l.id);
    if (it == inputs.end() || it->second.empty())
      throw FormatError("layer " + l.id + " has no declared inputs");
    int64_t total = 0;
    for (const auto& p : it->second) {
      if (p != kInputFrames && p != kInputStack && !has_layer(p))
        throw FormatError("layer " + l.id + " consumes unknown producer '" + p + "'");
      total += block_channels(p);
    }
    if (total != l.c_in)
      throw ShapeError("layer " + l.id + ": C_in " + std::to_string(l.c_in) +
                       " does not match producer channels " + std::to_string(total));
  }
  for (const auto& id : pinned_in)
    if (!has_layer(id)) throw FormatError("pinned_in names unknown layer '" + id + "'");
  for (const auto& id : pinned_out) {
    if (!has_layer(id)) throw FormatError("pinned_out names unknown layer '" + id + "'");
    if (layer(id).c_out != image_channels)
      throw ShapeError("layer " + id + ": pinned output must have " +
                       std::to_string(image_channels) + " channels");
  }
}

std::string NetworkSpec::manifest() const {
  std::ostringstream os;
  os << "snet-spec v1\n";
  os << "channels " << image_channels << "\n";
  for (const auto& b : branches)
    os << "branch " << b.id << " removable=" << (b.removable ? 1 : 0) << "\n";
  for (const auto& r : removed_branches) os << "removed " << r << "\n";
  for (const auto& id : pinned_in) os << "pin_in " << id << "\n";
  for (const auto& id : pinned_out) os << "pin_out " << id << "\n";
  for (const auto& l : layers) {
    auto it = inputs.find(l.id);
    os << "input " << l.id;
    if (it != inputs.end())
      for (const auto& p : it->second) os << " " << p;
    os << "\n";
  }
  for (const auto& l : layers) {
    os << l.id << " " << to_string(l.kind) << " " << l.c_out << " " << l.c_in << " " << l.q0
       << " " << l.q1 << " " << l.q2 << " " << l.branch << " " << (l.prunable ? 1 : 0) << "\n";
  }
  return os.str();
}

NetworkSpec NetworkSpec::parse_manifest(const std::string& text) {
  NetworkSpec spec;
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || trim(line) != "snet-spec v1")
    throw FormatError("manifest: missing 'snet-spec v1' header");
  while (std::getline(is, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> tok;
    for (const auto& t : split(line, ' '))
      if (!t.empty()) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok[0] == "channels" && tok.size() == 2) {
      spec.image_channels = std::stoll(tok[1]);
    } else if (tok[0] == "branch" && tok.size() == 3) {
      BranchDef b;
      b.id = tok[1];
      if (tok[2] == "removable=1")
        b.removable = true;
      else if (tok[2] == "removable=0")
        b.removable = false;
      else
        throw FormatError("manifest: bad branch line '" + line + "'");
      spec.branches.push_back(b);
    } else if (tok[0] == "removed" && tok.size() == 2) {
      spec.removed_branches.insert(tok[1]);
    } else if (tok[0] == "pin_in" && tok.size() == 2) {
      spec.pinned_in.insert(tok[1]);
    } else if (tok[0] == "pin_out" && tok.size() == 2) {
      spec.pinned_out.insert(tok[1]);
    } else if (tok[0] == "input" && tok.size() >= 2) {
      std::vector<std::string> prods(tok.begin() + 2, tok.end());
      spec.inputs[tok[1]] = prods;
    } else if (tok.size() == 9) {
      LayerSpec l;
      l.id = tok[0];
      l.kind = layer_kind_from_string(tok[1]);
      l.c_out = std::stoll(tok[2]);
      l.c_in = std::stoll(tok[3]);
      l.q0 = std::stoll(tok[4]);
      l.q1 = std::stoll(tok[5]);
      l.q2 = std::stoll(tok[6]);
      l.branch = tok[7];
      l.prunable = tok[8] == "1";
      spec.layers.push_back(l);
    } else {
      throw FormatError("manifest: unrecognized line '" + line + "'");
    }
  }
  spec.validate();
  return spec;
}

NetworkSpec build_teacher(const TeacherKnobs& k) {
  if (k.image_channels < 1) throw ShapeError("build_teacher: image_channels must be >= 1");
  if (k.branchb_width == 0)
    throw ShapeError("build_teacher: branchB width 0 is not allowed; branches are removed "
                     "only by pruning");
  if (k.base_width < 1 || k.bottleneck_width < 1 || k.branchb_width < 1 ||
      k.fusion_width < 1 || k.refine_width < 1)
    throw ShapeError("build_teacher: widths must be positive");

  const int64_t c = k.image_channels, w = k.base_width, bw = k.bottleneck_width,
                wb = k.branchb_width, wf = k.fusion_width, wr = k.refine_width;
  NetworkSpec s;
  s.image_channels = c;
  s.branches = {{"branchA", false}, {"branchB", true}, {"fusion", false}, {"refine3d", false}};

  auto l2 = [](std::string id, int64_t co, int64_t ci, std::string br) {
    LayerSpec l;
    l.id = std::move(id);
    l.kind = LayerKind::conv2d;
    l.c_out = co;
    l.c_in = ci;
    l.q0 = 3;
    l.q1 = 3;
    l.q2 = 1;
    l.branch = std::move(br);
    return l;
  };
  auto l3 = [](std::string id, int64_t co, int64_t ci, int64_t q0, std::string br) {
    LayerSpec l;
    l.id = std::move(id);
    l.kind = LayerKind::conv3d;
    l.c_out = co;
    l.c_in = ci;
    l.q0 = q0;
    l.q1 = 3;
    l.q2 = 3;
    l.branch = std::move(br);
    return l;
  };

  s.layers = {
      l2("a_enc0", w, 4 * c, "branchA"),
      l2("a_enc1", 2 * w, w, "branchA"),
      l2("a_enc2", 4 * w, 2 * w, "branchA"),
      l2("a_enc3", bw, 4 * w, "branchA"),
      l2("a_dec1", 2 * w, bw + 2 * w, "branchA"),
      l2("a_dec0", w, 2 * w + w, "branchA"),
      l2("a_head", c, w, "branchA"),
      l2("b_conv0", wb, 4 * c, "branchB"),
      l2("b_conv1", wb, wb, "branchB"),
      l2("b_head", c, wb, "branchB"),
      l2("f_conv0", wf, 2 * c, "fusion"),
      l2("f_conv1", wf, wf, "fusion"),
      l2("f_head", c, wf, "fusion"),
      l3("r_conv0", wr, c, 3, "refine3d"),
      l3("r_conv1", c, wr, 5, "refine3d"),
  };
  s.inputs = {
      {"a_enc0", {kInputFrames}},
      {"a_enc1", {"a_enc0"}},
      {"a_enc2", {"a_enc1"}},
      {"a_enc3", {"a_enc2"}},
      {"a_dec1", {"a_enc3", "a_enc1"}},
      {"a_dec0", {"a_dec1", "a_enc0"}},
      {"a_head", {"a_dec0"}},
      {"b_conv0", {kInputFrames}},
      {"b_conv1", {"b_conv0"}},
      {"b_head", {"b_conv1"}},
      {"f_conv0", {"a_head", "b_head"}},
      {"f_conv1", {"f_conv0"}},
      {"f_head", {"f_conv1"}},
      {"r_conv0", {kInputStack}},
      {"r_conv1", {"r_conv0"}},
  };
  s.pinned_in = {"a_enc0", "b_conv0", "r_conv0"};
  s.pinned_out = {"a_head", "b_head", "f_head", "r_conv1"};
  s.validate();
  return s;
}

NetworkSpec build_from_plan(const NetworkSpec& src, const CompressionPlan& plan) {
  for (const auto& [id, r] : plan.ratios) {
    if (!src.has_layer(id)) throw FormatError("plan names unknown layer '" + id + "'");
    if (!(r > 0.0) || r > 1.0)
      throw FormatError("plan ratio for " + id + " must be in (0,1], got " + format_double(r));
  }
  std::set<std::string> removed = src.removed_branches;
  for (const auto& b : plan.removed_branches) {
    bool ok = false;
    for (const auto& bd : src.branches) ok |= (bd.id == b && bd.removable);
    if (!ok) throw FormatError("plan removes branch '" + b + "' which is not removable");
    removed.insert(b);
  }
  auto live = [&](const LayerSpec& l) { return !removed.count(l.branch); };
  for (const auto& l : src.layers) {
    if (live(l) && l.prunable && !plan.ratios.count(l.id))
      throw FormatError("plan does not cover prunable layer '" + l.id + "'");
  }

  // Each consumer's input ratio drives its producers' output channels; a
  // producer feeding several consumers (U-Net skips) takes their mean vote.
  std::map<std::string, int64_t> new_cout;
  for (const auto& m : src.layers) {
    if (!live(m)) continue;
    if (src.pinned_out.count(m.id)) {
      new_cout[m.id] = m.c_out;
      continue;
    }
    double vote_sum = 0.0;
    int votes = 0;
    for (const auto& c : src.consumers_of(m.id)) {
      if (!live(src.layer(c))) continue;
      auto it = plan.ratios.find(c);
      vote_sum += it == plan.ratios.end() ? 1.0 : it->second;
      ++votes;
    }
    if (votes == 0)
      throw FormatError("layer " + m.id + " has no live consumer and no pinned output");
    new_cout[m.id] = std::max<int64_t>(1, std::llround(vote_sum / votes * m.c_out));
  }

  NetworkSpec out;
  out.image_channels = src.image_channels;
  out.branches = src.branches;
  out.removed_branches = removed;
  for (const auto& l : src.layers) {
    if (!live(l)) continue;
    LayerSpec nl = l;
    nl.c_out = new_cout.at(l.id);
    std::vector<std::string> prods;
    int64_t cin = 0;
    for (const auto& p : src.inputs.at(l.id)) {
      if (p != kInputFrames && p != kInputStack && !live(src.layer(p))) continue;
      prods.push_back(p);
      if (p == kInputFrames || p == kInputStack)
        cin += out.image_channels * (p == std::string(kInputFrames) ? 4 : 1);
      else
        cin += new_cout.at(p);
    }
    if (prods.empty())
      throw ShapeError("layer " + l.id + " would lose all inputs under this plan");
    nl.c_in = cin;
    out.layers.push_back(nl);
    out.inputs[nl.id] = prods;
  }
  for (const auto& id : src.pinned_in)
    if (out.has_layer(id)) out.pinned_in.insert(id);
  for (const auto& id : src.pinned_out)
    if (out.has_layer(id)) out.pinned_out.insert(id);
  out.validate();
  return out;
}

std::vector<Tensor> Checkpoint::ordered_params() const {
  std::vector<Tensor> out;
  for (const auto& l : spec.layers) {
    const auto& p = params.at(l.id);
    out.push_back(p.weight);
    out.push_back(p.bias);
  }
  return out;
}

std::vector<Tensor> Checkpoint::prunable_weights() const {
  std::vector<Tensor> out;
  for (const auto& l : spec.layers)
    if (l.prunable) out.push_back(params.at(l.id).weight);
  return out;
}

void Checkpoint::zero_grads() const {
  for (const auto& l : spec.layers) {
    Tensor w = params.at(l.id).weight;
    Tensor b = params.at(l.id).bias;
    w.zero_grad();
    b.zero_grad();
  }
}

Checkpoint init_checkpoint(const NetworkSpec& spec, uint64_t seed) {
  spec.validate();
  Checkpoint ckpt;
  ckpt.spec = spec;
  ckpt.meta.seed = seed;
  ckpt.meta.phase = "init";
  Rng rng = Rng::seeded(Rng::derive(seed, 0xC0DE));
  for (const auto& l : spec.layers) {
    const double bound = std::sqrt(1.0 / static_cast<double>(l.c_in * l.q0 * l.q1 * l.q2));
    Shape ws = l.weight_shape();
    std::vector<double> w(static_cast<size_t>(shape_numel(ws)));
    for (double& v : w) v = static_cast<double>(static_cast<float>(rng.uniform(-bound, bound)));
    LayerParams p;
    p.weight = Tensor::from_data(ws, std::move(w), true);
    p.bias = Tensor::zeros(l.bias_shape(), true);
    ckpt.params.emplace(l.id, std::move(p));
  }
  return ckpt;
}

void canonicalize_f32(Checkpoint& ckpt) {
  for (const auto& l : ckpt.spec.layers) {
    for (Tensor t : {ckpt.params.at(l.id).weight, ckpt.params.at(l.id).bias}) {
      for (double& v : t.leaf_values()) v = static_cast<double>(static_cast<float>(v));
    }
  }
}

ForwardResult forward_interpolate(const Checkpoint& ckpt, const Tensor& frames) {
  const NetworkSpec& spec = ckpt.spec;
  for (const char* id : {"a_enc0", "a_enc1", "a_enc2", "a_enc3", "a_dec1", "a_dec0", "a_head",
                         "f_conv0", "f_conv1", "f_head", "r_conv0", "r_conv1"}) {
    if (!spec.has_layer(id))
      throw StateError(std::string("forward_interpolate: spec lacks layer '") + id + "'");
  }
  if (frames.ndim() != 4)
    throw ShapeError("forward_interpolate: frames must be [N,4C,H,W], got " +
                     shape_to_string(frames.shape()));
  const int64_t c = spec.image_channels;
  if (frames.dim(1) != 4 * c)
    throw ShapeError("forward_interpolate: expected " + std::to_string(4 * c) +
                     " stacked channels, got " + shape_to_string(frames.shape()));
  const int64_t h = frames.dim(2), w = frames.dim(3);
  if (h % 4 != 0 || w % 4 != 0 || h < 8 || w < 8)
    throw ShapeError("forward_interpolate: spatial extents must be divisible by 4 and >= 8, "
                     "got " + shape_to_string(frames.shape()));

  auto conv = [&](const char* id, const Tensor& x) {
    const auto& p = ckpt.params.at(id);
    return conv2d(x, p.weight, p.bias, 1, PadMode::reflect);
  };
  auto act = [&](const Tensor& x) { return prelu(x, kPreluSlope); };

  // branchA: 3-level U-Net with an extra bottleneck conv at 1/4 resolution.
  Tensor x0 = act(conv("a_enc0", frames));
  Tensor x1 = act(conv("a_enc1", avg_pool2(x0)));
  Tensor x2 = act(conv("a_enc2", avg_pool2(x1)));
  Tensor x3 = act(conv("a_enc3", x2));
  Tensor d1 = act(conv("a_dec1", concat({bilinear_resize(x3, 2.0), x1}, 1)));
  Tensor d0 = act(conv("a_dec0", concat({bilinear_resize(d1, 2.0), x0}, 1)));
  Tensor cand_a = conv("a_head", d0);

  // Fusion of the live branch candidates into the intermediate frame.
  Tensor fused_in = cand_a;
  if (spec.has_layer("b_conv0")) {
    Tensor y0 = act(conv("b_conv0", frames));
    Tensor y1 = act(conv("b_conv1", y0));
    Tensor cand_b = conv("b_head", y1);
    fused_in = concat({cand_a, cand_b}, 1);
  }
  Tensor z = act(conv("f_conv0", fused_in));
  z = act(conv("f_conv1", z));
  Tensor intermediate = conv("f_head", z);

  // refine3d: textural residual over the 5-frame stack.
  std::vector<Tensor> singles;
  for (int i = 0; i < 4; ++i) singles.push_back(slice_axis(frames, 1, i * c, c));
  Tensor stack =
      stack_time({singles[0], singles[1], intermediate, singles[2], singles[3]});
  const auto& r0 = ckpt.params.at("r_conv0");
  const auto& r1 = ckpt.params.at("r_conv1");
  Tensor u = prelu(conv3d(stack, r0.weight, r0.bias, 1, PadMode::reflect, true), kPreluSlope);
  Tensor rr = conv3d(u, r1.weight, r1.bias, 1, PadMode::reflect, false);
  Tensor residual = reshape(rr, {frames.dim(0), c, h, w});

  ForwardResult res;
  res.intermediate = intermediate;
  res.residual = residual;
  res.out = add(intermediate, residual);
  return res;
}

ParamCount count_params(const NetworkSpec& spec) {
  ParamCount pc;
  for (const auto& l : spec.layers) {
    pc.per_layer[l.id] = l.param_count();
    pc.total += l.param_count();
  }
  return pc;
}

namespace {

void put_u32le(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_u64le(std::string& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
uint32_t get_u32le(const std::string& s, size_t off) {
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(static_cast<unsigned char>(s[off + i])) << (8 * i);
  return v;
}
uint64_t get_u64le(const std::string& s, size_t off) {
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(static_cast<unsigned char>(s[off + i])) << (8 * i);
  return v;
}

void append_f32_blob(std::string& out, const std::vector<double>& values) {
  for (double d : values) {
    float f = static_cast<float>(d);
    uint32_t bits;
    std::memcpy(&bits, &f, 4);
    put_u32le(out, bits);
  }
}

std::vector<double> read_f32_blob(const std::string& s, size_t off, size_t count) {
  std::vector<double> out(count);
  for (size_t i = 0; i < count; ++i) {
    uint32_t bits = get_u32le(s, off + 4 * i);
    float f;
    std::memcpy(&f, &bits, 4);
    out[i] = static_cast<double>(f);
  }
  return out;
}

std::string meta_block(const CheckpointMeta& m) {
  std::ostringstream os;
  os << "meta epoch " << m.epoch << "\n";
  os << "meta seed " << m.seed << "\n";
  os << "meta phase " << m.phase << "\n";
  if (!m.loss_curve.empty()) {
    os << "meta loss";
    for (double v : m.loss_curve) os << " " << format_double(v);
    os << "\n";
  }
  return os.str();
}

std::string param_blob(const Checkpoint& ckpt) {
  std::string blob;
  for (const auto& l : ckpt.spec.layers) {
    auto it = ckpt.params.find(l.id);
    if (it == ckpt.params.end())
      throw FormatError("checkpoint missing params for layer '" + l.id + "'");
    if (it->second.weight.shape() != l.weight_shape() ||
        it->second.bias.shape() != l.bias_shape())
      throw ShapeError("checkpoint params for layer '" + l.id + "' do not match its spec");
    append_f32_blob(blob, it->second.weight.values());
    append_f32_blob(blob, it->second.bias.values());
  }
  return blob;
}

constexpr char kMagic[4] = {'S', 'N', 'E', 'T'};
constexpr uint32_t kCheckpointVersion = 1;

}  // namespace

std::string checkpoint_bytes(const Checkpoint& ckpt) {
  std::string manifest = ckpt.spec.manifest() + meta_block(ckpt.meta);
  std::string out(kMagic, 4);
  put_u32le(out, kCheckpointVersion);
  put_u64le(out, manifest.size());
  out += manifest;
  out += param_blob(ckpt);
  uint32_t crc = static_cast<uint32_t>(
      ::crc32(0, reinterpret_cast<const unsigned char*>(out.data()), static_cast<uInt>(out.size())));
  put_u32le(out, crc);
  return out;
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  write_file(path, checkpoint_bytes(ckpt));
}

Checkpoint load_checkpoint(const std::string& path) {
  std::string s = read_file(path);
  if (s.size() < 20) throw FormatError("checkpoint truncated: " + path);
  if (std::memcmp(s.data(), kMagic, 4) != 0)
    throw FormatError("checkpoint has bad magic bytes: " + path);
  uint32_t version = get_u32le(s, 4);
  if (version != kCheckpointVersion)
    throw FormatError("checkpoint version mismatch: got " + std::to_string(version) +
                      ", expected " + std::to_string(kCheckpointVersion));
  uint64_t mlen = get_u64le(s, 8);
  if (16 + mlen + 4 > s.size()) throw FormatError("checkpoint truncated: " + path);
  uint32_t stored_crc = get_u32le(s, s.size() - 4);
  uint32_t crc = static_cast<uint32_t>(::crc32(
      0, reinterpret_cast<const unsigned char*>(s.data()), static_cast<uInt>(s.size() - 4)));
  if (crc != stored_crc) throw FormatError("checkpoint checksum failure: " + path);

  std::string manifest = s.substr(16, mlen);
  // Split meta lines from the spec manifest.
  std::string spec_text;
  CheckpointMeta meta;
  for (const auto& line : split(manifest, '\n')) {
    std::string t = trim(line);
    if (t.rfind("meta ", 0) == 0) {
      std::vector<std::string> tok;
      for (const auto& x : split(t, ' '))
        if (!x.empty()) tok.push_back(x);
      if (tok.size() >= 3 && tok[1] == "epoch") meta.epoch = std::stoll(tok[2]);
      else if (tok.size() >= 3 && tok[1] == "seed") meta.seed = std::stoull(tok[2]);
      else if (tok.size() >= 3 && tok[1] == "phase") meta.phase = tok[2];
      else if (tok.size() >= 2 && tok[1] == "loss") {
        for (size_t i = 2; i < tok.size(); ++i) meta.loss_curve.push_back(parse_double(tok[i]));
      } else {
        throw FormatError("checkpoint: bad meta line '" + t + "'");
      }
    } else {
      spec_text += line;
      spec_text += "\n";
    }
  }
  Checkpoint ckpt;
  ckpt.spec = NetworkSpec::parse_manifest(spec_text);
  ckpt.meta = meta;

  size_t off = 16 + mlen;
  size_t expect = 0;
  for (const auto& l : ckpt.spec.layers)
    expect += static_cast<size_t>(l.weight_count() + l.c_out) * 4;
  if (off + expect + 4 != s.size())
    throw FormatError("checkpoint truncated: parameter section has " +
                      std::to_string(s.size() - off - 4) + " bytes, expected " +
                      std::to_string(expect));
  for (const auto& l : ckpt.spec.layers) {
    LayerParams p;
    size_t wc = static_cast<size_t>(l.weight_count());
    p.weight = Tensor::from_data(l.weight_shape(), read_f32_blob(s, off, wc), true);
    off += wc * 4;
    size_t bc = static_cast<size_t>(l.c_out);
    p.bias = Tensor::from_data(l.bias_shape(), read_f32_blob(s, off, bc), true);
    off += bc * 4;
    ckpt.params.emplace(l.id, std::move(p));
  }
  return ckpt;
}

std::string param_fingerprint(const Checkpoint& ckpt) {
  std::string blob = param_blob(ckpt);
  return sha256_hex(blob.data(), blob.size());
}

}  // namespace snet
