//
// Copyright (c) 2026 the snet authors.
// SPDX-License-Identifier: Apache-2.0
//
#include "snet/datagen.hpp"

#include <cmath>
#include <filesystem>
#include <sstream>

#include "snet/image_io.hpp"

namespace snet {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr int kWavesPerChannel = 6;
constexpr int kSupersample = 4;  // per axis
const double kTimes[5] = {0.0, 1.0, 1.5, 2.0, 3.0};
const char* kTimeTags[5] = {"0", "1", "15", "2", "3"};
}  // namespace

const char* to_string(MotionKind k) {
  switch (k) {
    case MotionKind::translate: return "translate";
    case MotionKind::rotate: return "rotate";
    case MotionKind::multi: return "multi";
    case MotionKind::zoom: return "zoom";
  }
  return "?";
}

MotionKind motion_kind_from_string(const std::string& s) {
  if (s == "translate") return MotionKind::translate;
  if (s == "rotate") return MotionKind::rotate;
  if (s == "multi") return MotionKind::multi;
  if (s == "zoom") return MotionKind::zoom;
  throw FormatError("unknown motion kind '" + s + "'");
}

const char* to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
  }
  return "?";
}

Split split_from_string(const std::string& s) {
  if (s == "train") return Split::train;
  if (s == "val") return Split::val;
  if (s == "test") return Split::test;
  throw FormatError("unknown split '" + s + "'");
}

namespace {

struct Wave {
  double fx, fy, phase, amp;
};

struct TextureWaves {
  std::vector<Wave> waves;
  double amp_sum = 0.0;

  double value(double x, double y) const {
    double s = 0.0;
    for (const Wave& w : waves) s += w.amp * std::sin(2.0 * kPi * (w.fx * x + w.fy * y) + w.phase);
    return 0.5 + 0.5 * s / amp_sum;  // exactly within [0,1]
  }
};

TextureWaves draw_texture(Rng& rng) {
  TextureWaves t;
  for (int k = 0; k < kWavesPerChannel; ++k) {
    Wave w;
    // Band-limited: wavelengths between 5 and 32 px.
    const double freq = std::exp(rng.uniform(std::log(1.0 / 32.0), std::log(1.0 / 5.0)));
    const double ang = rng.uniform(0.0, 2.0 * kPi);
    w.fx = freq * std::cos(ang);
    w.fy = freq * std::sin(ang);
    w.phase = rng.uniform(0.0, 2.0 * kPi);
    w.amp = rng.uniform(0.3, 1.0);
    t.amp_sum += w.amp;
    t.waves.push_back(w);
  }
  return t;
}

struct SceneObj {
  bool square = false;
  double cx = 0, cy = 0, radius = 0, vx = 0, vy = 0, spin = 0;
  std::vector<TextureWaves> tex;  // per channel
};

struct Scene {
  MotionMeta meta;
  int res = 0, channels = 1;
  std::vector<TextureWaves> bg;
  std::vector<SceneObj> objs;

  double value(int ch, double x, double y, double t) const {
    const double c = res / 2.0;
    switch (meta.kind) {
      case MotionKind::translate:
        return bg[static_cast<size_t>(ch)].value(x - meta.vx * t, y - meta.vy * t);
      case MotionKind::rotate: {
        const double ca = std::cos(meta.omega * t), sa = std::sin(meta.omega * t);
        const double dx = x - c, dy = y - c;
        return bg[static_cast<size_t>(ch)].value(ca * dx + sa * dy + c,
                                                 -sa * dx + ca * dy + c);
      }
      case MotionKind::zoom: {
        const double s = std::pow(meta.zoom, t);
        return bg[static_cast<size_t>(ch)].value((x - c) / s + c, (y - c) / s + c);
      }
      case MotionKind::multi: {
        // Later objects sit on top.
        for (size_t i = objs.size(); i-- > 0;) {
          const SceneObj& o = objs[i];
          double lx = x - (o.cx + o.vx * t), ly = y - (o.cy + o.vy * t);
          if (o.square) {
            const double ca = std::cos(o.spin * t), sa = std::sin(o.spin * t);
            const double rx = ca * lx + sa * ly, ry = -sa * lx + ca * ly;
            if (std::max(std::fabs(rx), std::fabs(ry)) <= o.radius)
              return o.tex[static_cast<size_t>(ch)].value(rx, ry);
          } else {
            if (lx * lx + ly * ly <= o.radius * o.radius)
              return o.tex[static_cast<size_t>(ch)].value(lx, ly);
          }
        }
        return bg[static_cast<size_t>(ch)].value(x - meta.vx * t, y - meta.vy * t);
      }
    }
    return 0.5;
  }
};

Scene build_scene(const MotionMeta& meta, int res, int channels) {
  Scene sc;
  sc.meta = meta;
  sc.res = res;
  sc.channels = channels;
  Rng rng = Rng::seeded(Rng::derive(meta.texture_seed, 0x7e37));
  for (int c = 0; c < channels; ++c) sc.bg.push_back(draw_texture(rng));
  if (meta.kind == MotionKind::multi) {
    // Two discs and a spinning square; speeds scale so the fastest object
    // moves exactly meta.magnitude px/frame.
    double raw[3];
    for (int i = 0; i < 3; ++i) raw[i] = rng.uniform(0.3, 1.0);
    double raw_max = std::max(raw[0], std::max(raw[1], raw[2]));
    for (int i = 0; i < 3; ++i) {
      SceneObj o;
      o.square = i == 2;
      o.cx = rng.uniform(0.25 * res, 0.75 * res);
      o.cy = rng.uniform(0.25 * res, 0.75 * res);
      o.radius = rng.uniform(res / 8.0, res / 5.0);
      const double speed = meta.magnitude * raw[i] / raw_max;
      const double ang = rng.uniform(0.0, 2.0 * kPi);
      o.vx = speed * std::cos(ang);
      o.vy = speed * std::sin(ang);
      o.spin = o.square ? rng.uniform(-0.1, 0.1) : 0.0;
      for (int c = 0; c < channels; ++c) o.tex.push_back(draw_texture(rng));
      sc.objs.push_back(std::move(o));
    }
  }
  return sc;
}

void check_res(int res, int channels) {
  if (res < 32 || res % 16 != 0)
    throw ShapeError("gen_sequence: res must be >= 32 and divisible by 16, got " +
                     std::to_string(res));
  if (channels != 1 && channels != 3)
    throw ShapeError("gen_sequence: channels must be 1 or 3");
}

Tensor render_frame(const Scene& sc, double t) {
  const int res = sc.res, channels = sc.channels;
  std::vector<double> data(static_cast<size_t>(channels) * res * res);
  const double inv_ss = 1.0 / (kSupersample * kSupersample);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < res; ++y) {
    for (int x = 0; x < res; ++x) {
      for (int c = 0; c < channels; ++c) {
        double acc = 0.0;
        for (int sy = 0; sy < kSupersample; ++sy) {
          const double qy = y + (sy + 0.5) / kSupersample;
          for (int sx = 0; sx < kSupersample; ++sx) {
            const double qx = x + (sx + 0.5) / kSupersample;
            acc += sc.value(c, qx, qy, t);
          }
        }
        // Straight onto the 8-bit grid; frames match their PNG form exactly.
        data[static_cast<size_t>((c * res + y) * res + x)] =
            quantize_unit(acc * inv_ss) / 255.0;
      }
    }
  }
  return Tensor::from_data({channels, res, res}, std::move(data), false);
}

}  // namespace

double scene_value(const MotionMeta& meta, int res, int channels, int channel, double x,
                   double y, double t) {
  Scene sc = build_scene(meta, res, channels);
  return sc.value(channel, x, y, t);
}

Quintuplet gen_sequence_from_meta(const MotionMeta& meta, int res, int channels) {
  check_res(res, channels);
  Scene sc = build_scene(meta, res, channels);
  Quintuplet q;
  q.meta = meta;
  for (int i = 0; i < 5; ++i) q.frames[static_cast<size_t>(i)] = render_frame(sc, kTimes[i]);
  return q;
}

Quintuplet gen_sequence(uint64_t seed, MotionKind kind, int res, int channels) {
  check_res(res, channels);
  Rng rng = Rng::seeded(Rng::derive(seed, 0x5eed));
  MotionMeta m;
  m.kind = kind;
  m.texture_seed = rng.next();
  // Log-uniform 0.5..8 px/frame: easy and hard motion regimes both appear.
  m.magnitude = std::exp(rng.uniform(std::log(0.5), std::log(8.0)));
  const double ang = rng.uniform(0.0, 2.0 * kPi);
  const double lever = res / 3.0;  // radius at which rotation/zoom hit `magnitude`
  switch (kind) {
    case MotionKind::translate:
      m.vx = m.magnitude * std::cos(ang);
      m.vy = m.magnitude * std::sin(ang);
      break;
    case MotionKind::rotate:
      m.omega = (rng.uniform() < 0.5 ? -1.0 : 1.0) * m.magnitude / lever;
      break;
    case MotionKind::zoom: {
      const double step = 1.0 + m.magnitude / lever;
      m.zoom = rng.uniform() < 0.5 ? step : 1.0 / step;
      break;
    }
    case MotionKind::multi: {
      const double drift = rng.uniform(0.2, 1.0);
      m.vx = drift * std::cos(ang);
      m.vy = drift * std::sin(ang);
      break;
    }
  }
  return gen_sequence_from_meta(m, res, channels);
}

std::vector<size_t> Dataset::split_indices(Split s) const {
  std::vector<size_t> out;
  for (size_t i = 0; i < manifest.seqs.size(); ++i)
    if (manifest.seqs[i].split == s) out.push_back(i);
  return out;
}

Dataset build_dataset(int64_t n, uint64_t seed, int res, int channels) {
  if (n < 10) throw StateError("build_dataset: need at least 10 sequences");
  check_res(res, channels);
  const int64_t nv = std::max<int64_t>(1, n / 10);
  const int64_t nt = std::max<int64_t>(1, n / 10);
  const int64_t ntr = n - nv - nt;

  Dataset ds;
  ds.manifest.seed = seed;
  ds.manifest.sequences = n;
  ds.manifest.res = res;
  ds.manifest.channels = channels;
  ds.manifest.seqs.resize(static_cast<size_t>(n));
  ds.seqs.resize(static_cast<size_t>(n));

  static const MotionKind kCycle[4] = {MotionKind::translate, MotionKind::rotate,
                                       MotionKind::multi, MotionKind::zoom};
#pragma omp parallel for schedule(dynamic)
  for (int64_t i = 0; i < n; ++i) {
    const uint64_t sseed = Rng::derive(seed, 1000 + static_cast<uint64_t>(i));
    Quintuplet q = gen_sequence(sseed, kCycle[i % 4], res, channels);
    SeqInfo info;
    info.seed = sseed;
    info.split = i < ntr ? Split::train : (i < ntr + nv ? Split::val : Split::test);
    info.meta = q.meta;
    ds.manifest.seqs[static_cast<size_t>(i)] = info;
    ds.seqs[static_cast<size_t>(i)] = std::move(q);
  }
  return ds;
}

std::string manifest_text(const DatasetManifest& m) {
  std::ostringstream os;
  os << "snet-dataset v1\n";
  os << "seed " << m.seed << "\n";
  os << "sequences " << m.sequences << "\n";
  os << "res " << m.res << "\n";
  os << "channels " << m.channels << "\n";
  for (size_t i = 0; i < m.seqs.size(); ++i) {
    const SeqInfo& s = m.seqs[i];
    os << "seq " << i << " " << to_string(s.meta.kind) << " " << s.seed << " "
       << to_string(s.split) << " tex " << s.meta.texture_seed << " vx "
       << format_double(s.meta.vx) << " vy " << format_double(s.meta.vy) << " omega "
       << format_double(s.meta.omega) << " zoom " << format_double(s.meta.zoom) << " mag "
       << format_double(s.meta.magnitude) << "\n";
  }
  return os.str();
}

DatasetManifest parse_dataset_manifest(const std::string& text) {
  DatasetManifest m;
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || trim(line) != "snet-dataset v1")
    throw FormatError("dataset manifest: missing header");
  while (std::getline(is, line)) {
    line = trim(line);
    if (line.empty()) continue;
    std::vector<std::string> tok;
    for (const auto& t : split(line, ' '))
      if (!t.empty()) tok.push_back(t);
    if (tok[0] == "seed" && tok.size() == 2) {
      m.seed = std::stoull(tok[1]);
    } else if (tok[0] == "sequences" && tok.size() == 2) {
      m.sequences = std::stoll(tok[1]);
    } else if (tok[0] == "res" && tok.size() == 2) {
      m.res = std::stoi(tok[1]);
    } else if (tok[0] == "channels" && tok.size() == 2) {
      m.channels = std::stoi(tok[1]);
    } else if (tok[0] == "seq" && tok.size() == 17) {
      SeqInfo s;
      s.meta.kind = motion_kind_from_string(tok[2]);
      s.seed = std::stoull(tok[3]);
      s.split = split_from_string(tok[4]);
      s.meta.texture_seed = std::stoull(tok[6]);
      s.meta.vx = parse_double(tok[8]);
      s.meta.vy = parse_double(tok[10]);
      s.meta.omega = parse_double(tok[12]);
      s.meta.zoom = parse_double(tok[14]);
      s.meta.magnitude = parse_double(tok[16]);
      m.seqs.push_back(s);
    } else {
      throw FormatError("dataset manifest: bad line '" + line + "'");
    }
  }
  if (static_cast<int64_t>(m.seqs.size()) != m.sequences)
    throw FormatError("dataset manifest: sequence count mismatch");
  return m;
}

void write_dataset(const Dataset& ds, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
  write_file(dir + "/manifest.txt", manifest_text(ds.manifest));
  for (size_t i = 0; i < ds.seqs.size(); ++i) {
    for (int f = 0; f < 5; ++f) {
      const std::string path =
          dir + "/seq" + std::to_string(i) + "_t" + kTimeTags[f] + ".png";
      write_frame(ds.seqs[i].frames[static_cast<size_t>(f)], path);
    }
  }
}

Dataset load_dataset(const std::string& dir) {
  Dataset ds;
  ds.manifest = parse_dataset_manifest(read_file(dir + "/manifest.txt"));
  ds.seqs.resize(ds.manifest.seqs.size());
  for (size_t i = 0; i < ds.manifest.seqs.size(); ++i) {
    Quintuplet q;
    q.meta = ds.manifest.seqs[i].meta;
    for (int f = 0; f < 5; ++f) {
      const std::string path =
          dir + "/seq" + std::to_string(i) + "_t" + kTimeTags[f] + ".png";
      q.frames[static_cast<size_t>(f)] = read_frame(path);
      const Shape& s = q.frames[static_cast<size_t>(f)].shape();
      if (s[0] != ds.manifest.channels || s[1] != ds.manifest.res || s[2] != ds.manifest.res)
        throw FormatError("dataset frame " + path + " has shape " + shape_to_string(s) +
                          ", expected manifest geometry");
    }
    ds.seqs[i] = std::move(q);
  }
  return ds;
}

Batch make_batch(const Dataset& ds, const std::vector<size_t>& idx) {
  if (idx.empty()) throw StateError("make_batch: empty index list");
  const int64_t c = ds.manifest.channels, r = ds.manifest.res;
  const int64_t b = static_cast<int64_t>(idx.size());
  const size_t plane = static_cast<size_t>(c * r * r);
  std::vector<double> frames(static_cast<size_t>(b) * 4 * plane);
  std::vector<double> gt(static_cast<size_t>(b) * plane);
  // Network inputs are the observed frames at t = 0,1,2,3.
  static const int kInputIdx[4] = {0, 1, 3, 4};
  for (int64_t i = 0; i < b; ++i) {
    const Quintuplet& q = ds.seqs.at(idx[static_cast<size_t>(i)]);
    for (int f = 0; f < 4; ++f) {
      const auto& v = q.frames[static_cast<size_t>(kInputIdx[f])].values();
      std::copy(v.begin(), v.end(),
                frames.begin() + (static_cast<size_t>(i) * 4 + static_cast<size_t>(f)) * plane);
    }
    const auto& g = q.frames[2].values();
    std::copy(g.begin(), g.end(), gt.begin() + static_cast<size_t>(i) * plane);
  }
  Batch out;
  out.frames = Tensor::from_data({b, 4 * c, r, r}, std::move(frames), false);
  out.gt = Tensor::from_data({b, c, r, r}, std::move(gt), false);
  return out;
}

}  // namespace snet
