//
// Copyright (c) 2026 the snet authors.
// SPDX-License-Identifier: Apache-2.0
//
#include "snet/ops.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace snet {

namespace {

inline int64_t reflect_idx(int64_t i, int64_t n) {
  if (i < 0) return -i;
  if (i >= n) return 2 * n - 2 - i;
  return i;
}

// Pads each HxW plane to (H+2ph)x(W+2pw). Materializing the padded buffer
// keeps the convolution inner loops branch-free.
std::vector<double> pad_planes_2d(const double* x, int64_t planes, int64_t h, int64_t w,
                                  int64_t ph, int64_t pw, PadMode mode) {
  const int64_t hp = h + 2 * ph, wp = w + 2 * pw;
  std::vector<double> out(static_cast<size_t>(planes * hp * wp), 0.0);
#pragma omp parallel for schedule(static)
  for (int64_t p = 0; p < planes; ++p) {
    const double* src = x + p * h * w;
    double* dst = out.data() + p * hp * wp;
    for (int64_t r = 0; r < hp; ++r) {
      int64_t sr = r - ph;
      if (mode == PadMode::reflect) sr = reflect_idx(sr, h);
      if (sr < 0 || sr >= h) continue;  // zero rows stay zero
      const double* srow = src + sr * w;
      double* drow = dst + r * wp;
      for (int64_t c = 0; c < wp; ++c) {
        int64_t sc = c - pw;
        if (mode == PadMode::reflect) sc = reflect_idx(sc, w);
        if (sc < 0 || sc >= w) continue;
        drow[c] = srow[sc];
      }
    }
  }
  return out;
}

// Adds each padded-plane gradient back onto the source plane, folding
// reflected cells onto the pixels they mirror.
void unpad_accumulate_2d(const double* gpad, double* gx, int64_t planes, int64_t h, int64_t w,
                         int64_t ph, int64_t pw, PadMode mode) {
#pragma omp parallel for schedule(static)
  for (int64_t p = 0; p < planes; ++p) {
    const int64_t hp = h + 2 * ph, wp = w + 2 * pw;
    const double* src = gpad + p * hp * wp;
    double* dst = gx + p * h * w;
    for (int64_t r = 0; r < hp; ++r) {
      int64_t sr = r - ph;
      if (mode == PadMode::reflect) sr = reflect_idx(sr, h);
      if (sr < 0 || sr >= h) continue;
      const double* srow = src + r * wp;
      double* drow = dst + sr * w;
      for (int64_t c = 0; c < wp; ++c) {
        int64_t sc = c - pw;
        if (mode == PadMode::reflect) sc = reflect_idx(sc, w);
        if (sc < 0 || sc >= w) continue;
        drow[sc] += srow[c];
      }
    }
  }
}

void require(bool cond, const std::string& msg) {
  if (!cond) throw ShapeError(msg);
}

}  // namespace

Tensor conv2d(const Tensor& input, const Tensor& weight, const Tensor& bias, int stride,
              PadMode pad) {
  require(input.ndim() == 4, "conv2d: input must be [N,C,H,W], got " +
                                 shape_to_string(input.shape()));
  require(weight.ndim() == 4, "conv2d: weight must be [C_out,C_in,kH,kW], got " +
                                  shape_to_string(weight.shape()));
  const int64_t n = input.dim(0), ci = input.dim(1), h = input.dim(2), w = input.dim(3);
  const int64_t co = weight.dim(0), kh = weight.dim(2), kw = weight.dim(3);
  if (weight.dim(1) != ci)
    throw ShapeError("conv2d: channel mismatch, input " + shape_to_string(input.shape()) +
                     " vs weight " + shape_to_string(weight.shape()));
  require(kh % 2 == 1 && kw % 2 == 1, "conv2d: kernel extents must be odd, got " +
                                          shape_to_string(weight.shape()));
  require(stride >= 1, "conv2d: stride must be >= 1");
  if (bias.defined())
    require(bias.ndim() == 1 && bias.dim(0) == co,
            "conv2d: bias shape " + shape_to_string(bias.shape()) + " must be [" +
                std::to_string(co) + "]");
  input.check_finite("conv2d input");
  weight.check_finite("conv2d weight");
  if (bias.defined()) bias.check_finite("conv2d bias");

  const int64_t ph = (kh - 1) / 2, pw = (kw - 1) / 2;
  if (pad == PadMode::reflect)
    require(ph <= h - 1 && pw <= w - 1,
            "conv2d: reflect padding needs extent > pad, input " +
                shape_to_string(input.shape()) + " kernel " + shape_to_string(weight.shape()));
  const int64_t s = stride;
  const int64_t hp = h + 2 * ph, wp = w + 2 * pw;
  const int64_t ho = (hp - kh) / s + 1, wo = (wp - kw) / s + 1;

  std::vector<double> xpad = pad_planes_2d(input.values().data(), n * ci, h, w, ph, pw, pad);
  std::vector<double> out(static_cast<size_t>(n * co * ho * wo), 0.0);
  const double* wd = weight.values().data();
  const double* bd = bias.defined() ? bias.values().data() : nullptr;

#pragma omp parallel for collapse(2) schedule(static)
  for (int64_t in = 0; in < n; ++in) {
    for (int64_t oc = 0; oc < co; ++oc) {
      double* oplane = out.data() + (in * co + oc) * ho * wo;
      if (bd) std::fill(oplane, oplane + ho * wo, bd[oc]);
      for (int64_t ic = 0; ic < ci; ++ic) {
        const double* iplane = xpad.data() + (in * ci + ic) * hp * wp;
        const double* wplane = wd + (oc * ci + ic) * kh * kw;
        for (int64_t r = 0; r < kh; ++r) {
          for (int64_t c = 0; c < kw; ++c) {
            const double wv = wplane[r * kw + c];
            for (int64_t oh = 0; oh < ho; ++oh) {
              const double* srow = iplane + (oh * s + r) * wp + c;
              double* orow = oplane + oh * wo;
              if (s == 1) {
                for (int64_t ow = 0; ow < wo; ++ow) orow[ow] += wv * srow[ow];
              } else {
                for (int64_t ow = 0; ow < wo; ++ow) orow[ow] += wv * srow[ow * s];
              }
            }
          }
        }
      }
    }
  }

  Tensor in_t = input, w_t = weight, b_t = bias;
  auto bw = [in_t, w_t, b_t, n, ci, co, h, w, kh, kw, ho, wo, s, ph, pw, pad](
                const double* go, GradCtx& ctx) {
    const int64_t hp = h + 2 * ph, wp = w + 2 * pw;
    double* gx = ctx.parent_grad(0);
    double* gw = ctx.parent_grad(1);
    double* gb = b_t.defined() ? ctx.parent_grad(2) : nullptr;
    const double* wd = w_t.values().data();

    if (gb) {
#pragma omp parallel for schedule(static)
      for (int64_t oc = 0; oc < co; ++oc) {
        double acc = 0.0;
        for (int64_t in = 0; in < n; ++in) {
          const double* g = go + (in * co + oc) * ho * wo;
          for (int64_t i = 0; i < ho * wo; ++i) acc += g[i];
        }
        gb[oc] += acc;
      }
    }

    if (gw) {
      std::vector<double> xpad =
          pad_planes_2d(in_t.values().data(), n * ci, h, w, ph, pw, pad);
#pragma omp parallel for schedule(static)
      for (int64_t oc = 0; oc < co; ++oc) {
        for (int64_t in = 0; in < n; ++in) {
          const double* gplane = go + (in * co + oc) * ho * wo;
          for (int64_t ic = 0; ic < ci; ++ic) {
            const double* iplane = xpad.data() + (in * ci + ic) * hp * wp;
            double* wplane = gw + (oc * ci + ic) * kh * kw;
            for (int64_t r = 0; r < kh; ++r) {
              for (int64_t c = 0; c < kw; ++c) {
                double acc = 0.0;
                for (int64_t oh = 0; oh < ho; ++oh) {
                  const double* srow = iplane + (oh * s + r) * wp + c;
                  const double* grow = gplane + oh * wo;
                  if (s == 1) {
                    for (int64_t ow = 0; ow < wo; ++ow) acc += grow[ow] * srow[ow];
                  } else {
                    for (int64_t ow = 0; ow < wo; ++ow) acc += grow[ow] * srow[ow * s];
                  }
                }
                wplane[r * kw + c] += acc;
              }
            }
          }
        }
      }
    }

    if (gx) {
      std::vector<double> gxpad(static_cast<size_t>(n * ci * hp * wp), 0.0);
#pragma omp parallel for collapse(2) schedule(static)
      for (int64_t in = 0; in < n; ++in) {
        for (int64_t ic = 0; ic < ci; ++ic) {
          double* gplane = gxpad.data() + (in * ci + ic) * hp * wp;
          for (int64_t oc = 0; oc < co; ++oc) {
            const double* goplane = go + (in * co + oc) * ho * wo;
            const double* wplane = wd + (oc * ci + ic) * kh * kw;
            for (int64_t r = 0; r < kh; ++r) {
              for (int64_t c = 0; c < kw; ++c) {
                const double wv = wplane[r * kw + c];
                for (int64_t oh = 0; oh < ho; ++oh) {
                  double* drow = gplane + (oh * s + r) * wp + c;
                  const double* grow = goplane + oh * wo;
                  if (s == 1) {
                    for (int64_t ow = 0; ow < wo; ++ow) drow[ow] += wv * grow[ow];
                  } else {
                    for (int64_t ow = 0; ow < wo; ++ow) drow[ow * s] += wv * grow[ow];
                  }
                }
              }
            }
          }
        }
      }
      unpad_accumulate_2d(gxpad.data(), gx, n * ci, h, w, ph, pw, pad);
    }
  };

  std::vector<Tensor> parents{input, weight};
  if (bias.defined()) parents.push_back(bias);
  return Tensor::make_op({n, co, ho, wo}, std::move(out), "conv2d", std::move(parents),
                         std::move(bw));
}

namespace {

std::vector<double> pad_planes_3d(const double* x, int64_t planes, int64_t t, int64_t h,
                                  int64_t w, int64_t pt, int64_t ph, int64_t pw, PadMode mode) {
  const int64_t tp = t + 2 * pt, hp = h + 2 * ph, wp = w + 2 * pw;
  std::vector<double> out(static_cast<size_t>(planes * tp * hp * wp), 0.0);
#pragma omp parallel for schedule(static)
  for (int64_t p = 0; p < planes; ++p) {
    for (int64_t r = 0; r < tp; ++r) {
      int64_t st = r - pt;
      if (mode == PadMode::reflect) st = reflect_idx(st, t);
      if (st < 0 || st >= t) continue;
      // Reuse the 2D padder row logic per temporal slice.
      const double* src = x + (p * t + st) * h * w;
      double* dst = out.data() + (p * tp + r) * hp * wp;
      for (int64_t rr = 0; rr < hp; ++rr) {
        int64_t sr = rr - ph;
        if (mode == PadMode::reflect) sr = reflect_idx(sr, h);
        if (sr < 0 || sr >= h) continue;
        const double* srow = src + sr * w;
        double* drow = dst + rr * wp;
        for (int64_t c = 0; c < wp; ++c) {
          int64_t sc = c - pw;
          if (mode == PadMode::reflect) sc = reflect_idx(sc, w);
          if (sc < 0 || sc >= w) continue;
          drow[c] = srow[sc];
        }
      }
    }
  }
  return out;
}

void unpad_accumulate_3d(const double* gpad, double* gx, int64_t planes, int64_t t, int64_t h,
                         int64_t w, int64_t pt, int64_t ph, int64_t pw, PadMode mode) {
  const int64_t tp = t + 2 * pt, hp = h + 2 * ph, wp = w + 2 * pw;
#pragma omp parallel for schedule(static)
  for (int64_t p = 0; p < planes; ++p) {
    for (int64_t r = 0; r < tp; ++r) {
      int64_t st = r - pt;
      if (mode == PadMode::reflect) st = reflect_idx(st, t);
      if (st < 0 || st >= t) continue;
      const double* src = gpad + (p * tp + r) * hp * wp;
      double* dst = gx + (p * t + st) * h * w;
      for (int64_t rr = 0; rr < hp; ++rr) {
        int64_t sr = rr - ph;
        if (mode == PadMode::reflect) sr = reflect_idx(sr, h);
        if (sr < 0 || sr >= h) continue;
        const double* srow = src + rr * wp;
        double* drow = dst + sr * w;
        for (int64_t c = 0; c < wp; ++c) {
          int64_t sc = c - pw;
          if (mode == PadMode::reflect) sc = reflect_idx(sc, w);
          if (sc < 0 || sc >= w) continue;
          drow[sc] += srow[c];
        }
      }
    }
  }
}

}  // namespace

Tensor conv3d(const Tensor& input, const Tensor& weight, const Tensor& bias, int stride,
              PadMode pad, bool time_same_pad) {
  require(input.ndim() == 5, "conv3d: input must be [N,C,T,H,W], got " +
                                 shape_to_string(input.shape()));
  require(weight.ndim() == 5, "conv3d: weight must be [C_out,C_in,q0,q1,q2], got " +
                                  shape_to_string(weight.shape()));
  const int64_t n = input.dim(0), ci = input.dim(1), t = input.dim(2), h = input.dim(3),
                w = input.dim(4);
  const int64_t co = weight.dim(0), q0 = weight.dim(2), q1 = weight.dim(3), q2 = weight.dim(4);
  if (weight.dim(1) != ci)
    throw ShapeError("conv3d: channel mismatch, input " + shape_to_string(input.shape()) +
                     " vs weight " + shape_to_string(weight.shape()));
  require(q1 % 2 == 1 && q2 % 2 == 1 && q0 % 2 == 1,
          "conv3d: kernel extents must be odd, got " + shape_to_string(weight.shape()));
  require(stride >= 1, "conv3d: stride must be >= 1");
  if (bias.defined())
    require(bias.ndim() == 1 && bias.dim(0) == co,
            "conv3d: bias shape " + shape_to_string(bias.shape()) + " must be [" +
                std::to_string(co) + "]");
  input.check_finite("conv3d input");
  weight.check_finite("conv3d weight");
  if (bias.defined()) bias.check_finite("conv3d bias");

  const int64_t pt = time_same_pad ? (q0 - 1) / 2 : 0;
  const int64_t ph = (q1 - 1) / 2, pw = (q2 - 1) / 2;
  if (pad == PadMode::reflect) {
    require(ph <= h - 1 && pw <= w - 1 && (pt == 0 || pt <= t - 1),
            "conv3d: reflect padding needs extent > pad, input " +
                shape_to_string(input.shape()) + " kernel " + shape_to_string(weight.shape()));
  }
  const int64_t s = stride;
  const int64_t tp2 = t + 2 * pt, hp = h + 2 * ph, wp = w + 2 * pw;
  require(tp2 >= q0, "conv3d: temporal extent " + std::to_string(t) + " too small for kernel " +
                         std::to_string(q0));
  const int64_t to = tp2 - q0 + 1;
  const int64_t ho = (hp - q1) / s + 1, wo = (wp - q2) / s + 1;

  std::vector<double> xpad =
      pad_planes_3d(input.values().data(), n * ci, t, h, w, pt, ph, pw, pad);
  std::vector<double> out(static_cast<size_t>(n * co * to * ho * wo), 0.0);
  const double* wd = weight.values().data();
  const double* bd = bias.defined() ? bias.values().data() : nullptr;

#pragma omp parallel for collapse(2) schedule(static)
  for (int64_t in = 0; in < n; ++in) {
    for (int64_t oc = 0; oc < co; ++oc) {
      double* ovol = out.data() + (in * co + oc) * to * ho * wo;
      if (bd) std::fill(ovol, ovol + to * ho * wo, bd[oc]);
      for (int64_t ic = 0; ic < ci; ++ic) {
        const double* ivol = xpad.data() + (in * ci + ic) * tp2 * hp * wp;
        const double* wvol = wd + (oc * ci + ic) * q0 * q1 * q2;
        for (int64_t kt = 0; kt < q0; ++kt) {
          for (int64_t r = 0; r < q1; ++r) {
            for (int64_t c = 0; c < q2; ++c) {
              const double wv = wvol[(kt * q1 + r) * q2 + c];
              for (int64_t ot = 0; ot < to; ++ot) {
                const double* islice = ivol + (ot + kt) * hp * wp;
                double* oslice = ovol + ot * ho * wo;
                for (int64_t oh = 0; oh < ho; ++oh) {
                  const double* srow = islice + (oh * s + r) * wp + c;
                  double* orow = oslice + oh * wo;
                  if (s == 1) {
                    for (int64_t ow = 0; ow < wo; ++ow) orow[ow] += wv * srow[ow];
                  } else {
                    for (int64_t ow = 0; ow < wo; ++ow) orow[ow] += wv * srow[ow * s];
                  }
                }
              }
            }
          }
        }
      }
    }
  }

  Tensor in_t = input, w_t = weight, b_t = bias;
  auto bw = [in_t, w_t, b_t, n, ci, co, t, h, w, q0, q1, q2, to, ho, wo, s, pt, ph, pw, pad](
                const double* go, GradCtx& ctx) {
    const int64_t tp2 = t + 2 * pt, hp = h + 2 * ph, wp = w + 2 * pw;
    double* gx = ctx.parent_grad(0);
    double* gw = ctx.parent_grad(1);
    double* gb = b_t.defined() ? ctx.parent_grad(2) : nullptr;
    const double* wd = w_t.values().data();

    if (gb) {
#pragma omp parallel for schedule(static)
      for (int64_t oc = 0; oc < co; ++oc) {
        double acc = 0.0;
        for (int64_t in = 0; in < n; ++in) {
          const double* g = go + (in * co + oc) * to * ho * wo;
          for (int64_t i = 0; i < to * ho * wo; ++i) acc += g[i];
        }
        gb[oc] += acc;
      }
    }

    if (gw) {
      std::vector<double> xpad =
          pad_planes_3d(in_t.values().data(), n * ci, t, h, w, pt, ph, pw, pad);
#pragma omp parallel for schedule(static)
      for (int64_t oc = 0; oc < co; ++oc) {
        for (int64_t in = 0; in < n; ++in) {
          const double* gvol = go + (in * co + oc) * to * ho * wo;
          for (int64_t ic = 0; ic < ci; ++ic) {
            const double* ivol = xpad.data() + (in * ci + ic) * tp2 * hp * wp;
            double* wvol = gw + (oc * ci + ic) * q0 * q1 * q2;
            for (int64_t kt = 0; kt < q0; ++kt) {
              for (int64_t r = 0; r < q1; ++r) {
                for (int64_t c = 0; c < q2; ++c) {
                  double acc = 0.0;
                  for (int64_t ot = 0; ot < to; ++ot) {
                    const double* islice = ivol + (ot + kt) * hp * wp;
                    const double* gslice = gvol + ot * ho * wo;
                    for (int64_t oh = 0; oh < ho; ++oh) {
                      const double* srow = islice + (oh * s + r) * wp + c;
                      const double* grow = gslice + oh * wo;
                      if (s == 1) {
                        for (int64_t ow = 0; ow < wo; ++ow) acc += grow[ow] * srow[ow];
                      } else {
                        for (int64_t ow = 0; ow < wo; ++ow) acc += grow[ow] * srow[ow * s];
                      }
                    }
                  }
                  wvol[(kt * q1 + r) * q2 + c] += acc;
                }
              }
            }
          }
        }
      }
    }

    if (gx) {
      std::vector<double> gxpad(static_cast<size_t>(n * ci * tp2 * hp * wp), 0.0);
#pragma omp parallel for collapse(2) schedule(static)
      for (int64_t in = 0; in < n; ++in) {
        for (int64_t ic = 0; ic < ci; ++ic) {
          double* gvol = gxpad.data() + (in * ci + ic) * tp2 * hp * wp;
          for (int64_t oc = 0; oc < co; ++oc) {
            const double* govol = go + (in * co + oc) * to * ho * wo;
            const double* wvol = wd + (oc * ci + ic) * q0 * q1 * q2;
            for (int64_t kt = 0; kt < q0; ++kt) {
              for (int64_t r = 0; r < q1; ++r) {
                for (int64_t c = 0; c < q2; ++c) {
                  const double wv = wvol[(kt * q1 + r) * q2 + c];
                  for (int64_t ot = 0; ot < to; ++ot) {
                    double* dslice = gvol + (ot + kt) * hp * wp;
                    const double* gslice = govol + ot * ho * wo;
                    for (int64_t oh = 0; oh < ho; ++oh) {
                      double* drow = dslice + (oh * s + r) * wp + c;
                      const double* grow = gslice + oh * wo;
                      if (s == 1) {
                        for (int64_t ow = 0; ow < wo; ++ow) drow[ow] += wv * grow[ow];
                      } else {
                        for (int64_t ow = 0; ow < wo; ++ow) drow[ow * s] += wv * grow[ow];
                      }
                    }
                  }
                }
              }
            }
          }
        }
      }
      unpad_accumulate_3d(gxpad.data(), gx, n * ci, t, h, w, pt, ph, pw, pad);
    }
  };

  std::vector<Tensor> parents{input, weight};
  if (bias.defined()) parents.push_back(bias);
  return Tensor::make_op({n, co, to, ho, wo}, std::move(out), "conv3d", std::move(parents),
                         std::move(bw));
}

namespace {

// Binary op shape rule: equal shapes, or either side scalar.
enum class BinKind { elementwise, a_scalar, b_scalar };

BinKind binary_kind(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() == b.shape()) return BinKind::elementwise;
  if (a.numel() == 1) return BinKind::a_scalar;
  if (b.numel() == 1) return BinKind::b_scalar;
  throw ShapeError(std::string(op) + ": incompatible shapes " + shape_to_string(a.shape()) +
                   " vs " + shape_to_string(b.shape()));
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  BinKind k = binary_kind(a, b, "add");
  const auto& av = a.values();
  const auto& bv = b.values();
  size_t nn = std::max(av.size(), bv.size());
  std::vector<double> out(nn);
  for (size_t i = 0; i < nn; ++i)
    out[i] = (k == BinKind::a_scalar ? av[0] : av[i]) + (k == BinKind::b_scalar ? bv[0] : bv[i]);
  Shape shape = (k == BinKind::a_scalar) ? b.shape() : a.shape();
  auto bw = [k, nn](const double* go, GradCtx& ctx) {
    if (double* ga = ctx.parent_grad(0)) {
      if (k == BinKind::a_scalar) {
        for (size_t i = 0; i < nn; ++i) ga[0] += go[i];
      } else {
        for (size_t i = 0; i < nn; ++i) ga[i] += go[i];
      }
    }
    if (double* gb = ctx.parent_grad(1)) {
      if (k == BinKind::b_scalar) {
        for (size_t i = 0; i < nn; ++i) gb[0] += go[i];
      } else {
        for (size_t i = 0; i < nn; ++i) gb[i] += go[i];
      }
    }
  };
  return Tensor::make_op(shape, std::move(out), "add", {a, b}, std::move(bw));
}

Tensor sub(const Tensor& a, const Tensor& b) {
  BinKind k = binary_kind(a, b, "sub");
  const auto& av = a.values();
  const auto& bv = b.values();
  size_t nn = std::max(av.size(), bv.size());
  std::vector<double> out(nn);
  for (size_t i = 0; i < nn; ++i)
    out[i] = (k == BinKind::a_scalar ? av[0] : av[i]) - (k == BinKind::b_scalar ? bv[0] : bv[i]);
  Shape shape = (k == BinKind::a_scalar) ? b.shape() : a.shape();
  auto bw = [k, nn](const double* go, GradCtx& ctx) {
    if (double* ga = ctx.parent_grad(0)) {
      if (k == BinKind::a_scalar) {
        for (size_t i = 0; i < nn; ++i) ga[0] += go[i];
      } else {
        for (size_t i = 0; i < nn; ++i) ga[i] += go[i];
      }
    }
    if (double* gb = ctx.parent_grad(1)) {
      if (k == BinKind::b_scalar) {
        for (size_t i = 0; i < nn; ++i) gb[0] -= go[i];
      } else {
        for (size_t i = 0; i < nn; ++i) gb[i] -= go[i];
      }
    }
  };
  return Tensor::make_op(shape, std::move(out), "sub", {a, b}, std::move(bw));
}

Tensor mul(const Tensor& a, const Tensor& b) {
  BinKind k = binary_kind(a, b, "mul");
  const auto& av = a.values();
  const auto& bv = b.values();
  size_t nn = std::max(av.size(), bv.size());
  std::vector<double> out(nn);
  for (size_t i = 0; i < nn; ++i)
    out[i] = (k == BinKind::a_scalar ? av[0] : av[i]) * (k == BinKind::b_scalar ? bv[0] : bv[i]);
  Shape shape = (k == BinKind::a_scalar) ? b.shape() : a.shape();
  Tensor at = a, bt = b;
  auto bw = [k, nn, at, bt](const double* go, GradCtx& ctx) {
    const auto& av = at.values();
    const auto& bv = bt.values();
    if (double* ga = ctx.parent_grad(0)) {
      if (k == BinKind::a_scalar) {
        for (size_t i = 0; i < nn; ++i) ga[0] += go[i] * bv[i];
      } else {
        for (size_t i = 0; i < nn; ++i) ga[i] += go[i] * (k == BinKind::b_scalar ? bv[0] : bv[i]);
      }
    }
    if (double* gb = ctx.parent_grad(1)) {
      if (k == BinKind::b_scalar) {
        for (size_t i = 0; i < nn; ++i) gb[0] += go[i] * av[i];
      } else {
        for (size_t i = 0; i < nn; ++i) gb[i] += go[i] * (k == BinKind::a_scalar ? av[0] : av[i]);
      }
    }
  };
  return Tensor::make_op(shape, std::move(out), "mul", {a, b}, std::move(bw));
}

Tensor add_scalar(const Tensor& x, double c) {
  std::vector<double> out = x.values();
  for (double& v : out) v += c;
  size_t nn = out.size();
  auto bw = [nn](const double* go, GradCtx& ctx) {
    if (double* gx = ctx.parent_grad(0))
      for (size_t i = 0; i < nn; ++i) gx[i] += go[i];
  };
  return Tensor::make_op(x.shape(), std::move(out), "add_scalar", {x}, std::move(bw));
}

Tensor mul_scalar(const Tensor& x, double c) {
  std::vector<double> out = x.values();
  for (double& v : out) v *= c;
  size_t nn = out.size();
  auto bw = [nn, c](const double* go, GradCtx& ctx) {
    if (double* gx = ctx.parent_grad(0))
      for (size_t i = 0; i < nn; ++i) gx[i] += c * go[i];
  };
  return Tensor::make_op(x.shape(), std::move(out), "mul_scalar", {x}, std::move(bw));
}

Tensor prelu(const Tensor& x, const Tensor& slope) {
  if (slope.numel() != 1)
    throw ShapeError("prelu: slope must be scalar, got " + shape_to_string(slope.shape()));
  const double s = slope.values()[0];
  const auto& xv = x.values();
  std::vector<double> out(xv.size());
  for (size_t i = 0; i < xv.size(); ++i) out[i] = xv[i] > 0 ? xv[i] : s * xv[i];
  Tensor xt = x;
  size_t nn = xv.size();
  auto bw = [xt, s, nn](const double* go, GradCtx& ctx) {
    const auto& xv = xt.values();
    if (double* gx = ctx.parent_grad(0))
      for (size_t i = 0; i < nn; ++i) gx[i] += go[i] * (xv[i] > 0 ? 1.0 : s);
    if (double* gs = ctx.parent_grad(1)) {
      double acc = 0.0;
      for (size_t i = 0; i < nn; ++i)
        if (xv[i] <= 0) acc += go[i] * xv[i];
      gs[0] += acc;
    }
  };
  return Tensor::make_op(x.shape(), std::move(out), "prelu", {x, slope}, std::move(bw));
}

Tensor prelu(const Tensor& x, double slope) { return prelu(x, Tensor::scalar(slope)); }

namespace {

struct ResizeAxis {
  std::vector<int64_t> i0, i1;
  std::vector<double> w0, w1;
};

ResizeAxis resize_axis_tables(int64_t in, int64_t out) {
  ResizeAxis t;
  t.i0.resize(out);
  t.i1.resize(out);
  t.w0.resize(out);
  t.w1.resize(out);
  const double scale = static_cast<double>(in) / static_cast<double>(out);
  for (int64_t o = 0; o < out; ++o) {
    double src = (static_cast<double>(o) + 0.5) * scale - 0.5;
    double f = std::floor(src);
    double w1 = src - f;
    int64_t i0 = static_cast<int64_t>(f);
    int64_t i1 = i0 + 1;
    t.i0[o] = std::clamp<int64_t>(i0, 0, in - 1);
    t.i1[o] = std::clamp<int64_t>(i1, 0, in - 1);
    t.w0[o] = 1.0 - w1;
    t.w1[o] = w1;
  }
  return t;
}

}  // namespace

Tensor bilinear_resize(const Tensor& x, double factor) {
  if (x.ndim() < 2)
    throw ShapeError("bilinear_resize: need at least 2 axes, got " + shape_to_string(x.shape()));
  if (factor <= 0) throw ShapeError("bilinear_resize: factor must be positive");
  const size_t nd = x.ndim();
  const int64_t h = x.dim(nd - 2), w = x.dim(nd - 1);
  const double ho_f = static_cast<double>(h) * factor, wo_f = static_cast<double>(w) * factor;
  const int64_t ho = std::llround(ho_f), wo = std::llround(wo_f);
  if (ho < 1 || wo < 1 || std::abs(ho_f - ho) > 1e-9 || std::abs(wo_f - wo) > 1e-9)
    throw ShapeError("bilinear_resize: factor " + format_double(factor) +
                     " does not give integral extents for " + shape_to_string(x.shape()));
  int64_t planes = 1;
  for (size_t i = 0; i + 2 < nd; ++i) planes *= x.dim(i);

  ResizeAxis th = resize_axis_tables(h, ho), tw = resize_axis_tables(w, wo);
  const double* src = x.values().data();
  std::vector<double> out(static_cast<size_t>(planes * ho * wo));
  for (int64_t p = 0; p < planes; ++p) {
    const double* ip = src + p * h * w;
    double* op = out.data() + p * ho * wo;
    for (int64_t oh = 0; oh < ho; ++oh) {
      const double* r0 = ip + th.i0[oh] * w;
      const double* r1 = ip + th.i1[oh] * w;
      for (int64_t ow = 0; ow < wo; ++ow) {
        double top = tw.w0[ow] * r0[tw.i0[ow]] + tw.w1[ow] * r0[tw.i1[ow]];
        double bot = tw.w0[ow] * r1[tw.i0[ow]] + tw.w1[ow] * r1[tw.i1[ow]];
        op[oh * wo + ow] = th.w0[oh] * top + th.w1[oh] * bot;
      }
    }
  }
  Shape oshape = x.shape();
  oshape[nd - 2] = ho;
  oshape[nd - 1] = wo;
  auto bw = [planes, h, w, ho, wo, th, tw](const double* go, GradCtx& ctx) {
    double* gx = ctx.parent_grad(0);
    if (!gx) return;
    for (int64_t p = 0; p < planes; ++p) {
      double* gp = gx + p * h * w;
      const double* gop = go + p * ho * wo;
      for (int64_t oh = 0; oh < ho; ++oh) {
        for (int64_t ow = 0; ow < wo; ++ow) {
          const double g = gop[oh * wo + ow];
          gp[th.i0[oh] * w + tw.i0[ow]] += th.w0[oh] * tw.w0[ow] * g;
          gp[th.i0[oh] * w + tw.i1[ow]] += th.w0[oh] * tw.w1[ow] * g;
          gp[th.i1[oh] * w + tw.i0[ow]] += th.w1[oh] * tw.w0[ow] * g;
          gp[th.i1[oh] * w + tw.i1[ow]] += th.w1[oh] * tw.w1[ow] * g;
        }
      }
    }
  };
  return Tensor::make_op(oshape, std::move(out), "bilinear_resize", {x}, std::move(bw));
}

Tensor avg_pool2(const Tensor& x) {
  if (x.ndim() < 2)
    throw ShapeError("avg_pool2: need at least 2 axes, got " + shape_to_string(x.shape()));
  const size_t nd = x.ndim();
  const int64_t h = x.dim(nd - 2), w = x.dim(nd - 1);
  if (h % 2 || w % 2)
    throw ShapeError("avg_pool2: spatial extents must be even, got " +
                     shape_to_string(x.shape()));
  int64_t planes = 1;
  for (size_t i = 0; i + 2 < nd; ++i) planes *= x.dim(i);
  const int64_t ho = h / 2, wo = w / 2;
  const double* src = x.values().data();
  std::vector<double> out(static_cast<size_t>(planes * ho * wo));
  for (int64_t p = 0; p < planes; ++p) {
    const double* ip = src + p * h * w;
    double* op = out.data() + p * ho * wo;
    for (int64_t oh = 0; oh < ho; ++oh) {
      const double* r0 = ip + 2 * oh * w;
      const double* r1 = r0 + w;
      for (int64_t ow = 0; ow < wo; ++ow)
        op[oh * wo + ow] = 0.25 * (r0[2 * ow] + r0[2 * ow + 1] + r1[2 * ow] + r1[2 * ow + 1]);
    }
  }
  Shape oshape = x.shape();
  oshape[nd - 2] = ho;
  oshape[nd - 1] = wo;
  auto bw = [planes, h, w, ho, wo](const double* go, GradCtx& ctx) {
    double* gx = ctx.parent_grad(0);
    if (!gx) return;
    for (int64_t p = 0; p < planes; ++p) {
      double* gp = gx + p * h * w;
      const double* gop = go + p * ho * wo;
      for (int64_t oh = 0; oh < ho; ++oh) {
        for (int64_t ow = 0; ow < wo; ++ow) {
          const double g = 0.25 * gop[oh * wo + ow];
          gp[(2 * oh) * w + 2 * ow] += g;
          gp[(2 * oh) * w + 2 * ow + 1] += g;
          gp[(2 * oh + 1) * w + 2 * ow] += g;
          gp[(2 * oh + 1) * w + 2 * ow + 1] += g;
        }
      }
    }
  };
  return Tensor::make_op(oshape, std::move(out), "avg_pool2", {x}, std::move(bw));
}

Tensor zero_upsample2(const Tensor& x) {
  if (x.ndim() < 2)
    throw ShapeError("zero_upsample2: need at least 2 axes, got " + shape_to_string(x.shape()));
  const size_t nd = x.ndim();
  const int64_t h = x.dim(nd - 2), w = x.dim(nd - 1);
  int64_t planes = 1;
  for (size_t i = 0; i + 2 < nd; ++i) planes *= x.dim(i);
  const int64_t ho = 2 * h, wo = 2 * w;
  const double* src = x.values().data();
  std::vector<double> out(static_cast<size_t>(planes * ho * wo), 0.0);
  for (int64_t p = 0; p < planes; ++p) {
    const double* ip = src + p * h * w;
    double* op = out.data() + p * ho * wo;
    for (int64_t ih = 0; ih < h; ++ih)
      for (int64_t iw = 0; iw < w; ++iw) op[(2 * ih) * wo + 2 * iw] = ip[ih * w + iw];
  }
  Shape oshape = x.shape();
  oshape[nd - 2] = ho;
  oshape[nd - 1] = wo;
  auto bw = [planes, h, w, wo](const double* go, GradCtx& ctx) {
    double* gx = ctx.parent_grad(0);
    if (!gx) return;
    for (int64_t p = 0; p < planes; ++p) {
      double* gp = gx + p * h * w;
      const double* gop = go + p * (2 * h) * wo;
      for (int64_t ih = 0; ih < h; ++ih)
        for (int64_t iw = 0; iw < w; ++iw) gp[ih * w + iw] += gop[(2 * ih) * wo + 2 * iw];
    }
  };
  return Tensor::make_op(oshape, std::move(out), "zero_upsample2", {x}, std::move(bw));
}

Tensor concat(const std::vector<Tensor>& xs, size_t axis) {
  if (xs.empty()) throw ShapeError("concat: no inputs");
  const Shape& s0 = xs[0].shape();
  if (axis >= s0.size())
    throw ShapeError("concat: axis " + std::to_string(axis) + " out of range for " +
                     shape_to_string(s0));
  int64_t axis_total = 0;
  for (const Tensor& x : xs) {
    const Shape& s = x.shape();
    if (s.size() != s0.size())
      throw ShapeError("concat: rank mismatch " + shape_to_string(s0) + " vs " +
                       shape_to_string(s));
    for (size_t i = 0; i < s.size(); ++i)
      if (i != axis && s[i] != s0[i])
        throw ShapeError("concat: incompatible shapes " + shape_to_string(s0) + " vs " +
                         shape_to_string(s) + " on axis " + std::to_string(i));
    axis_total += s[axis];
  }
  int64_t outer = 1, inner = 1;
  for (size_t i = 0; i < axis; ++i) outer *= s0[i];
  for (size_t i = axis + 1; i < s0.size(); ++i) inner *= s0[i];

  Shape oshape = s0;
  oshape[axis] = axis_total;
  std::vector<double> out(static_cast<size_t>(outer * axis_total * inner));
  std::vector<int64_t> block(xs.size());
  for (size_t k = 0; k < xs.size(); ++k) block[k] = xs[k].dim(axis) * inner;
  for (int64_t o = 0; o < outer; ++o) {
    double* dst = out.data() + o * axis_total * inner;
    for (size_t k = 0; k < xs.size(); ++k) {
      const double* src = xs[k].values().data() + o * block[k];
      std::memcpy(dst, src, static_cast<size_t>(block[k]) * sizeof(double));
      dst += block[k];
    }
  }
  auto bw = [outer, inner, axis_total, block](const double* go, GradCtx& ctx) {
    for (size_t k = 0; k < block.size(); ++k) {
      double* gk = ctx.parent_grad(k);
      if (!gk) continue;
      int64_t offset = 0;
      for (size_t j = 0; j < k; ++j) offset += block[j];
      for (int64_t o = 0; o < outer; ++o) {
        const double* src = go + o * axis_total * inner + offset;
        double* dst = gk + o * block[k];
        for (int64_t i = 0; i < block[k]; ++i) dst[i] += src[i];
      }
    }
  };
  return Tensor::make_op(oshape, std::move(out), "concat", xs, std::move(bw));
}

Tensor slice_axis(const Tensor& x, size_t axis, int64_t start, int64_t len) {
  const Shape& s = x.shape();
  if (axis >= s.size())
    throw ShapeError("slice_axis: axis " + std::to_string(axis) + " out of range for " +
                     shape_to_string(s));
  if (start < 0 || len < 1 || start + len > s[axis])
    throw ShapeError("slice_axis: range [" + std::to_string(start) + "," +
                     std::to_string(start + len) + ") invalid for axis extent " +
                     std::to_string(s[axis]));
  int64_t outer = 1, inner = 1;
  for (size_t i = 0; i < axis; ++i) outer *= s[i];
  for (size_t i = axis + 1; i < s.size(); ++i) inner *= s[i];
  const int64_t ax = s[axis];
  Shape oshape = s;
  oshape[axis] = len;
  std::vector<double> out(static_cast<size_t>(outer * len * inner));
  const double* src = x.values().data();
  for (int64_t o = 0; o < outer; ++o)
    std::memcpy(out.data() + o * len * inner, src + (o * ax + start) * inner,
                static_cast<size_t>(len * inner) * sizeof(double));
  auto bw = [outer, inner, ax, start, len](const double* go, GradCtx& ctx) {
    double* gx = ctx.parent_grad(0);
    if (!gx) return;
    for (int64_t o = 0; o < outer; ++o) {
      double* dst = gx + (o * ax + start) * inner;
      const double* g = go + o * len * inner;
      for (int64_t i = 0; i < len * inner; ++i) dst[i] += g[i];
    }
  };
  return Tensor::make_op(oshape, std::move(out), "slice_axis", {x}, std::move(bw));
}

Tensor reshape(const Tensor& x, const Shape& shape) {
  if (shape_numel(shape) != x.numel())
    throw ShapeError("reshape: cannot view " + shape_to_string(x.shape()) + " as " +
                     shape_to_string(shape));
  std::vector<double> out = x.values();
  size_t nn = out.size();
  auto bw = [nn](const double* go, GradCtx& ctx) {
    if (double* gx = ctx.parent_grad(0))
      for (size_t i = 0; i < nn; ++i) gx[i] += go[i];
  };
  return Tensor::make_op(shape, std::move(out), "reshape", {x}, std::move(bw));
}

Tensor stack_time(const std::vector<Tensor>& frames) {
  if (frames.empty()) throw ShapeError("stack_time: no inputs");
  std::vector<Tensor> expanded;
  expanded.reserve(frames.size());
  for (const Tensor& f : frames) {
    if (f.ndim() != 4)
      throw ShapeError("stack_time: frames must be [N,C,H,W], got " +
                       shape_to_string(f.shape()));
    expanded.push_back(reshape(f, {f.dim(0), f.dim(1), 1, f.dim(2), f.dim(3)}));
  }
  return concat(expanded, 2);
}

Tensor sum(const Tensor& x) {
  const auto& xv = x.values();
  double acc = 0.0;
  for (double v : xv) acc += v;
  size_t nn = xv.size();
  auto bw = [nn](const double* go, GradCtx& ctx) {
    if (double* gx = ctx.parent_grad(0))
      for (size_t i = 0; i < nn; ++i) gx[i] += go[0];
  };
  return Tensor::make_op({1}, {acc}, "sum", {x}, std::move(bw));
}

Tensor mean(const Tensor& x) {
  const auto& xv = x.values();
  double acc = 0.0;
  for (double v : xv) acc += v;
  const double inv = 1.0 / static_cast<double>(xv.size());
  size_t nn = xv.size();
  auto bw = [nn, inv](const double* go, GradCtx& ctx) {
    if (double* gx = ctx.parent_grad(0)) {
      const double g = go[0] * inv;
      for (size_t i = 0; i < nn; ++i) gx[i] += g;
    }
  };
  return Tensor::make_op({1}, {acc * inv}, "mean", {x}, std::move(bw));
}

Tensor abs(const Tensor& x) {
  const auto& xv = x.values();
  std::vector<double> out(xv.size());
  for (size_t i = 0; i < xv.size(); ++i) out[i] = std::fabs(xv[i]);
  Tensor xt = x;
  size_t nn = xv.size();
  // Subgradient at 0 is 0.
  auto bw = [xt, nn](const double* go, GradCtx& ctx) {
    if (double* gx = ctx.parent_grad(0)) {
      const auto& xv = xt.values();
      for (size_t i = 0; i < nn; ++i)
        gx[i] += go[i] * (xv[i] > 0 ? 1.0 : (xv[i] < 0 ? -1.0 : 0.0));
    }
  };
  return Tensor::make_op(x.shape(), std::move(out), "abs", {x}, std::move(bw));
}

Tensor sqrt(const Tensor& x) {
  const auto& xv = x.values();
  std::vector<double> out(xv.size());
  for (size_t i = 0; i < xv.size(); ++i) {
    if (!(xv[i] > 0))
      throw NumericError("sqrt: requires strictly positive inputs, got " +
                         format_double(xv[i]));
    out[i] = std::sqrt(xv[i]);
  }
  std::vector<double> saved = out;
  size_t nn = xv.size();
  auto bw = [saved, nn](const double* go, GradCtx& ctx) {
    if (double* gx = ctx.parent_grad(0))
      for (size_t i = 0; i < nn; ++i) gx[i] += go[i] * 0.5 / saved[i];
  };
  return Tensor::make_op(x.shape(), std::move(out), "sqrt", {x}, std::move(bw));
}

}  // namespace snet
