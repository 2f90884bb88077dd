//
// Copyright (c) 2026 the snet authors.
// SPDX-License-Identifier: Apache-2.0
//
#include "snet/evalkit.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <json.hpp>

namespace snet {

double psnr(const Tensor& a, const Tensor& b, double peak, double cap) {
  if (a.shape() != b.shape())
    throw ShapeError("psnr: shape mismatch " + shape_to_string(a.shape()) + " vs " +
                     shape_to_string(b.shape()));
  if (!(peak > 0)) throw NumericError("psnr: peak must be positive");
  const auto& av = a.values();
  const auto& bv = b.values();
  double acc = 0.0;
  for (size_t i = 0; i < av.size(); ++i) {
    const double d = av[i] - bv[i];
    acc += d * d;
  }
  const double mse = acc / static_cast<double>(av.size());
  if (mse == 0.0) return cap;
  return 10.0 * std::log10(peak * peak / mse);
}

namespace {

// [C,H,W] -> single plane; RGB collapses to Rec.601 luma.
std::vector<double> to_gray(const Tensor& img) {
  if (img.ndim() != 3)
    throw ShapeError("ssim: expected [C,H,W], got " + shape_to_string(img.shape()));
  const int64_t c = img.dim(0), h = img.dim(1), w = img.dim(2);
  const auto& v = img.values();
  std::vector<double> out(static_cast<size_t>(h * w));
  if (c == 1) {
    std::copy(v.begin(), v.end(), out.begin());
  } else if (c == 3) {
    const size_t plane = static_cast<size_t>(h * w);
    for (size_t i = 0; i < plane; ++i)
      out[i] = 0.299 * v[i] + 0.587 * v[plane + i] + 0.114 * v[2 * plane + i];
  } else {
    throw ShapeError("ssim: expected 1 or 3 channels, got " + shape_to_string(img.shape()));
  }
  return out;
}

}  // namespace

double ssim(const Tensor& a, const Tensor& b, int window, double k1, double k2, double peak,
            double sigma) {
  if (a.shape() != b.shape())
    throw ShapeError("ssim: shape mismatch " + shape_to_string(a.shape()) + " vs " +
                     shape_to_string(b.shape()));
  const int64_t h = a.dim(1), w = a.dim(2);
  if (h < window || w < window)
    throw ShapeError("ssim: image " + shape_to_string(a.shape()) + " smaller than window " +
                     std::to_string(window));

  std::vector<double> ga = to_gray(a), gb = to_gray(b);
  // Normalized Gaussian window.
  std::vector<double> win(static_cast<size_t>(window) * window);
  const double half = (window - 1) / 2.0;
  double wsum = 0.0;
  for (int i = 0; i < window; ++i) {
    for (int j = 0; j < window; ++j) {
      const double dy = i - half, dx = j - half;
      const double v = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
      win[static_cast<size_t>(i * window + j)] = v;
      wsum += v;
    }
  }
  for (double& v : win) v /= wsum;

  const double c1 = (k1 * peak) * (k1 * peak);
  const double c2 = (k2 * peak) * (k2 * peak);
  const int64_t ho = h - window + 1, wo = w - window + 1;
  double total = 0.0;
  for (int64_t y = 0; y < ho; ++y) {
    for (int64_t x = 0; x < wo; ++x) {
      double ma = 0, mb = 0, maa = 0, mbb = 0, mab = 0;
      for (int i = 0; i < window; ++i) {
        const double* ra = ga.data() + (y + i) * w + x;
        const double* rb = gb.data() + (y + i) * w + x;
        const double* wr = win.data() + static_cast<size_t>(i * window);
        for (int j = 0; j < window; ++j) {
          const double wa = wr[j] * ra[j], wb = wr[j] * rb[j];
          ma += wa;
          mb += wb;
          maa += wa * ra[j];
          mbb += wb * rb[j];
          mab += wa * rb[j];
        }
      }
      const double va = maa - ma * ma;
      const double vb = mbb - mb * mb;
      const double vab = mab - ma * mb;
      total += ((2 * ma * mb + c1) * (2 * vab + c2)) /
               ((ma * ma + mb * mb + c1) * (va + vb + c2));
    }
  }
  return total / static_cast<double>(ho * wo);
}

BenchResult bench_runtime(const Checkpoint& ckpt, int res, int reps) {
  if (reps < 10) throw StateError("bench_runtime: reps must be >= 10");
  const int64_t c = ckpt.spec.image_channels;
  Rng rng = Rng::seeded(0xBE7C);
  std::vector<double> data(static_cast<size_t>(4 * c * res * res));
  for (double& v : data) v = rng.uniform();
  Tensor frames = Tensor::from_data({1, 4 * c, res, res}, std::move(data), false);

  BenchResult out;
#ifdef _OPENMP
  out.threads = omp_get_max_threads();
#else
  out.threads = 1;
#endif
  using Clock = std::chrono::steady_clock;
  NoGradGuard ng;
  for (int i = 0; i < 2; ++i) forward_interpolate(ckpt, frames);
  out.reps_sec.reserve(static_cast<size_t>(reps));
  for (int i = 0; i < reps; ++i) {
    const auto t0 = Clock::now();
    forward_interpolate(ckpt, frames);
    const auto t1 = Clock::now();
    out.reps_sec.push_back(std::chrono::duration<double>(t1 - t0).count());
  }
  double mean = 0.0;
  for (double v : out.reps_sec) mean += v;
  mean /= static_cast<double>(reps);
  double var = 0.0;
  for (double v : out.reps_sec) var += (v - mean) * (v - mean);
  out.mean_sec = mean;
  out.std_sec = std::sqrt(var / std::max(1, reps - 1));
  return out;
}

namespace {

std::string cpu_model() {
  std::ifstream f("/proc/cpuinfo");
  std::string line;
  while (std::getline(f, line)) {
    if (line.rfind("model name", 0) == 0) {
      size_t colon = line.find(':');
      if (colon != std::string::npos) return trim(line.substr(colon + 1));
    }
  }
  return "unknown";
}

struct BestFlags {
  bool psnr = false, ssim = false, runtime = false, params = false;
};

std::vector<BestFlags> best_flags(const std::vector<EvalRecord>& rs) {
  std::vector<BestFlags> flags(rs.size());
  if (rs.empty()) return flags;
  size_t best_psnr = 0, best_ssim = 0, best_params = 0;
  ptrdiff_t best_rt = -1;
  for (size_t i = 0; i < rs.size(); ++i) {
    if (rs[i].psnr_mean > rs[best_psnr].psnr_mean) best_psnr = i;
    if (rs[i].ssim_mean > rs[best_ssim].ssim_mean) best_ssim = i;
    if (rs[i].params_m < rs[best_params].params_m) best_params = i;
    if (rs[i].runtime_mean_sec >= 0 &&
        (best_rt < 0 || rs[i].runtime_mean_sec < rs[static_cast<size_t>(best_rt)].runtime_mean_sec))
      best_rt = static_cast<ptrdiff_t>(i);
  }
  flags[best_psnr].psnr = true;
  flags[best_ssim].ssim = true;
  flags[best_params].params = true;
  if (best_rt >= 0) flags[static_cast<size_t>(best_rt)].runtime = true;
  return flags;
}

std::string fmt_cell(double v, int prec) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*f", prec, v);
  return buf;
}

}  // namespace

std::string emit_report(const std::vector<EvalRecord>& records, ReportFormat format) {
  if (records.empty()) throw StateError("emit_report: need at least one record");
  std::vector<BestFlags> flags = best_flags(records);
  std::ostringstream os;
  switch (format) {
    case ReportFormat::csv: {
      os << "model,split,psnr_mean,psnr_std,ssim_mean,ssim_std,runtime_mean_sec,params_M\n";
      for (const auto& r : records) {
        os << r.model_id << "," << r.split << "," << format_double(r.psnr_mean) << ","
           << format_double(r.psnr_std) << "," << format_double(r.ssim_mean) << ","
           << format_double(r.ssim_std) << "," << format_double(r.runtime_mean_sec) << ","
           << format_double(r.params_m) << "\n";
      }
      break;
    }
    case ReportFormat::jsonl: {
      nlohmann::json env;
      env["env"]["cpu"] = cpu_model();
#ifdef _OPENMP
      env["env"]["threads"] = omp_get_max_threads();
#else
      env["env"]["threads"] = 1;
#endif
      os << env.dump() << "\n";
      for (size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        nlohmann::json j;
        j["model"] = r.model_id;
        j["split"] = r.split;
        j["psnr_mean"] = r.psnr_mean;
        j["psnr_std"] = r.psnr_std;
        j["ssim_mean"] = r.ssim_mean;
        j["ssim_std"] = r.ssim_std;
        if (r.runtime_mean_sec >= 0) j["runtime_mean_sec"] = r.runtime_mean_sec;
        j["params_M"] = r.params_m;
        j["best_psnr"] = flags[i].psnr;
        j["best_ssim"] = flags[i].ssim;
        j["best_runtime"] = flags[i].runtime;
        j["best_params"] = flags[i].params;
        os << j.dump() << "\n";
      }
      break;
    }
    case ReportFormat::text: {
      os << "model                 split  PSNR(dB)    SSIM        RT(s)      #P(M)\n";
      for (size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        char line[256];
        std::string rt = r.runtime_mean_sec >= 0 ? fmt_cell(r.runtime_mean_sec, 4) : "-";
        std::snprintf(line, sizeof(line), "%-21s %-6s %8s%s %9s%s %9s%s %8s%s\n",
                      r.model_id.c_str(), r.split.c_str(), fmt_cell(r.psnr_mean, 3).c_str(),
                      flags[i].psnr ? "*" : " ", fmt_cell(r.ssim_mean, 4).c_str(),
                      flags[i].ssim ? "*" : " ", rt.c_str(), flags[i].runtime ? "*" : " ",
                      fmt_cell(r.params_m, 3).c_str(), flags[i].params ? "*" : " ");
        os << line;
      }
      break;
    }
  }
  return os.str();
}

std::vector<EvalRecord> parse_report_csv(const std::string& text) {
  std::vector<EvalRecord> out;
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) ||
      trim(line) != "model,split,psnr_mean,psnr_std,ssim_mean,ssim_std,runtime_mean_sec,params_M")
    throw FormatError("report csv: missing header");
  while (std::getline(is, line)) {
    line = trim(line);
    if (line.empty()) continue;
    std::vector<std::string> tok = split(line, ',');
    if (tok.size() != 8) throw FormatError("report csv: bad row '" + line + "'");
    EvalRecord r;
    r.model_id = tok[0];
    r.split = tok[1];
    r.psnr_mean = parse_double(tok[2]);
    r.psnr_std = parse_double(tok[3]);
    r.ssim_mean = parse_double(tok[4]);
    r.ssim_std = parse_double(tok[5]);
    r.runtime_mean_sec = parse_double(tok[6]);
    r.params_m = parse_double(tok[7]);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace snet
