//
// Copyright (c) 2026 the snet authors.
// SPDX-License-Identifier: Apache-2.0
//
#include "snet/pruner.hpp"

#include <cmath>
#include <sstream>

namespace snet {

LayerDensity layer_density(const Tensor& weight, const LayerSpec& spec) {
  if (weight.shape() != spec.weight_shape())
    throw ShapeError("layer_density: weight shape " + shape_to_string(weight.shape()) +
                     " does not match layer " + spec.id + " " +
                     shape_to_string(spec.weight_shape()));
  LayerDensity d;
  d.p_l = spec.weight_count();
  for (double v : weight.values())
    if (v != 0.0) ++d.nonzeros;
  d.d = static_cast<double>(d.nonzeros) / static_cast<double>(d.p_l);
  return d;
}

DensityReport model_density(const Checkpoint& ckpt) {
  DensityReport r;
  for (const auto& l : ckpt.spec.layers) {
    if (!l.prunable) continue;
    LayerDensity d = layer_density(ckpt.params.at(l.id).weight, l);
    r.total_nonzeros += d.nonzeros;
    r.total_weights += d.p_l;
    r.per_layer.emplace(l.id, d);
  }
  r.model_density = r.total_weights == 0
                        ? 0.0
                        : static_cast<double>(r.total_nonzeros) /
                              static_cast<double>(r.total_weights);
  return r;
}

CompressionPlan make_plan(const DensityReport& report, const NetworkSpec& spec,
                          double branch_threshold) {
  if (!(branch_threshold >= 0.0) || branch_threshold >= 1.0)
    throw ConfigError("make_plan: branch threshold must be in [0,1)");
  for (const auto& l : spec.layers) {
    if (l.prunable && !report.per_layer.count(l.id))
      throw FormatError("make_plan: report does not cover layer '" + l.id + "'");
  }

  CompressionPlan plan;
  plan.provenance = report;

  // Branch verdicts first: a removable branch with near-zero mean density is
  // dropped entirely and contributes no ratios.
  for (const auto& b : spec.branches) {
    if (!b.removable) continue;
    double sum = 0.0;
    int n = 0;
    for (const auto& l : spec.layers) {
      if (l.branch != b.id || !l.prunable) continue;
      sum += report.per_layer.at(l.id).d;
      ++n;
    }
    if (n > 0 && sum / n < branch_threshold) plan.removed_branches.insert(b.id);
  }

  // Output-to-input walk; each surviving layer's density becomes the ratio on
  // its input dimension. Boundary (image-touching) dimensions stay at 1.
  for (auto it = spec.layers.rbegin(); it != spec.layers.rend(); ++it) {
    const LayerSpec& l = *it;
    if (!l.prunable || plan.removed_branches.count(l.branch)) continue;
    double r;
    if (spec.pinned_in.count(l.id)) {
      r = 1.0;
    } else {
      r = report.per_layer.at(l.id).d;
      if (r <= 0.0) r = 1e-9;  // dead layer in a live branch: min-1 rounding applies
      if (r > 1.0) r = 1.0;
    }
    plan.ratios[l.id] = r;
  }
  return plan;
}

CompressionSummary summarize_compression(const NetworkSpec& teacher,
                                         const NetworkSpec& student) {
  teacher.validate();
  student.validate();
  CompressionSummary s;
  s.params_before = count_params(teacher).total;
  s.params_after = count_params(student).total;
  double pct = 100.0 * (1.0 - static_cast<double>(s.params_after) /
                                  static_cast<double>(s.params_before));
  s.reduction_pct = std::round(pct * 10.0) / 10.0;
  return s;
}

std::string format_density_report(const DensityReport& r) {
  std::ostringstream os;
  os << "snet-density v1\n";
  for (const auto& [id, d] : r.per_layer)
    os << "layer " << id << " " << d.nonzeros << " " << d.p_l << " " << format_double(d.d)
       << "\n";
  os << "model " << r.total_nonzeros << " " << r.total_weights << " "
     << format_double(r.model_density) << "\n";
  return os.str();
}

DensityReport parse_density_report(const std::string& text) {
  DensityReport r;
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || trim(line) != "snet-density v1")
    throw FormatError("density report: missing header");
  while (std::getline(is, line)) {
    line = trim(line);
    if (line.empty()) continue;
    std::vector<std::string> tok;
    for (const auto& t : split(line, ' '))
      if (!t.empty()) tok.push_back(t);
    if (tok[0] == "layer" && tok.size() == 5) {
      LayerDensity d;
      d.nonzeros = std::stoll(tok[2]);
      d.p_l = std::stoll(tok[3]);
      d.d = parse_double(tok[4]);
      r.per_layer.emplace(tok[1], d);
    } else if (tok[0] == "model" && tok.size() == 4) {
      r.total_nonzeros = std::stoll(tok[1]);
      r.total_weights = std::stoll(tok[2]);
      r.model_density = parse_double(tok[3]);
    } else {
      throw FormatError("density report: bad line '" + line + "'");
    }
  }
  return r;
}

std::string format_plan(const CompressionPlan& plan) {
  std::ostringstream os;
  os << "snet-plan v1\n";
  for (const auto& [id, r] : plan.ratios) os << "ratio " << id << " " << format_double(r) << "\n";
  for (const auto& b : plan.removed_branches) os << "remove " << b << "\n";
  os << "provenance\n";
  os << format_density_report(plan.provenance);
  return os.str();
}

CompressionPlan parse_plan(const std::string& text) {
  CompressionPlan plan;
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || trim(line) != "snet-plan v1")
    throw FormatError("plan: missing header");
  std::string prov;
  bool in_prov = false;
  while (std::getline(is, line)) {
    if (in_prov) {
      prov += line;
      prov += "\n";
      continue;
    }
    std::string t = trim(line);
    if (t.empty()) continue;
    std::vector<std::string> tok;
    for (const auto& x : split(t, ' '))
      if (!x.empty()) tok.push_back(x);
    if (tok[0] == "ratio" && tok.size() == 3) {
      plan.ratios[tok[1]] = parse_double(tok[2]);
    } else if (tok[0] == "remove" && tok.size() == 2) {
      plan.removed_branches.insert(tok[1]);
    } else if (tok[0] == "provenance" && tok.size() == 1) {
      in_prov = true;
    } else {
      throw FormatError("plan: bad line '" + t + "'");
    }
  }
  if (!prov.empty()) plan.provenance = parse_density_report(prov);
  return plan;
}

}  // namespace snet
