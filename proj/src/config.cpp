//
// Copyright (c) 2026 the snet authors.
// SPDX-License-Identifier: Apache-2.0
//
#include "snet/config.hpp"

#include <sstream>

namespace snet {

std::string ToolConfig::to_text() const {
  std::ostringstream os;
  os << "snet-config v1\n";
  os << "data.sequences = " << data_sequences << "\n";
  os << "data.res = " << data_res << "\n";
  os << "data.channels = " << data_channels << "\n";
  os << "teacher.base_width = " << teacher.base_width << "\n";
  os << "teacher.bottleneck_width = " << teacher.bottleneck_width << "\n";
  os << "teacher.branchb_width = " << teacher.branchb_width << "\n";
  os << "teacher.fusion_width = " << teacher.fusion_width << "\n";
  os << "teacher.refine_width = " << teacher.refine_width << "\n";
  os << "train.epochs = " << train_epochs << "\n";
  os << "train.lr = " << format_double(train_lr) << "\n";
  os << "train.batch = " << train_batch << "\n";
  os << "train.alpha = " << format_double(train_alpha) << "\n";
  os << "train.pyramid_levels = " << train_pyramid_levels << "\n";
  os << "prune.epochs = " << prune_epochs << "\n";
  os << "prune.lr = " << format_double(prune_lr) << "\n";
  os << "prune.lambda = " << format_double(prune_lambda) << "\n";
  os << "prune.batch = " << prune_batch << "\n";
  os << "prune.alternating = " << (prune_alternating ? 1 : 0) << "\n";
  os << "prune.prox_steps = " << prune_prox_steps << "\n";
  os << "prune.orthant_steps = " << prune_orthant_steps << "\n";
  os << "plan.branch_threshold = " << format_double(branch_threshold) << "\n";
  os << "bench.reps = " << bench_reps << "\n";
  os << "bench.res = " << bench_res << "\n";
  return os.str();
}

ToolConfig ToolConfig::from_text(const std::string& text) {
  ToolConfig c;
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || trim(line) != "snet-config v1")
    throw ConfigError("config: missing 'snet-config v1' header");
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    std::string key = trim(t.substr(0, eq));
    std::string val = trim(t.substr(eq + 1));
    try {
      if (key == "data.sequences") c.data_sequences = std::stoll(val);
      else if (key == "data.res") c.data_res = std::stoi(val);
      else if (key == "data.channels") c.data_channels = std::stoi(val);
      else if (key == "teacher.base_width") c.teacher.base_width = std::stoll(val);
      else if (key == "teacher.bottleneck_width") c.teacher.bottleneck_width = std::stoll(val);
      else if (key == "teacher.branchb_width") c.teacher.branchb_width = std::stoll(val);
      else if (key == "teacher.fusion_width") c.teacher.fusion_width = std::stoll(val);
      else if (key == "teacher.refine_width") c.teacher.refine_width = std::stoll(val);
      else if (key == "train.epochs") c.train_epochs = std::stoi(val);
      else if (key == "train.lr") c.train_lr = parse_double(val);
      else if (key == "train.batch") c.train_batch = std::stoi(val);
      else if (key == "train.alpha") c.train_alpha = parse_double(val);
      else if (key == "train.pyramid_levels") c.train_pyramid_levels = std::stoi(val);
      else if (key == "prune.epochs") c.prune_epochs = std::stoi(val);
      else if (key == "prune.lr") c.prune_lr = parse_double(val);
      else if (key == "prune.lambda") c.prune_lambda = parse_double(val);
      else if (key == "prune.batch") c.prune_batch = std::stoi(val);
      else if (key == "prune.alternating") c.prune_alternating = val == "1" || val == "true";
      else if (key == "prune.prox_steps") c.prune_prox_steps = std::stoll(val);
      else if (key == "prune.orthant_steps") c.prune_orthant_steps = std::stoll(val);
      else if (key == "plan.branch_threshold") c.branch_threshold = parse_double(val);
      else if (key == "bench.reps") c.bench_reps = std::stoi(val);
      else if (key == "bench.res") c.bench_res = std::stoi(val);
      else throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError("config line " + std::to_string(lineno) + ": bad value for '" + key +
                        "': " + e.what());
    }
  }
  // The teacher's image channels always follow the dataset.
  c.teacher.image_channels = c.data_channels;
  return c;
}

}  // namespace snet
