//
// Copyright (c) 2026 the snet authors.
// SPDX-License-Identifier: Apache-2.0
//
#include "snet/optim.hpp"

#include <cmath>
#include <sstream>

#include "snet/losses.hpp"
#include "snet/pruner.hpp"

namespace snet {

AdaMax::AdaMax(std::vector<Tensor> params, AdaMaxConfig cfg)
    : params_(std::move(params)), cfg_(cfg) {
  if (!(cfg_.lr > 0)) throw ConfigError("AdaMax: lr must be positive");
  for (const Tensor& p : params_) {
    m_.emplace_back(p.values().size(), 0.0);
    u_.emplace_back(p.values().size(), 0.0);
  }
}

void AdaMax::step() {
  ++t_;
  const double bias_fix = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double scale = cfg_.lr / bias_fix;
  for (size_t i = 0; i < params_.size(); ++i) {
    Tensor& p = params_[i];
    if (!p.has_grad())
      throw StateError("AdaMax: parameter " + std::to_string(i) + " has no gradient");
    const std::vector<double>& g = p.grad_values();
    std::vector<double>& theta = p.leaf_values();
    std::vector<double>& m = m_[i];
    std::vector<double>& u = u_[i];
    for (size_t j = 0; j < theta.size(); ++j) {
      m[j] = cfg_.beta1 * m[j] + (1.0 - cfg_.beta1) * g[j];
      u[j] = std::max(cfg_.beta2 * u[j], std::fabs(g[j]));
      theta[j] -= scale * m[j] / (u[j] + cfg_.eps);
    }
  }
}

double soft_threshold(double x, double tau) {
  if (x > tau) return x - tau;
  if (x < -tau) return x + tau;
  return 0.0;
}

void sgd_step(Tensor& param, const std::vector<double>& grad, double lr) {
  std::vector<double>& theta = param.leaf_values();
  if (grad.size() != theta.size())
    throw ShapeError("sgd_step: gradient size mismatch");
  for (size_t i = 0; i < theta.size(); ++i) theta[i] -= lr * grad[i];
}

void prox_sg_step(Tensor& param, const std::vector<double>& grad, double lr, double lambda) {
  if (lambda < 0) throw NumericError("prox_sg_step: lambda must be >= 0");
  std::vector<double>& theta = param.leaf_values();
  if (grad.size() != theta.size())
    throw ShapeError("prox_sg_step: gradient size mismatch");
  const double tau = lr * lambda;
  for (size_t i = 0; i < theta.size(); ++i)
    theta[i] = soft_threshold(theta[i] - lr * grad[i], tau);
}

std::vector<int8_t> sign_snapshot(const Tensor& param) {
  const std::vector<double>& v = param.values();
  std::vector<int8_t> s(v.size());
  for (size_t i = 0; i < v.size(); ++i) s[i] = v[i] > 0 ? 1 : (v[i] < 0 ? -1 : 0);
  return s;
}

void orthant_step(Tensor& param, const std::vector<double>& grad, double lr, double lambda,
                  const std::vector<int8_t>& sign_ref) {
  std::vector<double>& theta = param.leaf_values();
  if (grad.size() != theta.size() || sign_ref.size() != theta.size())
    throw ShapeError("orthant_step: size mismatch between parameter, gradient and sign_ref");
  for (size_t i = 0; i < theta.size(); ++i) {
    const int8_t s = sign_ref[i];
    if (s == 0) {
      theta[i] = 0.0;  // frozen zero set
      continue;
    }
    double v = theta[i] - lr * (grad[i] + lambda * static_cast<double>(s));
    // Project any sign flip to exactly zero.
    theta[i] = (s > 0 ? v > 0 : v < 0) ? v : 0.0;
  }
}

namespace {

const char* phase_name(bool orthant) { return orthant ? "orthant" : "prox"; }

Checkpoint clone_checkpoint(const Checkpoint& src) {
  Checkpoint out;
  out.spec = src.spec;
  out.meta = src.meta;
  for (const auto& [id, p] : src.params) {
    LayerParams np;
    np.weight = Tensor::from_data(p.weight.shape(), p.weight.values(), true);
    np.bias = Tensor::from_data(p.bias.shape(), p.bias.values(), true);
    out.params.emplace(id, std::move(np));
  }
  return out;
}

}  // namespace

ObproxResult obprox_run(const Checkpoint& start, const Dataset& data, const ObproxConfig& cfg) {
  if (cfg.epochs < 1) throw ConfigError("obprox_run: epochs must be >= 1");
  if (cfg.batch < 1) throw ConfigError("obprox_run: batch must be >= 1");
  if (cfg.lambda < 0) throw NumericError("obprox_run: lambda must be >= 0");
  std::vector<size_t> train = data.split_indices(Split::train);
  if (train.empty()) throw StateError("obprox_run: dataset has no training split");

  ObproxResult res;
  res.ckpt = clone_checkpoint(start);
  Checkpoint& ckpt = res.ckpt;

  const int64_t steps_per_epoch =
      (static_cast<int64_t>(train.size()) + cfg.batch - 1) / cfg.batch;
  const int64_t total_steps = steps_per_epoch * cfg.epochs;
  int64_t np = cfg.schedule.prox_steps, no = cfg.schedule.orthant_steps;
  if (np <= 0 && no <= 0) {
    np = total_steps / 2;
    no = total_steps - np;
  } else if (np <= 0) {
    np = std::max<int64_t>(0, total_steps - no);
  } else if (no <= 0) {
    no = std::max<int64_t>(0, total_steps - np);
  }
  auto in_orthant = [&](int64_t step) {
    if (cfg.schedule.alternating) {
      const int64_t period = np + no;
      return period > 0 && step % period >= np;
    }
    return step >= np;
  };

  Rng shuffle_rng = Rng::seeded(Rng::derive(cfg.seed, 0x0b9));
  std::map<std::string, std::vector<int8_t>> sign_refs;
  bool prev_orthant = false;
  int64_t step = 0;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    shuffle_rng.shuffle(train);
    double loss_sum = 0.0;
    int64_t batches = 0;
    bool epoch_phase_orthant = false;
    for (size_t pos = 0; pos < train.size(); pos += static_cast<size_t>(cfg.batch)) {
      std::vector<size_t> idx(train.begin() + static_cast<std::ptrdiff_t>(pos),
                              train.begin() +
                                  static_cast<std::ptrdiff_t>(
                                      std::min(pos + static_cast<size_t>(cfg.batch),
                                               train.size())));
      Batch batch = make_batch(data, idx);
      ForwardResult fwd = forward_interpolate(ckpt, batch.frames);
      Tensor loss = charbonnier(fwd.out, batch.gt, cfg.eps);
      const double lv = loss.value();
      if (!std::isfinite(lv))
        throw TrainError("obprox_run: loss diverged at epoch " + std::to_string(epoch) +
                         " batch " + std::to_string(batches));
      backward(loss);

      const bool orthant_now = in_orthant(step);
      epoch_phase_orthant = orthant_now;
      if (orthant_now && (!prev_orthant || sign_refs.empty())) {
        sign_refs.clear();
        for (const auto& l : ckpt.spec.layers)
          if (l.prunable) sign_refs[l.id] = sign_snapshot(ckpt.params.at(l.id).weight);
      }
      for (const auto& l : ckpt.spec.layers) {
        LayerParams& p = ckpt.params.at(l.id);
        if (l.prunable) {
          if (orthant_now)
            orthant_step(p.weight, p.weight.grad_values(), cfg.lr, cfg.lambda,
                         sign_refs.at(l.id));
          else
            prox_sg_step(p.weight, p.weight.grad_values(), cfg.lr, cfg.lambda);
        } else {
          sgd_step(p.weight, p.weight.grad_values(), cfg.lr);
        }
        sgd_step(p.bias, p.bias.grad_values(), cfg.lr);
      }
      ckpt.zero_grads();
      prev_orthant = orthant_now;
      ++step;
      loss_sum += lv;
      ++batches;
    }
    DensityReport dr = model_density(ckpt);
    TrajectoryRow row;
    row.epoch = epoch;
    row.phase = phase_name(epoch_phase_orthant);
    row.loss = loss_sum / static_cast<double>(batches);
    row.density = dr.model_density;
    row.zeros = dr.total_weights - dr.total_nonzeros;
    row.total = dr.total_weights;
    res.trajectory.push_back(row);
    ckpt.meta.loss_curve.push_back(row.loss);
  }

  canonicalize_f32(ckpt);
  ckpt.meta.epoch = cfg.epochs;
  ckpt.meta.seed = cfg.seed;
  ckpt.meta.phase = "prune";
  return res;
}

std::string trajectory_csv(const std::vector<TrajectoryRow>& rows) {
  std::ostringstream os;
  os << "epoch,phase,loss,density,zeros,total\n";
  for (const auto& r : rows)
    os << r.epoch << "," << r.phase << "," << format_double(r.loss) << ","
       << format_double(r.density) << "," << r.zeros << "," << r.total << "\n";
  return os.str();
}

}  // namespace snet
