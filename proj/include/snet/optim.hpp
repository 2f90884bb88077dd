//
// Copyright (c) 2026 the snet authors.
// SPDX-License-Identifier: Apache-2.0
//
// Parameter update rules: AdaMax for dense training, the two-phase
// orthant-based proximal scheme for sparsity-inducing fine-tuning. The prox
// and orthant steps produce exact 0.0 entries; density accounting counts
// exactly those.
//
#pragma once

#include "snet/datagen.hpp"
#include "snet/netdef.hpp"

namespace snet {

struct AdaMaxConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// m <- b1*m + (1-b1)*g;  u <- max(b2*u, |g|);
// theta <- theta - (lr/(1-b1^t)) * m / (u + eps).
// Zero gradients leave parameters exactly unchanged.
class AdaMax {
 public:
  AdaMax(std::vector<Tensor> params, AdaMaxConfig cfg = {});

  // Applies one update using the gradients populated on the parameters.
  // Throws StateError if any parameter is missing its gradient.
  void step();

  int64_t step_count() const { return t_; }

 private:
  std::vector<Tensor> params_;
  std::vector<std::vector<double>> m_, u_;
  AdaMaxConfig cfg_;
  int64_t t_ = 0;
};

double soft_threshold(double x, double tau);

void sgd_step(Tensor& param, const std::vector<double>& grad, double lr);

// theta <- soft_threshold(theta - lr*g, lr*lambda); g is the gradient of the
// smooth part only.
void prox_sg_step(Tensor& param, const std::vector<double>& grad, double lr, double lambda);

// Sign of each coordinate as -1/0/+1 (orthant reference capture).
std::vector<int8_t> sign_snapshot(const Tensor& param);

// Coordinates with sign_ref != 0 take theta - lr*(g + lambda*sign_ref) and
// are projected to exactly 0 if the update would flip their sign; sign_ref
// == 0 coordinates stay 0. Never changes the sign of any coordinate.
void orthant_step(Tensor& param, const std::vector<double>& grad, double lr, double lambda,
                  const std::vector<int8_t>& sign_ref);

struct ObproxSchedule {
  // Step counts per phase; 0 means "half of the total run" for prox with the
  // remainder orthant. With alternating=true the two phases interleave in
  // blocks of prox_steps/orthant_steps.
  int64_t prox_steps = 0;
  int64_t orthant_steps = 0;
  bool alternating = false;
};

struct ObproxConfig {
  int epochs = 20;
  int batch = 8;
  double lr = 1e-4;
  double lambda = kPruneLambda;
  double eps = 1e-3;  // Charbonnier epsilon
  uint64_t seed = 0;
  ObproxSchedule schedule;
};

struct TrajectoryRow {
  int epoch = 0;
  std::string phase;
  double loss = 0.0;
  double density = 0.0;
  int64_t zeros = 0;
  int64_t total = 0;
};

struct ObproxResult {
  Checkpoint ckpt;
  std::vector<TrajectoryRow> trajectory;
};

// Minibatch fine-tuning of the checkpoint with the Charbonnier objective's
// gradients and prox/orthant steps per schedule. Weights get the sparse
// updates; biases (excluded from the L1 term) take plain SGD. Deterministic
// in (checkpoint, dataset, config). Aborts with TrainError on divergence.
ObproxResult obprox_run(const Checkpoint& start, const Dataset& data, const ObproxConfig& cfg);

// CSV: epoch,phase,loss,density,zeros,total
std::string trajectory_csv(const std::vector<TrajectoryRow>& rows);

}  // namespace snet
