//
// Copyright (c) 2026 the snet authors.
// SPDX-License-Identifier: Apache-2.0
//
// Reverse-mode autodiff tensor. A Tensor is a shared handle to an immutable
// node; ops build a DAG of nodes and backward() walks it once in reverse
// topological order. Gradients of interior nodes live only for the duration
// of the walk; leaf gradients persist on the node until zero_grad().
//
#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "snet/util.hpp"

namespace snet {

using Shape = std::vector<int64_t>;

int64_t shape_numel(const Shape& shape);

struct TensorImpl;

// During backward, kernels accumulate into parent gradient buffers through
// this context. parent_grad(i) returns nullptr when parents[i] does not
// require grad, so kernels can skip that work.
class GradCtx {
 public:
  double* parent_grad(size_t i);

 private:
  friend void backward(const class Tensor& loss);
  struct State;
  explicit GradCtx(State* s) : s_(s) {}
  State* s_;
};

using BackwardFn = std::function<void(const double* grad_out, GradCtx& ctx)>;

class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(const Shape& shape, bool requires_grad = false);
  static Tensor full(const Shape& shape, double value, bool requires_grad = false);
  static Tensor from_data(const Shape& shape, std::vector<double> data,
                          bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);

  bool defined() const { return impl_ != nullptr; }
  const Shape& shape() const;
  int64_t numel() const;
  int64_t dim(size_t axis) const;
  size_t ndim() const;

  bool requires_grad() const;
  bool is_leaf() const;

  const std::vector<double>& values() const;
  // Mutable access to a leaf's payload (optimizer updates). Throws StateError
  // on non-leaf tensors: nodes inside a recorded graph are immutable.
  std::vector<double>& leaf_values();

  double value() const;  // scalar tensors only

  bool has_grad() const;
  const std::vector<double>& grad_values() const;
  void zero_grad();

  Tensor detach() const;
  Tensor clone() const;

  // Throws NumericError naming `who` if any element is NaN or +-Inf.
  void check_finite(const char* who) const;

  const char* op() const;
  const TensorImpl* node() const { return impl_.get(); }

  // Op constructors (used by ops.cpp; stable public surface for extensions).
  static Tensor make_op(Shape shape, std::vector<double> data, const char* op,
                        std::vector<Tensor> parents, BackwardFn backward_fn);

  std::shared_ptr<TensorImpl> impl_;
};

// Populates grad on every reachable requires-grad leaf. Errors: non-scalar
// loss (ShapeError); loss without a recorded graph (StateError); any reachable
// leaf already holding a gradient (StateError - zero_grad first).
void backward(const Tensor& loss);

// Ordered record of the recorded primitive applications reaching `root`
// (inputs always precede their consumer).
struct GraphNode {
  std::string op;
  std::vector<const TensorImpl*> inputs;
  const TensorImpl* output;
};
std::vector<GraphNode> trace(const Tensor& root);

// While alive, newly built ops do not record graph edges (teacher forward
// passes, metric evaluation). Nestable; thread-local.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;
};

bool grad_enabled();

struct TensorImpl {
  Shape shape;
  std::vector<double> data;
  bool requires_grad = false;
  std::unique_ptr<std::vector<double>> grad;  // leaves only, set by backward()
  std::vector<Tensor> parents;
  BackwardFn backward_fn;
  const char* op = "leaf";
};

}  // namespace snet
