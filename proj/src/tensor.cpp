//
// Copyright (c) 2026 the snet authors.
// SPDX-License-Identifier: Apache-2.0
//
#include "snet/tensor.hpp"

#include <cmath>
#include <unordered_map>
#include <unordered_set>

namespace snet {

int64_t shape_numel(const Shape& shape) {
  int64_t n = 1;
  for (int64_t e : shape) {
    if (e <= 0) throw ShapeError("non-positive extent in shape " + shape_to_string(shape));
    n *= e;
  }
  return n;
}

namespace {
thread_local int g_no_grad_depth = 0;
}

NoGradGuard::NoGradGuard() { ++g_no_grad_depth; }
NoGradGuard::~NoGradGuard() { --g_no_grad_depth; }
bool grad_enabled() { return g_no_grad_depth == 0; }

Tensor Tensor::zeros(const Shape& shape, bool requires_grad) {
  return from_data(shape, std::vector<double>(static_cast<size_t>(shape_numel(shape)), 0.0),
                   requires_grad);
}

Tensor Tensor::full(const Shape& shape, double value, bool requires_grad) {
  return from_data(shape, std::vector<double>(static_cast<size_t>(shape_numel(shape)), value),
                   requires_grad);
}

Tensor Tensor::from_data(const Shape& shape, std::vector<double> data, bool requires_grad) {
  if (shape_numel(shape) != static_cast<int64_t>(data.size()))
    throw ShapeError("data length " + std::to_string(data.size()) + " does not match shape " +
                     shape_to_string(shape));
  Tensor t;
  t.impl_ = std::make_shared<TensorImpl>();
  t.impl_->shape = shape;
  t.impl_->data = std::move(data);
  t.impl_->requires_grad = requires_grad;
  return t;
}

Tensor Tensor::scalar(double value, bool requires_grad) {
  return from_data({1}, {value}, requires_grad);
}

const Shape& Tensor::shape() const {
  if (!impl_) throw StateError("undefined tensor");
  return impl_->shape;
}

int64_t Tensor::numel() const { return static_cast<int64_t>(values().size()); }

int64_t Tensor::dim(size_t axis) const {
  const Shape& s = shape();
  if (axis >= s.size())
    throw ShapeError("axis " + std::to_string(axis) + " out of range for " + shape_to_string(s));
  return s[axis];
}

size_t Tensor::ndim() const { return shape().size(); }

bool Tensor::requires_grad() const { return impl_ && impl_->requires_grad; }

bool Tensor::is_leaf() const { return impl_ && impl_->parents.empty(); }

const std::vector<double>& Tensor::values() const {
  if (!impl_) throw StateError("undefined tensor");
  return impl_->data;
}

std::vector<double>& Tensor::leaf_values() {
  if (!impl_) throw StateError("undefined tensor");
  if (!impl_->parents.empty())
    throw StateError("in-place mutation of a recorded graph node (op '" +
                     std::string(impl_->op) + "') is not allowed");
  return impl_->data;
}

double Tensor::value() const {
  const auto& v = values();
  if (v.size() != 1)
    throw ShapeError("value() requires a scalar tensor, got shape " + shape_to_string(shape()));
  return v[0];
}

bool Tensor::has_grad() const { return impl_ && impl_->grad != nullptr; }

const std::vector<double>& Tensor::grad_values() const {
  if (!has_grad()) throw StateError("tensor has no gradient populated");
  return *impl_->grad;
}

void Tensor::zero_grad() {
  if (impl_) impl_->grad.reset();
}

Tensor Tensor::detach() const {
  if (!impl_) throw StateError("undefined tensor");
  return from_data(impl_->shape, impl_->data, false);
}

Tensor Tensor::clone() const { return detach(); }

void Tensor::check_finite(const char* who) const {
  for (double v : values()) {
    if (!std::isfinite(v))
      throw NumericError(std::string(who) + ": non-finite value in tensor of shape " +
                         shape_to_string(shape()));
  }
}

const char* Tensor::op() const {
  if (!impl_) return "undefined";
  return impl_->op;
}

Tensor Tensor::make_op(Shape shape, std::vector<double> data, const char* op,
                       std::vector<Tensor> parents, BackwardFn backward_fn) {
  Tensor t = from_data(shape, std::move(data), false);
  t.impl_->op = op;
  bool track = grad_enabled();
  bool any_grad = false;
  if (track) {
    for (const Tensor& p : parents)
      if (p.requires_grad()) any_grad = true;
  }
  if (track && any_grad) {
    t.impl_->requires_grad = true;
    t.impl_->parents = std::move(parents);
    t.impl_->backward_fn = std::move(backward_fn);
  }
  return t;
}

namespace {

// Iterative post-order DFS over parent edges; result is topologically ordered
// (every node appears after all its parents).
std::vector<TensorImpl*> topo_order(TensorImpl* root) {
  std::vector<TensorImpl*> order;
  std::unordered_set<TensorImpl*> visited;
  struct Frame {
    TensorImpl* node;
    size_t next_parent;
  };
  std::vector<Frame> stack;
  if (!visited.count(root)) stack.push_back({root, 0});
  visited.insert(root);
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next_parent < f.node->parents.size()) {
      TensorImpl* p = f.node->parents[f.next_parent++].impl_.get();
      if (p && p->requires_grad && !visited.count(p)) {
        visited.insert(p);
        stack.push_back({p, 0});
      }
    } else {
      order.push_back(f.node);
      stack.pop_back();
    }
  }
  return order;
}

}  // namespace

struct GradCtx::State {
  TensorImpl* node;
  std::unordered_map<TensorImpl*, std::vector<double>>* gradmap;
};

double* GradCtx::parent_grad(size_t i) {
  TensorImpl* p = s_->node->parents[i].impl_.get();
  if (!p || !p->requires_grad) return nullptr;
  auto it = s_->gradmap->find(p);
  if (it == s_->gradmap->end()) {
    it = s_->gradmap->emplace(p, std::vector<double>(p->data.size(), 0.0)).first;
  }
  return it->second.data();
}

void backward(const Tensor& loss) {
  if (!loss.defined()) throw StateError("backward: undefined tensor");
  if (loss.numel() != 1)
    throw ShapeError("backward: loss must be scalar, got shape " + shape_to_string(loss.shape()));
  TensorImpl* root = loss.impl_.get();
  if (!root->requires_grad)
    throw StateError("backward: loss is not connected to a recorded graph");

  std::vector<TensorImpl*> order = topo_order(root);

  // Repeated backward without zero_grad is a training bug; refuse it.
  for (TensorImpl* n : order) {
    if (n->parents.empty() && n->grad)
      throw StateError("backward: gradients already populated; call zero_grad first");
  }

  std::unordered_map<TensorImpl*, std::vector<double>> gradmap;
  gradmap.emplace(root, std::vector<double>{1.0});

  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    TensorImpl* n = *it;
    auto git = gradmap.find(n);
    if (git == gradmap.end()) continue;  // no gradient flowed here
    std::vector<double> g = std::move(git->second);
    gradmap.erase(git);
    if (n->parents.empty()) {
      n->grad = std::make_unique<std::vector<double>>(std::move(g));
    } else if (n->backward_fn) {
      GradCtx::State st{n, &gradmap};
      GradCtx ctx(&st);
      n->backward_fn(g.data(), ctx);
    }
  }
}

std::vector<GraphNode> trace(const Tensor& root) {
  if (!root.defined()) throw StateError("trace: undefined tensor");
  std::vector<GraphNode> out;
  // Reuse the same traversal but include non-grad parents for completeness.
  std::vector<TensorImpl*> order;
  std::unordered_set<TensorImpl*> visited;
  struct Frame {
    TensorImpl* node;
    size_t next_parent;
  };
  std::vector<Frame> stack{{root.impl_.get(), 0}};
  visited.insert(root.impl_.get());
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next_parent < f.node->parents.size()) {
      TensorImpl* p = f.node->parents[f.next_parent++].impl_.get();
      if (p && !visited.count(p)) {
        visited.insert(p);
        stack.push_back({p, 0});
      }
    } else {
      order.push_back(f.node);
      stack.pop_back();
    }
  }
  out.reserve(order.size());
  for (TensorImpl* n : order) {
    GraphNode gn;
    gn.op = n->op;
    gn.output = n;
    for (const Tensor& p : n->parents) gn.inputs.push_back(p.impl_.get());
    out.push_back(std::move(gn));
  }
  return out;
}

}  // namespace snet
