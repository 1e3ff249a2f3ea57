#include "glyphforge/nn/tape.hpp"

#include "glyphforge/error.hpp"

namespace glyphforge::nn {

Var Tape::constant(Tensor value) {
  nodes_.push_back({std::move(value), false, {}});
  return Var{nodes_.size() - 1};
}

Var Tape::parameter(Tensor value) {
  nodes_.push_back({std::move(value), true, {}});
  return Var{nodes_.size() - 1};
}

Var Tape::record(Tensor value, std::initializer_list<Var> inputs, BackwardFn fn) {
  bool needs = false;
  for (Var in : inputs) needs = needs || node(in).requires_grad;
  nodes_.push_back({std::move(value), needs, needs ? std::move(fn) : BackwardFn{}});
  return Var{nodes_.size() - 1};
}

const Tape::Node& Tape::node(Var v) const {
  if (v.id >= nodes_.size()) throw Error(Errc::IndexOutOfRange, "variable not on this tape");
  return nodes_[v.id];
}

const Tensor& Tape::value(Var v) const { return node(v).tensor; }

bool Tape::requires_grad(Var v) const { return node(v).requires_grad; }

std::span<const double> Tape::grad(Var v) const { return node(v).tensor.grad; }

std::span<double> Tape::grad_mut(Var v) {
  Node& n = nodes_.at(v.id);
  if (n.tensor.grad.size() != n.tensor.values.size()) n.tensor.grad.assign(n.tensor.values.size(), 0.0);
  return n.tensor.grad;
}

void Tape::backward(Var loss) {
  if (nodes_.empty()) throw Error(Errc::NoRecordedGraph, "backward() on an empty tape");
  if (backward_done_) throw Error(Errc::DoubleBackward, "backward() already ran on this tape");
  const Node& root = node(loss);
  if (root.tensor.size() != 1) {
    throw Error(Errc::ShapeMismatch, "backward() needs a single-element loss, got shape " +
                                         to_string(root.tensor.shape));
  }
  backward_done_ = true;
  for (std::size_t i = 0; i <= loss.id; ++i) {
    Node& n = nodes_[i];
    if (n.requires_grad) n.tensor.grad.assign(n.tensor.values.size(), 0.0);
  }
  if (!root.requires_grad) return;
  nodes_[loss.id].tensor.grad[0] = 1.0;
  for (std::size_t i = loss.id + 1; i-- > 0;) {
    if (nodes_[i].backward) nodes_[i].backward(*this, Var{i});
  }
}

void Tape::reset() {
  nodes_.clear();
  backward_done_ = false;
}

}  // namespace glyphforge::nn
