#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "glyphforge/nn/tensor.hpp"

namespace glyphforge::nn {

// Handle to a value recorded on a Tape.
struct Var {
  std::size_t id = std::numeric_limits<std::size_t>::max();
  bool valid() const noexcept { return id != std::numeric_limits<std::size_t>::max(); }
};

// Records operations in execution order and replays them backwards.
// One tape per forward pass; a tape is not safe for concurrent use.
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, Var self)>;

  Var constant(Tensor value);
  // Leaf whose gradient is kept after backward().
  Var parameter(Tensor value);
  // Result of an op. `fn` is dropped when no input needs a gradient.
  Var record(Tensor value, std::initializer_list<Var> inputs, BackwardFn fn);

  const Tensor& value(Var v) const;
  bool requires_grad(Var v) const;
  // Gradient of the loss w.r.t. v; empty when v does not need one.
  std::span<const double> grad(Var v) const;
  // Op authors: mutable gradient buffer of an input (zero-initialized).
  std::span<double> grad_mut(Var v);

  // Reverse sweep from a single-element `loss`. Throws NoRecordedGraph on an
  // empty tape and DoubleBackward if called twice without reset().
  void backward(Var loss);
  void reset();

  std::size_t size() const noexcept { return nodes_.size(); }

 private:
  struct Node {
    Tensor tensor;
    bool requires_grad = false;
    BackwardFn backward;
  };

  const Node& node(Var v) const;

  std::deque<Node> nodes_;
  bool backward_done_ = false;
};

}  // namespace glyphforge::nn
