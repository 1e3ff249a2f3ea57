#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "glyphforge/nn/tape.hpp"

namespace glyphforge::nn {

// Gate weights act on the concatenation [h_prev, x]; every W_* is
// [hidden, hidden + input] and every b_* is [hidden].
struct LstmParams {
  std::size_t input_size = 0;
  std::size_t hidden_size = 0;
  Tensor W_f, W_i, W_c, W_o;
  Tensor b_f, b_i, b_c, b_o;

  static LstmParams zeros(std::size_t input_size, std::size_t hidden_size);
  void validate() const;  // ShapeMismatch on inconsistent shapes
};

struct LstmStepResult {
  std::vector<double> h;
  std::vector<double> c;
  // Gate activations, kept for inspection.
  std::vector<double> forget;
  std::vector<double> input;
  std::vector<double> candidate;
  std::vector<double> output;
};

// One cell update:
//   f = sigmoid(W_f [h,x] + b_f)    i = sigmoid(W_i [h,x] + b_i)
//   g = tanh(W_c [h,x] + b_c)       o = sigmoid(W_o [h,x] + b_o)
//   c' = f * c + i * g              h' = o * tanh(c')
LstmStepResult lstm_step(std::span<const double> x, std::span<const double> h_prev,
                         std::span<const double> c_prev, const LstmParams& params);

// Output O_t = w_o1 h_fwd(t) + w_o2 h_bwd(t); w_o1, w_o2 are [out, hidden].
struct BilstmParams {
  LstmParams forward_cell;
  LstmParams backward_cell;
  Tensor w_o1;
  Tensor w_o2;

  void validate() const;
};

struct LstmVars {
  Var W_f, W_i, W_c, W_o;
  Var b_f, b_i, b_c, b_o;
};

struct BilstmVars {
  LstmVars forward_cell;
  LstmVars backward_cell;
  Var w_o1;
  Var w_o2;
};

// Places the parameters on the tape, as trainable leaves or as constants.
LstmVars bind(Tape& tape, const LstmParams& params, bool trainable);
BilstmVars bind(Tape& tape, const BilstmParams& params, bool trainable);

// Runs one cell over seq [N,T,D] from zero state and returns the hidden
// states [N,T,H]. With `reverse` the cell consumes t = T-1 .. 0, so the state
// at t depends on frames t..T-1; output position t still holds h(t).
Var lstm_layer(Tape& tape, Var seq, const LstmVars& params, bool reverse);

// Both directions over seq [N,T,D] mixed per frame into [N,T,out]. Throws
// EmptySequence when T = 0.
Var bilstm(Tape& tape, Var seq, const BilstmVars& params);

}  // namespace glyphforge::nn
