#pragma once

#include <cstddef>
#include <vector>

#include "glyphforge/nn/tape.hpp"

namespace glyphforge::nn {

struct Window {
  std::size_t height;
  std::size_t width;
};

// Cross-correlation. x [N,Cin,H,W], kernel [Cout,Cin,kH,kW], bias [Cout]
// -> [N,Cout,(H+2p-kH)/s+1,(W+2p-kW)/s+1].
Var conv2d(Tape& tape, Var x, Var kernel, Var bias, std::size_t stride, std::size_t padding);

Var relu(Tape& tape, Var x);

// Max over each window of [N,C,H,W]; gradient goes to the first maximal
// element in row-major window order.
Var maxpool2d(Tape& tape, Var x, Window window, Window stride);

// [N,C,H,W] -> [N,W,C*H]: column t of the map becomes frame t, laid out
// channel-major (element c*H + h).
Var features_to_sequence(Tape& tape, Var fmap);
// Inverse layout of features_to_sequence for a plain tensor.
Tensor sequence_to_features(const Tensor& sequence, std::size_t channels, std::size_t height);

// y = x W^T (+ b) over the last axis. x [..., K], weight [O,K], bias [O].
Var linear(Tape& tape, Var x, Var weight);
Var linear(Tape& tape, Var x, Var weight, Var bias);

Var add(Tape& tape, Var a, Var b);

// Sum of all elements, shape [1].
Var sum(Tape& tape, Var x);

// Log-softmax over the last axis.
Var log_softmax(Tape& tape, Var x);

// Mean CTC loss over a batch of log-probabilities [N,T,C]; targets[n] holds
// class indices of sample n, blank = C-1. Shape [1].
Var ctc_loss_mean(Tape& tape, Var logp, const std::vector<std::vector<int>>& targets);

}  // namespace glyphforge::nn
