#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "glyphforge/nn/lstm.hpp"
#include "glyphforge/nn/tape.hpp"

namespace glyphforge::nn {

// conv(1->c1, 3x3, pad 1) -> relu -> maxpool 2x2
// -> conv(c1->c2, 3x3, pad 1) -> relu -> maxpool 2x1 (height only)
// -> features_to_sequence -> bilstm -> linear -> log_softmax.
struct Architecture {
  std::size_t input_height = 32;
  std::size_t input_width = 128;
  std::size_t conv1_channels = 16;
  std::size_t conv2_channels = 32;
  std::size_t hidden_size = 64;
  std::size_t bilstm_output = 64;
  std::size_t num_classes = 0;  // symbols + blank

  std::size_t frames() const { return input_width / 2; }
  std::size_t feature_height() const { return input_height / 4; }
  std::size_t frame_features() const { return conv2_channels * feature_height(); }

  void validate() const;
  friend bool operator==(const Architecture&, const Architecture&) = default;
};

struct ModelParams {
  Architecture arch;
  Tensor conv1_kernel, conv1_bias;
  Tensor conv2_kernel, conv2_bias;
  BilstmParams bilstm;
  Tensor proj_weight, proj_bias;

  // Every weight uniform in +-1/sqrt(fan_in), drawn from `seed`.
  static ModelParams initialize(const Architecture& arch, std::uint64_t seed);

  // Fixed canonical order, used for binding, optimizers and checkpoints.
  std::vector<std::pair<std::string, Tensor*>> named_tensors();
  std::vector<std::pair<std::string, const Tensor*>> named_tensors() const;
  std::size_t parameter_count() const;
};

struct GraphHandles {
  std::vector<Var> params;  // canonical order
  Var input;
  Var logp;                 // [N, T, C]
};

// Records the forward pass for batch [N,1,H,W] (intensities in [0,1]).
GraphHandles record_forward(Tape& tape, const ModelParams& model, const Tensor& batch,
                            bool trainable = true);

// Inference only: log-probabilities [N, T, C].
Tensor forward(const ModelParams& model, const Tensor& batch);

// Gradients of every parameter after tape.backward(), canonical order.
std::vector<std::vector<double>> collect_gradients(const Tape& tape, const GraphHandles& graph);

struct LossAndGradients {
  double loss = 0.0;
  std::vector<std::vector<double>> grads;
};

// Mean CTC loss over the batch together with its parameter gradients.
LossAndGradients ctc_loss_and_gradients(const ModelParams& model, const Tensor& batch,
                                        const std::vector<std::vector<int>>& targets);
double ctc_batch_loss(const ModelParams& model, const Tensor& batch,
                      const std::vector<std::vector<int>>& targets);

}  // namespace glyphforge::nn
