#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "glyphforge/nn/tensor.hpp"

namespace glyphforge::training {

enum class OptimizerKind { Sgd, Adam };

std::string_view to_string(OptimizerKind kind);
OptimizerKind parse_optimizer(std::string_view text);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::Adam;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Adam moments, one vector per parameter tensor; empty until the first step.
struct OptimizerState {
  std::uint64_t step = 0;
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;
};

// Sgd: p -= lr * g. Adam: bias-corrected moment update.
void optimizer_step(std::span<nn::Tensor* const> params, const std::vector<std::vector<double>>& grads,
                    OptimizerState& state, const OptimizerConfig& config);

}  // namespace glyphforge::training
