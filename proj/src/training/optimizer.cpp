#include "glyphforge/training/optimizer.hpp"

#include <cmath>
#include <string>

#include "glyphforge/error.hpp"

namespace glyphforge::training {

std::string_view to_string(OptimizerKind kind) { return kind == OptimizerKind::Sgd ? "sgd" : "adam"; }

OptimizerKind parse_optimizer(std::string_view text) {
  if (text == "sgd") return OptimizerKind::Sgd;
  if (text == "adam") return OptimizerKind::Adam;
  throw Error(Errc::InvalidArgument, "unknown optimizer '" + std::string(text) + "' (expected sgd|adam)");
}

void optimizer_step(std::span<nn::Tensor* const> params, const std::vector<std::vector<double>>& grads,
                    OptimizerState& state, const OptimizerConfig& config) {
  if (grads.size() != params.size()) {
    throw Error(Errc::ShapeMismatch, std::to_string(grads.size()) + " gradients for " +
                                         std::to_string(params.size()) + " parameters");
  }
  for (std::size_t k = 0; k < params.size(); ++k) {
    if (grads[k].size() != params[k]->size()) {
      throw Error(Errc::ShapeMismatch, "gradient " + std::to_string(k) + " has " +
                                           std::to_string(grads[k].size()) + " entries, parameter has " +
                                           std::to_string(params[k]->size()));
    }
  }
  ++state.step;
  const double lr = config.learning_rate;

  if (config.kind == OptimizerKind::Sgd) {
    for (std::size_t k = 0; k < params.size(); ++k) {
      auto& p = params[k]->values;
      for (std::size_t i = 0; i < p.size(); ++i) p[i] -= lr * grads[k][i];
    }
    return;
  }

  if (state.first_moment.size() != params.size()) {
    state.first_moment.assign(params.size(), {});
    state.second_moment.assign(params.size(), {});
    for (std::size_t k = 0; k < params.size(); ++k) {
      state.first_moment[k].assign(params[k]->size(), 0.0);
      state.second_moment[k].assign(params[k]->size(), 0.0);
    }
  }
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(config.beta1, t);
  const double c2 = 1.0 - std::pow(config.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& p = params[k]->values;
    auto& m = state.first_moment[k];
    auto& v = state.second_moment[k];
    const auto& g = grads[k];
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * g[i];
      v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * g[i] * g[i];
      p[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + config.epsilon);
    }
  }
}

}  // namespace glyphforge::training
