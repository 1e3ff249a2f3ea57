#include "glyphforge/nn/model.hpp"

#include <cmath>
#include <random>

#include "glyphforge/error.hpp"
#include "glyphforge/nn/ops.hpp"
#include "glyphforge/random.hpp"

namespace glyphforge::nn {

void Architecture::validate() const {
  if (input_height < 4 || input_width < 2) {
    throw Error(Errc::InvalidArgument, "input must be at least 4 pixels high and 2 wide");
  }
  if (conv1_channels == 0 || conv2_channels == 0 || hidden_size == 0 || bilstm_output == 0) {
    throw Error(Errc::InvalidArgument, "layer sizes must be positive");
  }
  if (num_classes < 2) {
    throw Error(Errc::InvalidArgument, "need at least one symbol class plus blank");
  }
}

namespace {

void fill_uniform(Tensor& t, double bound, std::mt19937_64& rng) {
  for (double& v : t.values) v = (2.0 * uniform_unit(rng) - 1.0) * bound;
}

LstmParams make_cell(std::size_t input, std::size_t hidden, std::mt19937_64& rng) {
  LstmParams p = LstmParams::zeros(input, hidden);
  const double bound = 1.0 / std::sqrt(static_cast<double>(input + hidden));
  for (Tensor* t : {&p.W_f, &p.W_i, &p.W_c, &p.W_o, &p.b_f, &p.b_i, &p.b_c, &p.b_o}) {
    fill_uniform(*t, bound, rng);
  }
  return p;
}

}  // namespace

ModelParams ModelParams::initialize(const Architecture& arch, std::uint64_t seed) {
  arch.validate();
  std::mt19937_64 rng(seed);
  ModelParams m;
  m.arch = arch;

  const double b1 = 1.0 / std::sqrt(9.0);
  m.conv1_kernel = Tensor({arch.conv1_channels, 1, 3, 3});
  m.conv1_bias = Tensor({arch.conv1_channels});
  fill_uniform(m.conv1_kernel, b1, rng);
  fill_uniform(m.conv1_bias, b1, rng);

  const double b2 = 1.0 / std::sqrt(9.0 * arch.conv1_channels);
  m.conv2_kernel = Tensor({arch.conv2_channels, arch.conv1_channels, 3, 3});
  m.conv2_bias = Tensor({arch.conv2_channels});
  fill_uniform(m.conv2_kernel, b2, rng);
  fill_uniform(m.conv2_bias, b2, rng);

  m.bilstm.forward_cell = make_cell(arch.frame_features(), arch.hidden_size, rng);
  m.bilstm.backward_cell = make_cell(arch.frame_features(), arch.hidden_size, rng);
  const double bo = 1.0 / std::sqrt(static_cast<double>(arch.hidden_size));
  m.bilstm.w_o1 = Tensor({arch.bilstm_output, arch.hidden_size});
  m.bilstm.w_o2 = Tensor({arch.bilstm_output, arch.hidden_size});
  fill_uniform(m.bilstm.w_o1, bo, rng);
  fill_uniform(m.bilstm.w_o2, bo, rng);

  const double bp = 1.0 / std::sqrt(static_cast<double>(arch.bilstm_output));
  m.proj_weight = Tensor({arch.num_classes, arch.bilstm_output});
  m.proj_bias = Tensor({arch.num_classes});
  fill_uniform(m.proj_weight, bp, rng);
  fill_uniform(m.proj_bias, bp, rng);
  return m;
}

std::vector<std::pair<std::string, Tensor*>> ModelParams::named_tensors() {
  auto cell = [](const std::string& prefix, LstmParams& c) {
    return std::vector<std::pair<std::string, Tensor*>>{
        {prefix + ".W_f", &c.W_f}, {prefix + ".W_i", &c.W_i}, {prefix + ".W_c", &c.W_c},
        {prefix + ".W_o", &c.W_o}, {prefix + ".b_f", &c.b_f}, {prefix + ".b_i", &c.b_i},
        {prefix + ".b_c", &c.b_c}, {prefix + ".b_o", &c.b_o}};
  };
  std::vector<std::pair<std::string, Tensor*>> out{{"conv1.weight", &conv1_kernel},
                                                   {"conv1.bias", &conv1_bias},
                                                   {"conv2.weight", &conv2_kernel},
                                                   {"conv2.bias", &conv2_bias}};
  for (auto& e : cell("bilstm.fwd", bilstm.forward_cell)) out.push_back(e);
  for (auto& e : cell("bilstm.bwd", bilstm.backward_cell)) out.push_back(e);
  out.emplace_back("bilstm.w_o1", &bilstm.w_o1);
  out.emplace_back("bilstm.w_o2", &bilstm.w_o2);
  out.emplace_back("proj.weight", &proj_weight);
  out.emplace_back("proj.bias", &proj_bias);
  return out;
}

std::vector<std::pair<std::string, const Tensor*>> ModelParams::named_tensors() const {
  std::vector<std::pair<std::string, const Tensor*>> out;
  for (auto& [name, t] : const_cast<ModelParams*>(this)->named_tensors()) out.emplace_back(name, t);
  return out;
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& [name, t] : named_tensors()) n += t->size();
  return n;
}

GraphHandles record_forward(Tape& tape, const ModelParams& model, const Tensor& batch,
                            bool trainable) {
  const Architecture& a = model.arch;
  require_rank(batch, 4, "model input");
  require_shape(batch, {batch.dim(0), 1, a.input_height, a.input_width}, "model input");
  if (batch.dim(0) == 0) throw Error(Errc::ShapeMismatch, "empty batch");

  GraphHandles g;
  for (const auto& [name, t] : model.named_tensors()) {
    g.params.push_back(trainable ? tape.parameter(*t) : tape.constant(*t));
  }
  const auto& p = g.params;
  auto cell = [&](std::size_t o) {
    return LstmVars{p[o], p[o + 1], p[o + 2], p[o + 3], p[o + 4], p[o + 5], p[o + 6], p[o + 7]};
  };
  BilstmVars bv{cell(4), cell(12), p[20], p[21]};

  g.input = tape.constant(batch);
  Var x = conv2d(tape, g.input, p[0], p[1], 1, 1);
  x = maxpool2d(tape, relu(tape, x), {2, 2}, {2, 2});
  x = conv2d(tape, x, p[2], p[3], 1, 1);
  x = maxpool2d(tape, relu(tape, x), {2, 1}, {2, 1});
  x = features_to_sequence(tape, x);
  x = bilstm(tape, x, bv);
  x = linear(tape, x, p[22], p[23]);
  g.logp = log_softmax(tape, x);
  return g;
}

Tensor forward(const ModelParams& model, const Tensor& batch) {
  Tape tape;
  const GraphHandles g = record_forward(tape, model, batch, false);
  return tape.value(g.logp);
}

std::vector<std::vector<double>> collect_gradients(const Tape& tape, const GraphHandles& graph) {
  std::vector<std::vector<double>> out;
  out.reserve(graph.params.size());
  for (Var v : graph.params) {
    const auto g = tape.grad(v);
    out.emplace_back(g.begin(), g.end());
    if (out.back().empty()) out.back().assign(tape.value(v).size(), 0.0);
  }
  return out;
}

LossAndGradients ctc_loss_and_gradients(const ModelParams& model, const Tensor& batch,
                                        const std::vector<std::vector<int>>& targets) {
  Tape tape;
  const GraphHandles g = record_forward(tape, model, batch, true);
  const Var loss = ctc_loss_mean(tape, g.logp, targets);
  tape.backward(loss);
  return {tape.value(loss).values[0], collect_gradients(tape, g)};
}

double ctc_batch_loss(const ModelParams& model, const Tensor& batch,
                      const std::vector<std::vector<int>>& targets) {
  Tape tape;
  const GraphHandles g = record_forward(tape, model, batch, false);
  return tape.value(ctc_loss_mean(tape, g.logp, targets)).values[0];
}

}  // namespace glyphforge::nn
