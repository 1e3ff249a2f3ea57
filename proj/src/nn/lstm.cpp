#include "glyphforge/nn/lstm.hpp"

#include <array>
#include <cmath>
#include <memory>

#include "glyphforge/error.hpp"
#include "glyphforge/nn/ops.hpp"
#include "kernels.hpp"

namespace glyphforge::nn {

namespace {

using kernels::axpy;
using kernels::dot;

inline double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

enum Gate { kForget = 0, kInput = 1, kCandidate = 2, kOutput = 3 };

struct CellView {
  std::size_t hidden;
  std::size_t input;
  std::array<const double*, 4> W;
  std::array<const double*, 4> b;

  std::size_t concat() const { return hidden + input; }
};

// gates[q*H + r] receives the activation of gate q, row r.
void cell_forward(const CellView& cell, const double* z, const double* c_prev, double* gates,
                  double* c, double* tanh_c, double* h) {
  const std::size_t H = cell.hidden, Z = cell.concat();
  for (int q = 0; q < 4; ++q) {
    const double* W = cell.W[q];
    for (std::size_t r = 0; r < H; ++r) {
      const double a = dot(W + r * Z, z, Z) + cell.b[q][r];
      gates[q * H + r] = q == kCandidate ? std::tanh(a) : sigmoid(a);
    }
  }
  for (std::size_t r = 0; r < H; ++r) {
    const double f = gates[kForget * H + r];
    const double i = gates[kInput * H + r];
    const double g = gates[kCandidate * H + r];
    const double o = gates[kOutput * H + r];
    c[r] = f * c_prev[r] + i * g;
    tanh_c[r] = std::tanh(c[r]);
    h[r] = o * tanh_c[r];
  }
}

CellView view_of(const LstmParams& p) {
  return {p.hidden_size,
          p.input_size,
          {p.W_f.values.data(), p.W_i.values.data(), p.W_c.values.data(), p.W_o.values.data()},
          {p.b_f.values.data(), p.b_i.values.data(), p.b_c.values.data(), p.b_o.values.data()}};
}

void check_gate(const Tensor& W, const Tensor& b, std::size_t H, std::size_t D, const char* name) {
  require_shape(W, {H, H + D}, name);
  require_shape(b, {H}, name);
}

}  // namespace

LstmParams LstmParams::zeros(std::size_t input_size, std::size_t hidden_size) {
  LstmParams p;
  p.input_size = input_size;
  p.hidden_size = hidden_size;
  const Shape w{hidden_size, hidden_size + input_size};
  const Shape b{hidden_size};
  p.W_f = p.W_i = p.W_c = p.W_o = Tensor(w);
  p.b_f = p.b_i = p.b_c = p.b_o = Tensor(b);
  return p;
}

void LstmParams::validate() const {
  check_gate(W_f, b_f, hidden_size, input_size, "forget gate");
  check_gate(W_i, b_i, hidden_size, input_size, "input gate");
  check_gate(W_c, b_c, hidden_size, input_size, "candidate");
  check_gate(W_o, b_o, hidden_size, input_size, "output gate");
}

void BilstmParams::validate() const {
  forward_cell.validate();
  backward_cell.validate();
  if (forward_cell.hidden_size != backward_cell.hidden_size ||
      forward_cell.input_size != backward_cell.input_size) {
    throw Error(Errc::ShapeMismatch, "forward and backward cells differ in size");
  }
  require_rank(w_o1, 2, "w_o1");
  require_shape(w_o1, {w_o1.dim(0), forward_cell.hidden_size}, "w_o1");
  require_shape(w_o2, w_o1.shape, "w_o2");
}

LstmStepResult lstm_step(std::span<const double> x, std::span<const double> h_prev,
                         std::span<const double> c_prev, const LstmParams& params) {
  params.validate();
  const std::size_t H = params.hidden_size, D = params.input_size;
  if (x.size() != D || h_prev.size() != H || c_prev.size() != H) {
    throw Error(Errc::ShapeMismatch, "lstm_step: input " + std::to_string(x.size()) + ", state " +
                                         std::to_string(h_prev.size()) + "/" +
                                         std::to_string(c_prev.size()) + " for a cell of input " +
                                         std::to_string(D) + ", hidden " + std::to_string(H));
  }
  std::vector<double> z(h_prev.begin(), h_prev.end());
  z.insert(z.end(), x.begin(), x.end());
  std::vector<double> gates(4 * H), tanh_c(H);
  LstmStepResult out;
  out.h.resize(H);
  out.c.resize(H);
  cell_forward(view_of(params), z.data(), c_prev.data(), gates.data(), out.c.data(),
               tanh_c.data(), out.h.data());
  out.forget.assign(gates.begin(), gates.begin() + H);
  out.input.assign(gates.begin() + H, gates.begin() + 2 * H);
  out.candidate.assign(gates.begin() + 2 * H, gates.begin() + 3 * H);
  out.output.assign(gates.begin() + 3 * H, gates.end());
  return out;
}

LstmVars bind(Tape& tape, const LstmParams& p, bool trainable) {
  auto put = [&](const Tensor& t) { return trainable ? tape.parameter(t) : tape.constant(t); };
  return {put(p.W_f), put(p.W_i), put(p.W_c), put(p.W_o),
          put(p.b_f), put(p.b_i), put(p.b_c), put(p.b_o)};
}

BilstmVars bind(Tape& tape, const BilstmParams& p, bool trainable) {
  p.validate();
  BilstmVars v;
  v.forward_cell = bind(tape, p.forward_cell, trainable);
  v.backward_cell = bind(tape, p.backward_cell, trainable);
  v.w_o1 = trainable ? tape.parameter(p.w_o1) : tape.constant(p.w_o1);
  v.w_o2 = trainable ? tape.parameter(p.w_o2) : tape.constant(p.w_o2);
  return v;
}

Var lstm_layer(Tape& tape, Var seq_v, const LstmVars& pv, bool reverse) {
  const Tensor& seq = tape.value(seq_v);
  require_rank(seq, 3, "lstm_layer input");
  const std::size_t N = seq.dim(0), T = seq.dim(1), D = seq.dim(2);
  if (T == 0) throw Error(Errc::EmptySequence, "lstm_layer needs at least one frame");

  const std::array<Var, 4> Wv{pv.W_f, pv.W_i, pv.W_c, pv.W_o};
  const std::array<Var, 4> bv{pv.b_f, pv.b_i, pv.b_c, pv.b_o};
  const std::size_t H = tape.value(pv.W_f).shape.at(0);
  for (int q = 0; q < 4; ++q) {
    check_gate(tape.value(Wv[q]), tape.value(bv[q]), H, D, "lstm_layer gate");
  }
  CellView cell{H, D, {}, {}};
  for (int q = 0; q < 4; ++q) {
    cell.W[q] = tape.value(Wv[q]).values.data();
    cell.b[q] = tape.value(bv[q]).values.data();
  }
  const std::size_t Z = H + D;

  // Per (n, t) cache: z (Z), gates (4H), c (H), tanh(c) (H).
  const std::size_t stride = Z + 6 * H;
  auto cache = std::make_shared<std::vector<double>>(N * T * stride);
  Tensor out({N, T, H});
  std::vector<double> zero_state(H, 0.0);

  for (std::size_t n = 0; n < N; ++n) {
    const double* h_prev = zero_state.data();
    const double* c_prev = zero_state.data();
    for (std::size_t step = 0; step < T; ++step) {
      const std::size_t t = reverse ? T - 1 - step : step;
      double* slot = cache->data() + (n * T + t) * stride;
      double* z = slot;
      double* gates = z + Z;
      double* c = gates + 4 * H;
      double* tanh_c = c + H;
      std::copy(h_prev, h_prev + H, z);
      const double* x = seq.values.data() + (n * T + t) * D;
      std::copy(x, x + D, z + H);
      double* h = out.values.data() + (n * T + t) * H;
      cell_forward(cell, z, c_prev, gates, c, tanh_c, h);
      h_prev = h;
      c_prev = c;
    }
  }

  auto backward = [=](Tape& tp, Var self) {
    const double* gout = tp.grad(self).data();
    std::array<double*, 4> gW{}, gb{};
    std::array<const double*, 4> W{};
    for (int q = 0; q < 4; ++q) {
      W[q] = tp.value(Wv[q]).values.data();
      gW[q] = tp.requires_grad(Wv[q]) ? tp.grad_mut(Wv[q]).data() : nullptr;
      gb[q] = tp.requires_grad(bv[q]) ? tp.grad_mut(bv[q]).data() : nullptr;
    }
    double* gx = tp.requires_grad(seq_v) ? tp.grad_mut(seq_v).data() : nullptr;

    std::vector<double> dh_next(H), dc_next(H), da(4 * H), dz(Z);
    for (std::size_t n = 0; n < N; ++n) {
      std::fill(dh_next.begin(), dh_next.end(), 0.0);
      std::fill(dc_next.begin(), dc_next.end(), 0.0);
      for (std::size_t step = T; step-- > 0;) {
        const std::size_t t = reverse ? T - 1 - step : step;
        const double* slot = cache->data() + (n * T + t) * stride;
        const double* z = slot;
        const double* gates = z + Z;
        const double* tanh_c = gates + 5 * H;
        // Previous cell state: zero at the first processed step.
        const double* c_prev = nullptr;
        if (step > 0) {
          const std::size_t tp_prev = reverse ? t + 1 : t - 1;
          c_prev = cache->data() + (n * T + tp_prev) * stride + Z + 4 * H;
        }
        const double* go = gout + (n * T + t) * H;
        for (std::size_t r = 0; r < H; ++r) {
          const double f = gates[kForget * H + r];
          const double i = gates[kInput * H + r];
          const double g = gates[kCandidate * H + r];
          const double o = gates[kOutput * H + r];
          const double dh = go[r] + dh_next[r];
          const double dct = dc_next[r] + dh * o * (1.0 - tanh_c[r] * tanh_c[r]);
          const double cp = c_prev ? c_prev[r] : 0.0;
          da[kForget * H + r] = dct * cp * f * (1.0 - f);
          da[kInput * H + r] = dct * g * i * (1.0 - i);
          da[kCandidate * H + r] = dct * i * (1.0 - g * g);
          da[kOutput * H + r] = dh * tanh_c[r] * o * (1.0 - o);
          dc_next[r] = dct * f;
        }
        std::fill(dz.begin(), dz.end(), 0.0);
        for (int q = 0; q < 4; ++q) {
          for (std::size_t r = 0; r < H; ++r) {
            const double a = da[q * H + r];
            if (gW[q]) axpy(a, z, gW[q] + r * Z, Z);
            if (gb[q]) gb[q][r] += a;
            axpy(a, W[q] + r * Z, dz.data(), Z);
          }
        }
        std::copy(dz.begin(), dz.begin() + H, dh_next.begin());
        if (gx) axpy(1.0, dz.data() + H, gx + (n * T + t) * D, D);
      }
    }
  };
  return tape.record(std::move(out),
                     {seq_v, pv.W_f, pv.W_i, pv.W_c, pv.W_o, pv.b_f, pv.b_i, pv.b_c, pv.b_o},
                     backward);
}

Var bilstm(Tape& tape, Var seq, const BilstmVars& p) {
  const Tensor& s = tape.value(seq);
  require_rank(s, 3, "bilstm input");
  if (s.dim(1) == 0) throw Error(Errc::EmptySequence, "bilstm needs at least one frame");
  const Var h_fwd = lstm_layer(tape, seq, p.forward_cell, false);
  const Var h_bwd = lstm_layer(tape, seq, p.backward_cell, true);
  return add(tape, linear(tape, h_fwd, p.w_o1), linear(tape, h_bwd, p.w_o2));
}

}  // namespace glyphforge::nn
