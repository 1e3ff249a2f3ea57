#pragma once

// Independent reference implementations the production code is checked against.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "glyphforge/nn/lstm.hpp"
#include "glyphforge/nn/tensor.hpp"

namespace glyphforge::testing {

// Direct 7-deep loop: x [N,Ci,H,W], k [Co,Ci,KH,KW], b [Co].
inline nn::Tensor conv2d_oracle(const nn::Tensor& x, const nn::Tensor& k, const nn::Tensor& b,
                                std::size_t stride, std::size_t pad) {
  const std::size_t N = x.dim(0), Ci = x.dim(1), H = x.dim(2), W = x.dim(3);
  const std::size_t Co = k.dim(0), KH = k.dim(2), KW = k.dim(3);
  const std::size_t OH = (H + 2 * pad - KH) / stride + 1;
  const std::size_t OW = (W + 2 * pad - KW) / stride + 1;
  nn::Tensor y({N, Co, OH, OW});
  for (std::size_t n = 0; n < N; ++n)
    for (std::size_t o = 0; o < Co; ++o)
      for (std::size_t i = 0; i < OH; ++i)
        for (std::size_t j = 0; j < OW; ++j) {
          double acc = b.values[o];
          for (std::size_t c = 0; c < Ci; ++c)
            for (std::size_t u = 0; u < KH; ++u)
              for (std::size_t v = 0; v < KW; ++v) {
                const long r = static_cast<long>(i * stride + u) - static_cast<long>(pad);
                const long s = static_cast<long>(j * stride + v) - static_cast<long>(pad);
                if (r < 0 || s < 0 || r >= static_cast<long>(H) || s >= static_cast<long>(W)) continue;
                acc += k.values[((o * Ci + c) * KH + u) * KW + v] *
                       x.values[((n * Ci + c) * H + r) * W + s];
              }
          y.values[((n * Co + o) * OH + i) * OW + j] = acc;
        }
  return y;
}

struct LstmOracleOut {
  std::vector<double> h, c;
};

// Gate equations written out one scalar at a time.
inline LstmOracleOut lstm_oracle(const std::vector<double>& x, const std::vector<double>& h_prev,
                                 const std::vector<double>& c_prev, const nn::LstmParams& p) {
  const std::size_t H = p.hidden_size, D = p.input_size;
  auto sigmoid = [](double z) { return 1.0 / (1.0 + std::exp(-z)); };
  auto pre = [&](const nn::Tensor& W, const nn::Tensor& b, std::size_t r) {
    double z = b.values[r];
    for (std::size_t k = 0; k < H; ++k) z += W.values[r * (H + D) + k] * h_prev[k];
    for (std::size_t k = 0; k < D; ++k) z += W.values[r * (H + D) + H + k] * x[k];
    return z;
  };
  LstmOracleOut out{std::vector<double>(H), std::vector<double>(H)};
  for (std::size_t r = 0; r < H; ++r) {
    const double f = sigmoid(pre(p.W_f, p.b_f, r));
    const double i = sigmoid(pre(p.W_i, p.b_i, r));
    const double g = std::tanh(pre(p.W_c, p.b_c, r));
    const double o = sigmoid(pre(p.W_o, p.b_o, r));
    out.c[r] = f * c_prev[r] + i * g;
    out.h[r] = o * std::tanh(out.c[r]);
  }
  return out;
}

// Plain recursion over the last characters, no memo.
inline std::size_t levenshtein_recursive(const std::string& a, std::size_t n, const std::string& b,
                                         std::size_t m) {
  if (n == 0) return m;
  if (m == 0) return n;
  const std::size_t cost = a[n - 1] == b[m - 1] ? 0 : 1;
  return std::min({levenshtein_recursive(a, n - 1, b, m) + 1, levenshtein_recursive(a, n, b, m - 1) + 1,
                   levenshtein_recursive(a, n - 1, b, m - 1) + cost});
}

inline std::size_t levenshtein_recursive(const std::string& a, const std::string& b) {
  return levenshtein_recursive(a, a.size(), b, b.size());
}

// Every string of length <= max_len over `letters`, shortest first.
inline std::vector<std::string> all_strings(const std::string& letters, std::size_t max_len) {
  std::vector<std::string> out{""};
  std::size_t begin = 0;
  for (std::size_t len = 1; len <= max_len; ++len) {
    const std::size_t end = out.size();
    for (std::size_t i = begin; i < end; ++i)
      for (char ch : letters) out.push_back(out[i] + ch);
    begin = end;
  }
  return out;
}

}  // namespace glyphforge::testing
