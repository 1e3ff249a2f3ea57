#include "glyphforge/nn/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "glyphforge/ctc/ctc.hpp"
#include "glyphforge/error.hpp"
#include "kernels.hpp"

namespace glyphforge::nn {

namespace {

using kernels::axpy;
using kernels::dot;

struct ConvGeometry {
  std::size_t n, cin, h, w;
  std::size_t cout, kh, kw;
  std::size_t stride, pad;
  std::size_t ho, wo;

  std::size_t patch() const { return cin * kh * kw; }
  std::size_t positions() const { return ho * wo; }
};

// cols[(ci*kh+ky)*kw+kx][oy*wo+ox] = x[ci][oy*s+ky-p][ox*s+kx-p], zero outside.
void im2col(const ConvGeometry& g, const double* x, double* cols) {
  const std::size_t P = g.positions();
  for (std::size_t ci = 0; ci < g.cin; ++ci) {
    for (std::size_t ky = 0; ky < g.kh; ++ky) {
      for (std::size_t kx = 0; kx < g.kw; ++kx) {
        double* row = cols + ((ci * g.kh + ky) * g.kw + kx) * P;
        for (std::size_t oy = 0; oy < g.ho; ++oy) {
          const long iy = static_cast<long>(oy * g.stride + ky) - static_cast<long>(g.pad);
          double* out = row + oy * g.wo;
          if (iy < 0 || iy >= static_cast<long>(g.h)) {
            std::fill(out, out + g.wo, 0.0);
            continue;
          }
          const double* src = x + (ci * g.h + static_cast<std::size_t>(iy)) * g.w;
          for (std::size_t ox = 0; ox < g.wo; ++ox) {
            const long ix = static_cast<long>(ox * g.stride + kx) - static_cast<long>(g.pad);
            out[ox] = (ix < 0 || ix >= static_cast<long>(g.w)) ? 0.0 : src[ix];
          }
        }
      }
    }
  }
}

void col2im_add(const ConvGeometry& g, const double* cols, double* x) {
  const std::size_t P = g.positions();
  for (std::size_t ci = 0; ci < g.cin; ++ci) {
    for (std::size_t ky = 0; ky < g.kh; ++ky) {
      for (std::size_t kx = 0; kx < g.kw; ++kx) {
        const double* row = cols + ((ci * g.kh + ky) * g.kw + kx) * P;
        for (std::size_t oy = 0; oy < g.ho; ++oy) {
          const long iy = static_cast<long>(oy * g.stride + ky) - static_cast<long>(g.pad);
          if (iy < 0 || iy >= static_cast<long>(g.h)) continue;
          double* dst = x + (ci * g.h + static_cast<std::size_t>(iy)) * g.w;
          for (std::size_t ox = 0; ox < g.wo; ++ox) {
            const long ix = static_cast<long>(ox * g.stride + kx) - static_cast<long>(g.pad);
            if (ix >= 0 && ix < static_cast<long>(g.w)) dst[ix] += row[oy * g.wo + ox];
          }
        }
      }
    }
  }
}

}  // namespace

Var conv2d(Tape& tape, Var xv, Var kv, Var bv, std::size_t stride, std::size_t padding) {
  const Tensor& x = tape.value(xv);
  const Tensor& k = tape.value(kv);
  const Tensor& b = tape.value(bv);
  require_rank(x, 4, "conv2d input");
  require_rank(k, 4, "conv2d kernel");
  if (stride == 0) throw Error(Errc::InvalidArgument, "conv2d stride must be positive");

  ConvGeometry g{x.dim(0), x.dim(1), x.dim(2), x.dim(3), k.dim(0), k.dim(2), k.dim(3),
                 stride, padding, 0, 0};
  if (k.dim(1) != g.cin) {
    throw Error(Errc::ShapeMismatch, "conv2d kernel expects " + std::to_string(k.dim(1)) +
                                         " input channels, input has " + std::to_string(g.cin));
  }
  require_shape(b, {g.cout}, "conv2d bias");
  if (g.kh > g.h + 2 * padding || g.kw > g.w + 2 * padding) {
    throw Error(Errc::ShapeMismatch, "conv2d kernel larger than padded input");
  }
  g.ho = (g.h + 2 * padding - g.kh) / stride + 1;
  g.wo = (g.w + 2 * padding - g.kw) / stride + 1;

  const std::size_t K = g.patch();
  const std::size_t P = g.positions();
  auto cols = std::make_shared<std::vector<double>>(g.n * K * P);
  Tensor out({g.n, g.cout, g.ho, g.wo});
  for (std::size_t n = 0; n < g.n; ++n) {
    double* c = cols->data() + n * K * P;
    im2col(g, x.values.data() + n * g.cin * g.h * g.w, c);
    for (std::size_t co = 0; co < g.cout; ++co) {
      double* o = out.values.data() + (n * g.cout + co) * P;
      std::fill(o, o + P, b.values[co]);
      const double* wrow = k.values.data() + co * K;
      for (std::size_t j = 0; j < K; ++j) axpy(wrow[j], c + j * P, o, P);
    }
  }

  return tape.record(std::move(out), {xv, kv, bv}, [=](Tape& t, Var self) {
    const double* gout = t.grad(self).data();
    if (t.requires_grad(kv)) {
      double* gk = t.grad_mut(kv).data();
      for (std::size_t n = 0; n < g.n; ++n) {
        const double* c = cols->data() + n * K * P;
        for (std::size_t co = 0; co < g.cout; ++co) {
          const double* go = gout + (n * g.cout + co) * P;
          for (std::size_t j = 0; j < K; ++j) gk[co * K + j] += dot(go, c + j * P, P);
        }
      }
    }
    if (t.requires_grad(bv)) {
      double* gb = t.grad_mut(bv).data();
      for (std::size_t n = 0; n < g.n; ++n) {
        for (std::size_t co = 0; co < g.cout; ++co) {
          gb[co] += kernels::sum(gout + (n * g.cout + co) * P, P);
        }
      }
    }
    if (t.requires_grad(xv)) {
      const double* w = t.value(kv).values.data();
      double* gx = t.grad_mut(xv).data();
      std::vector<double> dcols(K * P);
      for (std::size_t n = 0; n < g.n; ++n) {
        std::fill(dcols.begin(), dcols.end(), 0.0);
        for (std::size_t co = 0; co < g.cout; ++co) {
          const double* go = gout + (n * g.cout + co) * P;
          for (std::size_t j = 0; j < K; ++j) axpy(w[co * K + j], go, dcols.data() + j * P, P);
        }
        col2im_add(g, dcols.data(), gx + n * g.cin * g.h * g.w);
      }
    }
  });
}

Var relu(Tape& tape, Var xv) {
  const Tensor& x = tape.value(xv);
  Tensor out(x.shape);
  for (std::size_t i = 0; i < x.size(); ++i) out.values[i] = x.values[i] > 0.0 ? x.values[i] : 0.0;
  return tape.record(std::move(out), {xv}, [xv](Tape& t, Var self) {
    const auto gout = t.grad(self);
    const auto& in = t.value(xv).values;
    auto gx = t.grad_mut(xv);
    for (std::size_t i = 0; i < gx.size(); ++i) {
      if (in[i] > 0.0) gx[i] += gout[i];
    }
  });
}

Var maxpool2d(Tape& tape, Var xv, Window window, Window stride) {
  const Tensor& x = tape.value(xv);
  require_rank(x, 4, "maxpool2d input");
  const std::size_t N = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
  if (window.height == 0 || window.width == 0 || stride.height == 0 || stride.width == 0) {
    throw Error(Errc::InvalidArgument, "maxpool2d window and stride must be positive");
  }
  if (window.height > H || window.width > W) {
    throw Error(Errc::ShapeMismatch, "maxpool2d window larger than input " + to_string(x.shape));
  }
  const std::size_t Ho = (H - window.height) / stride.height + 1;
  const std::size_t Wo = (W - window.width) / stride.width + 1;
  Tensor out({N, C, Ho, Wo});
  auto argmax = std::make_shared<std::vector<std::size_t>>(out.size());
  std::size_t o = 0;
  for (std::size_t plane = 0; plane < N * C; ++plane) {
    const std::size_t base = plane * H * W;
    for (std::size_t oy = 0; oy < Ho; ++oy) {
      for (std::size_t ox = 0; ox < Wo; ++ox, ++o) {
        std::size_t best = base + oy * stride.height * W + ox * stride.width;
        for (std::size_t dy = 0; dy < window.height; ++dy) {
          for (std::size_t dx = 0; dx < window.width; ++dx) {
            const std::size_t idx = base + (oy * stride.height + dy) * W + ox * stride.width + dx;
            if (x.values[idx] > x.values[best]) best = idx;
          }
        }
        out.values[o] = x.values[best];
        (*argmax)[o] = best;
      }
    }
  }
  return tape.record(std::move(out), {xv}, [xv, argmax](Tape& t, Var self) {
    const auto gout = t.grad(self);
    auto gx = t.grad_mut(xv);
    for (std::size_t i = 0; i < gout.size(); ++i) gx[(*argmax)[i]] += gout[i];
  });
}

Var features_to_sequence(Tape& tape, Var fv) {
  const Tensor& f = tape.value(fv);
  require_rank(f, 4, "features_to_sequence input");
  const std::size_t N = f.dim(0), C = f.dim(1), H = f.dim(2), W = f.dim(3);
  const std::size_t D = C * H;
  Tensor out({N, W, D});
  for (std::size_t n = 0; n < N; ++n) {
    for (std::size_t c = 0; c < C; ++c) {
      for (std::size_t h = 0; h < H; ++h) {
        const double* src = f.values.data() + ((n * C + c) * H + h) * W;
        for (std::size_t t = 0; t < W; ++t) out.values[(n * W + t) * D + c * H + h] = src[t];
      }
    }
  }
  return tape.record(std::move(out), {fv}, [fv, N, C, H, W, D](Tape& t, Var self) {
    const auto gout = t.grad(self);
    auto gf = t.grad_mut(fv);
    for (std::size_t n = 0; n < N; ++n) {
      for (std::size_t c = 0; c < C; ++c) {
        for (std::size_t h = 0; h < H; ++h) {
          double* dst = gf.data() + ((n * C + c) * H + h) * W;
          for (std::size_t s = 0; s < W; ++s) dst[s] += gout[(n * W + s) * D + c * H + h];
        }
      }
    }
  });
}

Tensor sequence_to_features(const Tensor& seq, std::size_t channels, std::size_t height) {
  require_rank(seq, 3, "sequence_to_features input");
  const std::size_t N = seq.dim(0), W = seq.dim(1), D = seq.dim(2);
  if (channels * height != D) {
    throw Error(Errc::ShapeMismatch, "frame size " + std::to_string(D) + " is not " +
                                         std::to_string(channels) + "x" + std::to_string(height));
  }
  Tensor out({N, channels, height, W});
  for (std::size_t n = 0; n < N; ++n) {
    for (std::size_t t = 0; t < W; ++t) {
      for (std::size_t c = 0; c < channels; ++c) {
        for (std::size_t h = 0; h < height; ++h) {
          out.values[((n * channels + c) * height + h) * W + t] =
              seq.values[(n * W + t) * D + c * height + h];
        }
      }
    }
  }
  return out;
}

namespace {

Var linear_impl(Tape& tape, Var xv, Var wv, const Var* bv) {
  const Tensor& x = tape.value(xv);
  const Tensor& w = tape.value(wv);
  require_rank(w, 2, "linear weight");
  if (x.rank() == 0 || x.shape.back() != w.dim(1)) {
    throw Error(Errc::ShapeMismatch, "linear input " + to_string(x.shape) +
                                         " does not match weight " + to_string(w.shape));
  }
  const std::size_t K = w.dim(1), O = w.dim(0), M = x.size() / K;
  if (bv) require_shape(tape.value(*bv), {O}, "linear bias");

  Shape shape = x.shape;
  shape.back() = O;
  Tensor out(shape);
  const double* bias = bv ? tape.value(*bv).values.data() : nullptr;
  for (std::size_t m = 0; m < M; ++m) {
    const double* xm = x.values.data() + m * K;
    for (std::size_t o = 0; o < O; ++o) {
      out.values[m * O + o] = dot(xm, w.values.data() + o * K, K) + (bias ? bias[o] : 0.0);
    }
  }

  const bool has_bias = bv != nullptr;
  const Var b = has_bias ? *bv : Var{};
  auto fn = [=](Tape& t, Var self) {
    const double* gy = t.grad(self).data();
    if (t.requires_grad(xv)) {
      const double* wd = t.value(wv).values.data();
      double* gx = t.grad_mut(xv).data();
      for (std::size_t m = 0; m < M; ++m) {
        for (std::size_t o = 0; o < O; ++o) axpy(gy[m * O + o], wd + o * K, gx + m * K, K);
      }
    }
    if (t.requires_grad(wv)) {
      const double* xd = t.value(xv).values.data();
      double* gw = t.grad_mut(wv).data();
      for (std::size_t m = 0; m < M; ++m) {
        for (std::size_t o = 0; o < O; ++o) axpy(gy[m * O + o], xd + m * K, gw + o * K, K);
      }
    }
    if (has_bias && t.requires_grad(b)) {
      double* gb = t.grad_mut(b).data();
      for (std::size_t m = 0; m < M; ++m) {
        for (std::size_t o = 0; o < O; ++o) gb[o] += gy[m * O + o];
      }
    }
  };
  return has_bias ? tape.record(std::move(out), {xv, wv, b}, fn)
                  : tape.record(std::move(out), {xv, wv}, fn);
}

}  // namespace

Var linear(Tape& tape, Var x, Var weight) { return linear_impl(tape, x, weight, nullptr); }

Var linear(Tape& tape, Var x, Var weight, Var bias) {
  return linear_impl(tape, x, weight, &bias);
}

Var add(Tape& tape, Var av, Var bv) {
  const Tensor& a = tape.value(av);
  const Tensor& b = tape.value(bv);
  require_shape(b, a.shape, "add operand");
  Tensor out(a.shape);
  for (std::size_t i = 0; i < a.size(); ++i) out.values[i] = a.values[i] + b.values[i];
  return tape.record(std::move(out), {av, bv}, [av, bv](Tape& t, Var self) {
    const auto gout = t.grad(self);
    for (Var in : {av, bv}) {
      if (!t.requires_grad(in)) continue;
      auto g = t.grad_mut(in);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += gout[i];
    }
  });
}

Var sum(Tape& tape, Var xv) {
  const Tensor& x = tape.value(xv);
  Tensor out({1}, kernels::sum(x.values.data(), x.size()));
  return tape.record(std::move(out), {xv}, [xv](Tape& t, Var self) {
    const double g = t.grad(self)[0];
    for (double& v : t.grad_mut(xv)) v += g;
  });
}

Var log_softmax(Tape& tape, Var xv) {
  const Tensor& x = tape.value(xv);
  if (x.rank() == 0) throw Error(Errc::ShapeMismatch, "log_softmax needs rank >= 1");
  const std::size_t C = x.shape.back(), M = x.size() / C;
  Tensor out(x.shape);
  for (std::size_t m = 0; m < M; ++m) {
    const double* in = x.values.data() + m * C;
    double* o = out.values.data() + m * C;
    const double mx = *std::max_element(in, in + C);
    double s = 0.0;
    for (std::size_t c = 0; c < C; ++c) s += std::exp(in[c] - mx);
    const double lse = mx + std::log(s);
    for (std::size_t c = 0; c < C; ++c) o[c] = in[c] - lse;
  }
  return tape.record(std::move(out), {xv}, [xv, C, M](Tape& t, Var self) {
    const double* gy = t.grad(self).data();
    const double* y = t.value(self).values.data();
    double* gx = t.grad_mut(xv).data();
    for (std::size_t m = 0; m < M; ++m) {
      const double total = kernels::sum(gy + m * C, C);
      for (std::size_t c = 0; c < C; ++c) {
        gx[m * C + c] += gy[m * C + c] - std::exp(y[m * C + c]) * total;
      }
    }
  });
}

Var ctc_loss_mean(Tape& tape, Var lv, const std::vector<std::vector<int>>& targets) {
  const Tensor& logp = tape.value(lv);
  require_rank(logp, 3, "ctc_loss_mean input");
  const std::size_t N = logp.dim(0), T = logp.dim(1), C = logp.dim(2);
  if (targets.size() != N) {
    throw Error(Errc::ShapeMismatch, std::to_string(targets.size()) + " targets for batch of " +
                                         std::to_string(N));
  }
  auto grads = std::make_shared<std::vector<double>>(logp.size());
  double total = 0.0;
  for (std::size_t n = 0; n < N; ++n) {
    const auto frames = std::span<const double>(logp.values).subspan(n * T * C, T * C);
    ctc::CtcResult r = ctc::ctc_loss(frames, T, C, targets[n]);
    total += r.loss;
    std::copy(r.grad_logp.values.begin(), r.grad_logp.values.end(), grads->begin() + n * T * C);
  }
  Tensor out({1}, total / static_cast<double>(N));
  return tape.record(std::move(out), {lv}, [lv, grads, N](Tape& t, Var self) {
    const double scale = t.grad(self)[0] / static_cast<double>(N);
    axpy(scale, grads->data(), t.grad_mut(lv).data(), grads->size());
  });
}

}  // namespace glyphforge::nn
