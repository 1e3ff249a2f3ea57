#include "glyphforge/ctc/ctc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "glyphforge/error.hpp"

namespace glyphforge::ctc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

void check_target(std::span<const int> target, std::size_t classes) {
  const int blank = static_cast<int>(classes) - 1;
  for (int label : target) {
    if (label < 0 || label >= blank) {
      throw Error(Errc::IndexOutOfRange, "target label " + std::to_string(label) +
                                             " is not a symbol class (blank is " +
                                             std::to_string(blank) + ")");
    }
  }
}

}  // namespace

std::vector<int> collapse(std::span<const int> path, int num_classes) {
  const int blank = num_classes - 1;
  std::vector<int> out;
  int prev = -1;
  for (int label : path) {
    if (label < 0 || label >= num_classes) {
      throw Error(Errc::IndexOutOfRange, "frame label " + std::to_string(label) +
                                             " outside [0," + std::to_string(num_classes) + ")");
    }
    if (label != prev && label != blank) out.push_back(label);
    prev = label;
  }
  return out;
}

std::size_t min_frames(std::span<const int> target) {
  std::size_t repeats = 0;
  for (std::size_t i = 1; i < target.size(); ++i) repeats += target[i] == target[i - 1];
  return target.size() + repeats;
}

CtcResult ctc_loss(const nn::Tensor& logp, std::span<const int> target) {
  nn::require_rank(logp, 2, "ctc_loss input");
  return ctc_loss(logp.values, logp.dim(0), logp.dim(1), target);
}

CtcResult ctc_loss(std::span<const double> logp, std::size_t T, std::size_t C,
                   std::span<const int> target) {
  if (T == 0 || C < 2 || logp.size() != T * C) {
    throw Error(Errc::ShapeMismatch, "ctc_loss expects [T>=1, C>=2] log-probabilities");
  }
  check_target(target, C);
  if (T < min_frames(target)) {
    throw Error(Errc::InfeasibleTarget, "target needs " + std::to_string(min_frames(target)) +
                                            " frames, input has " + std::to_string(T));
  }
  const int blank = static_cast<int>(C) - 1;
  const std::size_t S = 2 * target.size() + 1;
  std::vector<int> ext(S, blank);
  for (std::size_t i = 0; i < target.size(); ++i) ext[2 * i + 1] = target[i];
  auto lp = [&](std::size_t t, std::size_t s) { return logp[t * C + static_cast<std::size_t>(ext[s])]; };
  auto can_skip = [&](std::size_t s) { return s >= 2 && ext[s] != blank && ext[s] != ext[s - 2]; };

  // alpha includes the emission at t; beta covers frames after t only.
  std::vector<double> alpha(T * S, kNegInf), beta(T * S, kNegInf);
  alpha[0] = lp(0, 0);
  if (S > 1) alpha[1] = lp(0, 1);
  for (std::size_t t = 1; t < T; ++t) {
    const double* prev = alpha.data() + (t - 1) * S;
    double* cur = alpha.data() + t * S;
    for (std::size_t s = 0; s < S; ++s) {
      double a = prev[s];
      if (s >= 1) a = log_add(a, prev[s - 1]);
      if (can_skip(s)) a = log_add(a, prev[s - 2]);
      cur[s] = a == kNegInf ? kNegInf : a + lp(t, s);
    }
  }

  beta[(T - 1) * S + S - 1] = 0.0;
  if (S > 1) beta[(T - 1) * S + S - 2] = 0.0;
  for (std::size_t t = T - 1; t-- > 0;) {
    const double* next = beta.data() + (t + 1) * S;
    double* cur = beta.data() + t * S;
    for (std::size_t s = 0; s < S; ++s) {
      double b = next[s] + lp(t + 1, s);
      if (s + 1 < S) b = log_add(b, next[s + 1] + lp(t + 1, s + 1));
      if (s + 2 < S && can_skip(s + 2)) b = log_add(b, next[s + 2] + lp(t + 1, s + 2));
      cur[s] = b;
    }
  }

  const double* last = alpha.data() + (T - 1) * S;
  const double log_prob = S > 1 ? log_add(last[S - 1], last[S - 2]) : last[0];

  CtcResult result;
  result.loss = std::max(0.0, -log_prob);
  result.grad_logp = nn::Tensor({T, C});
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t s = 0; s < S; ++s) {
      const double occ = alpha[t * S + s] + beta[t * S + s];
      if (occ == kNegInf) continue;
      result.grad_logp.values[t * C + static_cast<std::size_t>(ext[s])] -= std::exp(occ - log_prob);
    }
  }
  return result;
}

double ctc_brute_force(const nn::Tensor& logp, std::span<const int> target) {
  nn::require_rank(logp, 2, "ctc_brute_force input");
  const std::size_t T = logp.dim(0), C = logp.dim(1);
  if (T == 0 || C < 2) throw Error(Errc::ShapeMismatch, "ctc_brute_force expects T>=1, C>=2");
  check_target(target, C);
  double paths = 1.0;
  for (std::size_t t = 0; t < T; ++t) paths *= static_cast<double>(C);
  if (paths > 1e6) {
    throw Error(Errc::InstanceTooLarge, std::to_string(C) + "^" + std::to_string(T) +
                                            " paths exceed the enumeration limit of 1e6");
  }

  const std::vector<int> want(target.begin(), target.end());
  std::vector<int> path(T, 0);
  double total = 0.0;
  while (true) {
    if (collapse(path, static_cast<int>(C)) == want) {
      double lp = 0.0;
      for (std::size_t t = 0; t < T; ++t) lp += logp.values[t * C + static_cast<std::size_t>(path[t])];
      total += std::exp(lp);
    }
    std::size_t t = 0;
    while (t < T && ++path[t] == static_cast<int>(C)) path[t++] = 0;
    if (t == T) break;
  }
  return total > 0.0 ? std::max(0.0, -std::log(total)) : std::numeric_limits<double>::infinity();
}

std::vector<int> best_path(std::span<const double> logp, std::size_t T, std::size_t C) {
  if (logp.size() != T * C) throw Error(Errc::ShapeMismatch, "best_path: size mismatch");
  std::vector<int> path(T);
  for (std::size_t t = 0; t < T; ++t) {
    const double* row = logp.data() + t * C;
    std::size_t best = 0;
    for (std::size_t c = 1; c < C; ++c) {
      if (row[c] > row[best]) best = c;
    }
    path[t] = static_cast<int>(best);
  }
  return path;
}

std::string greedy_decode(std::span<const double> logp, std::size_t T, const Alphabet& alphabet) {
  const std::size_t C = alphabet.num_classes();
  const auto path = best_path(logp, T, C);
  return alphabet.decode(collapse(path, static_cast<int>(C)));
}

std::string greedy_decode(const nn::Tensor& logp, const Alphabet& alphabet) {
  nn::require_rank(logp, 2, "greedy_decode input");
  if (logp.dim(1) != alphabet.num_classes()) {
    throw Error(Errc::ShapeMismatch, "log-probabilities have " + std::to_string(logp.dim(1)) +
                                         " classes, alphabet has " +
                                         std::to_string(alphabet.num_classes()));
  }
  return greedy_decode(logp.values, logp.dim(0), alphabet);
}

}  // namespace glyphforge::ctc
