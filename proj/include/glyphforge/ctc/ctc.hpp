#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "glyphforge/ctc/alphabet.hpp"
#include "glyphforge/nn/tensor.hpp"

namespace glyphforge::ctc {

struct CtcResult {
  double loss = 0.0;      // -log p(target | logp), >= 0
  nn::Tensor grad_logp;   // d loss / d logp, shape [T,C]
};

// Merge adjacent repeats, then drop blanks (blank = num_classes - 1).
// Throws IndexOutOfRange for labels outside [0, num_classes).
std::vector<int> collapse(std::span<const int> path, int num_classes);

// Fewest frames that can emit `target`: its length plus one separating blank
// per adjacent equal pair.
std::size_t min_frames(std::span<const int> target);

// Forward-backward over the blank-interleaved target in log space. `logp` is
// [T,C] with blank = C-1. Throws InfeasibleTarget when T < min_frames.
CtcResult ctc_loss(const nn::Tensor& logp, std::span<const int> target);
CtcResult ctc_loss(std::span<const double> logp, std::size_t frames, std::size_t classes,
                   std::span<const int> target);

// Sums every one of the C^T paths explicitly. Returns +inf for infeasible
// targets; throws InstanceTooLarge when C^T > 1e6.
double ctc_brute_force(const nn::Tensor& logp, std::span<const int> target);

// Per-frame argmax, ties to the lowest class index.
std::vector<int> best_path(std::span<const double> logp, std::size_t frames, std::size_t classes);

// best_path, collapse, then map to symbols.
std::string greedy_decode(const nn::Tensor& logp, const Alphabet& alphabet);
std::string greedy_decode(std::span<const double> logp, std::size_t frames,
                          const Alphabet& alphabet);

}  // namespace glyphforge::ctc
