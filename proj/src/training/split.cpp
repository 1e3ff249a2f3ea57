#include "glyphforge/training/split.hpp"

#include <cmath>
#include <numeric>
#include <random>

#include "glyphforge/error.hpp"
#include "glyphforge/random.hpp"

namespace glyphforge::training {

std::pair<synth::DatasetManifest, synth::DatasetManifest> split_dataset(
    const synth::DatasetManifest& manifest, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw Error(Errc::InvalidArgument, "split ratio must lie in (0,1)");
  }
  const std::size_t n = manifest.records.size();
  if (n == 0) throw Error(Errc::EmptyManifest, "cannot split an empty manifest");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  shuffle(std::span(order), rng);

  // The epsilon absorbs representation error, e.g. 0.8 * 60470.
  const auto n_train = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n) + 1e-9));
  std::pair<synth::DatasetManifest, synth::DatasetManifest> parts;
  for (auto* part : {&parts.first, &parts.second}) {
    part->root = manifest.root;
    part->alphabet = manifest.alphabet;
  }
  for (std::size_t i = 0; i < n; ++i) {
    (i < n_train ? parts.first : parts.second).records.push_back(manifest.records[order[i]]);
  }
  return parts;
}

}  // namespace glyphforge::training
