#pragma once

#include <cstdint>
#include <utility>

#include "glyphforge/synth/dataset.hpp"

namespace glyphforge::training {

// Seeded shuffle, then the first floor(ratio * n) records train and the rest
// validate. Both parts keep the source root and alphabet.
std::pair<synth::DatasetManifest, synth::DatasetManifest> split_dataset(
    const synth::DatasetManifest& manifest, double ratio, std::uint64_t seed);

}  // namespace glyphforge::training
