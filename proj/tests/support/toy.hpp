#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "glyphforge/imaging/raster.hpp"
#include "glyphforge/synth/corpus.hpp"

namespace glyphforge::testing {

// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "gf");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

struct ToyStyle {
  double stroke = 2.2;  // pen radius in canvas pixels
  double jitter = 3.0;  // per-variant endpoint displacement range
};

// A procedural "handwritten" glyph: a few thick strokes whose layout is fixed
// by the label and jittered per variant, on a white canvas with margins.
imaging::GrayRaster toy_glyph(const std::string& label, int variant, ToyStyle style = {}, int width = 40,
                              int height = 48);

// Writes <root>/<label>/<variant>.png for every label.
void write_toy_corpus(const std::filesystem::path& root, const std::vector<std::string>& labels,
                      int variants);

// Same glyphs, built in memory and normalized to `size`.
synth::GlyphCorpus toy_corpus(const std::vector<std::string>& labels, int variants,
                              synth::GlyphSize size = {}, ToyStyle style = {});

// Single-letter labels "a", "b", ...
std::vector<std::string> letter_labels(int count);

// `count` distinct words of 2..max_len letters over `labels`, seeded.
std::vector<std::string> toy_words(const std::vector<std::string>& labels, int count, int max_len,
                                   std::uint64_t seed);

void write_lines(const std::filesystem::path& path, const std::vector<std::string>& lines);
std::string read_file(const std::filesystem::path& path);

// Random raster with a mix of white background and ink blobs.
imaging::GrayRaster random_raster(std::mt19937_64& rng, int max_w, int max_h);

}  // namespace glyphforge::testing
