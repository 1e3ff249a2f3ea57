#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "glyphforge/error.hpp"
#include "glyphforge/imaging/raster.hpp"
#include "glyphforge/synth/corpus.hpp"

namespace glyphforge::synth {

enum class JoinMode { NonOverlapped, Overlapped };

inline constexpr int kDefaultOverlapPx = 4;

std::string_view to_string(JoinMode mode);
// Accepts "overlapped" and "non_overlapped"; throws InvalidArgument otherwise.
JoinMode parse_join_mode(std::string_view text);

// A word and the corpus labels that spell it, left to right.
struct WordSpec {
  std::string transcript;
  std::vector<std::string> glyph_labels;
};

struct SyntheticSample {
  imaging::GrayRaster image;
  std::string transcript;
  JoinMode mode;
  int overlap_px;                              // 0 for NonOverlapped
  std::vector<std::size_t> glyph_variant_ids;  // one per glyph label
};

class UncoverableError : public Error {
 public:
  UncoverableError(std::string word, std::size_t position);

  const std::string& word() const noexcept { return word_; }
  // Codepoint offset where no corpus label matches.
  std::size_t position() const noexcept { return position_; }

 private:
  std::string word_;
  std::size_t position_;
};

// Greedy longest-match segmentation of `word` into corpus labels.
WordSpec decompose_word(std::string_view word, const GlyphCorpus& corpus);

// Folds glyphs left to right with hjoin or hjoin_overlap.
imaging::GrayRaster compose(std::span<const imaging::GrayRaster> glyphs, JoinMode mode,
                            int overlap_px);

// Picks one variant per label uniformly from a generator seeded with `seed`
// and composes them. Same inputs and seed give a bit-identical sample.
SyntheticSample render_word(const WordSpec& spec, const GlyphCorpus& corpus, JoinMode mode,
                            int overlap_px, std::uint64_t seed);

}  // namespace glyphforge::synth
