#include "glyphforge/synth/compose.hpp"

#include <random>

#include "glyphforge/random.hpp"
#include "glyphforge/synth/utf8.hpp"

namespace glyphforge::synth {

std::string_view to_string(JoinMode mode) {
  return mode == JoinMode::Overlapped ? "overlapped" : "non_overlapped";
}

JoinMode parse_join_mode(std::string_view text) {
  if (text == "overlapped") return JoinMode::Overlapped;
  if (text == "non_overlapped") return JoinMode::NonOverlapped;
  throw Error(Errc::InvalidArgument,
              "unknown join mode '" + std::string(text) + "' (expected overlapped|non_overlapped)");
}

UncoverableError::UncoverableError(std::string word, std::size_t position)
    : Error(Errc::Uncoverable,
            "no glyph label matches '" + word + "' at codepoint " + std::to_string(position)),
      word_(std::move(word)),
      position_(position) {}

WordSpec decompose_word(std::string_view word, const GlyphCorpus& corpus) {
  const std::u32string cps = to_codepoints(word);
  if (cps.empty()) throw Error(Errc::InvalidArgument, "cannot decompose an empty word");

  WordSpec spec{std::string(word), {}};
  std::size_t pos = 0;
  while (pos < cps.size()) {
    const std::size_t max_len = std::min(corpus.longest_label(), cps.size() - pos);
    bool matched = false;
    for (std::size_t len = max_len; len >= 1; --len) {
      std::string candidate = to_utf8(std::u32string_view(cps).substr(pos, len));
      if (corpus.contains(candidate)) {
        spec.glyph_labels.push_back(std::move(candidate));
        pos += len;
        matched = true;
        break;
      }
    }
    if (!matched) throw UncoverableError(std::string(word), pos);
  }
  return spec;
}

imaging::GrayRaster compose(std::span<const imaging::GrayRaster> glyphs, JoinMode mode,
                            int overlap_px) {
  if (glyphs.empty()) throw Error(Errc::InvalidArgument, "nothing to compose");
  if (mode == JoinMode::Overlapped && overlap_px <= 0) {
    throw Error(Errc::InvalidArgument, "overlapped mode needs a positive overlap");
  }
  imaging::GrayRaster word = glyphs.front();
  for (std::size_t i = 1; i < glyphs.size(); ++i) {
    word = mode == JoinMode::Overlapped ? imaging::hjoin_overlap(word, glyphs[i], overlap_px)
                                        : imaging::hjoin(word, glyphs[i]);
  }
  return word;
}

SyntheticSample render_word(const WordSpec& spec, const GlyphCorpus& corpus, JoinMode mode,
                            int overlap_px, std::uint64_t seed) {
  if (spec.glyph_labels.empty()) throw Error(Errc::InvalidArgument, "word spec has no glyphs");
  std::mt19937_64 rng(seed);
  std::vector<imaging::GrayRaster> glyphs;
  std::vector<std::size_t> variant_ids;
  glyphs.reserve(spec.glyph_labels.size());
  for (const auto& label : spec.glyph_labels) {
    const auto& variants = corpus.variants(label);
    const std::size_t id = uniform_index(rng, variants.size());
    variant_ids.push_back(id);
    glyphs.push_back(variants[id]);
  }
  const int effective_overlap = mode == JoinMode::Overlapped ? overlap_px : 0;
  return SyntheticSample{compose(glyphs, mode, effective_overlap), spec.transcript, mode,
                         effective_overlap, std::move(variant_ids)};
}

}  // namespace glyphforge::synth
