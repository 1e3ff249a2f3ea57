#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "glyphforge/imaging/raster.hpp"

namespace glyphforge::synth {

struct GlyphSize {
  int width = 128;
  int height = 128;
};

struct CorpusOptions {
  GlyphSize glyph_size;
  imaging::InkThreshold threshold;
};

// tight_crop followed by resize to the glyph size.
imaging::GrayRaster normalize_glyph(const imaging::GrayRaster& raw, const CorpusOptions& options);

// Glyph label -> handwritten variants. Labels are UTF-8 and may span several
// codepoints (a base letter plus its modifiers). Every variant is already
// normalized, so all of them share one size.
class GlyphCorpus {
 public:
  using Entries = std::map<std::string, std::vector<imaging::GrayRaster>, std::less<>>;

  explicit GlyphCorpus(GlyphSize size = {}) : size_(size) {}

  // Adds an already-normalized variant; its dimensions must equal glyph_size().
  void add(std::string label, imaging::GrayRaster glyph);

  bool contains(std::string_view label) const { return entries_.find(label) != entries_.end(); }
  // Throws UnknownLabel.
  const std::vector<imaging::GrayRaster>& variants(std::string_view label) const;

  const Entries& entries() const noexcept { return entries_; }
  std::size_t label_count() const noexcept { return entries_.size(); }
  std::size_t longest_label() const noexcept { return longest_label_; }  // in codepoints
  GlyphSize glyph_size() const noexcept { return size_; }

 private:
  GlyphSize size_;
  Entries entries_;
  std::size_t longest_label_ = 0;
};

// Reads `<root>/corpus.jsonl` if present (records {"path", "label"}, paths
// relative to root), otherwise the `<root>/<label>/<id>.png` layout. Files
// are visited in lexicographic order so variant indices are stable.
GlyphCorpus load_glyph_corpus(const std::filesystem::path& root, const CorpusOptions& options = {});

// One raw corpus file before normalization.
struct CorpusEntry {
  std::string label;
  std::filesystem::path path;
};

// Enumerates the files load_glyph_corpus would read, without decoding them.
std::vector<CorpusEntry> list_corpus(const std::filesystem::path& root);

}  // namespace glyphforge::synth
