#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "glyphforge/synth/compose.hpp"
#include "glyphforge/synth/corpus.hpp"
#include "glyphforge/synth/lexicon.hpp"

namespace glyphforge::synth {

struct ManifestRecord {
  std::string image;  // relative to the manifest directory
  std::string transcript;
  JoinMode mode = JoinMode::NonOverlapped;
  int overlap_px = 0;
  std::uint64_t seed = 0;  // per-record render seed

  friend bool operator==(const ManifestRecord&, const ManifestRecord&) = default;
};

struct DatasetManifest {
  std::vector<ManifestRecord> records;
  std::vector<char32_t> alphabet;  // sorted, unique
  std::filesystem::path root;      // directory image paths resolve against
};

// Sorted set of codepoints over all transcripts.
std::vector<char32_t> alphabet_of(std::span<const ManifestRecord> records);

struct GenerationOptions {
  JoinMode mode = JoinMode::NonOverlapped;
  int overlap_px = kDefaultOverlapPx;  // ignored for NonOverlapped
  std::size_t count = 1;
  std::uint64_t seed = 0;
};

struct GenerationReport {
  DatasetManifest manifest;
  std::size_t coverable_words = 0;
  std::vector<std::string> uncoverable_words;
  std::vector<std::string> glyph_labels;  // sorted labels used by any record
};

// Renders `count` words, cycling over the coverable part of the lexicon.
// Record i uses seed derive_seed(options.seed, i), so both join modes run
// with the same seed pick the same words and the same glyph variants.
// Writes images/NNNNNN.png, manifest.jsonl, alphabet.json and
// graphemes.json under out_dir.
GenerationReport generate_dataset(const Lexicon& lexicon, const GlyphCorpus& corpus,
                                  const GenerationOptions& options,
                                  const std::filesystem::path& out_dir);

// manifest.jsonl + alphabet.json into `dir`.
void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& dir);

// Reads manifest.jsonl (or the given file). The alphabet comes from the
// sibling alphabet.json when present, otherwise from the transcripts.
DatasetManifest read_manifest(const std::filesystem::path& path);

// Sibling graphemes.json written by generate_dataset; empty if absent.
std::vector<std::string> read_grapheme_labels(const std::filesystem::path& manifest_path);

std::filesystem::path resolve_image(const DatasetManifest& manifest, const ManifestRecord& record);

}  // namespace glyphforge::synth
