#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace glyphforge::synth {

// Unique, non-empty words in first-appearance order.
struct Lexicon {
  std::vector<std::string> words;
};

Lexicon make_lexicon(const std::vector<std::string>& lines);

// One word per line; surrounding whitespace trimmed, blank lines skipped,
// duplicates dropped. Throws NotUtf8 or EmptyLexicon.
Lexicon load_lexicon(const std::filesystem::path& path);

}  // namespace glyphforge::synth
