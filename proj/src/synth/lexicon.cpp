#include "glyphforge/synth/lexicon.hpp"

#include <fstream>
#include <unordered_set>

#include "glyphforge/error.hpp"
#include "glyphforge/synth/utf8.hpp"

namespace glyphforge::synth {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n\f\v");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n\f\v");
  return s.substr(first, last - first + 1);
}

}  // namespace

Lexicon make_lexicon(const std::vector<std::string>& lines) {
  Lexicon lexicon;
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (!decode_utf8(lines[i])) {
      throw Error(Errc::NotUtf8, "line " + std::to_string(i + 1) + " is not valid UTF-8");
    }
    std::string word = trim(lines[i]);
    if (word.empty()) continue;
    if (seen.insert(word).second) lexicon.words.push_back(std::move(word));
  }
  if (lexicon.words.empty()) throw Error(Errc::EmptyLexicon, "lexicon contains no words");
  return lexicon;
}

Lexicon load_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoFailure, "cannot open lexicon " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(std::move(line));
  return make_lexicon(lines);
}

}  // namespace glyphforge::synth
