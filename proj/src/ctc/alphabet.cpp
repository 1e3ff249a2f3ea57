#include "glyphforge/ctc/alphabet.hpp"

#include <algorithm>

#include "glyphforge/error.hpp"
#include "glyphforge/synth/utf8.hpp"

namespace glyphforge::ctc {

using synth::to_codepoints;
using synth::to_utf8;

Alphabet::Alphabet(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    const std::u32string cps = to_codepoints(symbols_[i]);
    if (cps.empty()) throw Error(Errc::InvalidArgument, "alphabet symbol must not be empty");
    if (!index_.emplace(symbols_[i], static_cast<int>(i)).second) {
      throw Error(Errc::InvalidArgument, "duplicate alphabet symbol '" + symbols_[i] + "'");
    }
    longest_ = std::max(longest_, cps.size());
  }
}

Alphabet Alphabet::from_codepoints(std::span<const char32_t> codepoints) {
  std::vector<std::string> symbols;
  symbols.reserve(codepoints.size());
  for (char32_t cp : codepoints) symbols.push_back(to_utf8(cp));
  return Alphabet(std::move(symbols));
}

namespace {

// Greedy longest match; calls on_symbol(index) or on_gap(codepoint).
template <typename OnSymbol, typename OnGap>
void scan(const std::u32string& cps, std::size_t longest,
          const std::map<std::string, int, std::less<>>& index, OnSymbol on_symbol, OnGap on_gap) {
  std::size_t pos = 0;
  while (pos < cps.size()) {
    bool matched = false;
    for (std::size_t len = std::min(longest, cps.size() - pos); len >= 1; --len) {
      auto it = index.find(to_utf8(std::u32string_view(cps).substr(pos, len)));
      if (it != index.end()) {
        on_symbol(it->second);
        pos += len;
        matched = true;
        break;
      }
    }
    if (!matched) on_gap(cps[pos++]);
  }
}

}  // namespace

std::vector<char32_t> Alphabet::uncovered(std::string_view transcript) const {
  std::vector<char32_t> missing;
  scan(to_codepoints(transcript), longest_, index_, [](int) {},
       [&](char32_t cp) {
         if (std::find(missing.begin(), missing.end(), cp) == missing.end()) missing.push_back(cp);
       });
  return missing;
}

std::vector<int> Alphabet::encode(std::string_view transcript) const {
  std::vector<int> out;
  std::vector<char32_t> missing;
  scan(to_codepoints(transcript), longest_, index_, [&](int i) { out.push_back(i); },
       [&](char32_t cp) {
         if (std::find(missing.begin(), missing.end(), cp) == missing.end()) missing.push_back(cp);
       });
  if (!missing.empty()) {
    std::string list;
    for (char32_t cp : missing) {
      if (!list.empty()) list += ", ";
      char buf[16];
      std::snprintf(buf, sizeof buf, "U+%04X", static_cast<unsigned>(cp));
      list += "'" + to_utf8(cp) + "' (" + buf + ")";
    }
    throw Error(Errc::AlphabetMismatch,
                "transcript '" + std::string(transcript) + "' uses codepoints outside the alphabet: " + list);
  }
  return out;
}

std::string Alphabet::decode(std::span<const int> indices) const {
  std::string out;
  for (int i : indices) {
    if (i < 0 || i >= static_cast<int>(symbols_.size())) {
      throw Error(Errc::IndexOutOfRange, "class " + std::to_string(i) + " is not a symbol");
    }
    out += symbols_[static_cast<std::size_t>(i)];
  }
  return out;
}

}  // namespace glyphforge::ctc
