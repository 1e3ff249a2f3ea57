#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace glyphforge::ctc {

// Output classes of the recognizer. Symbols take indices 0..size()-1 and the
// CTC blank is the last class, index size().
class Alphabet {
 public:
  Alphabet() = default;
  // Symbols are UTF-8 strings of one or more codepoints; duplicates and the
  // empty string are rejected.
  explicit Alphabet(std::vector<std::string> symbols);

  static Alphabet from_codepoints(std::span<const char32_t> codepoints);

  std::size_t size() const noexcept { return symbols_.size(); }
  std::size_t num_classes() const noexcept { return symbols_.size() + 1; }
  int blank() const noexcept { return static_cast<int>(symbols_.size()); }
  const std::vector<std::string>& symbols() const noexcept { return symbols_; }
  const std::string& symbol(int index) const { return symbols_.at(static_cast<std::size_t>(index)); }

  // Greedy longest-match encoding. Throws AlphabetMismatch listing every
  // codepoint that cannot be covered.
  std::vector<int> encode(std::string_view transcript) const;
  // Concatenates symbols; blank and out-of-range indices are rejected.
  std::string decode(std::span<const int> indices) const;

  // Codepoints of `transcript` not covered by encode(), in order of first
  // appearance. Empty when the transcript is encodable.
  std::vector<char32_t> uncovered(std::string_view transcript) const;

  friend bool operator==(const Alphabet& a, const Alphabet& b) { return a.symbols_ == b.symbols_; }

 private:
  std::vector<std::string> symbols_;
  std::map<std::string, int, std::less<>> index_;
  std::size_t longest_ = 0;  // codepoints
};

}  // namespace glyphforge::ctc
