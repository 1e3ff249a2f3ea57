#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace glyphforge::evaluation {

// Unit-cost edit distance between two sequences.
template <typename Seq>
std::size_t levenshtein(const Seq& a, const Seq& b) {
  const std::size_t n = std::size(a), m = std::size(b);
  std::vector<std::size_t> row(m + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  auto ai = std::begin(a);
  for (std::size_t i = 1; i <= n; ++i, ++ai) {
    std::size_t diag = row[0];
    row[0] = i;
    auto bj = std::begin(b);
    for (std::size_t j = 1; j <= m; ++j, ++bj) {
      const std::size_t sub = diag + (*ai == *bj ? 0 : 1);
      diag = row[j];
      row[j] = std::min({sub, row[j] + 1, row[j - 1] + 1});
    }
  }
  return row[m];
}

// Codepoint-level edit distance of two UTF-8 strings.
std::size_t char_distance(std::string_view a, std::string_view b);

// Whitespace-separated words.
std::vector<std::string> split_words(std::string_view text);

// Word error rate: summed word-level edit distance over the total number of
// reference words. Throws LengthMismatch or EmptyReference.
double wer(std::span<const std::string> predictions, std::span<const std::string> references);

// Counts from one optimal codepoint alignment of prediction against
// reference. Backtrace ties prefer match, then substitution, deletion,
// insertion. An insertion is a prediction codepoint with no reference
// counterpart; a deletion is a reference codepoint the prediction misses.
struct EditCounts {
  std::size_t matches = 0;
  std::size_t substitutions = 0;
  std::size_t insertions = 0;
  std::size_t deletions = 0;

  friend bool operator==(const EditCounts&, const EditCounts&) = default;
};

EditCounts edit_counts(std::string_view prediction, std::string_view reference);

struct SampleResult {
  std::string prediction;
  std::string reference;
  std::size_t edit_distance = 0;  // codepoint level
};

struct EvalReport {
  double wer = 0.0;
  double accuracy = 0.0;   // TP / (TP + FP + FN), no true negatives
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t matched_words = 0;
  std::size_t total_words = 0;
  double word_accuracy = 0.0;  // matched_words / total_words
  double cer = 0.0;            // codepoint error rate, diagnostic only
  std::vector<SampleResult> samples;
};

// Micro-aggregated counts over all samples: TP = matches,
// FP = substitutions + insertions, FN = substitutions + deletions.
EvalReport report(std::span<const std::string> predictions, std::span<const std::string> references);

}  // namespace glyphforge::evaluation
