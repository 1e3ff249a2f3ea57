#include "glyphforge/evaluation/metrics.hpp"

#include "glyphforge/error.hpp"
#include "glyphforge/synth/utf8.hpp"

namespace glyphforge::evaluation {

using synth::to_codepoints;

std::size_t char_distance(std::string_view a, std::string_view b) {
  return levenshtein(to_codepoints(a), to_codepoints(b));
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  std::size_t i = 0;
  auto space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; };
  while (i < text.size()) {
    while (i < text.size() && space(text[i])) ++i;
    const std::size_t start = i;
    while (i < text.size() && !space(text[i])) ++i;
    if (i > start) words.emplace_back(text.substr(start, i - start));
  }
  return words;
}

namespace {

void require_same_length(std::size_t a, std::size_t b) {
  if (a != b) {
    throw Error(Errc::LengthMismatch, std::to_string(a) + " predictions for " + std::to_string(b) +
                                          " references");
  }
}

}  // namespace

double wer(std::span<const std::string> predictions, std::span<const std::string> references) {
  require_same_length(predictions.size(), references.size());
  std::size_t distance = 0, words = 0;
  for (std::size_t i = 0; i < references.size(); ++i) {
    const auto ref = split_words(references[i]);
    distance += levenshtein(split_words(predictions[i]), ref);
    words += ref.size();
  }
  if (words == 0) throw Error(Errc::EmptyReference, "references contain no words");
  return static_cast<double>(distance) / static_cast<double>(words);
}

EditCounts edit_counts(std::string_view prediction, std::string_view reference) {
  const std::u32string p = to_codepoints(prediction);
  const std::u32string r = to_codepoints(reference);
  const std::size_t n = p.size(), m = r.size();
  std::vector<std::size_t> d((n + 1) * (m + 1));
  auto at = [&](std::size_t i, std::size_t j) -> std::size_t& { return d[i * (m + 1) + j]; };
  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = i;
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = j;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      at(i, j) = std::min({at(i - 1, j - 1) + (p[i - 1] == r[j - 1] ? 0 : 1), at(i - 1, j) + 1,
                           at(i, j - 1) + 1});
    }
  }

  EditCounts counts;
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && p[i - 1] == r[j - 1] && at(i, j) == at(i - 1, j - 1)) {
      ++counts.matches, --i, --j;
    } else if (i > 0 && j > 0 && at(i, j) == at(i - 1, j - 1) + 1) {
      ++counts.substitutions, --i, --j;
    } else if (j > 0 && at(i, j) == at(i, j - 1) + 1) {
      ++counts.deletions, --j;
    } else {
      ++counts.insertions, --i;
    }
  }
  return counts;
}

namespace {

double ratio(std::size_t num, std::size_t den, double empty_value) {
  return den == 0 ? empty_value : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

EvalReport report(std::span<const std::string> predictions, std::span<const std::string> references) {
  require_same_length(predictions.size(), references.size());
  if (references.empty()) throw Error(Errc::EmptyReference, "nothing to evaluate");

  EvalReport rep;
  std::size_t tp = 0, fp = 0, fn = 0, char_errors = 0, ref_chars = 0;
  for (std::size_t k = 0; k < references.size(); ++k) {
    const EditCounts c = edit_counts(predictions[k], references[k]);
    tp += c.matches;
    fp += c.substitutions + c.insertions;
    fn += c.substitutions + c.deletions;
    const std::size_t dist = c.substitutions + c.insertions + c.deletions;
    char_errors += dist;
    ref_chars += c.matches + c.substitutions + c.deletions;
    if (predictions[k] == references[k]) ++rep.matched_words;
    rep.samples.push_back({predictions[k], references[k], dist});
  }
  rep.total_words = references.size();
  rep.wer = wer(predictions, references);
  // With nothing predicted and nothing expected every ratio is vacuously perfect.
  const bool nothing = tp + fp + fn == 0;
  rep.precision = ratio(tp, tp + fp, nothing ? 1.0 : 0.0);
  rep.recall = ratio(tp, tp + fn, nothing ? 1.0 : 0.0);
  rep.f1 = rep.precision + rep.recall > 0.0
               ? 2.0 * rep.precision * rep.recall / (rep.precision + rep.recall)
               : 0.0;
  rep.accuracy = ratio(tp, tp + fp + fn, 1.0);
  rep.word_accuracy = ratio(rep.matched_words, rep.total_words, 0.0);
  rep.cer = ratio(char_errors, ref_chars, char_errors == 0 ? 0.0 : 1.0);
  return rep;
}

}  // namespace glyphforge::evaluation
