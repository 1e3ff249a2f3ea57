#include "glyphforge/synth/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "glyphforge/error.hpp"
#include "glyphforge/imaging/png_io.hpp"
#include "glyphforge/log.hpp"
#include "glyphforge/random.hpp"
#include "glyphforge/synth/utf8.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace glyphforge::synth {

std::vector<char32_t> alphabet_of(std::span<const ManifestRecord> records) {
  std::set<char32_t> cps;
  for (const auto& r : records) {
    for (char32_t cp : to_codepoints(r.transcript)) cps.insert(cp);
  }
  return {cps.begin(), cps.end()};
}

namespace {

std::string image_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "images/%06zu.png", index);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Error(Errc::IoFailure, "cannot write " + path.string());
}

ordered_json to_json(const ManifestRecord& r) {
  ordered_json j;
  j["image"] = r.image;
  j["transcript"] = r.transcript;
  j["mode"] = std::string(to_string(r.mode));
  j["overlap_px"] = r.overlap_px;
  j["seed"] = r.seed;
  return j;
}

}  // namespace

void write_manifest(const DatasetManifest& manifest, const fs::path& dir) {
  std::string lines;
  for (const auto& r : manifest.records) lines += to_json(r).dump() + "\n";
  write_text(dir / "manifest.jsonl", lines);

  ordered_json alphabet = ordered_json::array();
  for (char32_t cp : manifest.alphabet) alphabet.push_back(to_utf8(cp));
  write_text(dir / "alphabet.json", alphabet.dump() + "\n");
}

GenerationReport generate_dataset(const Lexicon& lexicon, const GlyphCorpus& corpus,
                                  const GenerationOptions& options, const fs::path& out_dir) {
  if (options.count < 1) throw Error(Errc::InvalidArgument, "count must be at least 1");
  if (options.mode == JoinMode::Overlapped) {
    const int min_width = corpus.glyph_size().width;
    if (options.overlap_px <= 0 || options.overlap_px >= min_width) {
      throw Error(Errc::OverlapTooLarge, "overlap " + std::to_string(options.overlap_px) +
                                             " must lie in (0, " + std::to_string(min_width) + ")");
    }
  }

  GenerationReport report;
  std::vector<WordSpec> coverable;
  for (const auto& word : lexicon.words) {
    try {
      coverable.push_back(decompose_word(word, corpus));
    } catch (const UncoverableError& e) {
      log::warn("skipping word: " + std::string(e.what()));
      report.uncoverable_words.push_back(word);
    }
  }
  report.coverable_words = coverable.size();
  if (coverable.empty()) {
    throw Error(Errc::NoCoverableWords, "no lexicon word can be spelled with the corpus labels");
  }

  std::error_code ec;
  fs::create_directories(out_dir / "images", ec);
  if (ec) throw Error(Errc::IoFailure, "cannot create " + out_dir.string() + ": " + ec.message());

  std::set<std::string> used_labels;
  DatasetManifest& manifest = report.manifest;
  manifest.root = out_dir;
  manifest.records.reserve(options.count);
  for (std::size_t i = 0; i < options.count; ++i) {
    const WordSpec& spec = coverable[i % coverable.size()];
    const std::uint64_t seed = derive_seed(options.seed, i);
    const SyntheticSample sample =
        render_word(spec, corpus, options.mode, options.overlap_px, seed);
    ManifestRecord record{image_name(i), sample.transcript, sample.mode, sample.overlap_px, seed};
    imaging::write_png(sample.image, out_dir / record.image);
    manifest.records.push_back(std::move(record));
    used_labels.insert(spec.glyph_labels.begin(), spec.glyph_labels.end());
  }
  manifest.alphabet = alphabet_of(manifest.records);
  report.glyph_labels.assign(used_labels.begin(), used_labels.end());

  write_manifest(manifest, out_dir);
  write_text(out_dir / "graphemes.json", ordered_json(report.glyph_labels).dump() + "\n");
  return report;
}

DatasetManifest read_manifest(const fs::path& path) {
  const fs::path file = fs::is_directory(path) ? path / "manifest.jsonl" : path;
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(Errc::IoFailure, "cannot open manifest " + file.string());

  DatasetManifest manifest;
  manifest.root = file.parent_path();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      ManifestRecord r;
      r.image = j.at("image").get<std::string>();
      r.transcript = j.at("transcript").get<std::string>();
      r.mode = parse_join_mode(j.at("mode").get<std::string>());
      r.overlap_px = j.value("overlap_px", 0);
      r.seed = j.value("seed", std::uint64_t{0});
      if (r.transcript.empty()) throw Error(Errc::InvalidArgument, "empty transcript");
      manifest.records.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw Error(Errc::IoFailure, file.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (manifest.records.empty()) throw Error(Errc::EmptyManifest, file.string() + " has no records");

  const fs::path alphabet_path = manifest.root / "alphabet.json";
  if (fs::exists(alphabet_path)) {
    std::ifstream a(alphabet_path, std::ios::binary);
    try {
      for (const auto& item : nlohmann::json::parse(a)) {
        const std::u32string cps = to_codepoints(item.get<std::string>());
        if (cps.size() != 1) throw Error(Errc::InvalidArgument, "entry is not a single codepoint");
        manifest.alphabet.push_back(cps.front());
      }
    } catch (const std::exception& e) {
      throw Error(Errc::IoFailure, alphabet_path.string() + ": " + e.what());
    }
    std::sort(manifest.alphabet.begin(), manifest.alphabet.end());
  } else {
    manifest.alphabet = alphabet_of(manifest.records);
  }
  return manifest;
}

std::vector<std::string> read_grapheme_labels(const fs::path& manifest_path) {
  const fs::path dir = fs::is_directory(manifest_path) ? manifest_path : manifest_path.parent_path();
  const fs::path file = dir / "graphemes.json";
  if (!fs::exists(file)) return {};
  std::ifstream in(file, std::ios::binary);
  try {
    return nlohmann::json::parse(in).get<std::vector<std::string>>();
  } catch (const std::exception& e) {
    throw Error(Errc::IoFailure, file.string() + ": " + e.what());
  }
}

fs::path resolve_image(const DatasetManifest& manifest, const ManifestRecord& record) {
  const fs::path p(record.image);
  return p.is_absolute() ? p : manifest.root / p;
}

}  // namespace glyphforge::synth
