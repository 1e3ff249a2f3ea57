#include "glyphforge/synth/corpus.hpp"

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>

#include "glyphforge/error.hpp"
#include "glyphforge/imaging/png_io.hpp"
#include "glyphforge/synth/utf8.hpp"

namespace fs = std::filesystem;

namespace glyphforge::synth {

imaging::GrayRaster normalize_glyph(const imaging::GrayRaster& raw, const CorpusOptions& options) {
  return imaging::resize(imaging::tight_crop(raw, options.threshold), options.glyph_size.width,
                         options.glyph_size.height);
}

void GlyphCorpus::add(std::string label, imaging::GrayRaster glyph) {
  auto cps = decode_utf8(label);
  if (!cps) throw Error(Errc::NotUtf8, "glyph label is not valid UTF-8");
  if (cps->empty()) throw Error(Errc::InvalidArgument, "glyph label must not be empty");
  if (glyph.width() != size_.width || glyph.height() != size_.height) {
    throw Error(Errc::ShapeMismatch, "glyph for '" + label + "' is " +
                                         std::to_string(glyph.width()) + "x" +
                                         std::to_string(glyph.height()) + ", corpus expects " +
                                         std::to_string(size_.width) + "x" +
                                         std::to_string(size_.height));
  }
  longest_label_ = std::max(longest_label_, cps->size());
  entries_[std::move(label)].push_back(std::move(glyph));
}

const std::vector<imaging::GrayRaster>& GlyphCorpus::variants(std::string_view label) const {
  auto it = entries_.find(label);
  if (it == entries_.end()) {
    throw Error(Errc::UnknownLabel, "no glyph for label '" + std::string(label) + "'");
  }
  return it->second;
}

std::vector<CorpusEntry> list_corpus(const fs::path& root) {
  if (!fs::is_directory(root)) {
    throw Error(Errc::MissingDirectory, root.string() + " is not a directory");
  }
  std::vector<CorpusEntry> entries;
  const fs::path jsonl = root / "corpus.jsonl";
  if (fs::exists(jsonl)) {
    std::ifstream in(jsonl);
    if (!in) throw Error(Errc::IoFailure, "cannot open " + jsonl.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        const auto record = nlohmann::json::parse(line);
        entries.push_back({record.at("label").get<std::string>(),
                           root / record.at("path").get<std::string>()});
      } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::IoFailure,
                    jsonl.string() + ":" + std::to_string(line_no) + ": " + e.what());
      }
    }
    return entries;
  }

  std::vector<fs::path> label_dirs;
  for (const auto& item : fs::directory_iterator(root)) {
    if (item.is_directory()) label_dirs.push_back(item.path());
  }
  std::sort(label_dirs.begin(), label_dirs.end());
  for (const auto& dir : label_dirs) {
    std::vector<fs::path> files;
    for (const auto& item : fs::directory_iterator(dir)) {
      if (item.is_regular_file() && item.path().extension() == ".png") files.push_back(item.path());
    }
    std::sort(files.begin(), files.end());
    const std::string label = dir.filename().string();
    for (auto& f : files) entries.push_back({label, std::move(f)});
  }
  return entries;
}

GlyphCorpus load_glyph_corpus(const fs::path& root, const CorpusOptions& options) {
  GlyphCorpus corpus(options.glyph_size);
  for (const auto& entry : list_corpus(root)) {
    imaging::GrayRaster raw = imaging::read_png_gray(entry.path);
    try {
      corpus.add(entry.label, normalize_glyph(raw, options));
    } catch (const Error& e) {
      throw Error(e.code(), entry.path.string() + ": " + e.what());
    }
  }
  if (corpus.label_count() == 0) {
    throw Error(Errc::EmptyCorpus, "no glyph images found under " + root.string());
  }
  return corpus;
}

}  // namespace glyphforge::synth
