#include "glyphforge/synth/annotations.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "glyphforge/error.hpp"
#include "glyphforge/imaging/png_io.hpp"

namespace fs = std::filesystem;

namespace glyphforge::synth {

namespace {

imaging::GrayRaster crop_box(const imaging::GrayRaster& page, int x, int y, int w, int h) {
  std::vector<double> pixels;
  pixels.reserve(static_cast<std::size_t>(w) * h);
  for (int r = y; r < y + h; ++r) {
    auto row = page.pixels().subspan(static_cast<std::size_t>(r) * page.width() + x, w);
    pixels.insert(pixels.end(), row.begin(), row.end());
  }
  return imaging::GrayRaster(w, h, std::move(pixels));
}

}  // namespace

std::vector<AnnotatedWord> ingest_annotated_pages(const fs::path& json_path,
                                                  const fs::path& image_root,
                                                  imaging::InkThreshold threshold) {
  std::ifstream in(json_path, std::ios::binary);
  if (!in) throw Error(Errc::IoFailure, "cannot open " + json_path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::MalformedAnnotation, json_path.string() + ": " + e.what());
  }
  if (!doc.is_array()) throw Error(Errc::MalformedAnnotation, "top level must be an array");

  std::vector<AnnotatedWord> words;
  for (std::size_t p = 0; p < doc.size(); ++p) {
    const auto& page_rec = doc[p];
    const std::string where = "page record " + std::to_string(p);
    std::string page_path;
    try {
      page_path = page_rec.at("page").get<std::string>();
      if (!page_rec.at("words").is_array()) throw std::runtime_error("'words' is not an array");
    } catch (const std::exception& e) {
      throw Error(Errc::MalformedAnnotation, where + ": " + e.what());
    }
    const imaging::GrayRaster page = imaging::read_png_gray(image_root / page_path);

    const auto& boxes = page_rec.at("words");
    for (std::size_t b = 0; b < boxes.size(); ++b) {
      const std::string box_where = where + ", word " + std::to_string(b);
      int x, y, w, h;
      std::string label;
      try {
        const auto& box = boxes[b];
        x = box.at("x").get<int>();
        y = box.at("y").get<int>();
        w = box.at("w").get<int>();
        h = box.at("h").get<int>();
        label = box.at("label").get<std::string>();
      } catch (const std::exception& e) {
        throw Error(Errc::MalformedAnnotation, box_where + ": " + e.what());
      }
      if (w <= 0 || h <= 0 || label.empty()) {
        throw Error(Errc::MalformedAnnotation, box_where + ": empty box or label");
      }
      if (x < 0 || y < 0 || x + w > page.width() || y + h > page.height()) {
        throw Error(Errc::BoxOutOfBounds, box_where + " exceeds page " + page_path);
      }
      words.push_back({imaging::tight_crop(crop_box(page, x, y, w, h), threshold), label});
    }
  }
  return words;
}

}  // namespace glyphforge::synth
