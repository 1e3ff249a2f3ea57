#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "glyphforge/imaging/raster.hpp"

namespace glyphforge::synth {

struct AnnotatedWord {
  imaging::GrayRaster image;
  std::string transcript;
};

// Reads a JSON array of {"page": path, "words": [{"x","y","w","h","label"}]}
// and returns every word box cropped, converted to grayscale and
// tight-cropped, in file order. Page paths resolve against image_root.
std::vector<AnnotatedWord> ingest_annotated_pages(const std::filesystem::path& json_path,
                                                  const std::filesystem::path& image_root,
                                                  imaging::InkThreshold threshold = {});

}  // namespace glyphforge::synth
