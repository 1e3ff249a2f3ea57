#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace glyphforge::imaging {

// Grayscale raster with intensities in [0,1]; 1.0 is white paper, 0.0 is
// black ink. Row-major. Immutable once constructed.
class GrayRaster {
 public:
  // Blank (white) raster.
  GrayRaster(int width, int height);
  GrayRaster(int width, int height, std::vector<double> pixels);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  double at(int col, int row) const noexcept {
    return pixels_[static_cast<std::size_t>(row) * width_ + col];
  }
  std::span<const double> pixels() const noexcept { return pixels_; }

  friend bool operator==(const GrayRaster&, const GrayRaster&) = default;

 private:
  int width_;
  int height_;
  std::vector<double> pixels_;
};

// Interleaved RGB raster, channel values in [0,1].
struct RgbRaster {
  int width = 0;
  int height = 0;
  std::vector<double> rgb;  // width * height * 3
};

// A pixel is ink iff its intensity is strictly below the threshold.
class InkThreshold {
 public:
  static constexpr double kDefault = 0.98;

  constexpr InkThreshold() = default;
  explicit InkThreshold(double value);

  double value() const noexcept { return value_; }
  bool is_ink(double intensity) const noexcept { return intensity < value_; }

 private:
  double value_ = kDefault;
};

// Luminance 0.299 R + 0.587 G + 0.114 B.
GrayRaster to_grayscale(const RgbRaster& image);

// Smallest axis-aligned rectangle holding every ink pixel. Throws EmptyInk
// when the raster has no ink at all.
GrayRaster tight_crop(const GrayRaster& image, InkThreshold threshold = {});

// Bilinear resampling with pixel-center alignment and edge clamping.
GrayRaster resize(const GrayRaster& image, int out_width, int out_height);

// Side-by-side concatenation; heights must agree.
GrayRaster hjoin(const GrayRaster& left, const GrayRaster& right);

// Concatenation where the last `overlap` columns of `left` coincide with the
// first `overlap` columns of `right`. The band keeps the darker pixel.
GrayRaster hjoin_overlap(const GrayRaster& left, const GrayRaster& right, int overlap);

}  // namespace glyphforge::imaging
