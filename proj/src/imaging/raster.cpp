#include "glyphforge/imaging/raster.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "glyphforge/error.hpp"

namespace glyphforge::imaging {

namespace {

void require_dimensions(int width, int height) {
  if (width < 1 || height < 1) {
    throw Error(Errc::ZeroDimension,
                "raster dimensions must be positive, got " + std::to_string(width) + "x" +
                    std::to_string(height));
  }
}

}  // namespace

GrayRaster::GrayRaster(int width, int height) : width_(width), height_(height) {
  require_dimensions(width, height);
  pixels_.assign(static_cast<std::size_t>(width) * height, 1.0);
}

GrayRaster::GrayRaster(int width, int height, std::vector<double> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  require_dimensions(width, height);
  if (pixels_.size() != static_cast<std::size_t>(width) * height) {
    throw Error(Errc::ShapeMismatch, "pixel buffer size " + std::to_string(pixels_.size()) +
                                         " does not match " + std::to_string(width) + "x" +
                                         std::to_string(height));
  }
  for (double v : pixels_) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(Errc::InvalidArgument, "intensity outside [0,1]: " + std::to_string(v));
    }
  }
}

InkThreshold::InkThreshold(double value) : value_(value) {
  if (!(value > 0.0 && value < 1.0)) {
    throw Error(Errc::InvalidArgument, "ink threshold must lie in (0,1)");
  }
}

GrayRaster to_grayscale(const RgbRaster& image) {
  require_dimensions(image.width, image.height);
  const std::size_t n = static_cast<std::size_t>(image.width) * image.height;
  if (image.rgb.size() != n * 3) {
    throw Error(Errc::ShapeMismatch, "rgb buffer size does not match dimensions");
  }
  std::vector<double> gray(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = image.rgb[3 * i];
    const double g = image.rgb[3 * i + 1];
    const double b = image.rgb[3 * i + 2];
    // The weights sum to 1 only up to rounding; keep white exactly white.
    gray[i] = std::clamp(0.299 * r + 0.587 * g + 0.114 * b, 0.0, 1.0);
  }
  return GrayRaster(image.width, image.height, std::move(gray));
}

GrayRaster tight_crop(const GrayRaster& image, InkThreshold threshold) {
  const int w = image.width();
  const int h = image.height();
  auto column_has_ink = [&](int c) {
    for (int r = 0; r < h; ++r) {
      if (threshold.is_ink(image.at(c, r))) return true;
    }
    return false;
  };
  auto row_has_ink = [&](int r, int c0, int c1) {
    for (int c = c0; c <= c1; ++c) {
      if (threshold.is_ink(image.at(c, r))) return true;
    }
    return false;
  };

  int left = 0;
  while (left < w && !column_has_ink(left)) ++left;
  if (left == w) throw Error(Errc::EmptyInk, "raster contains no ink pixel");
  int right = w - 1;
  while (!column_has_ink(right)) --right;
  int top = 0;
  while (!row_has_ink(top, left, right)) ++top;
  int bottom = h - 1;
  while (!row_has_ink(bottom, left, right)) --bottom;

  const int cw = right - left + 1;
  const int ch = bottom - top + 1;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(cw) * ch);
  for (int r = top; r <= bottom; ++r) {
    auto row = image.pixels().subspan(static_cast<std::size_t>(r) * w + left, cw);
    out.insert(out.end(), row.begin(), row.end());
  }
  return GrayRaster(cw, ch, std::move(out));
}

namespace {

struct Tap {
  int lo;
  int hi;
  double frac;
};

// Source taps for each output coordinate, half-pixel aligned.
std::vector<Tap> bilinear_taps(int in_size, int out_size) {
  std::vector<Tap> taps(out_size);
  const double scale = static_cast<double>(in_size) / out_size;
  for (int i = 0; i < out_size; ++i) {
    double src = (i + 0.5) * scale - 0.5;
    src = std::clamp(src, 0.0, static_cast<double>(in_size - 1));
    const int lo = static_cast<int>(std::floor(src));
    const int hi = std::min(lo + 1, in_size - 1);
    taps[i] = {lo, hi, src - lo};
  }
  return taps;
}

}  // namespace

GrayRaster resize(const GrayRaster& image, int out_width, int out_height) {
  require_dimensions(out_width, out_height);
  if (out_width == image.width() && out_height == image.height()) return image;

  const auto xs = bilinear_taps(image.width(), out_width);
  const auto ys = bilinear_taps(image.height(), out_height);
  std::vector<double> out(static_cast<std::size_t>(out_width) * out_height);
  for (int r = 0; r < out_height; ++r) {
    const Tap& ty = ys[r];
    for (int c = 0; c < out_width; ++c) {
      const Tap& tx = xs[c];
      const double top = image.at(tx.lo, ty.lo) * (1.0 - tx.frac) + image.at(tx.hi, ty.lo) * tx.frac;
      const double bot = image.at(tx.lo, ty.hi) * (1.0 - tx.frac) + image.at(tx.hi, ty.hi) * tx.frac;
      out[static_cast<std::size_t>(r) * out_width + c] =
          std::clamp(top * (1.0 - ty.frac) + bot * ty.frac, 0.0, 1.0);
    }
  }
  return GrayRaster(out_width, out_height, std::move(out));
}

GrayRaster hjoin(const GrayRaster& left, const GrayRaster& right) {
  if (left.height() != right.height()) {
    throw Error(Errc::HeightMismatch, "cannot join rasters of height " +
                                          std::to_string(left.height()) + " and " +
                                          std::to_string(right.height()));
  }
  const int w = left.width() + right.width();
  const int h = left.height();
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(w) * h);
  for (int r = 0; r < h; ++r) {
    auto a = left.pixels().subspan(static_cast<std::size_t>(r) * left.width(), left.width());
    auto b = right.pixels().subspan(static_cast<std::size_t>(r) * right.width(), right.width());
    out.insert(out.end(), a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
  }
  return GrayRaster(w, h, std::move(out));
}

GrayRaster hjoin_overlap(const GrayRaster& left, const GrayRaster& right, int overlap) {
  if (left.height() != right.height()) {
    throw Error(Errc::HeightMismatch, "cannot join rasters of height " +
                                          std::to_string(left.height()) + " and " +
                                          std::to_string(right.height()));
  }
  if (overlap <= 0 || overlap >= std::min(left.width(), right.width())) {
    throw Error(Errc::OverlapTooLarge,
                "overlap " + std::to_string(overlap) + " must lie in (0, " +
                    std::to_string(std::min(left.width(), right.width())) + ")");
  }
  const int w = left.width() + right.width() - overlap;
  const int h = left.height();
  const int band_start = left.width() - overlap;
  std::vector<double> out(static_cast<std::size_t>(w) * h);
  for (int r = 0; r < h; ++r) {
    double* row = out.data() + static_cast<std::size_t>(r) * w;
    for (int c = 0; c < band_start; ++c) row[c] = left.at(c, r);
    for (int k = 0; k < overlap; ++k) {
      row[band_start + k] = std::min(left.at(band_start + k, r), right.at(k, r));
    }
    for (int c = overlap; c < right.width(); ++c) row[band_start + c] = right.at(c, r);
  }
  return GrayRaster(w, h, std::move(out));
}

}  // namespace glyphforge::imaging
