#include "glyphforge/imaging/png_io.hpp"

#include <png.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "glyphforge/error.hpp"

namespace glyphforge::imaging {

RgbRaster read_png_rgb(const std::filesystem::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw Error(Errc::UnreadableImage, path.string() + ": " + image.message);
  }
  image.format = PNG_FORMAT_RGB;
  std::vector<png_byte> buffer(PNG_IMAGE_SIZE(image));
  png_color white{255, 255, 255};
  if (!png_image_finish_read(&image, &white, buffer.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw Error(Errc::UnreadableImage, path.string() + ": " + msg);
  }
  RgbRaster out;
  out.width = static_cast<int>(image.width);
  out.height = static_cast<int>(image.height);
  out.rgb.resize(buffer.size());
  for (std::size_t i = 0; i < buffer.size(); ++i) out.rgb[i] = buffer[i] / 255.0;
  if (out.width < 1 || out.height < 1) {
    throw Error(Errc::ZeroDimension, path.string());
  }
  return out;
}

GrayRaster read_png_gray(const std::filesystem::path& path) {
  return to_grayscale(read_png_rgb(path));
}

void write_png(const GrayRaster& image, const std::filesystem::path& path) {
  std::vector<png_byte> buffer(image.pixels().size());
  for (std::size_t i = 0; i < buffer.size(); ++i) {
    buffer[i] = static_cast<png_byte>(std::lround(image.pixels()[i] * 255.0));
  }
  png_image png;
  std::memset(&png, 0, sizeof png);
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.width());
  png.height = static_cast<png_uint_32>(image.height());
  png.format = PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&png, path.c_str(), 0, buffer.data(), 0, nullptr)) {
    throw Error(Errc::IoFailure, "cannot write " + path.string() + ": " + png.message);
  }
}

}  // namespace glyphforge::imaging
