#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace glyphforge::nn {

using Shape = std::vector<std::size_t>;

std::size_t element_count(const Shape& shape);
std::string to_string(const Shape& shape);

// Dense row-major array. `grad` is empty until a backward pass fills it.
struct Tensor {
  Shape shape;
  std::vector<double> values;
  std::vector<double> grad;

  Tensor() = default;
  explicit Tensor(Shape s, double fill = 0.0);
  Tensor(Shape s, std::vector<double> v);

  std::size_t size() const noexcept { return values.size(); }
  std::size_t rank() const noexcept { return shape.size(); }
  std::size_t dim(std::size_t axis) const { return shape.at(axis); }

  std::span<double> data() noexcept { return values; }
  std::span<const double> data() const noexcept { return values; }
};

// Throws ShapeMismatch with `what` as context.
void require_shape(const Tensor& t, const Shape& expected, const char* what);
void require_rank(const Tensor& t, std::size_t rank, const char* what);

}  // namespace glyphforge::nn
