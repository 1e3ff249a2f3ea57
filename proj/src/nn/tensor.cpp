#include "glyphforge/nn/tensor.hpp"

#include <functional>
#include <numeric>

#include "glyphforge/error.hpp"

namespace glyphforge::nn {

std::size_t element_count(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string to_string(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

Tensor::Tensor(Shape s, double fill) : shape(std::move(s)), values(element_count(shape), fill) {}

Tensor::Tensor(Shape s, std::vector<double> v) : shape(std::move(s)), values(std::move(v)) {
  if (values.size() != element_count(shape)) {
    throw Error(Errc::ShapeMismatch, std::to_string(values.size()) + " values for shape " +
                                         to_string(shape));
  }
}

void require_shape(const Tensor& t, const Shape& expected, const char* what) {
  if (t.shape != expected) {
    throw Error(Errc::ShapeMismatch, std::string(what) + ": expected " + to_string(expected) +
                                         ", got " + to_string(t.shape));
  }
}

void require_rank(const Tensor& t, std::size_t rank, const char* what) {
  if (t.rank() != rank) {
    throw Error(Errc::ShapeMismatch, std::string(what) + ": expected rank " +
                                         std::to_string(rank) + ", got " + to_string(t.shape));
  }
}

}  // namespace glyphforge::nn
