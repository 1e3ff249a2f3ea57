#pragma once

#include <cstddef>

// Inner loops shared by the layer implementations. The simd reductions let
// the compiler vectorize without -ffast-math; results are still a fixed
// function of the inputs for a given build.
namespace glyphforge::nn::kernels {

inline double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
#pragma omp simd reduction(+ : s)
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

// y += alpha * x
inline void axpy(double alpha, const double* x, double* y, std::size_t n) {
#pragma omp simd
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

inline double sum(const double* a, std::size_t n) {
  double s = 0.0;
#pragma omp simd reduction(+ : s)
  for (std::size_t i = 0; i < n; ++i) s += a[i];
  return s;
}

}  // namespace glyphforge::nn::kernels
