#include <algorithm>

#include "mlc/simd/kernels.hpp"

namespace mlc::simd {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale_scalar(double a, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

double hinge_sum_scalar(const double* f, const std::int8_t* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::max(0.0, 1.0 - static_cast<double>(y[i]) * f[i]);
  return s;
}

double hinge_max_scalar(const double* f, const std::int8_t* y, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, 1.0 - static_cast<double>(y[i]) * f[i]);
  return m;
}

}  // namespace

const KernelTable& scalar_kernels() noexcept {
  static const KernelTable table{dot_scalar, axpy_scalar, scale_scalar, hinge_sum_scalar,
                                 hinge_max_scalar};
  return table;
}

}  // namespace mlc::simd
