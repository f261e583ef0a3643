#pragma once

// Dense double-precision inner loops used by scoring, the surrogate losses and
// the optimizer. Every routine has a portable scalar reference and, on x86-64,
// an AVX2 variant chosen at runtime.
//
// Elementwise kernels (axpy, scale) are bit-identical across backends: the AVX2
// path issues a separate multiply and add per lane, exactly like the scalar
// loop. Reductions (dot, hinge sums) use four-lane partial sums, so the two
// backends agree only to rounding.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace mlc::simd {

enum class Backend { scalar, avx2 };

struct KernelTable {
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // x *= a
  void (*scale)(double a, double* x, std::size_t n);
  // sum_j max(0, 1 - y_j * f_j)
  double (*hinge_margin_sum)(const double* f, const std::int8_t* y, std::size_t n);
  // max_j max(0, 1 - y_j * f_j)
  double (*hinge_margin_max)(const double* f, const std::int8_t* y, std::size_t n);
};

const KernelTable& scalar_kernels() noexcept;

/// True when the AVX2 table was compiled in and the running CPU supports it.
bool avx2_available() noexcept;

/// Throws mlc::InvalidInput if AVX2 is requested but unavailable.
const KernelTable& kernels_for(Backend backend);

/// Backend picked on first use: AVX2 when available, overridable with the
/// MLC_SIMD environment variable ("scalar" or "avx2").
Backend active_backend() noexcept;
void set_active_backend(Backend backend);
const KernelTable& active() noexcept;

std::string_view to_string(Backend backend) noexcept;

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}
inline double squared_norm(std::span<const double> a) {
  return active().dot(a.data(), a.data(), a.size());
}
inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  active().axpy(a, x.data(), y.data(), y.size());
}
inline void scale(double a, std::span<double> x) { active().scale(a, x.data(), x.size()); }

}  // namespace mlc::simd
