// Compiled with -mavx2 only; nothing here may run before the dispatcher has
// confirmed CPU support.
#include <immintrin.h>

#include <algorithm>

#include "avx2_table.hpp"

namespace mlc::simd {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline __m256d load_labels(const std::int8_t* y) {
  std::int32_t packed;
  __builtin_memcpy(&packed, y, sizeof(packed));
  return _mm256_cvtepi32_pd(_mm_cvtepi8_epi32(_mm_cvtsi32_si128(packed)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    acc1 = _mm256_add_pd(acc1,
                         _mm256_mul_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4)));
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void scale_avx2(double a, double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), va));
  for (; i < n; ++i) x[i] *= a;
}

double hinge_sum_avx2(const double* f, const std::int8_t* y, std::size_t n) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zero = _mm256_setzero_pd();
  __m256d acc = zero;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d margin = _mm256_mul_pd(load_labels(y + i), _mm256_loadu_pd(f + i));
    acc = _mm256_add_pd(acc, _mm256_max_pd(zero, _mm256_sub_pd(one, margin)));
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += std::max(0.0, 1.0 - static_cast<double>(y[i]) * f[i]);
  return s;
}

double hinge_max_avx2(const double* f, const std::int8_t* y, std::size_t n) {
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d margin = _mm256_mul_pd(load_labels(y + i), _mm256_loadu_pd(f + i));
    acc = _mm256_max_pd(acc, _mm256_sub_pd(one, margin));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double m = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
  for (; i < n; ++i) m = std::max(m, 1.0 - static_cast<double>(y[i]) * f[i]);
  return m;
}

}  // namespace

const KernelTable& avx2_kernels() noexcept {
  static const KernelTable table{dot_avx2, axpy_avx2, scale_avx2, hinge_sum_avx2, hinge_max_avx2};
  return table;
}

}  // namespace mlc::simd
