#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "mlc/rng.hpp"
#include "mlc/simd/kernels.hpp"

using namespace mlc;

namespace {

struct Inputs {
  std::vector<double> a, b;
  std::vector<std::int8_t> y;
};

Inputs make(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Inputs in;
  for (std::size_t i = 0; i < n; ++i) {
    in.a.push_back(rng.normal() * 3);
    in.b.push_back(rng.normal());
    in.y.push_back(rng.below(2) ? 1 : -1);
  }
  return in;
}

bool same_bits(const std::vector<double>& x, const std::vector<double>& y) {
  return x.size() == y.size() && std::memcmp(x.data(), y.data(), x.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("scalar kernels against naive loops") {
  const auto& k = simd::scalar_kernels();
  const Inputs in = make(37, 1);
  double dot = 0.0, hsum = 0.0, hmax = 0.0;
  for (std::size_t i = 0; i < 37; ++i) {
    dot += in.a[i] * in.b[i];
    const double l = std::max(0.0, 1.0 - in.y[i] * in.a[i]);
    hsum += l;
    hmax = std::max(hmax, l);
  }
  CHECK(k.dot(in.a.data(), in.b.data(), 37) == doctest::Approx(dot));
  CHECK(k.hinge_margin_sum(in.a.data(), in.y.data(), 37) == doctest::Approx(hsum));
  CHECK(k.hinge_margin_max(in.a.data(), in.y.data(), 37) == hmax);
  CHECK(k.dot(nullptr, nullptr, 0) == 0.0);
  CHECK(k.hinge_margin_max(nullptr, nullptr, 0) == 0.0);
}

TEST_CASE("avx2 kernels match scalar") {
  if (!simd::avx2_available()) {
    MESSAGE("avx2 not available on this host; skipping");
    return;
  }
  const auto& s = simd::scalar_kernels();
  const auto& v = simd::kernels_for(simd::Backend::avx2);
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 15u, 16u, 17u, 64u, 1001u}) {
    CAPTURE(n);
    const Inputs in = make(n, 100 + n);
    // reductions: equal up to summation order
    const double ds = s.dot(in.a.data(), in.b.data(), n), dv = v.dot(in.a.data(), in.b.data(), n);
    double mag = 0.0;
    for (std::size_t i = 0; i < n; ++i) mag += std::abs(in.a[i] * in.b[i]);
    CHECK(std::abs(ds - dv) <= 1e-14 * std::max(1.0, mag));
    const double hs = s.hinge_margin_sum(in.a.data(), in.y.data(), n);
    const double hv = v.hinge_margin_sum(in.a.data(), in.y.data(), n);
    CHECK(std::abs(hs - hv) <= 1e-14 * std::max(1.0, hs));
    CHECK(s.hinge_margin_max(in.a.data(), in.y.data(), n) == v.hinge_margin_max(in.a.data(), in.y.data(), n));

    // elementwise: bit-identical
    auto y1 = in.b, y2 = in.b;
    s.axpy(0.37, in.a.data(), y1.data(), n);
    v.axpy(0.37, in.a.data(), y2.data(), n);
    CHECK(same_bits(y1, y2));
    auto x1 = in.a, x2 = in.a;
    s.scale(-1.7, x1.data(), n);
    v.scale(-1.7, x2.data(), n);
    CHECK(same_bits(x1, x2));
  }
}

TEST_CASE("backend selection") {
  const auto before = simd::active_backend();
  simd::set_active_backend(simd::Backend::scalar);
  CHECK(simd::active_backend() == simd::Backend::scalar);
  CHECK(simd::to_string(simd::Backend::scalar) == "scalar");
  if (!simd::avx2_available()) CHECK_THROWS(simd::set_active_backend(simd::Backend::avx2));
  simd::set_active_backend(before);
}
