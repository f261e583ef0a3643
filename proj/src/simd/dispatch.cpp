#include <atomic>
#include <cstdlib>
#include <string>

#include "mlc/error.hpp"
#include "mlc/simd/kernels.hpp"

#if defined(MLC_HAVE_AVX2)
#include "avx2_table.hpp"
#endif

namespace mlc::simd {
namespace {

Backend pick_default() noexcept {
  if (const char* env = std::getenv("MLC_SIMD")) {
    const std::string_view v(env);
    if (v == "scalar") return Backend::scalar;
    if (v == "avx2" && avx2_available()) return Backend::avx2;
  }
  return avx2_available() ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend>& backend_slot() noexcept {
  static std::atomic<Backend> slot{pick_default()};
  return slot;
}

}  // namespace

bool avx2_available() noexcept {
#if defined(MLC_HAVE_AVX2)
  static const bool ok = __builtin_cpu_supports("avx2");
  return ok;
#else
  return false;
#endif
}

const KernelTable& kernels_for(Backend backend) {
  if (backend == Backend::avx2) {
#if defined(MLC_HAVE_AVX2)
    if (avx2_available()) return avx2_kernels();
#endif
    throw InvalidInput("AVX2 kernels are not available on this machine");
  }
  return scalar_kernels();
}

Backend active_backend() noexcept { return backend_slot().load(std::memory_order_relaxed); }

void set_active_backend(Backend backend) {
  kernels_for(backend);
  backend_slot().store(backend, std::memory_order_relaxed);
}

const KernelTable& active() noexcept {
#if defined(MLC_HAVE_AVX2)
  if (active_backend() == Backend::avx2) return avx2_kernels();
#endif
  return scalar_kernels();
}

std::string_view to_string(Backend backend) noexcept {
  return backend == Backend::avx2 ? "avx2" : "scalar";
}

}  // namespace mlc::simd
