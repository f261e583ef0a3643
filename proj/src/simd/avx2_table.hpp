#pragma once

#include "mlc/simd/kernels.hpp"

namespace mlc::simd {

const KernelTable& avx2_kernels() noexcept;

}  // namespace mlc::simd
