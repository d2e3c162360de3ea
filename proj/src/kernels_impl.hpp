#pragma once

#include "ripbench/kernels.hpp"

namespace ripbench::kernels::detail {
#if RIPBENCH_HAVE_AVX2
const Table& avx2_table();
#endif
}  // namespace ripbench::kernels::detail
