#pragma once

#include "dyntex/kernels/kernels.hpp"

namespace dyntex::kernels {
#ifdef DYNTEX_HAVE_OPENMP
namespace active = omp;
#else
namespace active = serial;
#endif
}  // namespace dyntex::kernels
