#include "dyntex/numerics/resample.hpp"

#include <stdexcept>

#include "../kernels/dispatch.hpp"

namespace dyntex {

Volume trilinear_resample(const Volume& vol, const Dims3& target) {
  const auto& src = vol.shape();
  for (int a = 0; a < 3; ++a) {
    if (target[a] == 0) throw std::invalid_argument("trilinear_resample: degenerate target extent in " + dims_string(target));
    if (target[a] < 2 || src[a] < 2) {
      throw std::invalid_argument("trilinear_resample: extents must be >= 2, source " + dims_string(src) +
                                  " target " + dims_string(target));
    }
  }
  if (target == src) return vol;
  Volume out;
  out.phase = vol.phase;
  out.voxels = Grid3<float>(target);
  for (int a = 0; a < 3; ++a) {
    out.spacing_mm[a] = vol.spacing_mm[a] * static_cast<double>(src[a] - 1) / static_cast<double>(target[a] - 1);
  }
  kernels::active::resample_trilinear(vol.voxels.data, src, out.voxels.data, target);
  return out;
}

}  // namespace dyntex
