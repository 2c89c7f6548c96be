#pragma once

#include <cstdint>

#include "dyntex/numerics/grid.hpp"

namespace dyntex::synth {

/// Seeded 3D value noise in physical coordinates: lattice values uniform in
/// [-1, 1] at `lattice_mm` spacing, smoothstep-interpolated. `octaves` adds
/// bands at half the lattice spacing with half the amplitude each.
class ValueNoise {
 public:
  ValueNoise(std::uint64_t seed, double lattice_mm, int octaves = 2);

  double operator()(const Vec3& mm) const;

 private:
  double lattice_value(std::int64_t ix, std::int64_t iy, std::int64_t iz, int octave) const;
  double band(const Vec3& mm, double lattice, int octave) const;

  std::uint64_t seed_;
  double lattice_mm_;
  int octaves_;
  double norm_;
};

}  // namespace dyntex::synth
