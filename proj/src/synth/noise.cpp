#include "dyntex/synth/noise.hpp"

#include <cmath>
#include <stdexcept>

#include "dyntex/numerics/rng.hpp"

namespace dyntex::synth {

ValueNoise::ValueNoise(std::uint64_t seed, double lattice_mm, int octaves)
    : seed_(seed), lattice_mm_(lattice_mm), octaves_(octaves) {
  if (!(lattice_mm > 0) || octaves < 1) throw std::invalid_argument("ValueNoise: lattice must be > 0 and octaves >= 1");
  norm_ = 0.0;
  for (int o = 0; o < octaves_; ++o) norm_ += std::ldexp(1.0, -o);
}

double ValueNoise::lattice_value(std::int64_t ix, std::int64_t iy, std::int64_t iz, int octave) const {
  std::uint64_t h = derive_seed(seed_, static_cast<std::uint64_t>(octave));
  h = derive_seed(h, static_cast<std::uint64_t>(ix));
  h = derive_seed(h, static_cast<std::uint64_t>(iy));
  h = derive_seed(h, static_cast<std::uint64_t>(iz));
  return static_cast<double>(h >> 11) * 0x1.0p-52 - 1.0;
}

double ValueNoise::band(const Vec3& mm, double lattice, int octave) const {
  std::int64_t i0[3];
  double t[3];
  for (int a = 0; a < 3; ++a) {
    const double u = mm[a] / lattice;
    const double f = std::floor(u);
    i0[a] = static_cast<std::int64_t>(f);
    const double fr = u - f;
    t[a] = fr * fr * (3.0 - 2.0 * fr);
  }
  double acc = 0.0;
  for (int c = 0; c < 8; ++c) {
    const int bx = c & 1, by = (c >> 1) & 1, bz = (c >> 2) & 1;
    const double w = (bx ? t[0] : 1 - t[0]) * (by ? t[1] : 1 - t[1]) * (bz ? t[2] : 1 - t[2]);
    acc += w * lattice_value(i0[0] + bx, i0[1] + by, i0[2] + bz, octave);
  }
  return acc;
}

double ValueNoise::operator()(const Vec3& mm) const {
  double v = 0.0;
  double lattice = lattice_mm_;
  for (int o = 0; o < octaves_; ++o) {
    v += std::ldexp(1.0, -o) * band(mm, lattice, o);
    lattice *= 0.5;
  }
  return v / norm_;
}

}  // namespace dyntex::synth
