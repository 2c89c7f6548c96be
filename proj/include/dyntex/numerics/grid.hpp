#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace dyntex {

/// Extents of a 3D grid as (x, y, z).
using Dims3 = std::array<std::size_t, 3>;
using Vec3 = std::array<double, 3>;

inline std::size_t dims_volume(const Dims3& d) { return d[0] * d[1] * d[2]; }
inline std::string dims_string(const Dims3& d) {
  return "[" + std::to_string(d[0]) + "," + std::to_string(d[1]) + "," + std::to_string(d[2]) + "]";
}

/// Scalar field on a 3D grid; x is the fastest axis in memory, z the slowest.
template <typename T>
struct Grid3 {
  Dims3 dims{0, 0, 0};
  std::vector<T> data;

  Grid3() = default;
  explicit Grid3(Dims3 d, T fill = T{}) : dims(d), data(dims_volume(d), fill) {}

  std::size_t index(std::size_t x, std::size_t y, std::size_t z) const {
    return (z * dims[1] + y) * dims[0] + x;
  }
  T& operator()(std::size_t x, std::size_t y, std::size_t z) { return data[index(x, y, z)]; }
  const T& operator()(std::size_t x, std::size_t y, std::size_t z) const { return data[index(x, y, z)]; }

  bool contains(long x, long y, long z) const {
    return x >= 0 && y >= 0 && z >= 0 && x < static_cast<long>(dims[0]) && y < static_cast<long>(dims[1]) &&
           z < static_cast<long>(dims[2]);
  }
  std::size_t size() const { return data.size(); }

  friend bool operator==(const Grid3&, const Grid3&) = default;
};

}  // namespace dyntex
