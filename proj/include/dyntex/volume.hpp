#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "dyntex/numerics/grid.hpp"

namespace dyntex {

enum class Phase { NC, A, V, D, Unknown };

inline constexpr std::array<Phase, 4> kContrastPhases{Phase::NC, Phase::A, Phase::V, Phase::D};

std::string_view phase_name(Phase p);
std::optional<Phase> parse_phase(std::string_view s);
/// Position of a contrast phase in NC, A, V, D order; Unknown has none.
std::size_t phase_index(Phase p);

/// Single-phase CT volume with physical spacing in millimetres.
struct Volume {
  Grid3<float> voxels;
  Vec3 spacing_mm{1.0, 1.0, 1.0};
  Phase phase = Phase::Unknown;

  Volume() = default;
  Volume(Dims3 dims, Vec3 spacing, Phase ph, float fill = 0.0f)
      : voxels(dims, fill), spacing_mm(spacing), phase(ph) {}

  const Dims3& shape() const { return voxels.dims; }
  float& at(std::size_t x, std::size_t y, std::size_t z) { return voxels(x, y, z); }
  float at(std::size_t x, std::size_t y, std::size_t z) const { return voxels(x, y, z); }

  friend bool operator==(const Volume&, const Volume&) = default;
};

}  // namespace dyntex
