#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "dyntex/detect/box.hpp"
#include "dyntex/lesion_class.hpp"
#include "dyntex/volume.hpp"

namespace dyntex::synth {

using PhaseValues = std::array<double, 4>;  // NC, A, V, D

/// Dynamic-contrast caricature of one lesion class. Multipliers scale the
/// liver intensity of the same phase; texture is band-limited value noise.
struct ClassSignature {
  PhaseValues phase_profile{};
  double texture_lattice_mm = 2.0;
  double texture_amplitude_hu = 20.0;
};

/// Default signatures, indexed by LesionClass.
const std::array<ClassSignature, 4>& default_signatures();

struct LesionSpec {
  LesionClass class_id = LesionClass::HCC;
  Vec3 center_mm{};
  Vec3 radii_mm{};
  double texture_lattice_mm = 2.0;
  double texture_amplitude_hu = 20.0;
  PhaseValues phase_profile{};
  std::uint64_t texture_seed = 0;
};

enum class DistractorKind { Vessel, Cyst };

struct Distractor {
  DistractorKind kind = DistractorKind::Cyst;
  Vec3 a_mm{};  // cyst centre, or vessel segment start
  Vec3 b_mm{};  // vessel segment end (unused for cysts)
  Vec3 radii_mm{};  // cyst radii; vessel radius in [0]
  PhaseValues phase_hu{};  // absolute HU for cysts, liver multipliers for vessels
};

struct Ellipsoid {
  Vec3 center_mm{};
  Vec3 radii_mm{};
  /// Normalised radius: <= 1 inside.
  double rho(const Vec3& mm) const;
};

struct StudySpec {
  std::uint64_t seed = 0;
  Dims3 shape{96, 96, 20};
  Vec3 spacing_mm{1.2, 1.2, 5.0};
  Ellipsoid liver;
  PhaseValues liver_hu{55.0, 70.0, 115.0, 95.0};
  double outside_factor = 0.75;  // tissue outside the liver relative to liver HU
  double background_lattice_mm = 4.0;
  double background_amplitude_hu = 36.0;
  double noise_sigma_hu = 8.0;
  double psf_sigma_vox = 0.5;
  double mask_flip_probability = 0.35;
  std::vector<LesionSpec> lesions;  // lesions[0] is the primary tumour
  std::vector<Distractor> distractors;
};

enum class LesionRole { Primary, NonPrimary };

struct GroundTruthLesion {
  detect::Box3D box;
  LesionRole role = LesionRole::Primary;
  LesionClass class_id = LesionClass::HCC;
};

struct Study {
  std::array<Volume, 4> phases;  // NC, A, V, D, voxel-aligned
  Grid3<std::uint8_t> labels;    // 0 background, 1 primary, 2+ other lesions
  Volume lesion_mask;            // noisy binary lesion mask (segmentation stand-in)
  std::vector<GroundTruthLesion> lesions;
};

/// Physical coordinate of a voxel centre.
inline Vec3 voxel_center_mm(const Vec3& spacing, std::size_t x, std::size_t y, std::size_t z) {
  return {(x + 0.5) * spacing[0], (y + 0.5) * spacing[1], (z + 0.5) * spacing[2]};
}

/// Renders a study; rejects lesions not contained in the liver.
Study generate_study(const StudySpec& spec);

/// Draws a random study of the given class from `seed`: geometry, primary
/// lesion, 2-3 vessels and 0-2 cysts.
StudySpec sample_study_spec(std::uint64_t seed, LesionClass cls);

}  // namespace dyntex::synth
