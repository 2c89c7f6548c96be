#include "dyntex/synth/generator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "dyntex/numerics/filter.hpp"
#include "dyntex/numerics/rng.hpp"
#include "dyntex/synth/noise.hpp"

namespace dyntex::synth {
namespace {

constexpr double kFineLatticeMm = 1.2;
constexpr double kCoarseLatticeMm = 4.8;

// Points on the unit sphere (Fibonacci lattice) used for containment tests.
const std::vector<Vec3>& sphere_points() {
  static const std::vector<Vec3> pts = [] {
    std::vector<Vec3> v;
    const int n = 256;
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < n; ++i) {
      const double z = 1.0 - 2.0 * (i + 0.5) / n;
      const double r = std::sqrt(1.0 - z * z);
      v.push_back({r * std::cos(golden * i), r * std::sin(golden * i), z});
    }
    return v;
  }();
  return pts;
}

bool ellipsoid_inside(const Ellipsoid& inner, const Ellipsoid& outer) {
  for (const auto& u : sphere_points()) {
    Vec3 p;
    for (int a = 0; a < 3; ++a) p[a] = inner.center_mm[a] + u[a] * inner.radii_mm[a];
    if (outer.rho(p) > 1.0) return false;
  }
  return true;
}

double segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  Vec3 ab{}, ap{};
  double len2 = 0.0, dot = 0.0;
  for (int i = 0; i < 3; ++i) {
    ab[i] = b[i] - a[i];
    ap[i] = p[i] - a[i];
    len2 += ab[i] * ab[i];
    dot += ab[i] * ap[i];
  }
  const double t = len2 > 0 ? std::clamp(dot / len2, 0.0, 1.0) : 0.0;
  double d2 = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double q = ap[i] - t * ab[i];
    d2 += q * q;
  }
  return std::sqrt(d2);
}

double distance(const Vec3& a, const Vec3& b) {
  return std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) + (a[2] - b[2]) * (a[2] - b[2]));
}

}  // namespace

double Ellipsoid::rho(const Vec3& mm) const {
  double s = 0.0;
  for (int a = 0; a < 3; ++a) {
    const double u = (mm[a] - center_mm[a]) / radii_mm[a];
    s += u * u;
  }
  return std::sqrt(s);
}

const std::array<ClassSignature, 4>& default_signatures() {
  // Pairs share an enhancement pattern and differ mainly in texture scale:
  // HCC/Benign are arterially bright, ICC/Metastasis hypodense.
  static const std::array<ClassSignature, 4> sigs{{
      {{0.80, 1.50, 0.85, 0.78}, kFineLatticeMm, 36.0},    // HCC: wash-in, wash-out
      {{0.72, 0.80, 0.86, 0.94}, kCoarseLatticeMm, 36.0},  // ICC: delayed fill-in
      {{0.80, 1.45, 0.98, 0.92}, kCoarseLatticeMm, 36.0},  // Benign: persistent
      {{0.72, 0.80, 0.78, 0.78}, kFineLatticeMm, 36.0},    // Metastasis: hypodense
  }};
  return sigs;
}

Study generate_study(const StudySpec& spec) {
  for (int a = 0; a < 3; ++a) {
    if (spec.shape[a] < 2 || !(spec.spacing_mm[a] > 0)) throw std::invalid_argument("generate_study: invalid geometry");
  }
  for (std::size_t l = 0; l < spec.lesions.size(); ++l) {
    const auto& les = spec.lesions[l];
    if (!(les.radii_mm[0] > 0 && les.radii_mm[1] > 0 && les.radii_mm[2] > 0)) {
      throw std::invalid_argument("generate_study: lesion " + std::to_string(l) + " has non-positive radii");
    }
    if (!ellipsoid_inside({les.center_mm, les.radii_mm}, spec.liver)) {
      throw std::invalid_argument("generate_study: lesion " + std::to_string(l) + " lies outside the liver");
    }
  }
  for (std::size_t d = 0; d < spec.distractors.size(); ++d) {
    const auto& dis = spec.distractors[d];
    if (dis.kind == DistractorKind::Cyst && !ellipsoid_inside({dis.a_mm, dis.radii_mm}, spec.liver)) {
      throw std::invalid_argument("generate_study: cyst " + std::to_string(d) + " lies outside the liver");
    }
  }

  const Dims3 dims = spec.shape;
  Study study;
  study.labels = Grid3<std::uint8_t>(dims, 0);
  const ValueNoise background(derive_seed(spec.seed, 1), spec.background_lattice_mm);
  std::vector<ValueNoise> lesion_tex;
  for (const auto& les : spec.lesions) lesion_tex.emplace_back(les.texture_seed, les.texture_lattice_mm);
  const ValueNoise cyst_tex(derive_seed(spec.seed, 2), 3.0);

  // Clean signal per phase, before PSF blur and scanner noise.
  std::array<Grid3<float>, 4> clean;
  for (auto& g : clean) g = Grid3<float>(dims, 0.0f);
  std::vector<std::size_t> cyst_label;  // label value per distractor index (0 for vessels)
  std::uint8_t next_label = static_cast<std::uint8_t>(1 + spec.lesions.size());
  for (const auto& dis : spec.distractors) {
    cyst_label.push_back(dis.kind == DistractorKind::Cyst ? next_label++ : 0);
  }

  for (std::size_t z = 0; z < dims[2]; ++z) {
    for (std::size_t y = 0; y < dims[1]; ++y) {
      for (std::size_t x = 0; x < dims[0]; ++x) {
        const Vec3 mm = voxel_center_mm(spec.spacing_mm, x, y, z);
        const bool in_liver = spec.liver.rho(mm) <= 1.0;
        const double tex = spec.background_amplitude_hu * background(mm);
        PhaseValues v{};
        for (int p = 0; p < 4; ++p) v[p] = spec.liver_hu[p] * (in_liver ? 1.0 : spec.outside_factor) + tex;

        for (std::size_t d = 0; d < spec.distractors.size(); ++d) {
          const auto& dis = spec.distractors[d];
          if (dis.kind == DistractorKind::Vessel) {
            if (in_liver && segment_distance(mm, dis.a_mm, dis.b_mm) <= dis.radii_mm[0]) {
              for (int p = 0; p < 4; ++p) v[p] = spec.liver_hu[p] * dis.phase_hu[p];
            }
          } else if (Ellipsoid{dis.a_mm, dis.radii_mm}.rho(mm) <= 1.0) {
            const double t = 3.0 * cyst_tex(mm);
            for (int p = 0; p < 4; ++p) v[p] = dis.phase_hu[p] + t;
            study.labels(x, y, z) = static_cast<std::uint8_t>(cyst_label[d]);
          }
        }
        for (std::size_t l = 0; l < spec.lesions.size(); ++l) {
          const auto& les = spec.lesions[l];
          if (Ellipsoid{les.center_mm, les.radii_mm}.rho(mm) > 1.0) continue;
          const double t = les.texture_amplitude_hu * lesion_tex[l](mm);
          for (int p = 0; p < 4; ++p) v[p] = spec.liver_hu[p] * les.phase_profile[p] + t;
          study.labels(x, y, z) = static_cast<std::uint8_t>(1 + l);
        }
        for (int p = 0; p < 4; ++p) clean[p](x, y, z) = static_cast<float>(v[p]);
      }
    }
  }

  Rng noise(derive_seed(spec.seed, 3));
  for (int p = 0; p < 4; ++p) {
    Grid3<float> blurred = gaussian_smooth(clean[p], {spec.psf_sigma_vox, spec.psf_sigma_vox, 0.0});
    for (auto& val : blurred.data) val = static_cast<float>(val + spec.noise_sigma_hu * noise.normal());
    study.phases[p].voxels = std::move(blurred);
    study.phases[p].spacing_mm = spec.spacing_mm;
    study.phases[p].phase = kContrastPhases[p];
  }

  // Ground-truth boxes from the exact indicator, voxels as unit cubes.
  const std::size_t n_labels = next_label;
  std::vector<detect::Box3D> boxes(n_labels, detect::Box3D{1e30, 1e30, 1e30, -1e30, -1e30, -1e30});
  for (std::size_t z = 0; z < dims[2]; ++z)
    for (std::size_t y = 0; y < dims[1]; ++y)
      for (std::size_t x = 0; x < dims[0]; ++x) {
        const auto lab = study.labels(x, y, z);
        if (!lab) continue;
        auto& b = boxes[lab];
        b.x1 = std::min(b.x1, double(x));
        b.y1 = std::min(b.y1, double(y));
        b.z1 = std::min(b.z1, double(z));
        b.x2 = std::max(b.x2, double(x + 1));
        b.y2 = std::max(b.y2, double(y + 1));
        b.z2 = std::max(b.z2, double(z + 1));
      }
  for (std::size_t l = 0; l < spec.lesions.size(); ++l) {
    if (!boxes[1 + l].valid()) throw std::invalid_argument("generate_study: lesion " + std::to_string(l) + " covers no voxel");
    study.lesions.push_back({boxes[1 + l], l == 0 ? LesionRole::Primary : LesionRole::NonPrimary, spec.lesions[l].class_id});
  }
  for (std::size_t d = 0; d < spec.distractors.size(); ++d) {
    if (!cyst_label[d] || !boxes[cyst_label[d]].valid()) continue;
    study.lesions.push_back({boxes[cyst_label[d]], LesionRole::NonPrimary, spec.lesions.empty() ? LesionClass::Benign : spec.lesions[0].class_id});
  }

  // Segmentation stand-in: lesion indicator with random flips near boundaries.
  study.lesion_mask = Volume(dims, spec.spacing_mm, Phase::Unknown, 0.0f);
  Rng flips(derive_seed(spec.seed, 4));
  std::vector<Ellipsoid> shapes;
  for (const auto& les : spec.lesions) shapes.push_back({les.center_mm, les.radii_mm});
  for (const auto& dis : spec.distractors)
    if (dis.kind == DistractorKind::Cyst) shapes.push_back({dis.a_mm, dis.radii_mm});
  for (std::size_t z = 0; z < dims[2]; ++z)
    for (std::size_t y = 0; y < dims[1]; ++y)
      for (std::size_t x = 0; x < dims[0]; ++x) {
        const Vec3 mm = voxel_center_mm(spec.spacing_mm, x, y, z);
        bool on = study.labels(x, y, z) != 0;
        bool near_edge = false;
        for (const auto& e : shapes) near_edge = near_edge || std::abs(e.rho(mm) - 1.0) < 0.12;
        const double draw = flips.uniform();
        if (near_edge && draw < spec.mask_flip_probability) on = !on;
        if (on && !study.labels(x, y, z)) {
          // Added voxels stay within some lesion's box.
          bool boxed = false;
          for (const auto& gt : study.lesions)
            boxed = boxed || (x >= gt.box.x1 && x < gt.box.x2 && y >= gt.box.y1 && y < gt.box.y2 && z >= gt.box.z1 && z < gt.box.z2);
          on = boxed;
        }
        study.lesion_mask.at(x, y, z) = on ? 1.0f : 0.0f;
      }
  return study;
}

StudySpec sample_study_spec(std::uint64_t seed, LesionClass cls) {
  Rng rng(derive_seed(seed, 100));
  StudySpec spec;
  spec.seed = seed;
  Vec3 extent{};
  for (int a = 0; a < 3; ++a) extent[a] = spec.shape[a] * spec.spacing_mm[a];
  for (int a = 0; a < 3; ++a) {
    spec.liver.center_mm[a] = extent[a] / 2.0;
    spec.liver.radii_mm[a] = 0.62 * extent[a];
  }
  for (auto& h : spec.liver_hu) h += rng.normal(0.0, 4.0);
  spec.background_lattice_mm = rng.uniform() < 0.5 ? kFineLatticeMm : kCoarseLatticeMm;

  const auto& sig = default_signatures()[static_cast<std::size_t>(cls)];
  LesionSpec primary;
  primary.class_id = cls;
  primary.texture_lattice_mm = sig.texture_lattice_mm;
  primary.texture_amplitude_hu = sig.texture_amplitude_hu * rng.uniform(0.85, 1.15);
  for (int p = 0; p < 4; ++p) primary.phase_profile[p] = sig.phase_profile[p] * (1.0 + rng.normal(0.0, 0.06));
  primary.texture_seed = derive_seed(seed, 200);
  const double base_r = rng.uniform(9.0, 18.0);
  primary.radii_mm = {base_r * rng.uniform(0.85, 1.15), base_r * rng.uniform(0.85, 1.15), base_r * rng.uniform(0.8, 1.2)};

  auto fits = [&](const Vec3& c, const Vec3& r) {
    for (int a = 0; a < 3; ++a) {
      const double margin = 2.0 * spec.spacing_mm[a];
      if (c[a] - r[a] < margin || c[a] + r[a] > extent[a] - margin) return false;
    }
    return ellipsoid_inside({c, r}, spec.liver);
  };
  for (int attempt = 0;; ++attempt) {
    if (attempt > 10000) throw std::runtime_error("sample_study_spec: could not place the primary lesion");
    Vec3 c{rng.uniform(0, extent[0]), rng.uniform(0, extent[1]), rng.uniform(0, extent[2])};
    if (fits(c, primary.radii_mm)) {
      primary.center_mm = c;
      break;
    }
  }
  spec.lesions.push_back(primary);

  const int n_vessels = 2 + static_cast<int>(rng.below(2));
  for (int v = 0; v < n_vessels; ++v) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
      Distractor d;
      d.kind = DistractorKind::Vessel;
      const double r = rng.uniform(1.5, 3.0);
      d.radii_mm = {r, r, r};
      d.a_mm = {rng.uniform(0, extent[0]), rng.uniform(0, extent[1]), rng.uniform(0, extent[2])};
      d.b_mm = {rng.uniform(0, extent[0]), rng.uniform(0, extent[1]), rng.uniform(0, extent[2])};
      d.phase_hu = {0.85, 1.9, 1.6, 1.15};
      if (distance(d.a_mm, d.b_mm) < 40.0) continue;
      const double clearance = segment_distance(primary.center_mm, d.a_mm, d.b_mm);
      if (clearance < std::max({primary.radii_mm[0], primary.radii_mm[1], primary.radii_mm[2]}) + r + 3.0) continue;
      spec.distractors.push_back(d);
      break;
    }
  }
  const int n_cysts = static_cast<int>(rng.below(3));
  for (int k = 0; k < n_cysts; ++k) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
      Distractor d;
      d.kind = DistractorKind::Cyst;
      const double r = rng.uniform(3.5, 6.0);
      d.radii_mm = {r, r, std::max(r, 3.0)};
      d.a_mm = {rng.uniform(0, extent[0]), rng.uniform(0, extent[1]), rng.uniform(0, extent[2])};
      const double hu = rng.uniform(5.0, 15.0);
      d.phase_hu = {hu, hu, hu, hu};
      if (!fits(d.a_mm, d.radii_mm)) continue;
      bool clear = distance(d.a_mm, primary.center_mm) >
                   std::max({primary.radii_mm[0], primary.radii_mm[1], primary.radii_mm[2]}) + r + 4.0;
      for (const auto& o : spec.distractors)
        clear = clear && (o.kind == DistractorKind::Vessel ? segment_distance(d.a_mm, o.a_mm, o.b_mm) > r + o.radii_mm[0] + 2.0
                                                            : distance(d.a_mm, o.a_mm) > r + o.radii_mm[0] + 3.0);
      if (!clear) continue;
      spec.distractors.push_back(d);
      break;
    }
  }
  return spec;
}

}  // namespace dyntex::synth
