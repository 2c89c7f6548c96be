#include <doctest.h>

#include <map>

#include "dyntex/synth/corpus.hpp"
#include "dyntex/synth/generator.hpp"
#include "dyntex/synth/noise.hpp"

using namespace dyntex;
using namespace dyntex::synth;

namespace {

bool inside(const detect::Box3D& b, std::size_t x, std::size_t y, std::size_t z) {
  return x >= b.x1 && x + 1 <= b.x2 && y >= b.y1 && y + 1 <= b.y2 && z >= b.z1 && z + 1 <= b.z2;
}

}  // namespace

TEST_CASE("value noise is seeded and bounded") {
  const ValueNoise a(5, 2.0), b(5, 2.0), c(6, 2.0);
  double diff = 0;
  for (int i = 0; i < 200; ++i) {
    const Vec3 p{i * 0.37, i * 0.11, i * 0.53};
    CHECK(a(p) == b(p));
    CHECK(std::abs(a(p)) <= 1.0);
    diff += std::abs(a(p) - c(p));
  }
  CHECK(diff > 1.0);
}

TEST_CASE("generated studies are deterministic") {
  const auto spec = sample_study_spec(77, LesionClass::Benign);
  const auto s1 = generate_study(spec);
  const auto s2 = generate_study(sample_study_spec(77, LesionClass::Benign));
  for (int p = 0; p < 4; ++p) CHECK(s1.phases[p] == s2.phases[p]);
  CHECK(s1.lesion_mask == s2.lesion_mask);
  CHECK(s1.labels == s2.labels);
  CHECK(generate_study(sample_study_spec(78, LesionClass::Benign)).phases[0] != s1.phases[0]);
}

TEST_CASE("ground truth boxes enclose indicators and masks") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const auto study = generate_study(sample_study_spec(seed, static_cast<LesionClass>(seed % 4)));
    REQUIRE(!study.lesions.empty());
    CHECK(study.lesions[0].role == LesionRole::Primary);
    const auto& d = study.labels.dims;
    for (std::size_t z = 0; z < d[2]; ++z)
      for (std::size_t y = 0; y < d[1]; ++y)
        for (std::size_t x = 0; x < d[0]; ++x) {
          const auto lab = study.labels(x, y, z);
          if (lab) CHECK(inside(study.lesions[lab - 1].box, x, y, z));
          if (study.lesion_mask.at(x, y, z) == 1.0f) {
            bool any = false;
            for (const auto& l : study.lesions) any = any || inside(l.box, x, y, z);
            CHECK(any);
          }
        }
    for (int p = 0; p < 4; ++p) {
      CHECK(study.phases[p].shape() == d);
      CHECK(study.phases[p].phase == kContrastPhases[p]);
    }
  }
}

TEST_CASE("arterial enhancement follows the class profile") {
  for (std::uint64_t seed = 10; seed < 14; ++seed) {
    const auto spec = sample_study_spec(seed, LesionClass::HCC);
    REQUIRE(spec.lesions[0].phase_profile[1] > spec.lesions[0].phase_profile[0]);
    const auto study = generate_study(spec);
    double nc = 0, art = 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < study.labels.size(); ++i)
      if (study.labels.data[i] == 1) {
        nc += study.phases[0].voxels.data[i];
        art += study.phases[1].voxels.data[i];
        ++n;
      }
    REQUIRE(n > 0);
    CHECK(art / n > nc / n);
  }
}

TEST_CASE("lesions outside the liver are rejected") {
  auto spec = sample_study_spec(3, LesionClass::ICC);
  spec.lesions[0].center_mm = {1.0, 1.0, 1.0};
  CHECK_THROWS_AS(generate_study(spec), std::invalid_argument);
  spec = sample_study_spec(3, LesionClass::ICC);
  spec.lesions[0].radii_mm[1] = 0.0;
  CHECK_THROWS_AS(generate_study(spec), std::invalid_argument);
}

TEST_CASE("class counts by largest remainder") {
  CHECK(class_counts(20, {0.5, 0.1, 0.2, 0.2}) == std::array<std::size_t, 4>{10, 2, 4, 4});
  CHECK(class_counts(10, {0.25, 0.25, 0.25, 0.25}) == std::array<std::size_t, 4>{3, 3, 2, 2});
  CHECK(class_counts(7, {0.4, 0.2, 0.2, 0.2}) == std::array<std::size_t, 4>{3, 2, 1, 1});
  CHECK_THROWS(class_counts(10, {0.5, 0.5, 0.5, 0.0}));
}

TEST_CASE("stratified split sizes") {
  CHECK(split_sizes(10) == std::array<std::size_t, 3>{6, 1, 3});
  CHECK(split_sizes(5) == std::array<std::size_t, 3>{2, 1, 2});
  CHECK(split_sizes(2) == std::array<std::size_t, 3>{1, 0, 1});
  CHECK(split_sizes(1) == std::array<std::size_t, 3>{1, 0, 0});
  for (std::size_t n = 0; n < 200; ++n) {
    const auto s = split_sizes(n);
    CHECK(s[0] + s[1] + s[2] == n);
    if (n >= 5) CHECK(s[2] >= 1);
    if (n >= 2) CHECK(s[0] >= 1);
  }
}

TEST_CASE("corpus plan is stratified and reproducible") {
  const auto plan = plan_corpus(60, kDefaultMix, 42);
  CHECK(plan.size() == 60);
  CHECK(plan_corpus(60, kDefaultMix, 42).size() == 60);
  const auto again = plan_corpus(60, kDefaultMix, 42);
  std::map<LesionClass, std::size_t> test_count;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    CHECK(plan[i].study_id == again[i].study_id);
    CHECK(plan[i].label == again[i].label);
    CHECK(plan[i].split == again[i].split);
    CHECK(plan[i].seed == again[i].seed);
    if (plan[i].split == Split::Test) ++test_count[plan[i].label];
  }
  for (auto c : kLesionClasses) CHECK(test_count[c] >= 1);
  CHECK(plan[0].study_id == "s0000");
  CHECK(parse_split("val") == Split::Val);
  CHECK_THROWS(plan_corpus(0, kDefaultMix, 1));
}
