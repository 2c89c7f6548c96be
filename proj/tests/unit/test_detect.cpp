#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "dyntex/detect/box.hpp"
#include "dyntex/detect/decode.hpp"
#include "dyntex/detect/losses.hpp"
#include "dyntex/detect/targets.hpp"
#include "dyntex/numerics/rng.hpp"

using namespace dyntex;
using namespace dyntex::detect;

namespace {

VectorField field(const Dims3& d, double v = 0.0) { return {Grid3<double>(d, v), Grid3<double>(d, v), Grid3<double>(d, v)}; }

Grid3<double> clipped_target(const HeatTarget& t) {
  Grid3<double> p = t.heatmap;
  for (auto& v : p.data) v = std::clamp(v, kHeatClip, 1.0 - kHeatClip);
  return p;
}

}  // namespace

TEST_CASE("box and centre-size conversions") {
  const auto cs = box_to_center_size({0, 0, 0, 10, 20, 4});
  CHECK(cs.p == Vec3{5, 10, 2});
  CHECK(cs.s == Vec3{10, 20, 4});
  CHECK(box_to_center_size({0, 0, 0, 1, 1, 1}).p == Vec3{0.5, 0.5, 0.5});
  Rng rng(1);
  for (int i = 0; i < 50; ++i) {
    Box3D b{rng.uniform(0, 10), rng.uniform(0, 10), rng.uniform(0, 10), 0, 0, 0};
    b.x2 = b.x1 + rng.uniform(0.5, 5);
    b.y2 = b.y1 + rng.uniform(0.5, 5);
    b.z2 = b.z1 + rng.uniform(0.5, 5);
    const auto back = center_size_to_box(box_to_center_size(b));
    CHECK(back.x1 == doctest::Approx(b.x1));
    CHECK(back.z2 == doctest::Approx(b.z2));
  }
  CHECK_THROWS(box_to_center_size({0, 0, 0, 0, 1, 1}));
  CHECK_THROWS(center_size_to_box({{1, 1, 1}, {1, -1, 1}}));
}

TEST_CASE("gaussian target values") {
  const GaussianSpec unit{1.0, {1, 1, 1}};
  const auto t = render_targets({{{5.5, 5.5, 5.5}, {4, 4, 4}}}, {12, 12, 12}, 1, unit);
  CHECK(t.heatmap(5, 5, 5) == 1.0);
  CHECK(t.heatmap(6, 5, 5) == doctest::Approx(0.60653).epsilon(1e-5));
  CHECK(t.num_centers() == 1);
  CHECK(t.offsets[0](5, 5, 5) == doctest::Approx(0.5));
  CHECK(t.sizes[2](5, 5, 5) == 4.0);

  const GaussianSpec aniso{1.3, {1, 1, 2}};
  const auto a = render_targets({{{6, 6, 6}, {4, 4, 4}}}, {14, 14, 14}, 1, aniso);
  CHECK(a.heatmap(6, 6, 8) == doctest::Approx(a.heatmap(7, 6, 6)).epsilon(1e-12));

  CHECK(gamma_from_spacing({0.69, 0.69, 5.0})[2] == doctest::Approx(7.246).epsilon(1e-3));
  CHECK(sigma_for_size({30, 60, 12}, 1) == doctest::Approx(2.0));
  CHECK(sigma_for_size({3, 3, 3}, 2) == 1.0);

  try {
    render_targets({{{1, 1, 1}, {1, 1, 1}}, {{40, 1, 1}, {1, 1, 1}}}, {8, 8, 8}, 1, unit);
    FAIL("expected rejection");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("box 1") != std::string::npos);
  }
}

TEST_CASE("target heatmap range, anisotropy law, monotone decay") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const GaussianSpec spec{rng.uniform(0.8, 3.0), {1.0, rng.uniform(0.5, 2.0), rng.uniform(1.0, 6.0)}};
    const Dims3 dims{24, 24, 24};
    const auto t = render_targets({{{12, 12, 12}, {6, 6, 6}}}, dims, 1, spec);
    for (double v : t.heatmap.data) CHECK((v >= 0.0 && v <= 1.0));
    // Offsets (gx t, 0, 0) and (0, 0, gz t) at a lattice point t = gz when gx = 1.
    Grid3<double> h(dims, 0.0);
    const double gz = std::round(spec.gamma[2]);
    const GaussianSpec s2{spec.sigma, {1.0, 1.0, gz}};
    const auto t2 = render_targets({{{12, 12, 4}, {6, 6, 6}}}, dims, 1, s2);
    const std::size_t step = static_cast<std::size_t>(gz);
    CHECK(std::abs(t2.heatmap(13, 12, 4) - t2.heatmap(12, 12, 4 + step)) < 1e-9);
    for (std::size_t x = 12; x + 1 < 24; ++x) CHECK(t.heatmap(x + 1, 12, 12) <= t.heatmap(x, 12, 12));
    for (std::size_t d = 0; d + 13 < 24; ++d) CHECK(t.heatmap(13 + d, 13 + d, 13 + d) <= t.heatmap(12 + d, 12 + d, 12 + d));
  }
}

TEST_CASE("heatmap focal loss values") {
  const LossConfig cfg;
  const Dims3 dims{5, 5, 5};
  const auto t = render_targets({{{2.5, 2.5, 2.5}, {2, 2, 2}}}, dims, 1, GaussianSpec{1.0, {1, 1, 1}});
  HeatTarget onehot = t;
  for (auto& v : onehot.heatmap.data) v = v == 1.0 ? 1.0 : 0.0;
  CHECK(heatmap_focal_loss(clipped_target(onehot), onehot, cfg) < 1e-4);

  Grid3<double> p(dims, 0.0);
  p(2, 2, 2) = 0.5;
  CHECK(heatmap_focal_loss(p, t, cfg) == doctest::Approx(0.17329).epsilon(1e-4));

  Grid3<double> q(dims, 0.1);
  q(2, 2, 2) = 0.7;
  const double before = heatmap_focal_loss(q, t, cfg);
  q(0, 0, 0) = 0.2;
  CHECK(heatmap_focal_loss(q, t, cfg) > before);

  HeatTarget empty = t;
  empty.center_mask = Grid3<std::uint8_t>(dims, 0);
  empty.centers.clear();
  CHECK_THROWS(heatmap_focal_loss(p, empty, cfg));
  CHECK_THROWS(size_loss(field(dims), empty));
}

TEST_CASE("heatmap focal gradient matches finite differences") {
  const LossConfig cfg;
  Rng rng(8);
  const Dims3 dims{6, 5, 4};
  const auto t = render_targets({{{2, 2, 2}, {3, 3, 3}}, {{4.5, 3.5, 1.5}, {2, 2, 2}}}, dims, 1, GaussianSpec{1.2, {1, 1, 2}});
  Grid3<double> p(dims);
  for (auto& v : p.data) v = rng.uniform(0.05, 0.95);
  const auto g = heatmap_focal_loss_grad(p, t, cfg);
  for (std::size_t i = 0; i < p.size(); i += 7) {
    auto hi = p, lo = p;
    hi.data[i] += 1e-6;
    lo.data[i] -= 1e-6;
    const double num = (heatmap_focal_loss(hi, t, cfg) - heatmap_focal_loss(lo, t, cfg)) / 2e-6;
    CHECK(g.data[i] == doctest::Approx(num).epsilon(1e-5));
  }
}

TEST_CASE("L1 size and offset losses") {
  const Dims3 dims{10, 10, 10};
  const auto one = render_targets({{{2, 2, 2}, {4, 5, 6}}}, dims, 1, GaussianSpec{});
  auto pred = field(dims);
  for (int a = 0; a < 3; ++a) pred[a](2, 2, 2) = one.sizes[a](2, 2, 2);
  CHECK(size_loss(pred, one) == 0.0);
  for (int a = 0; a < 3; ++a) pred[a](2, 2, 2) = one.sizes[a](2, 2, 2) + (a + 1);
  CHECK(size_loss(pred, one) == doctest::Approx(6.0));

  const auto two = render_targets({{{2, 2, 2}, {4, 5, 6}}, {{7, 7, 7}, {1, 1, 1}}}, dims, 1, GaussianSpec{});
  auto p2 = field(dims);
  for (int a = 0; a < 3; ++a) {
    p2[a](2, 2, 2) = two.sizes[a](2, 2, 2) + (a + 1);
    p2[a](7, 7, 7) = two.sizes[a](7, 7, 7) - (a == 0 ? 2.0 : 0.0);
  }
  CHECK(size_loss(p2, two) == doctest::Approx(4.0));

  auto off = field(dims);
  CHECK(offset_loss(off, two) == doctest::Approx(0.0));
  off[0](2, 2, 2) = 0.25;
  CHECK(offset_loss(off, two) == doctest::Approx(0.125));
}

TEST_CASE("total loss weighting") {
  LossConfig cfg;
  CHECK(total_loss({1.0, 2.0, 3.0}, cfg) == doctest::Approx(4.2));
  CHECK(total_loss({0, 0, 0}, cfg) == 0.0);
  cfg.lambda_size = 0.0;
  CHECK(total_loss({1.0, 100.0, 0.0}, cfg) == 1.0);
  cfg.lambda_off = 0.0;
  CHECK(total_loss({1.5, 2.0, 3.0}, cfg) == 1.5);
}

TEST_CASE("peak decoding") {
  const Dims3 dims{8, 8, 6};
  Grid3<double> h(dims, 0.0);
  h(3, 4, 2) = 0.9;
  auto off = field(dims), sz = field(dims);
  off[0](3, 4, 2) = 0.5;
  sz[0](3, 4, 2) = 8;
  sz[1](3, 4, 2) = 8;
  sz[2](3, 4, 2) = 4;
  const auto c = decode_peaks(h, off, sz, 4, 10);
  REQUIRE(c.size() == 1);
  CHECK(c[0].score == doctest::Approx(0.9));
  CHECK(c[0].box == Box3D{10, 12, 6, 18, 20, 10});

  h(7, 0, 5) = 0.8;
  const auto top1 = decode_peaks(h, off, sz, 4, 1);
  REQUIRE(top1.size() == 1);
  CHECK(top1[0].score == doctest::Approx(0.9));

  Grid3<double> tie(dims, 0.0);
  tie(5, 1, 1) = 0.5;
  tie(1, 5, 1) = 0.5;
  const auto t = decode_peaks(tie, field(dims), field(dims, 1.0), 1, 1);
  REQUIRE(t.size() == 1);
  CHECK(t[0].box.x1 == doctest::Approx(0.5));
}

TEST_CASE("render then decode recovers well-separated boxes") {
  Rng rng(1234);
  for (int trial = 0; trial < 100; ++trial) {
    const int R = 1 + static_cast<int>(rng.below(3));
    const Dims3 out{32, 32, 16};
    const std::size_t n = 1 + rng.below(5);
    std::vector<CenterSize> boxes;
    while (boxes.size() < n) {
      CenterSize cs{{rng.uniform(0, out[0] * R), rng.uniform(0, out[1] * R), rng.uniform(0, out[2] * R)},
                    {rng.uniform(2, 12), rng.uniform(2, 12), rng.uniform(1, 6)}};
      bool far = true;
      for (const auto& b : boxes) {
        double d = 0;
        for (int a = 0; a < 3; ++a) d = std::max(d, std::abs(b.p[a] - cs.p[a]) / R);
        far = far && d >= 6.0;
      }
      if (far) boxes.push_back(cs);
    }
    const auto t = render_targets(boxes, out, R, GaussianSpec{1.0, {1, 1, 2}});
    const auto cands = decode_peaks(t.heatmap, t.offsets, t.sizes, R, 10);
    REQUIRE(cands.size() == n);
    for (const auto& b : boxes) {
      bool found = false;
      for (const auto& c : cands) {
        const auto got = box_to_center_size(c.box);
        bool ok = true;
        for (int a = 0; a < 3; ++a) ok = ok && std::abs(got.p[a] - b.p[a]) <= R + 1e-9 && std::abs(got.s[a] - b.s[a]) < 1e-9;
        found = found || ok;
      }
      CHECK(found);
    }
  }
}

TEST_CASE("iou and nms") {
  CHECK(iou3d({0, 0, 0, 2, 2, 2}, {1, 0, 0, 3, 2, 2}) == doctest::Approx(1.0 / 3.0));
  CHECK(iou3d({0, 0, 0, 1, 1, 1}, {2, 2, 2, 3, 3, 3}) == 0.0);

  const std::vector<DetectionCandidate> same{{0.8, {0, 0, 0, 2, 2, 2}, Phase::A}, {0.9, {0, 0, 0, 2, 2, 2}, Phase::V}};
  const auto kept = nms_merge(same, 0.5);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].score == 0.9);
  CHECK(kept[0].phase == Phase::V);
  CHECK(nms_merge({{0.8, {0, 0, 0, 1, 1, 1}, Phase::A}, {0.9, {5, 5, 5, 6, 6, 6}, Phase::A}}, 0.5).size() == 2);

  Rng rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<DetectionCandidate> cands;
    for (int i = 0; i < 25; ++i) {
      Box3D b{rng.uniform(0, 20), rng.uniform(0, 20), rng.uniform(0, 10), 0, 0, 0};
      b.x2 = b.x1 + rng.uniform(1, 8);
      b.y2 = b.y1 + rng.uniform(1, 8);
      b.z2 = b.z1 + rng.uniform(1, 4);
      cands.push_back({std::round(rng.uniform() * 10) / 10, b, Phase::NC});
    }
    const auto once = nms_merge(cands, 0.3);
    CHECK(nms_merge(once, 0.3) == once);
    for (std::size_t i = 1; i < once.size(); ++i) CHECK(once[i - 1].score >= once[i].score);
    for (std::size_t i = 0; i < once.size(); ++i)
      for (std::size_t j = i + 1; j < once.size(); ++j) CHECK(iou3d(once[i].box, once[j].box) < 0.3);
  }
}
