#include <doctest.h>

#include <cmath>

#include "dyntex/numerics/activation.hpp"
#include "dyntex/numerics/conv.hpp"
#include "dyntex/numerics/filter.hpp"
#include "dyntex/numerics/gradcheck.hpp"
#include "dyntex/numerics/resample.hpp"
#include "dyntex/numerics/rng.hpp"
#include "dyntex/numerics/tensor.hpp"

using namespace dyntex;

namespace {

Tensor64 random_tensor(Shape shape, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Tensor64 t(std::move(shape));
  for (auto& v : t.storage()) v = rng.uniform(lo, hi);
  return t;
}

}  // namespace

TEST_CASE("tensor flatten/unflatten round trip") {
  Tensor64 t({3, 4, 5});
  for (std::size_t f = 0; f < t.size(); ++f) {
    const auto idx = t.unflatten(f);
    CHECK(t.flatten(idx) == f);
  }
  CHECK(t.flatten(std::vector<std::size_t>{1, 2, 3}) == (1 * 4 + 2) * 5 + 3);
  CHECK_THROWS(Tensor64({2, 0}));
  CHECK_THROWS(Tensor64({2, 2}, std::vector<double>{1, 2, 3}));
  CHECK_THROWS(t.flatten(std::vector<std::size_t>{3, 0, 0}));
}

TEST_CASE("conv2d: ones under a 1x1 kernel of 2") {
  Tensor64 in({1, 3, 3}, 1.0);
  Tensor64 k({1, 1, 1, 1}, 2.0);
  Tensor64 b({1}, 0.0);
  const auto out = conv2d_forward(in, k, b, 1);
  CHECK(out.shape() == Shape{1, 3, 3});
  for (double v : out.storage()) CHECK(v == 2.0);
}

TEST_CASE("conv2d: centred impulse reproduces the kernel unflipped") {
  Tensor64 in({1, 3, 3}, 0.0);
  in(0, 1, 1) = 1.0;
  Tensor64 k({1, 1, 3, 3});
  for (std::size_t i = 0; i < 9; ++i) k[i] = static_cast<double>(i + 1);
  const auto out = conv2d_forward(in, k, Tensor64({1}, 0.0), 1);
  // out(y,x) = sum k(dy,dx) in(y+dy-1, x+dx-1): impulse at (1,1) gives k(2-y, 2-x).
  for (std::size_t y = 0; y < 3; ++y)
    for (std::size_t x = 0; x < 3; ++x) CHECK(out(0, y, x) == k(0, 0, 2 - y, 2 - x));
  CHECK(out(0, 1, 1) == 5.0);
}

TEST_CASE("conv2d: stride 2 shape arithmetic and rejections") {
  Tensor64 in({1, 4, 4}, 1.0);
  Tensor64 k({1, 1, 3, 3}, 1.0);
  CHECK(conv2d_forward(in, k, Tensor64({1}), 2).shape() == Shape{1, 2, 2});
  CHECK(conv2d_forward(Tensor64({1, 5, 5}), k, Tensor64({1}), 2).shape() == Shape{1, 3, 3});
  CHECK_THROWS(conv2d_forward(Tensor64({2, 4, 4}), k, Tensor64({1}), 1));
  CHECK_THROWS(conv2d_forward(in, Tensor64({1, 1, 2, 2}), Tensor64({1}), 1));
  CHECK_THROWS(conv2d_forward(Tensor64({1, 2, 2}), k, Tensor64({1}), 1));
  try {
    conv2d_forward(Tensor64({2, 4, 4}), k, Tensor64({1}), 1);
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("[2,4,4]") != std::string::npos);
    CHECK(msg.find("[1,1,3,3]") != std::string::npos);
  }
}

TEST_CASE("conv2d is linear in the input") {
  Rng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const auto x = random_tensor({2, 7, 6}, rng);
    const auto y = random_tensor({2, 7, 6}, rng);
    const auto k = random_tensor({3, 2, 3, 3}, rng);
    const Tensor64 b({3}, 0.0);
    const double a = rng.uniform(-2, 2), c = rng.uniform(-2, 2);
    Tensor64 mix(x.shape());
    for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = a * x[i] + c * y[i];
    const auto lhs = conv2d_forward(mix, k, b, 2);
    const auto fx = conv2d_forward(x, k, b, 2);
    const auto fy = conv2d_forward(y, k, b, 2);
    for (std::size_t i = 0; i < lhs.size(); ++i) {
      const double rhs = a * fx[i] + c * fy[i];
      CHECK(std::abs(lhs[i] - rhs) <= 1e-6 * std::max(1.0, std::abs(rhs)));
    }
  }
}

TEST_CASE("conv2d backward matches finite differences") {
  Rng rng(5);
  for (std::size_t stride : {1u, 2u}) {
    const auto x = random_tensor({2, 5, 6}, rng);
    const auto k = random_tensor({3, 2, 3, 3}, rng);
    const auto b = random_tensor({3}, rng);
    const auto w = random_tensor(conv2d_forward(x, k, b, stride).shape(), rng);
    const Tensor64* parts[] = {&x, &k, &b};
    ScalarFunction fn{
        [&](const Tensor64& p) {
          const auto u = unpack(p, parts);
          const auto out = conv2d_forward(u[0], u[1], u[2], stride);
          double s = 0;
          for (std::size_t i = 0; i < out.size(); ++i) s += w[i] * out[i];
          return s;
        },
        [&](const Tensor64& p) {
          const auto u = unpack(p, parts);
          const auto g = conv2d_backward(u[0], u[1], w, stride);
          const Tensor64* gp[] = {&g.input, &g.kernels, &g.bias};
          return pack(gp);
        }};
    CHECK(gradcheck(fn, pack(parts), 1e-5).max_rel_error < 1e-6);
  }
}

TEST_CASE("relu forward/backward conventions") {
  const Tensor64 x({3}, std::vector<double>{-1, 0, 2});
  CHECK(relu_forward(x).storage() == std::vector<double>{0, 0, 2});
  CHECK(relu_backward(x, Tensor64({3}, 1.0)).storage() == std::vector<double>{0, 0, 1});
  CHECK(relu_forward(relu_forward(x)) == relu_forward(x));
}

TEST_CASE("trilinear resample: identity, constants, ramps, affine fields") {
  Volume v({6, 5, 4}, {0.5, 0.5, 2.0}, Phase::A);
  Rng rng(3);
  for (auto& f : v.voxels.data) f = static_cast<float>(rng.uniform(-100, 100));
  CHECK(trilinear_resample(v, v.shape()) == v);

  Volume c({5, 5, 5}, {1, 1, 1}, Phase::V, 42.0f);
  for (float f : trilinear_resample(c, {3, 8, 2}).voxels.data) CHECK(f == doctest::Approx(42.0f));

  Volume ramp({9, 2, 2}, {1, 1, 1}, Phase::NC);
  for (std::size_t z = 0; z < 2; ++z)
    for (std::size_t y = 0; y < 2; ++y)
      for (std::size_t x = 0; x < 9; ++x) ramp.at(x, y, z) = static_cast<float>(x);
  const auto half = trilinear_resample(ramp, {5, 2, 2});
  for (std::size_t x = 0; x < 5; ++x) CHECK(half.at(x, 1, 1) == doctest::Approx(2.0 * x));
  CHECK(half.at(0, 0, 0) == 0.0f);
  CHECK(half.at(4, 0, 0) == 8.0f);
  CHECK(half.spacing_mm[0] == doctest::Approx(2.0));

  Volume aff({7, 6, 5}, {1, 1, 3}, Phase::D);
  auto f = [](double x, double y, double z) { return 0.5 * x - 1.25 * y + 2.0 * z + 3.0; };
  for (std::size_t z = 0; z < 5; ++z)
    for (std::size_t y = 0; y < 6; ++y)
      for (std::size_t x = 0; x < 7; ++x) aff.at(x, y, z) = static_cast<float>(f(x, y, z));
  const Dims3 t{11, 4, 9};
  const auto r = trilinear_resample(aff, t);
  for (std::size_t z = 0; z < t[2]; ++z)
    for (std::size_t y = 0; y < t[1]; ++y)
      for (std::size_t x = 0; x < t[0]; ++x) {
        const double want = f(map_corner_aligned(x, t[0], 7), map_corner_aligned(y, t[1], 6), map_corner_aligned(z, t[2], 5));
        CHECK(std::abs(r.at(x, y, z) - want) <= 1e-5 * std::max(1.0, std::abs(want)));
      }
  CHECK_THROWS(trilinear_resample(aff, {0, 4, 4}));
}

TEST_CASE("gaussian smoothing preserves constants and mass") {
  const auto taps = gaussian_taps(1.5);
  double s = 0;
  for (double t : taps) s += t;
  CHECK(s == doctest::Approx(1.0));
  CHECK(taps.size() == 2 * 5 + 1);
  CHECK(gaussian_taps(0.0).size() == 1);
  Grid3<float> g({8, 8, 3}, 7.0f);
  for (float v : gaussian_smooth(g, {1.0, 2.0, 0.5}).data) CHECK(v == doctest::Approx(7.0f));
}

TEST_CASE("gradcheck: closed form, constants, planted error") {
  ScalarFunction sq{[](const Tensor64& p) { return p[0] * p[0]; },
                    [](const Tensor64& p) { return Tensor64({1}, 2.0 * p[0]); }};
  const auto rep = gradcheck(sq, Tensor64({1}, 3.0), 1e-4);
  CHECK(rep.max_rel_error < 1e-7);
  CHECK(rep.num_params == 1);

  ScalarFunction c{[](const Tensor64&) { return 4.0; }, [](const Tensor64& p) { return Tensor64(p.shape(), 0.0); }};
  CHECK(gradcheck(c, Tensor64({3}, 1.0), 1e-4).max_abs_error == 0.0);

  ScalarFunction bad{[](const Tensor64& p) { return p[0] * p[0]; },
                     [](const Tensor64& p) { return Tensor64({1}, 4.0 * p[0]); }};
  CHECK(gradcheck(bad, Tensor64({1}, 3.0), 1e-4).max_rel_error == doctest::Approx(0.5).epsilon(1e-6));

  ScalarFunction nan{[](const Tensor64&) { return std::nan(""); }, [](const Tensor64& p) { return p; }};
  CHECK_THROWS(gradcheck(nan, Tensor64({1}, 1.0), 1e-4));
  CHECK_THROWS(gradcheck(sq, Tensor64({1}, 1.0), 0.0));
}

TEST_CASE("rng is reproducible and seeds are stream-separated") {
  Rng a(9), b(9);
  for (int i = 0; i < 100; ++i) CHECK(a.normal() == b.normal());
  CHECK(derive_seed(1, 2) != derive_seed(1, 3));
  CHECK(derive_seed(1, 2) == derive_seed(1, 2));
  Rng r(1);
  double mean = 0;
  for (int i = 0; i < 20000; ++i) mean += r.uniform();
  CHECK(mean / 20000 == doctest::Approx(0.5).epsilon(0.02));
}
