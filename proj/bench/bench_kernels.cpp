// Serial reference vs OpenMP kernels on the shapes the pipeline uses.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "dyntex/kernels/kernels.hpp"

namespace k = dyntex::kernels;

namespace {

std::vector<double> ramp(std::size_t n, double scale) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = std::sin(0.37 * static_cast<double>(i)) * scale;
  return v;
}

std::vector<float> ramp_f(std::size_t n) {
  std::vector<float> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<float>(std::cos(0.11 * static_cast<double>(i)) * 80.0);
  return v;
}

template <bool Parallel>
void BM_Conv2dForward(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const auto g = k::conv_geometry(8, side, side, 16, 3, 1);
  const auto in = ramp(g.channels * side * side, 1.0);
  const auto w = ramp(g.filters * g.channels * 9, 0.1);
  const auto b = ramp(g.filters, 0.01);
  std::vector<double> out(g.filters * g.out_height * g.out_width);
  for (auto _ : state) {
    if constexpr (Parallel) k::omp::conv2d_forward(g, in, w, b, out);
    else k::serial::conv2d_forward(g, in, w, b, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_Conv2dBackwardWeights(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const auto g = k::conv_geometry(8, side, side, 16, 3, 1);
  const auto in = ramp(g.channels * side * side, 1.0);
  const auto up = ramp(g.filters * g.out_height * g.out_width, 0.5);
  std::vector<double> gw(g.filters * g.channels * 9), gb(g.filters);
  for (auto _ : state) {
    if constexpr (Parallel) k::omp::conv2d_backward_weights(g, in, up, gw, gb);
    else k::serial::conv2d_backward_weights(g, in, up, gw, gb);
    benchmark::DoNotOptimize(gw.data());
  }
}

template <bool Parallel>
void BM_SadtForward(benchmark::State& state) {
  const k::SadtDims d{static_cast<std::size_t>(state.range(0)), 8, 16};
  const auto x = ramp(d.locations * d.dim, 1.0);
  const auto c = ramp(d.codewords * d.dim, 0.5);
  const std::vector<double> s(d.codewords, 1.0), delta(d.locations, 1.0);
  std::vector<double> r(d.locations * d.codewords * d.dim), a(d.locations * d.codewords), e(d.codewords * d.dim);
  for (auto _ : state) {
    if constexpr (Parallel) k::omp::sadt_forward(d, x, c, s, delta, r, a, e);
    else k::serial::sadt_forward(d, x, c, s, delta, r, a, e);
    benchmark::DoNotOptimize(e.data());
  }
}

template <bool Parallel>
void BM_ResampleTrilinear(benchmark::State& state) {
  const dyntex::Dims3 src{96, 96, 20}, dst{48, 48, 20};
  const auto in = ramp_f(dyntex::dims_volume(src));
  std::vector<float> out(dyntex::dims_volume(dst));
  for (auto _ : state) {
    if constexpr (Parallel) k::omp::resample_trilinear(in, src, out, dst);
    else k::serial::resample_trilinear(in, src, out, dst);
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_FilterAxis(benchmark::State& state) {
  const dyntex::Dims3 dims{48, 48, 20};
  const auto in = ramp_f(dyntex::dims_volume(dims));
  const auto taps = ramp(17, 0.1);
  std::vector<float> out(in.size());
  const int axis = static_cast<int>(state.range(0));
  for (auto _ : state) {
    if constexpr (Parallel) k::omp::filter_axis(in, dims, axis, taps, out);
    else k::serial::filter_axis(in, dims, axis, taps, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_RenderGaussian(benchmark::State& state) {
  dyntex::Grid3<double> heat({48, 48, 20}, 0.0);
  const k::GaussianBlob blob{{24.0, 20.0, 9.0}, {1.0, 1.0, 0.25}, static_cast<double>(state.range(0))};
  for (auto _ : state) {
    if constexpr (Parallel) k::omp::render_gaussian_max(heat, blob);
    else k::serial::render_gaussian_max(heat, blob);
    benchmark::DoNotOptimize(heat.data.data());
  }
}

}  // namespace

BENCHMARK(BM_Conv2dForward<false>)->Arg(32)->Arg(64);
BENCHMARK(BM_Conv2dForward<true>)->Arg(32)->Arg(64);
BENCHMARK(BM_Conv2dBackwardWeights<false>)->Arg(32)->Arg(64);
BENCHMARK(BM_Conv2dBackwardWeights<true>)->Arg(32)->Arg(64);
BENCHMARK(BM_SadtForward<false>)->Arg(1024)->Arg(4096);
BENCHMARK(BM_SadtForward<true>)->Arg(1024)->Arg(4096);
BENCHMARK(BM_ResampleTrilinear<false>);
BENCHMARK(BM_ResampleTrilinear<true>);
BENCHMARK(BM_FilterAxis<false>)->DenseRange(0, 2);
BENCHMARK(BM_FilterAxis<true>)->DenseRange(0, 2);
BENCHMARK(BM_RenderGaussian<false>)->Arg(2)->Arg(6);
BENCHMARK(BM_RenderGaussian<true>)->Arg(2)->Arg(6);

BENCHMARK_MAIN();
