#pragma once

// Data-parallel inner loops. Every kernel exists twice: `serial` is the
// reference, `omp` parallelises over disjoint outputs with identical
// per-element summation order, so both produce bit-identical results.

#include <cstddef>
#include <span>

#include "dyntex/numerics/grid.hpp"

namespace dyntex::kernels {

struct ConvGeometry {
  std::size_t channels = 0, height = 0, width = 0;
  std::size_t filters = 0, ksize = 0, stride = 1;
  std::size_t out_height = 0, out_width = 0;
  std::size_t pad() const { return (ksize - 1) / 2; }
};

/// Validates and fills the output extents (ceil(H/stride), ceil(W/stride)).
ConvGeometry conv_geometry(std::size_t channels, std::size_t height, std::size_t width, std::size_t filters,
                           std::size_t ksize, std::size_t stride);

struct SadtDims {
  std::size_t locations = 0;  // M
  std::size_t codewords = 0;  // K
  std::size_t dim = 0;        // Dd
};

struct GaussianBlob {
  Vec3 center{};  // cell coordinates
  Vec3 gamma{1.0, 1.0, 1.0};
  double sigma = 1.0;
};

#define DYNTEX_KERNEL_DECLS                                                                                  \
  void conv2d_forward(const ConvGeometry& g, std::span<const double> input, std::span<const double> kernels, \
                      std::span<const double> bias, std::span<double> out);                                 \
  void conv2d_backward_input(const ConvGeometry& g, std::span<const double> kernels,                        \
                             std::span<const double> upstream, std::span<double> grad_input);               \
  void conv2d_backward_weights(const ConvGeometry& g, std::span<const double> input,                        \
                               std::span<const double> upstream, std::span<double> grad_kernels,            \
                               std::span<double> grad_bias);                                                \
  void sadt_forward(const SadtDims& d, std::span<const double> descriptors, std::span<const double> codewords, \
                    std::span<const double> smoothing, std::span<const double> delta,                       \
                    std::span<double> residuals, std::span<double> assignments, std::span<double> aggregated); \
  void resample_trilinear(std::span<const float> src, const Dims3& src_dims, std::span<float> dst,           \
                          const Dims3& dst_dims);                                                           \
  void filter_axis(std::span<const float> in, const Dims3& dims, int axis, std::span<const double> taps,     \
                   std::span<float> out);                                                                   \
  void render_gaussian_max(Grid3<double>& heat, const GaussianBlob& blob);

namespace serial {
DYNTEX_KERNEL_DECLS
}
namespace omp {
DYNTEX_KERNEL_DECLS
}

#undef DYNTEX_KERNEL_DECLS

}  // namespace dyntex::kernels
