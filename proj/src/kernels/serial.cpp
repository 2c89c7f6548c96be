#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "dyntex/kernels/kernels.hpp"

namespace dyntex::kernels {

ConvGeometry conv_geometry(std::size_t channels, std::size_t height, std::size_t width, std::size_t filters,
                           std::size_t ksize, std::size_t stride) {
  if (ksize % 2 == 0) throw std::invalid_argument("conv2d: kernel size must be odd, got " + std::to_string(ksize));
  if (stride == 0) throw std::invalid_argument("conv2d: stride must be >= 1");
  if (height < ksize || width < ksize) {
    throw std::invalid_argument("conv2d: input " + std::to_string(height) + "x" + std::to_string(width) +
                                " smaller than kernel " + std::to_string(ksize));
  }
  ConvGeometry g;
  g.channels = channels;
  g.height = height;
  g.width = width;
  g.filters = filters;
  g.ksize = ksize;
  g.stride = stride;
  g.out_height = (height + stride - 1) / stride;
  g.out_width = (width + stride - 1) / stride;
  return g;
}

namespace serial {

void conv2d_forward(const ConvGeometry& g, std::span<const double> input, std::span<const double> kernels,
                    std::span<const double> bias, std::span<double> out) {
  const long pad = static_cast<long>(g.pad());
  const long H = static_cast<long>(g.height), W = static_cast<long>(g.width);
  const std::size_t k = g.ksize;
  for (std::size_t f = 0; f < g.filters; ++f) {
    for (std::size_t oy = 0; oy < g.out_height; ++oy) {
      for (std::size_t ox = 0; ox < g.out_width; ++ox) {
        double acc = bias[f];
        for (std::size_t c = 0; c < g.channels; ++c) {
          for (std::size_t dy = 0; dy < k; ++dy) {
            const long y = static_cast<long>(oy * g.stride + dy) - pad;
            if (y < 0 || y >= H) continue;
            for (std::size_t dx = 0; dx < k; ++dx) {
              const long x = static_cast<long>(ox * g.stride + dx) - pad;
              if (x < 0 || x >= W) continue;
              acc += input[(c * g.height + y) * g.width + x] * kernels[((f * g.channels + c) * k + dy) * k + dx];
            }
          }
        }
        out[(f * g.out_height + oy) * g.out_width + ox] = acc;
      }
    }
  }
}

void conv2d_backward_input(const ConvGeometry& g, std::span<const double> kernels, std::span<const double> upstream,
                           std::span<double> grad_input) {
  const long pad = static_cast<long>(g.pad());
  const long H = static_cast<long>(g.height), W = static_cast<long>(g.width);
  const std::size_t k = g.ksize;
  std::fill(grad_input.begin(), grad_input.end(), 0.0);
  for (std::size_t c = 0; c < g.channels; ++c) {
    for (std::size_t f = 0; f < g.filters; ++f) {
      for (std::size_t oy = 0; oy < g.out_height; ++oy) {
        for (std::size_t ox = 0; ox < g.out_width; ++ox) {
          const double u = upstream[(f * g.out_height + oy) * g.out_width + ox];
          for (std::size_t dy = 0; dy < k; ++dy) {
            const long y = static_cast<long>(oy * g.stride + dy) - pad;
            if (y < 0 || y >= H) continue;
            for (std::size_t dx = 0; dx < k; ++dx) {
              const long x = static_cast<long>(ox * g.stride + dx) - pad;
              if (x < 0 || x >= W) continue;
              grad_input[(c * g.height + y) * g.width + x] += u * kernels[((f * g.channels + c) * k + dy) * k + dx];
            }
          }
        }
      }
    }
  }
}

void conv2d_backward_weights(const ConvGeometry& g, std::span<const double> input, std::span<const double> upstream,
                             std::span<double> grad_kernels, std::span<double> grad_bias) {
  const long pad = static_cast<long>(g.pad());
  const long H = static_cast<long>(g.height), W = static_cast<long>(g.width);
  const std::size_t k = g.ksize;
  for (std::size_t f = 0; f < g.filters; ++f) {
    double gb = 0.0;
    for (std::size_t o = 0; o < g.out_height * g.out_width; ++o) gb += upstream[f * g.out_height * g.out_width + o];
    grad_bias[f] = gb;
    for (std::size_t c = 0; c < g.channels; ++c) {
      for (std::size_t dy = 0; dy < k; ++dy) {
        for (std::size_t dx = 0; dx < k; ++dx) {
          double acc = 0.0;
          for (std::size_t oy = 0; oy < g.out_height; ++oy) {
            const long y = static_cast<long>(oy * g.stride + dy) - pad;
            if (y < 0 || y >= H) continue;
            for (std::size_t ox = 0; ox < g.out_width; ++ox) {
              const long x = static_cast<long>(ox * g.stride + dx) - pad;
              if (x < 0 || x >= W) continue;
              acc += upstream[(f * g.out_height + oy) * g.out_width + ox] * input[(c * g.height + y) * g.width + x];
            }
          }
          grad_kernels[((f * g.channels + c) * k + dy) * k + dx] = acc;
        }
      }
    }
  }
}

void sadt_forward(const SadtDims& d, std::span<const double> descriptors, std::span<const double> codewords,
                  std::span<const double> smoothing, std::span<const double> delta, std::span<double> residuals,
                  std::span<double> assignments, std::span<double> aggregated) {
  const std::size_t M = d.locations, K = d.codewords, D = d.dim;
  for (std::size_t i = 0; i < M; ++i) {
    double zmax = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < K; ++k) {
      double dist2 = 0.0;
      for (std::size_t j = 0; j < D; ++j) {
        const double r = descriptors[i * D + j] - codewords[k * D + j];
        residuals[(i * K + k) * D + j] = r;
        dist2 += r * r;
      }
      const double z = -smoothing[k] * dist2;
      assignments[i * K + k] = z;
      zmax = std::max(zmax, z);
    }
    double total = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      const double e = std::exp(assignments[i * K + k] - zmax);
      assignments[i * K + k] = e;
      total += e;
    }
    for (std::size_t k = 0; k < K; ++k) assignments[i * K + k] /= total;
  }
  std::fill(aggregated.begin(), aggregated.end(), 0.0);
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t i = 0; i < M; ++i) {
      if (delta[i] == 0.0) continue;
      const double w = assignments[i * K + k] * delta[i];
      for (std::size_t j = 0; j < D; ++j) aggregated[k * D + j] += w * residuals[(i * K + k) * D + j];
    }
  }
}

void resample_trilinear(std::span<const float> src, const Dims3& sd, std::span<float> dst, const Dims3& dd) {
  for (std::size_t z = 0; z < dd[2]; ++z) {
    for (std::size_t y = 0; y < dd[1]; ++y) {
      for (std::size_t x = 0; x < dd[0]; ++x) {
        const std::size_t out[3] = {x, y, z};
        std::size_t i0[3];
        double t[3];
        for (int a = 0; a < 3; ++a) {
          const double s = static_cast<double>(out[a]) * static_cast<double>(sd[a] - 1) / static_cast<double>(dd[a] - 1);
          std::size_t lo = static_cast<std::size_t>(std::floor(s));
          if (lo >= sd[a] - 1) lo = sd[a] - 2;
          i0[a] = lo;
          t[a] = s - static_cast<double>(lo);
        }
        double acc = 0.0;
        for (int c = 0; c < 8; ++c) {
          const std::size_t ix = i0[0] + (c & 1), iy = i0[1] + ((c >> 1) & 1), iz = i0[2] + ((c >> 2) & 1);
          const double w = ((c & 1) ? t[0] : 1.0 - t[0]) * (((c >> 1) & 1) ? t[1] : 1.0 - t[1]) *
                           (((c >> 2) & 1) ? t[2] : 1.0 - t[2]);
          acc += w * static_cast<double>(src[(iz * sd[1] + iy) * sd[0] + ix]);
        }
        dst[(z * dd[1] + y) * dd[0] + x] = static_cast<float>(acc);
      }
    }
  }
}

void filter_axis(std::span<const float> in, const Dims3& dims, int axis, std::span<const double> taps,
                 std::span<float> out) {
  const long r = static_cast<long>(taps.size() / 2);
  const long n = static_cast<long>(dims[axis]);
  const std::size_t stride = axis == 0 ? 1 : axis == 1 ? dims[0] : dims[0] * dims[1];
  for (std::size_t z = 0; z < dims[2]; ++z) {
    for (std::size_t y = 0; y < dims[1]; ++y) {
      for (std::size_t x = 0; x < dims[0]; ++x) {
        const std::size_t pos[3] = {x, y, z};
        const std::size_t here = (z * dims[1] + y) * dims[0] + x;
        const std::size_t base = here - pos[axis] * stride;
        double acc = 0.0;
        for (long t = -r; t <= r; ++t) {
          const long q = std::clamp(static_cast<long>(pos[axis]) + t, 0L, n - 1);
          acc += taps[t + r] * static_cast<double>(in[base + static_cast<std::size_t>(q) * stride]);
        }
        out[here] = static_cast<float>(acc);
      }
    }
  }
}

void render_gaussian_max(Grid3<double>& heat, const GaussianBlob& b) {
  const double denom = 2.0 * b.sigma * b.sigma;
  for (std::size_t z = 0; z < heat.dims[2]; ++z) {
    for (std::size_t y = 0; y < heat.dims[1]; ++y) {
      for (std::size_t x = 0; x < heat.dims[0]; ++x) {
        const double ux = (static_cast<double>(x) - b.center[0]) / b.gamma[0];
        const double uy = (static_cast<double>(y) - b.center[1]) / b.gamma[1];
        const double uz = (static_cast<double>(z) - b.center[2]) / b.gamma[2];
        const double v = std::exp(-(ux * ux + uy * uy + uz * uz) / denom);
        double& h = heat(x, y, z);
        if (v > h) h = v;
      }
    }
  }
}

}  // namespace serial
}  // namespace dyntex::kernels
