#include <algorithm>
#include <cmath>
#include <limits>

#include "dyntex/kernels/kernels.hpp"

namespace dyntex::kernels::omp {

void conv2d_forward(const ConvGeometry& g, std::span<const double> input, std::span<const double> kernels,
                    std::span<const double> bias, std::span<double> out) {
  const long pad = static_cast<long>(g.pad());
  const long H = static_cast<long>(g.height), W = static_cast<long>(g.width);
  const std::size_t k = g.ksize;
  const long rows = static_cast<long>(g.filters * g.out_height);
#pragma omp parallel for schedule(static)
  for (long row = 0; row < rows; ++row) {
    const std::size_t f = static_cast<std::size_t>(row) / g.out_height;
    const std::size_t oy = static_cast<std::size_t>(row) % g.out_height;
    const double* kf = kernels.data() + f * g.channels * k * k;
    for (std::size_t ox = 0; ox < g.out_width; ++ox) {
      double acc = bias[f];
      for (std::size_t c = 0; c < g.channels; ++c) {
        const double* plane = input.data() + c * g.height * g.width;
        for (std::size_t dy = 0; dy < k; ++dy) {
          const long y = static_cast<long>(oy * g.stride + dy) - pad;
          if (y < 0 || y >= H) continue;
          for (std::size_t dx = 0; dx < k; ++dx) {
            const long x = static_cast<long>(ox * g.stride + dx) - pad;
            if (x < 0 || x >= W) continue;
            acc += plane[y * W + x] * kf[(c * k + dy) * k + dx];
          }
        }
      }
      out[static_cast<std::size_t>(row) * g.out_width + ox] = acc;
    }
  }
}

void conv2d_backward_input(const ConvGeometry& g, std::span<const double> kernels, std::span<const double> upstream,
                           std::span<double> grad_input) {
  const long pad = static_cast<long>(g.pad());
  const long H = static_cast<long>(g.height), W = static_cast<long>(g.width);
  const std::size_t k = g.ksize;
#pragma omp parallel for schedule(static)
  for (long cl = 0; cl < static_cast<long>(g.channels); ++cl) {
    const std::size_t c = static_cast<std::size_t>(cl);
    double* plane = grad_input.data() + c * g.height * g.width;
    std::fill(plane, plane + g.height * g.width, 0.0);
    for (std::size_t f = 0; f < g.filters; ++f) {
      const double* kfc = kernels.data() + (f * g.channels + c) * k * k;
      for (std::size_t oy = 0; oy < g.out_height; ++oy) {
        for (std::size_t ox = 0; ox < g.out_width; ++ox) {
          const double u = upstream[(f * g.out_height + oy) * g.out_width + ox];
          for (std::size_t dy = 0; dy < k; ++dy) {
            const long y = static_cast<long>(oy * g.stride + dy) - pad;
            if (y < 0 || y >= H) continue;
            for (std::size_t dx = 0; dx < k; ++dx) {
              const long x = static_cast<long>(ox * g.stride + dx) - pad;
              if (x < 0 || x >= W) continue;
              plane[y * W + x] += u * kfc[dy * k + dx];
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
  const std::size_t plane_out = g.out_height * g.out_width;
#pragma omp parallel for schedule(static)
  for (long fl = 0; fl < static_cast<long>(g.filters); ++fl) {
    const std::size_t f = static_cast<std::size_t>(fl);
    const double* up = upstream.data() + f * plane_out;
    double gb = 0.0;
    for (std::size_t o = 0; o < plane_out; ++o) gb += up[o];
    grad_bias[f] = gb;
    for (std::size_t c = 0; c < g.channels; ++c) {
      const double* plane = input.data() + c * g.height * g.width;
      for (std::size_t dy = 0; dy < k; ++dy) {
        for (std::size_t dx = 0; dx < k; ++dx) {
          double acc = 0.0;
          for (std::size_t oy = 0; oy < g.out_height; ++oy) {
            const long y = static_cast<long>(oy * g.stride + dy) - pad;
            if (y < 0 || y >= H) continue;
            for (std::size_t ox = 0; ox < g.out_width; ++ox) {
              const long x = static_cast<long>(ox * g.stride + dx) - pad;
              if (x < 0 || x >= W) continue;
              acc += up[oy * g.out_width + ox] * plane[y * W + x];
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
#pragma omp parallel for schedule(static)
  for (long il = 0; il < static_cast<long>(M); ++il) {
    const std::size_t i = static_cast<std::size_t>(il);
    double* a = assignments.data() + i * K;
    double zmax = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < K; ++k) {
      double* r = residuals.data() + (i * K + k) * D;
      double dist2 = 0.0;
      for (std::size_t j = 0; j < D; ++j) {
        r[j] = descriptors[i * D + j] - codewords[k * D + j];
        dist2 += r[j] * r[j];
      }
      a[k] = -smoothing[k] * dist2;
      zmax = std::max(zmax, a[k]);
    }
    double total = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      a[k] = std::exp(a[k] - zmax);
      total += a[k];
    }
    for (std::size_t k = 0; k < K; ++k) a[k] /= total;
  }
#pragma omp parallel for schedule(static)
  for (long kl = 0; kl < static_cast<long>(K); ++kl) {
    const std::size_t k = static_cast<std::size_t>(kl);
    double* e = aggregated.data() + k * D;
    std::fill(e, e + D, 0.0);
    for (std::size_t i = 0; i < M; ++i) {
      if (delta[i] == 0.0) continue;
      const double w = assignments[i * K + k] * delta[i];
      const double* r = residuals.data() + (i * K + k) * D;
      for (std::size_t j = 0; j < D; ++j) e[j] += w * r[j];
    }
  }
}

void resample_trilinear(std::span<const float> src, const Dims3& sd, std::span<float> dst, const Dims3& dd) {
  const long slices = static_cast<long>(dd[2]);
#pragma omp parallel for schedule(static)
  for (long zl = 0; zl < slices; ++zl) {
    const std::size_t z = static_cast<std::size_t>(zl);
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
  const long slices = static_cast<long>(dims[2]);
#pragma omp parallel for schedule(static)
  for (long zl = 0; zl < slices; ++zl) {
    const std::size_t z = static_cast<std::size_t>(zl);
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
  const long slices = static_cast<long>(heat.dims[2]);
#pragma omp parallel for schedule(static)
  for (long zl = 0; zl < slices; ++zl) {
    const std::size_t z = static_cast<std::size_t>(zl);
    const double uz = (static_cast<double>(z) - b.center[2]) / b.gamma[2];
    for (std::size_t y = 0; y < heat.dims[1]; ++y) {
      const double uy = (static_cast<double>(y) - b.center[1]) / b.gamma[1];
      for (std::size_t x = 0; x < heat.dims[0]; ++x) {
        const double ux = (static_cast<double>(x) - b.center[0]) / b.gamma[0];
        const double v = std::exp(-(ux * ux + uy * uy + uz * uz) / denom);
        double& h = heat(x, y, z);
        if (v > h) h = v;
      }
    }
  }
}

}  // namespace dyntex::kernels::omp
