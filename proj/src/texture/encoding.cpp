#include "dyntex/texture/encoding.hpp"

#include <cmath>
#include <stdexcept>

#include "../kernels/dispatch.hpp"

namespace dyntex::texture {
namespace {

void check_inputs(const DescriptorField& field, const Codebook& book) {
  if (field.descriptors.rank() != 2 || book.codewords.rank() != 2 || book.smoothing.rank() != 1) {
    throw std::invalid_argument("sadt: expected descriptors [M,Dd], codewords [K,Dd], smoothing [K]");
  }
  if (field.descriptors.extent(1) != book.dim()) {
    throw std::invalid_argument("sadt: descriptor dim mismatch " + shape_string(field.descriptors.shape()) + " vs " +
                                shape_string(book.codewords.shape()));
  }
  if (book.smoothing.extent(0) != book.size()) {
    throw std::invalid_argument("sadt: smoothing " + shape_string(book.smoothing.shape()) + " vs codewords " +
                                shape_string(book.codewords.shape()));
  }
  for (double v : field.descriptors.storage()) {
    if (!std::isfinite(v)) throw std::invalid_argument("sadt: non-finite descriptor value");
  }
}

void check_mask(const AggregationMask& mask, std::size_t M) {
  if (mask.delta.rank() != 1 || mask.delta.extent(0) != M) {
    throw std::invalid_argument("sadt: mask " + shape_string(mask.delta.shape()) + " vs " + std::to_string(M) +
                                " descriptors");
  }
  for (double v : mask.delta.storage()) {
    if (v != 0.0 && v != 1.0) throw std::invalid_argument("sadt: mask must be binary");
  }
}

}  // namespace

Codebook init_codebook(std::size_t K, std::size_t dim, double sigma_hat, Rng& rng) {
  Codebook book{Tensor64({K, dim}), Tensor64({K}, 1.0)};
  for (auto& v : book.codewords.storage()) v = rng.uniform(-sigma_hat, sigma_hat);
  return book;
}

DescriptorField field_from_feature_map(const Tensor64& fmap) {
  if (fmap.rank() != 3) throw std::invalid_argument("field_from_feature_map: expected [Dd,h,w], got " + shape_string(fmap.shape()));
  const std::size_t D = fmap.extent(0), h = fmap.extent(1), w = fmap.extent(2);
  DescriptorField field{Tensor64({h * w, D}), {h, w}};
  for (std::size_t d = 0; d < D; ++d)
    for (std::size_t i = 0; i < h * w; ++i) field.descriptors[i * D + d] = fmap[d * h * w + i];
  return field;
}

Tensor64 feature_map_from_field(const Tensor64& descriptors, const std::array<std::size_t, 2>& grid) {
  const std::size_t M = descriptors.extent(0), D = descriptors.extent(1);
  if (M != grid[0] * grid[1]) throw std::invalid_argument("feature_map_from_field: grid does not match M");
  Tensor64 fmap({D, grid[0], grid[1]});
  for (std::size_t d = 0; d < D; ++d)
    for (std::size_t i = 0; i < M; ++i) fmap[d * M + i] = descriptors[i * D + d];
  return fmap;
}

EncodingIntermediates soft_assign(const DescriptorField& field, const Codebook& book) {
  check_inputs(field, book);
  const kernels::SadtDims d{field.count(), book.size(), book.dim()};
  EncodingIntermediates inter{Tensor64({d.locations, d.codewords, d.dim}), Tensor64({d.locations, d.codewords})};
  // Aggregation over an empty mask is skipped entirely by the kernel.
  Tensor64 none({d.locations}, 0.0);
  Tensor64 scratch({d.codewords, d.dim});
  kernels::active::sadt_forward(d, field.descriptors.values(), book.codewords.values(), book.smoothing.values(),
                                none.values(), inter.residuals.values(), inter.assignments.values(),
                                scratch.values());
  return inter;
}

Encoding encode_forward(const DescriptorField& field, const Codebook& book, const AggregationMask& mask) {
  check_inputs(field, book);
  check_mask(mask, field.count());
  const kernels::SadtDims d{field.count(), book.size(), book.dim()};
  Encoding enc;
  enc.intermediates = {Tensor64({d.locations, d.codewords, d.dim}), Tensor64({d.locations, d.codewords})};
  enc.per_codeword = Tensor64({d.codewords, d.dim});
  kernels::active::sadt_forward(d, field.descriptors.values(), book.codewords.values(), book.smoothing.values(),
                                mask.delta.values(), enc.intermediates.residuals.values(),
                                enc.intermediates.assignments.values(), enc.per_codeword.values());
  double sq = 0.0;
  for (double v : enc.per_codeword.storage()) sq += v * v;
  enc.norm = std::sqrt(sq);
  enc.flattened_normalized = Tensor64({d.codewords * d.dim}, 0.0);
  if (enc.norm >= kNormEpsilon) {
    for (std::size_t j = 0; j < enc.per_codeword.size(); ++j) enc.flattened_normalized[j] = enc.per_codeword[j] / enc.norm;
  }
  return enc;
}

EncodingGradients encode_backward(const DescriptorField& field, const Codebook& book, const AggregationMask& mask,
                                  const Encoding& enc, const Tensor64& upstream) {
  check_inputs(field, book);
  check_mask(mask, field.count());
  const std::size_t M = field.count(), K = book.size(), D = book.dim();
  if (enc.intermediates.residuals.shape() != Shape{M, K, D} || enc.intermediates.assignments.shape() != Shape{M, K}) {
    throw std::invalid_argument("encode_backward: missing or mismatched forward intermediates");
  }
  require_same_shape(upstream.shape(), Shape{K * D}, "encode_backward upstream");

  EncodingGradients g{Tensor64({M, D}, 0.0), Tensor64({K, D}, 0.0), Tensor64({K}, 0.0)};
  if (enc.norm < kNormEpsilon) return g;

  // Through the l2 normalisation: dL/dv = (u - y (y.u)) / ||v||.
  const auto& y = enc.flattened_normalized;
  double yu = 0.0;
  for (std::size_t j = 0; j < K * D; ++j) yu += y[j] * upstream[j];
  Tensor64 dE({K, D});
  for (std::size_t j = 0; j < K * D; ++j) dE[j] = (upstream[j] - y[j] * yu) / enc.norm;

  const auto& r = enc.intermediates.residuals;
  const auto& a = enc.intermediates.assignments;
  std::vector<double> dA(K), dZ(K);
  for (std::size_t i = 0; i < M; ++i) {
    const double delta = mask.delta[i];
    if (delta == 0.0) continue;
    double weighted = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      double dot = 0.0;
      for (std::size_t j = 0; j < D; ++j) dot += r[(i * K + k) * D + j] * dE[k * D + j];
      dA[k] = delta * dot;
      weighted += a[i * K + k] * dA[k];
    }
    for (std::size_t k = 0; k < K; ++k) dZ[k] = a[i * K + k] * (dA[k] - weighted);
    for (std::size_t k = 0; k < K; ++k) {
      const double s = book.smoothing[k];
      double dist2 = 0.0;
      for (std::size_t j = 0; j < D; ++j) {
        const double rij = r[(i * K + k) * D + j];
        dist2 += rij * rij;
        const double dr = delta * a[i * K + k] * dE[k * D + j] - 2.0 * s * dZ[k] * rij;
        g.descriptors[i * D + j] += dr;
        g.codewords[k * D + j] -= dr;
      }
      g.smoothing[k] -= dZ[k] * dist2;
    }
  }
  return g;
}

}  // namespace dyntex::texture
