#include "dyntex/numerics/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dyntex {

GradCheckReport gradcheck(const ScalarFunction& fn, const Tensor64& params, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("gradcheck: step h must be positive");
  const double f0 = fn.value(params);
  if (!std::isfinite(f0)) throw std::invalid_argument("gradcheck: non-finite forward value");
  const Tensor64 analytic = fn.gradient(params);
  require_same_shape(analytic.shape(), params.shape(), "gradcheck gradient");

  GradCheckReport report;
  report.num_params = params.size();
  Tensor64 probe = params;
  for (std::size_t i = 0; i < params.size(); ++i) {
    probe[i] = params[i] + h;
    const double fp = fn.value(probe);
    probe[i] = params[i] - h;
    const double fm = fn.value(probe);
    probe[i] = params[i];
    if (!std::isfinite(fp) || !std::isfinite(fm)) throw std::invalid_argument("gradcheck: non-finite forward value");
    const double numeric = (fp - fm) / (2.0 * h);
    const double abs_err = std::abs(numeric - analytic[i]);
    const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), 1e-8});
    report.max_abs_error = std::max(report.max_abs_error, abs_err);
    report.max_rel_error = std::max(report.max_rel_error, abs_err / denom);
  }
  return report;
}

Tensor64 pack(std::span<const Tensor64* const> parts) {
  std::vector<double> flat;
  for (const auto* p : parts) flat.insert(flat.end(), p->storage().begin(), p->storage().end());
  const std::size_t n = flat.size();
  return Tensor64({n}, std::move(flat));
}

std::vector<Tensor64> unpack(const Tensor64& flat, std::span<const Tensor64* const> like) {
  std::vector<Tensor64> out;
  std::size_t off = 0;
  for (const auto* p : like) {
    if (off + p->size() > flat.size()) throw std::invalid_argument("unpack: flat vector too short");
    std::vector<double> v(flat.storage().begin() + static_cast<long>(off),
                          flat.storage().begin() + static_cast<long>(off + p->size()));
    out.emplace_back(p->shape(), std::move(v));
    off += p->size();
  }
  if (off != flat.size()) throw std::invalid_argument("unpack: flat vector too long");
  return out;
}

}  // namespace dyntex
