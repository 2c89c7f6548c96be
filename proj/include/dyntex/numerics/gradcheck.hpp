#pragma once

#include <functional>
#include <span>
#include <vector>

#include "dyntex/numerics/tensor.hpp"

namespace dyntex {

struct GradCheckReport {
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  std::size_t num_params = 0;
};

/// Scalar function of a flat parameter tensor together with its claimed gradient.
struct ScalarFunction {
  std::function<double(const Tensor64&)> value;
  std::function<Tensor64(const Tensor64&)> gradient;
};

/// Central differences (f(x+h e_i) - f(x-h e_i)) / 2h against the analytic
/// gradient; relative error uses max(|a|, |n|, 1e-8) as denominator.
GradCheckReport gradcheck(const ScalarFunction& fn, const Tensor64& params, double h);

/// Concatenates tensors into one flat vector and back, for checking several
/// parameter groups through one closure.
Tensor64 pack(std::span<const Tensor64* const> parts);
std::vector<Tensor64> unpack(const Tensor64& flat, std::span<const Tensor64* const> like);

}  // namespace dyntex
