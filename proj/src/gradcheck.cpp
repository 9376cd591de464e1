// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The epikick Authors

#include "epikick/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "epikick/error.hpp"

namespace epikick {

std::vector<double> finite_diff_grad(const ScalarFunction& f, std::span<const double> x,
                                     double eps) {
  if (!(eps > 0.0)) throw UsageError("finite_diff_grad: eps must be positive");
  std::vector<double> probe(x.begin(), x.end());
  std::vector<double> grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = probe[i];
    probe[i] = saved + eps;
    const double plus = f(probe);
    probe[i] = saved - eps;
    const double minus = f(probe);
    probe[i] = saved;
    if (!std::isfinite(plus) || !std::isfinite(minus)) {
      throw NumericError("finite_diff_grad: non-finite function value at index " +
                         std::to_string(i));
    }
    grad[i] = (plus - minus) / (2.0 * eps);
  }
  return grad;
}

double relative_error(double a, double b, double abs_floor) {
  const double diff = std::abs(a - b);
  if (diff <= abs_floor) return 0.0;
  return diff / std::max(std::abs(a), std::abs(b));
}

}  // namespace epikick
