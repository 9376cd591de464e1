// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The epikick Authors

#pragma once

#include <functional>
#include <span>
#include <vector>

namespace epikick {

using ScalarFunction = std::function<double(std::span<const double>)>;

/// Central-difference gradient of `f` at `x`:
/// (f(x + eps e_i) - f(x - eps e_i)) / (2 eps) for every coordinate i.
/// Throws NumericError naming the coordinate if a probe is not finite.
std::vector<double> finite_diff_grad(const ScalarFunction& f, std::span<const double> x,
                                     double eps);

/// Relative error used by the gradient checks: |a - b| / max(|a|, |b|), or
/// zero when |a - b| is within `abs_floor`.
double relative_error(double a, double b, double abs_floor);

}  // namespace epikick
