// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The epikick Authors

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "epikick/gradcheck.hpp"
#include "epikick/model.hpp"
#include "epikick/rng.hpp"

namespace epikick::testing {

struct GradCheckReport {
  std::size_t checked = 0;
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  std::string worst;  // "tensor[index]" of the largest error
};

/// Random model (biases included), window and demographics for `seed`.
struct GradFixture {
  ModelParams params;
  Matrix inputs;
  std::vector<double> demo;
};

inline GradFixture make_grad_fixture(const ModelConfig& config, std::uint64_t seed) {
  Rng rng(seed);
  GradFixture fx{init_params(config, rng), Matrix(config.window_len, config.input_dim), {}};
  for_each_tensor(fx.params, [&](const std::string& name, Matrix& m) {
    const bool bias = name.ends_with("_b") || name.find(".b_") != std::string::npos;
    if (bias) {
      for (double& v : m.values()) v = rng.uniform(-0.5, 0.5);
    }
  });
  for (double& v : fx.inputs.values()) v = rng.uniform(0.0, 1.0);
  for (std::size_t j = 0; j < config.demo_dim; ++j) fx.demo.push_back(rng.normal());
  return fx;
}

/// Compares backward() with central differences of the prediction for every
/// parameter entry and every demographic input. `analytic_scale` perturbs the
/// analytic side so callers can confirm the check detects a wrong gradient.
inline GradCheckReport check_gradients(const ModelConfig& config, std::uint64_t seed,
                                       double abs_floor = 1e-7, double eps = 1e-5,
                                       double analytic_scale = 1.0) {
  const GradFixture fx = make_grad_fixture(config, seed);
  ForwardCache cache;
  forward(fx.inputs, fx.demo, fx.params, cache);
  const GradientSet analytic = backward(fx.params, cache, analytic_scale);

  std::vector<double> flat;
  std::vector<double> expected;
  std::vector<std::string> labels;
  for_each_tensor_pair(fx.params, analytic.tensors,
                       [&](const std::string& name, const Matrix& p, const Matrix& g) {
                         for (std::size_t k = 0; k < p.size(); ++k) {
                           flat.push_back(p.values()[k]);
                           expected.push_back(g.values()[k]);
                           labels.push_back(name + "[" + std::to_string(k) + "]");
                         }
                       });
  const std::size_t n_params = flat.size();
  for (std::size_t j = 0; j < fx.demo.size(); ++j) {
    flat.push_back(fx.demo[j]);
    expected.push_back(analytic.demo[j]);
    labels.push_back("demo[" + std::to_string(j) + "]");
  }

  ModelParams probe = fx.params;
  std::vector<double> demo = fx.demo;
  const auto f = [&](std::span<const double> x) {
    std::size_t k = 0;
    for_each_tensor(probe, [&](const std::string&, Matrix& m) {
      for (double& v : m.values()) v = x[k++];
    });
    for (std::size_t j = 0; j < demo.size(); ++j) demo[j] = x[n_params + j];
    return predict(fx.inputs, demo, probe);
  };
  const auto numeric = finite_diff_grad(f, flat, eps);

  GradCheckReport report;
  for (std::size_t k = 0; k < flat.size(); ++k) {
    const double err = relative_error(expected[k], numeric[k], abs_floor);
    ++report.checked;
    report.max_abs_error = std::max(report.max_abs_error, std::abs(expected[k] - numeric[k]));
    if (err > report.max_rel_error) {
      report.max_rel_error = err;
      report.worst = labels[k];
    }
  }
  return report;
}

}  // namespace epikick::testing
