// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The epikick Authors

#pragma once

#include <cstddef>
#include <span>
#include <type_traits>
#include <string>
#include <vector>

#include "epikick/matrix.hpp"
#include "epikick/rng.hpp"

namespace epikick {

struct ModelConfig {
  std::size_t input_dim = 4;
  std::size_t hidden_dim = 100;
  std::size_t num_layers = 3;
  std::size_t demo_dim = 21;
  std::size_t window_len = 5;

  /// Throws UsageError if any dimension is zero.
  void validate() const;
  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// Gate weights of one GRU layer. W_* act on the layer input, U_* on the
/// previous hidden state; biases are hidden_dim x 1.
struct GruLayer {
  Matrix W_z, W_r, W_n;
  Matrix U_z, U_r, U_n;
  Matrix b_z, b_r, b_n;
};

/// Complete learnable state: demographic embedding, stacked GRU, dense head.
struct ModelParams {
  ModelConfig config;
  Matrix embed_W;  // hidden x demo
  Matrix embed_b;  // hidden x 1
  std::vector<GruLayer> layers;
  Matrix out_W;  // 1 x hidden
  Matrix out_b;  // 1 x 1

  /// Zero-filled tensors with the shapes implied by `config`.
  static ModelParams zeros(const ModelConfig& config);
  std::size_t parameter_count() const;
};

std::size_t parameter_count(const ModelConfig& config);

/// Visits every tensor in a fixed order with a stable name such as
/// "embed_W", "layer1.U_n" or "out_b".
template <class Params, class F>
void for_each_tensor(Params& p, F&& f) {
  f(std::string("embed_W"), p.embed_W);
  f(std::string("embed_b"), p.embed_b);
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    const std::string prefix = "layer" + std::to_string(l + 1) + ".";
    auto& g = p.layers[l];
    f(prefix + "W_z", g.W_z);
    f(prefix + "W_r", g.W_r);
    f(prefix + "W_n", g.W_n);
    f(prefix + "U_z", g.U_z);
    f(prefix + "U_r", g.U_r);
    f(prefix + "U_n", g.U_n);
    f(prefix + "b_z", g.b_z);
    f(prefix + "b_r", g.b_r);
    f(prefix + "b_n", g.b_n);
  }
  f(std::string("out_W"), p.out_W);
  f(std::string("out_b"), p.out_b);
}

/// Pairwise visit over two congruent parameter sets (params + gradients,
/// params + optimizer moments).
template <class A, class B, class F>
void for_each_tensor_pair(A& a, B& b, F&& f) {
  using RightMatrix = std::remove_reference_t<decltype((b.embed_W))>;
  std::vector<RightMatrix*> right;
  for_each_tensor(b, [&](const std::string&, RightMatrix& m) { right.push_back(&m); });
  std::size_t k = 0;
  for_each_tensor(a, [&](const std::string& name, auto& m) { f(name, m, *right.at(k++)); });
}

/// Gradients of one scalar objective with respect to every parameter
/// tensor, plus the standardized demographic input.
struct GradientSet {
  ModelParams tensors;
  std::vector<double> demo;

  static GradientSet zeros(const ModelConfig& config);
  void clear();
  double squared_norm() const;
  void scale(double factor);
};

/// Glorot-uniform weights, zero biases.
ModelParams init_params(const ModelConfig& config, Rng& rng);

/// h0 = sigmoid(embed_W demo + embed_b).
std::vector<double> embed(std::span<const double> demo, const ModelParams& params);

/// One GRU step with the convention
///   z = sig(W_z x + U_z h + b_z),  r = sig(W_r x + U_r h + b_r),
///   n = tanh(W_n x + U_n (r * h) + b_n),  h' = (1 - z) * n + z * h.
std::vector<double> gru_cell(std::span<const double> x, std::span<const double> h_prev,
                             const GruLayer& layer);

/// Activations retained by forward() for the backward pass.
struct ForwardCache {
  struct Step {
    std::vector<double> x, h_prev, z, r, n, h;
  };

  const ModelParams* params = nullptr;
  std::vector<double> demo;
  std::vector<double> h0;
  std::vector<std::vector<Step>> layers;  // [layer][timestep]
  double prediction = 0.0;
};

/// Runs the embedding, every GRU layer from the shared h0, and the head on
/// the top layer's last hidden state. `inputs` is L x input_dim.
double forward(const Matrix& inputs, std::span<const double> demo, const ModelParams& params,
               ForwardCache& cache);
/// Forward without keeping activations.
double predict(const Matrix& inputs, std::span<const double> demo, const ModelParams& params);

/// Accumulates d(prediction)/d(theta) * d_prediction into `grads`. The cache
/// must come from forward() with these exact params.
void backward(const ModelParams& params, const ForwardCache& cache, double d_prediction,
              GradientSet& grads);
GradientSet backward(const ModelParams& params, const ForwardCache& cache, double d_prediction);

}  // namespace epikick
