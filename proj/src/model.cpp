// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The epikick Authors

#include "epikick/model.hpp"

#include <algorithm>
#include <cmath>

#include "epikick/error.hpp"

namespace epikick {

namespace {

std::size_t layer_input_dim(const ModelConfig& c, std::size_t layer) {
  return layer == 0 ? c.input_dim : c.hidden_dim;
}

void glorot(Matrix& m, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(m.cols() + m.rows()));
  for (double& w : m.values()) w = rng.uniform(-bound, bound);
}

void check_layer_dims(std::span<const double> x, std::span<const double> h,
                      const GruLayer& layer) {
  if (x.size() != layer.W_z.cols() || h.size() != layer.U_z.cols()) {
    throw ShapeError("gru_cell: got input " + std::to_string(x.size()) + ", hidden " +
                     std::to_string(h.size()) + " for layer with W " + layer.W_z.shape_string() +
                     ", U " + layer.U_z.shape_string());
  }
}

/// Affine gate pre-activation W x + U h + b into `out`.
void gate_preact(const Matrix& W, const Matrix& U, const Matrix& b, std::span<const double> x,
                 std::span<const double> h, std::vector<double>& out) {
  out.assign(b.values().begin(), b.values().end());
  gemv_acc(W, x, out);
  gemv_acc(U, h, out);
}

void cell_forward(std::span<const double> x, std::span<const double> h_prev,
                  const GruLayer& layer, ForwardCache::Step& step) {
  const std::size_t H = h_prev.size();
  gate_preact(layer.W_z, layer.U_z, layer.b_z, x, h_prev, step.z);
  gate_preact(layer.W_r, layer.U_r, layer.b_r, x, h_prev, step.r);
  for (std::size_t k = 0; k < H; ++k) {
    step.z[k] = sigmoid(step.z[k]);
    step.r[k] = sigmoid(step.r[k]);
  }
  std::vector<double> gated(H);
  for (std::size_t k = 0; k < H; ++k) gated[k] = step.r[k] * h_prev[k];
  step.n.assign(layer.b_n.values().begin(), layer.b_n.values().end());
  gemv_acc(layer.W_n, x, step.n);
  gemv_acc(layer.U_n, gated, step.n);
  step.h.resize(H);
  for (std::size_t k = 0; k < H; ++k) {
    step.n[k] = std::tanh(step.n[k]);
    step.h[k] = (1.0 - step.z[k]) * step.n[k] + step.z[k] * h_prev[k];
  }
}

/// Backpropagates dh through one cached step. Accumulates parameter
/// gradients into `g`, the input gradient into `dx` and writes the gradient
/// with respect to h_prev into `dh_prev`.
void cell_backward(const ForwardCache::Step& step, const GruLayer& layer,
                   std::span<const double> dh, GruLayer& g, std::span<double> dx,
                   std::vector<double>& dh_prev) {
  const std::size_t H = dh.size();
  std::vector<double> da_n(H), da_r(H), da_z(H), gated(H), d_gated(H, 0.0);
  dh_prev.assign(H, 0.0);

  for (std::size_t k = 0; k < H; ++k) {
    const double z = step.z[k];
    const double n = step.n[k];
    const double dn = dh[k] * (1.0 - z);
    const double dz = dh[k] * (step.h_prev[k] - n);
    dh_prev[k] = dh[k] * z;
    da_n[k] = dn * (1.0 - n * n);
    da_z[k] = dz * z * (1.0 - z);
    gated[k] = step.r[k] * step.h_prev[k];
  }

  outer_acc(g.W_n, da_n, step.x);
  outer_acc(g.U_n, da_n, gated);
  axpy(1.0, da_n, g.b_n.values());
  gemv_t_acc(layer.W_n, da_n, dx);
  gemv_t_acc(layer.U_n, da_n, d_gated);

  for (std::size_t k = 0; k < H; ++k) {
    const double r = step.r[k];
    da_r[k] = d_gated[k] * step.h_prev[k] * r * (1.0 - r);
    dh_prev[k] += d_gated[k] * r;
  }

  outer_acc(g.W_r, da_r, step.x);
  outer_acc(g.U_r, da_r, step.h_prev);
  axpy(1.0, da_r, g.b_r.values());
  gemv_t_acc(layer.W_r, da_r, dx);
  gemv_t_acc(layer.U_r, da_r, dh_prev);

  outer_acc(g.W_z, da_z, step.x);
  outer_acc(g.U_z, da_z, step.h_prev);
  axpy(1.0, da_z, g.b_z.values());
  gemv_t_acc(layer.W_z, da_z, dx);
  gemv_t_acc(layer.U_z, da_z, dh_prev);
}

}  // namespace

void ModelConfig::validate() const {
  if (input_dim == 0 || hidden_dim == 0 || num_layers == 0 || demo_dim == 0 || window_len == 0) {
    throw UsageError("model config: every dimension must be at least 1");
  }
}

ModelParams ModelParams::zeros(const ModelConfig& config) {
  config.validate();
  const std::size_t H = config.hidden_dim;
  ModelParams p;
  p.config = config;
  p.embed_W = Matrix(H, config.demo_dim);
  p.embed_b = Matrix(H, 1);
  for (std::size_t l = 0; l < config.num_layers; ++l) {
    const std::size_t in = layer_input_dim(config, l);
    p.layers.push_back(GruLayer{Matrix(H, in), Matrix(H, in), Matrix(H, in), Matrix(H, H),
                                Matrix(H, H), Matrix(H, H), Matrix(H, 1), Matrix(H, 1),
                                Matrix(H, 1)});
  }
  p.out_W = Matrix(1, H);
  p.out_b = Matrix(1, 1);
  return p;
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for_each_tensor(*this, [&](const std::string&, const Matrix& m) { n += m.size(); });
  return n;
}

std::size_t parameter_count(const ModelConfig& c) {
  const std::size_t H = c.hidden_dim;
  std::size_t n = H * c.demo_dim + H;
  for (std::size_t l = 0; l < c.num_layers; ++l) n += 3 * (H * layer_input_dim(c, l) + H * H + H);
  return n + H + 1;
}

GradientSet GradientSet::zeros(const ModelConfig& config) {
  return GradientSet{ModelParams::zeros(config), std::vector<double>(config.demo_dim, 0.0)};
}

void GradientSet::clear() {
  for_each_tensor(tensors, [](const std::string&, Matrix& m) { m.fill(0.0); });
  std::fill(demo.begin(), demo.end(), 0.0);
}

double GradientSet::squared_norm() const {
  double sum = 0.0;
  for_each_tensor(tensors, [&](const std::string&, const Matrix& m) {
    sum += epikick::squared_norm(m);
  });
  return sum;
}

void GradientSet::scale(double factor) {
  for_each_tensor(tensors, [&](const std::string&, Matrix& m) {
    for (double& v : m.values()) v *= factor;
  });
  for (double& v : demo) v *= factor;
}

ModelParams init_params(const ModelConfig& config, Rng& rng) {
  ModelParams p = ModelParams::zeros(config);
  for_each_tensor(p, [&](const std::string& name, Matrix& m) {
    // Biases (column vectors named b_*, embed_b, out_b) stay zero.
    const bool is_bias = name.ends_with("_b") || name.find(".b_") != std::string::npos;
    if (!is_bias) glorot(m, rng);
  });
  return p;
}

std::vector<double> embed(std::span<const double> demo, const ModelParams& params) {
  if (demo.size() != params.embed_W.cols()) {
    throw ShapeError("embed: demographic vector has " + std::to_string(demo.size()) +
                     " features, embedding expects " + std::to_string(params.embed_W.cols()));
  }
  std::vector<double> h0(params.embed_b.values().begin(), params.embed_b.values().end());
  gemv_acc(params.embed_W, demo, h0);
  for (double& v : h0) v = sigmoid(v);
  return h0;
}

std::vector<double> gru_cell(std::span<const double> x, std::span<const double> h_prev,
                             const GruLayer& layer) {
  check_layer_dims(x, h_prev, layer);
  ForwardCache::Step step;
  cell_forward(x, h_prev, layer, step);
  return step.h;
}

double forward(const Matrix& inputs, std::span<const double> demo, const ModelParams& params,
               ForwardCache& cache) {
  const ModelConfig& c = params.config;
  if (inputs.cols() != c.input_dim || inputs.rows() == 0) {
    throw ShapeError("forward: input block is " + inputs.shape_string() + ", expected Lx" +
                     std::to_string(c.input_dim));
  }
  cache.params = &params;
  cache.demo.assign(demo.begin(), demo.end());
  cache.h0 = embed(demo, params);
  cache.layers.assign(params.layers.size(), {});

  const std::size_t L = inputs.rows();
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    auto& steps = cache.layers[l];
    steps.resize(L);
    for (std::size_t t = 0; t < L; ++t) {
      auto& step = steps[t];
      if (l == 0) {
        auto row = inputs.row(t);
        step.x.assign(row.begin(), row.end());
      } else {
        step.x = cache.layers[l - 1][t].h;
      }
      step.h_prev = t == 0 ? cache.h0 : steps[t - 1].h;
      if (t == 0) check_layer_dims(step.x, step.h_prev, params.layers[l]);
      cell_forward(step.x, step.h_prev, params.layers[l], step);
    }
  }

  const auto& top = cache.layers.back().back().h;
  double y = params.out_b(0, 0);
  for (std::size_t k = 0; k < top.size(); ++k) y += params.out_W(0, k) * top[k];
  cache.prediction = y;
  return y;
}

double predict(const Matrix& inputs, std::span<const double> demo, const ModelParams& params) {
  ForwardCache cache;
  return forward(inputs, demo, params, cache);
}

void backward(const ModelParams& params, const ForwardCache& cache, double d_prediction,
              GradientSet& grads) {
  if (cache.params != &params || cache.layers.size() != params.layers.size() ||
      cache.layers.empty() || cache.layers.front().empty()) {
    throw UsageError("backward: cache does not come from a forward pass with these parameters");
  }
  if (grads.tensors.layers.size() != params.layers.size() ||
      !grads.tensors.embed_W.same_shape(params.embed_W)) {
    throw ShapeError("backward: gradient set does not match the parameter shapes");
  }
  const std::size_t H = params.config.hidden_dim;
  const std::size_t L = cache.layers.front().size();
  const std::size_t num_layers = params.layers.size();

  // Head.
  const auto& top = cache.layers.back().back().h;
  axpy(d_prediction, top, grads.tensors.out_W.values());
  grads.tensors.out_b(0, 0) += d_prediction;

  // Gradient w.r.t. each hidden state of the current layer, fed from above.
  std::vector<std::vector<double>> dh_seq(L, std::vector<double>(H, 0.0));
  for (std::size_t k = 0; k < H; ++k) dh_seq[L - 1][k] = d_prediction * params.out_W(0, k);

  std::vector<double> dh0(H, 0.0);
  std::vector<double> carry(H), dh(H), dh_prev;
  for (std::size_t l = num_layers; l-- > 0;) {
    const auto& steps = cache.layers[l];
    const GruLayer& layer = params.layers[l];
    GruLayer& g = grads.tensors.layers[l];
    const std::size_t in_dim = layer.W_z.cols();
    std::vector<std::vector<double>> dx_seq(L, std::vector<double>(in_dim, 0.0));

    std::fill(carry.begin(), carry.end(), 0.0);
    for (std::size_t t = L; t-- > 0;) {
      for (std::size_t k = 0; k < H; ++k) dh[k] = dh_seq[t][k] + carry[k];
      cell_backward(steps[t], layer, dh, g, dx_seq[t], dh_prev);
      carry.swap(dh_prev);
    }
    axpy(1.0, carry, dh0);
    if (l > 0) dh_seq = std::move(dx_seq);
  }

  // Embedding: h0 = sigmoid(W demo + b), shared by every layer.
  std::vector<double> da(H);
  for (std::size_t k = 0; k < H; ++k) da[k] = dh0[k] * cache.h0[k] * (1.0 - cache.h0[k]);
  outer_acc(grads.tensors.embed_W, da, cache.demo);
  axpy(1.0, da, grads.tensors.embed_b.values());
  if (grads.demo.size() != cache.demo.size()) grads.demo.assign(cache.demo.size(), 0.0);
  gemv_t_acc(params.embed_W, da, grads.demo);
}

GradientSet backward(const ModelParams& params, const ForwardCache& cache, double d_prediction) {
  GradientSet grads = GradientSet::zeros(params.config);
  backward(params, cache, d_prediction, grads);
  return grads;
}

}  // namespace epikick
