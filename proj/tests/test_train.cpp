// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The epikick Authors

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>

#include "epikick/checkpoint.hpp"
#include "epikick/error.hpp"
#include "epikick/train.hpp"
#include "support.hpp"

using namespace epikick;
using epikick::testing::small_config;

namespace {

std::vector<WindowSample> toy_samples(std::size_t count, std::size_t L, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<WindowSample> out;
  for (std::size_t k = 0; k < count; ++k) {
    WindowSample s{k % 2 ? "AA" : "BB", Matrix(L, 4), 0.0, Date()};
    for (double& v : s.inputs.values()) v = rng.uniform(0.0, 0.2);
    s.target = rng.uniform(0.0, 0.2);
    out.push_back(std::move(s));
  }
  return out;
}

DemoLookup toy_demos() { return {{"AA", {1.0, -1.0}}, {"BB", {-1.0, 1.0}}}; }

bool bit_equal(const ModelParams& a, const ModelParams& b) {
  bool same = true;
  for_each_tensor_pair(a, b, [&](const std::string&, const Matrix& x, const Matrix& y) {
    same = same && x.size() == y.size() &&
           std::memcmp(x.values().data(), y.values().data(), x.size() * sizeof(double)) == 0;
  });
  return same;
}

}  // namespace

TEST_CASE("rmse") {
  const std::vector<double> p{1.0, 3.0}, zero{0.0, 0.0};
  CHECK(rmse(p, p) == 0.0);
  CHECK(rmse(p, zero) == doctest::Approx(2.23607).epsilon(1e-6));
  const std::vector<double> a{4.0}, b{1.5};
  CHECK(rmse(a, b) == 2.5);
  CHECK_THROWS_AS((void)rmse({}, {}), UsageError);
}

TEST_CASE("adam") {
  const ModelConfig config = small_config();
  Rng rng(1);
  ModelParams params = init_params(config, rng);
  const ModelParams before = params;
  AdamState state = AdamState::fresh(config, 1e-3);
  adam_step(params, GradientSet::zeros(config), state);
  CHECK(bit_equal(params, before));

  ModelParams zero = ModelParams::zeros(config);
  GradientSet ones = GradientSet::zeros(config);
  for_each_tensor(ones.tensors, [](const std::string&, Matrix& m) { m.fill(1.0); });
  AdamState first = AdamState::fresh(config, 0.1);
  adam_step(zero, ones, first);
  for_each_tensor(zero, [](const std::string&, const Matrix& m) {
    for (double v : m.values()) CHECK(v == doctest::Approx(-0.1).epsilon(1e-6));
  });

  ModelParams x = before, y = before;
  AdamState sx = AdamState::fresh(config, 0.01), sy = AdamState::fresh(config, 0.01);
  adam_step(x, ones, sx);
  adam_step(y, ones, sy);
  CHECK(bit_equal(x, y));

  GradientSet bad = GradientSet::zeros(config);
  bad.tensors.layers[1].U_r(0, 0) = std::nan("");
  ModelParams untouched = before;
  AdamState s = AdamState::fresh(config, 0.01);
  try {
    adam_step(untouched, bad, s);
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("layer2.U_r") != std::string::npos);
  }
  CHECK(bit_equal(untouched, before));
  CHECK(s.t == 0);
}

TEST_CASE("gradient clipping") {
  const ModelConfig config = small_config();
  GradientSet g = GradientSet::zeros(config);
  g.tensors.out_b(0, 0) = 6.0;
  g.tensors.embed_b(0, 0) = 8.0;
  CHECK(clip_global_norm(g, 5.0) == 10.0);
  CHECK(std::sqrt(g.squared_norm()) == doctest::Approx(5.0));
  CHECK(clip_global_norm(g, 0.0) == doctest::Approx(5.0));
}

TEST_CASE("plateau schedule") {
  TrainConfig config;
  std::vector<double> falling;
  for (int k = 0; k < 60; ++k) falling.push_back(1.0 / (k + 1));
  CHECK(plateau_schedule(falling, 1e-4, config) == 1e-4);

  std::vector<double> flat{1.0};
  for (int k = 0; k < 19; ++k) flat.push_back(1.0);
  CHECK(plateau_schedule(flat, 1e-4, config) == 1e-4);
  flat.push_back(1.0);
  CHECK(plateau_schedule(flat, 1e-4, config) == doctest::Approx(3e-5).epsilon(1e-12));

  std::vector<double> stuck(2000, 1.0);
  CHECK(plateau_schedule(stuck, 1e-4, config) == config.min_lr);

  PlateauSchedule schedule(1e-4, 0.3, 20, 1e-7);
  schedule.observe(1.0);
  for (int k = 0; k < 19; ++k) schedule.observe(1.0);
  CHECK(schedule.bad_epochs() == 19);
  CHECK(schedule.lr() == 1e-4);
}

TEST_CASE("train overfits a small set") {
  const auto samples = toy_samples(10, 3, 1);
  ModelConfig mc = small_config(8, 2, 3);
  TrainConfig tc;
  tc.lr0 = 1e-2;
  tc.max_epochs = 2000;
  tc.early_stop_patience = 2000;
  tc.seed = 3;
  const auto result = train(samples, {}, toy_demos(), mc, tc);
  CHECK(result.history.back().train_rmse < 1e-3);
  CHECK(evaluate_rmse(result.params, samples, toy_demos()) < 1e-3);
}

TEST_CASE("memorization loss is mostly non-increasing after epoch 50") {
  const auto fixture = epikick::testing::memorization_fixture();
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto fit = train(fixture.samples, {}, fixture.demos, fixture.model,
                           fixture.train_config(seed));
    std::size_t epochs = 0, rises = 0;
    for (std::size_t e = 50; e < fit.history.size(); ++e) {
      ++epochs;
      rises += fit.history[e].train_rmse > fit.history[e - 1].train_rmse;
    }
    REQUIRE(epochs > 0);
    INFO("seed " << seed << ": " << rises << " rises in " << epochs << " epochs");
    CHECK(static_cast<double>(epochs - rises) >= 0.95 * static_cast<double>(epochs));
  }
}

TEST_CASE("train is deterministic and full-batch at large batch sizes") {
  const auto samples = toy_samples(12, 3, 2);
  const auto eval = toy_samples(4, 3, 9);
  ModelConfig mc = small_config(6, 2, 3);
  TrainConfig tc;
  tc.lr0 = 1e-2;
  tc.max_epochs = 15;
  tc.seed = 8;
  const auto a = train(samples, eval, toy_demos(), mc, tc);
  const auto b = train(samples, eval, toy_demos(), mc, tc);
  CHECK(serialize_checkpoint({a.params, {"x", "y"}, {}}) ==
        serialize_checkpoint({b.params, {"x", "y"}, {}}));
  CHECK(history_csv(a.history) == history_csv(b.history));

  // With one batch per epoch the sample order cannot matter.
  tc.batch_size = 64;
  const auto full1 = train(samples, eval, toy_demos(), mc, tc);
  auto reversed = samples;
  std::reverse(reversed.begin(), reversed.end());
  const auto full2 = train(reversed, eval, toy_demos(), mc, tc);
  for (std::size_t e = 0; e < full1.history.size(); ++e) {
    CHECK(full1.history[e].eval_rmse ==
          doctest::Approx(full2.history[e].eval_rmse).epsilon(1e-12));
  }
}

TEST_CASE("train selects the best eval epoch and records history") {
  const auto samples = toy_samples(12, 3, 2);
  const auto eval = toy_samples(4, 3, 9);
  TrainConfig tc;
  tc.lr0 = 5e-2;
  tc.max_epochs = 40;
  tc.seed = 1;
  const auto result = train(samples, eval, toy_demos(), small_config(6, 2, 3), tc);
  REQUIRE_FALSE(result.history.empty());
  double best = result.history.front().eval_rmse;
  for (const auto& rec : result.history) best = std::min(best, rec.eval_rmse);
  CHECK(result.best_metric == best);
  CHECK(evaluate_rmse(result.params, eval, toy_demos()) == doctest::Approx(best).epsilon(1e-12));
  CHECK(history_csv(result.history).rfind("epoch,train_rmse,eval_rmse,lr\n", 0) == 0);
}

TEST_CASE("train config validation") {
  TrainConfig tc;
  tc.batch_size = 0;
  CHECK_THROWS_AS(tc.validate(), UsageError);
  tc = TrainConfig{};
  tc.plateau_factor = 1.5;
  CHECK_THROWS_AS(tc.validate(), UsageError);
}
