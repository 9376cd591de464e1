// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The epikick Authors

#include <doctest.h>

#include "epikick/error.hpp"
#include "epikick/forecast.hpp"
#include "epikick/synth.hpp"
#include "gradient_oracle.hpp"
#include "support.hpp"

using namespace epikick;
using epikick::testing::small_config;

namespace {

RegionData toy_region(std::size_t days, std::size_t demo_dim) {
  const auto traj = sir_series({0.999, 0.001, 0.0}, {0.35, 0.1}, days - 1);
  Rng rng(1);
  RegionData out;
  out.series = normalize(observe_counts(traj, 1e5, 0.0, rng, "AZ"), 1e5);
  out.timeline = {"AZ", std::vector<bool>(days, false)};
  for (std::size_t t = 10; t < 20; ++t) out.timeline.status[t] = true;
  out.demo.assign(demo_dim, 0.3);
  return out;
}

ModelParams toy_model(std::uint64_t seed) {
  return epikick::testing::make_grad_fixture(small_config(8, 3, 4), seed).params;
}

Dataset toy_dataset() {
  SynthConfig sc;
  sc.regions = 8;
  sc.horizon = 40;
  sc.nuisance_features = 1;
  sc.seed = 5;
  const auto data = synth_dataset(sc);
  DatasetOptions options;
  options.window_len = 4;
  options.test_regions = {"AZ", "MI"};
  options.seed = 2;
  return assemble_dataset(data.cases, build_timelines(data.restrictions, data.cases),
                          data.demographics, options);
}

}  // namespace

TEST_CASE("predict_one_step clamps and validates the demographic dimension") {
  ModelParams p = toy_model(1);
  p.out_W.fill(0.0);
  p.out_b(0, 0) = -0.001;
  const Matrix window(4, 4, 0.1);
  const std::vector<double> demo(3, 0.0);
  CHECK(predict_normalized(p, window, demo) == -0.001);
  CHECK(predict_one_step(p, window, demo, 1e6) == 0.0);
  CHECK(predict_one_step(p, window, demo, 1e6) == predict_one_step(p, window, demo, 1e6));

  const std::vector<double> wrong(5, 0.0);
  CHECK_THROWS_AS((void)predict_one_step(p, window, wrong, 1e6), ValidationError);
}

TEST_CASE("one-step and autoregressive forecasts agree on the first day") {
  const ModelParams p = toy_model(2);
  const RegionData region = toy_region(60, 3);
  const auto one = forecast_one_step(p, region, 30, 1);
  REQUIRE(one.points.size() == 1);
  const double direct = predict_one_step(
      p, window_ending_at(region.series, region.timeline, 30, 4), region.demo, 1e5);
  CHECK(one.points[0].dc_pred == direct);

  const auto ar = forecast_autoregressive(p, region, 30, 5, std::vector<bool>(5, false));
  CHECK(ar.points[0].dc_pred == one.points[0].dc_pred);
  CHECK(ar.points[0].date == region.series.date_at(31));
}

TEST_CASE("implied cumulative counts never decrease") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const ModelParams p = toy_model(seed);
    const RegionData region = toy_region(60, 3);
    for (const auto& result : {forecast_one_step(p, region, 20, 30),
                               forecast_autoregressive(p, region, 20, 30,
                                                       std::vector<bool>(30, seed % 2 == 0))}) {
      double prev = region.series.cc[20] * 1e5;
      for (const auto& pt : result.points) {
        CHECK(pt.cc_implied >= prev);
        CHECK(pt.dc_pred >= 0.0);
        prev = pt.cc_implied;
      }
    }
  }
}

TEST_CASE("forecast preconditions") {
  const ModelParams p = toy_model(3);
  const RegionData region = toy_region(30, 3);
  CHECK_THROWS_AS((void)forecast_one_step(p, region, 2, 1), UsageError);
  CHECK_THROWS_AS((void)forecast_one_step(p, region, 25, 10), UsageError);
  CHECK_THROWS_AS((void)forecast_autoregressive(p, region, 20, 5, std::vector<bool>(3, false)),
                  ValidationError);

  // Persisted status: the origin day (15) is restricted.
  ForecastRequest request{ForecastMode::Autoregressive, 15, 3, {}};
  const auto persisted = run_forecast(p, region, request);
  const auto explicit_status =
      forecast_autoregressive(p, region, 15, 3, std::vector<bool>(3, true));
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(persisted.points[k].dc_pred == explicit_status.points[k].dc_pred);
  }
}

TEST_CASE("empirical quantiles") {
  CHECK(empirical_quantile({4.0, 1.0}, 0.025) == 1.0);
  CHECK(empirical_quantile({4.0, 1.0}, 0.975) == 4.0);
  std::vector<double> v;
  for (int k = 1; k <= 30; ++k) v.push_back(k);
  // Order statistics sit at (k - 0.5) / n: 2.5% falls a quarter of the way
  // from the first to the second value.
  CHECK(empirical_quantile(v, 0.025) == doctest::Approx(1.25));
  CHECK(empirical_quantile(v, 0.975) == doctest::Approx(29.75));
  CHECK(empirical_quantile(v, 0.5) == doctest::Approx(15.5));
  CHECK_THROWS_AS((void)empirical_quantile({}, 0.5), UsageError);
}

TEST_CASE("bands from two members are their min and max") {
  ForecastResult a, b;
  a.points = {{}, {}};
  b.points = {{}, {}};
  a.points[0].dc_pred = 5.0;
  b.points[0].dc_pred = 2.0;
  a.points[1].dc_pred = 1.0;
  b.points[1].dc_pred = 7.0;
  const auto bands = quantile_bands({a, b}, 0.95);
  CHECK(bands[0] == std::pair{2.0, 5.0});
  CHECK(bands[1] == std::pair{1.0, 7.0});
}

TEST_CASE("bootstrap ensembles are reproducible and bands nest") {
  const Dataset ds = toy_dataset();
  ModelConfig mc = small_config(4, ds.feature_names.size(), 4);
  TrainConfig tc;
  tc.lr0 = 1e-2;
  tc.max_epochs = 3;
  BootstrapConfig boot;
  boot.replicates = 4;
  boot.seed = 7;
  Rng rng(1);
  const ModelParams point = init_params(mc, rng);
  const ForecastRequest request{ForecastMode::OneStep, 20, 10, {}};

  const auto e1 = train_bootstrap_ensemble(ds, mc, tc, boot);
  const auto e2 = train_bootstrap_ensemble(ds, mc, tc, boot);
  const RegionData& az = ds.regions.at("AZ");
  const auto f1 = forecast_with_bands(point, e1, az, request, 0.95);
  const auto f2 = forecast_with_bands(point, e2, az, request, 0.95);
  CHECK(forecast_csv({f1}) == forecast_csv({f2}));

  const auto narrow = forecast_with_bands(point, e1, az, request, 0.5);
  for (std::size_t k = 0; k < f1.points.size(); ++k) {
    const auto& wide = f1.points[k];
    CHECK(*wide.dc_lower <= wide.dc_pred);
    CHECK(*wide.dc_upper >= wide.dc_pred);
    CHECK(*narrow.points[k].dc_lower >= *wide.dc_lower);
    CHECK(*narrow.points[k].dc_upper <= *wide.dc_upper);
  }

  boot.replicates = 1;
  CHECK_THROWS_AS((void)train_bootstrap_ensemble(ds, mc, tc, boot), UsageError);
}

TEST_CASE("forecast csv layout") {
  ForecastResult r{"AZ", ForecastMode::OneStep, {}, {}};
  ForecastPoint p;
  p.date = Date::from_ymd(2020, 4, 1);
  p.dc_pred = 12.5;
  p.dc_raw = 12.5;
  p.cc_implied = 100.5;
  r.points.push_back(p);
  CHECK(forecast_csv({r}) ==
        "region,date,dc_pred,dc_lower,dc_upper,cc_implied,mode\n"
        "AZ,2020-04-01,12.5,,,100.5,onestep\n");
  CHECK(forecast_diagnostics_csv({r}) == "region,date,dc_raw\nAZ,2020-04-01,12.5\n");
  CHECK(parse_forecast_mode("autoregressive") == ForecastMode::Autoregressive);
  CHECK_THROWS_AS((void)parse_forecast_mode("rollout"), UsageError);
}
