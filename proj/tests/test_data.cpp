// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The epikick Authors

#include <doctest.h>

#include <sstream>

#include "epikick/data.hpp"
#include "epikick/error.hpp"
#include "support.hpp"

using namespace epikick;

namespace {

CaseMap cases_from(const std::string& text) {
  std::istringstream in(text);
  return parse_cases(in);
}

DemographicMap demographics_from(const std::string& text) {
  std::istringstream in(text);
  return parse_demographics(in);
}

EpidemicSeries ramp(const std::string& region, std::size_t days) {
  std::vector<std::int64_t> cc;
  for (std::size_t t = 0; t < days; ++t) cc.push_back(static_cast<std::int64_t>(10 * t * t));
  return EpidemicSeries::from_cumulative(region, Date::from_ymd(2020, 3, 1), cc);
}

}  // namespace

TEST_CASE("case loader") {
  const auto cases = cases_from(
      "region,date,cumulative_confirmed,cumulative_deaths\n"
      "AZ,2020-03-01,5,0\n"
      "AZ,2020-03-02,8,\n");
  REQUIRE(cases.size() == 1);
  CHECK(cases.at("AZ").dc == std::vector<std::int64_t>{5, 3});

  CHECK_THROWS_AS(cases_from("region,date,cumulative_confirmed\n"
                             "AZ,2020-03-01,5\n"
                             "AZ,2020-03-02,4\n"),
                  ValidationError);
  CHECK(cases_from("").empty());
}

TEST_CASE("case loader names the offending region and date") {
  try {
    (void)cases_from("region,date,cumulative_confirmed\n"
                     "NJ,2020-03-01,5\n"
                     "NJ,2020-03-03,9\n");
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    const std::string what = e.what();
    CHECK(what.find("NJ") != std::string::npos);
    CHECK(what.find("2020-03-03") != std::string::npos);
  }
}

TEST_CASE("restriction timelines") {
  CaseMap cases;
  cases.emplace("AZ", ramp("AZ", 7));
  cases.emplace("MI", ramp("MI", 7));
  const Date d0 = cases.at("AZ").start;
  const auto timelines = build_timelines({{"AZ", d0 + 3, d0 + 5}}, cases);
  CHECK(timelines.at("AZ").status ==
        std::vector<bool>{false, false, false, true, true, true, false});
  CHECK(timelines.at("MI").status == std::vector<bool>(7, false));

  std::istringstream bad("region,restriction_start,restriction_end\nAZ,2020-03-05,2020-03-02\n");
  CHECK_THROWS_AS((void)parse_restriction_intervals(bad), ValidationError);
  CHECK_THROWS_AS((void)build_timelines({{"XX", d0, d0}}, cases), ValidationError);

  const auto open_end = build_timelines({{"AZ", d0 + 5, std::nullopt}}, cases);
  CHECK(open_end.at("AZ").status ==
        std::vector<bool>{false, false, false, false, false, true, true});
}

TEST_CASE("demographics loader") {
  std::string header = "region";
  std::string row = "AZ";
  for (int k = 1; k <= 21; ++k) {
    header += ",f" + std::to_string(k);
    row += "," + std::to_string(k);
  }
  const auto demo = demographics_from(header + "\n" + row + "\n");
  CHECK(demo.at("AZ").values.size() == 21);
  CHECK_FALSE(demo.at("AZ").population.has_value());

  const auto with_pop = demographics_from("region,population,density\nAZ,7000000,64\n");
  CHECK(with_pop.at("AZ").population == 7e6);
  CHECK(with_pop.at("AZ").names == std::vector<std::string>{"density"});

  CHECK_THROWS_AS(demographics_from("region,a,b\nAZ,1\n"), ValidationError);
  CHECK_THROWS_AS(demographics_from("region,a\nAZ,1\nAZ,2\n"), ValidationError);
}

TEST_CASE("dataset assembly requires demographics for every region") {
  CaseMap cases;
  cases.emplace("AZ", ramp("AZ", 20));
  cases.emplace("MI", ramp("MI", 20));
  cases.emplace("NJ", ramp("NJ", 20));
  const auto timelines = build_timelines({}, cases);
  const auto demo = demographics_from("region,population,a\nAZ,1000,1\nMI,1000,2\n");
  DatasetOptions options;
  options.test_regions = {};
  CHECK_THROWS_AS((void)assemble_dataset(cases, timelines, demo, options), ValidationError);
}

TEST_CASE("normalization") {
  const auto series = EpidemicSeries::from_cumulative("AZ", Date::from_ymd(2020, 3, 1), {100});
  const auto n = normalize(series, 1e6);
  CHECK(n.cc == std::vector<double>{1e-4});
  CHECK(denormalize(n).cc == series.cc);
  CHECK_THROWS_AS((void)normalize(series, 0.0), UsageError);
}

TEST_CASE("standardization") {
  const DemographicVector a{"A", {"x", "c"}, {2.0, 3.0}, std::nullopt};
  const DemographicVector b{"B", {"x", "c"}, {4.0, 3.0}, std::nullopt};
  const auto stats = fit_standardization({&a, &b});
  CHECK(stats.apply(a.values) == std::vector<double>{-1.0, 0.0});
  CHECK(stats.apply(b.values) == std::vector<double>{1.0, 0.0});
  CHECK(stats.scale[1] == 1.0);
  CHECK(stats.warnings.size() == 1);
}

TEST_CASE("windows") {
  const auto series = normalize(ramp("AZ", 10), 1e4);
  const RestrictionTimeline open{"AZ", std::vector<bool>(10, false)};
  CHECK(build_windows(series, open, 5).size() == 5);

  const RestrictionTimeline closed{"AZ", std::vector<bool>(10, true)};
  for (const auto& w : build_windows(series, closed, 5)) {
    for (std::size_t t = 0; t < 5; ++t) {
      CHECK(w.inputs(t, kCcOpen) == 0.0);
      CHECK(w.inputs(t, kDcOpen) == 0.0);
    }
  }

  const auto short_series = normalize(ramp("AZ", 5), 1e4);
  CHECK(build_windows(short_series, RestrictionTimeline{"AZ", std::vector<bool>(5, false)}, 5)
            .empty());
}

TEST_CASE("split sizes, determinism and test holdout") {
  std::map<std::string, std::vector<WindowSample>> samples;
  const auto fill = [&](const std::string& region, int count) {
    for (int k = 0; k < count; ++k) {
      samples[region].push_back({region, Matrix(5, 4), static_cast<double>(k), Date()});
    }
  };
  for (const char* region : {"AZ", "MI", "NJ", "SC"}) fill(region, 25);
  fill("CA", 50);
  fill("TX", 50);
  const std::vector<std::string> tests{"AZ", "MI", "NJ", "SC"};

  Rng r1(1), r2(1);
  const auto s1 = split_dataset(samples, tests, 0.2, r1);
  const auto s2 = split_dataset(samples, tests, 0.2, r2);
  CHECK(s1.train.size() == 80);
  CHECK(s1.eval.size() == 20);
  for (const auto* pool : {&s1.train, &s1.eval}) {
    for (const auto& s : *pool) CHECK((s.region == "CA" || s.region == "TX"));
  }
  REQUIRE(s2.train.size() == 80);
  for (std::size_t k = 0; k < 80; ++k) {
    CHECK(s1.train[k].region == s2.train[k].region);
    CHECK(s1.train[k].target == s2.train[k].target);
  }
}
