// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The epikick Authors

#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "epikick/error.hpp"
#include "epikick/sir.hpp"

using namespace epikick;

TEST_CASE("sir_step examples") {
  const SirState fixed = sir_step({1.0, 0.0, 0.0}, {0.4, 0.2});
  CHECK(fixed.s == 1.0);
  CHECK(fixed.i == 0.0);
  CHECK(fixed.r == 0.0);

  const SirState decay = sir_step({0.9, 0.1, 0.0}, {0.0, 0.5});
  CHECK(decay.s == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(decay.i == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(decay.r == doctest::Approx(0.05).epsilon(1e-15));

  // Exact rational evaluation: beta s i = 0.00297, gamma i = 0.001.
  const SirState next = sir_step({0.99, 0.01, 0.0}, {0.3, 0.1});
  CHECK(std::abs(next.s - 0.98703) < 1e-12);
  CHECK(std::abs(next.i - 0.01197) < 1e-12);
  CHECK(std::abs(next.r - 0.001) < 1e-12);
}

TEST_CASE("sir_step rejects unstable steps") {
  try {
    (void)sir_step({0.5, 0.5, 0.0}, {10.0, 0.1});
    FAIL("expected StabilityError");
  } catch (const StabilityError& e) {
    CHECK(std::string(e.what()).find("beta") != std::string::npos);
  }
}

TEST_CASE("sir_series shape and monotonicity") {
  const SirState init{0.999, 0.001, 0.0};
  const auto one = sir_series(init, {0.3, 0.1}, 1);
  REQUIRE(one.size() == 2);
  CHECK(one[1].s == sir_step(init, {0.3, 0.1}).s);
  CHECK_THROWS_AS((void)sir_series(init, {0.3, 0.1}, 0), UsageError);

  const auto traj = sir_series(init, {0.25, 0.1}, 200);
  for (std::size_t t = 1; t < traj.size(); ++t) {
    CHECK(traj[t].s <= traj[t - 1].s);
    CHECK(traj[t].r >= traj[t - 1].r);
  }
}

TEST_CASE("infections peak where s crosses gamma / beta") {
  const double beta = 0.4, gamma = 0.1;
  const auto traj = sir_series({1.0 - 1e-4, 1e-4, 0.0}, {beta, gamma}, 300);
  std::size_t peak = 0;
  for (std::size_t t = 1; t < traj.size(); ++t)
    if (traj[t].i > traj[peak].i) peak = t;
  std::size_t crossing = 0;
  while (traj[crossing].s >= gamma / beta) ++crossing;
  CHECK(std::abs(static_cast<long>(peak) - static_cast<long>(crossing)) <= 1);
}

TEST_CASE("observation model") {
  const auto traj = sir_series({0.999, 0.001, 0.0}, {0.3, 0.1}, 100);
  Rng rng(1);
  const auto series = observe_counts(traj, 1e6, 0.0, rng);
  for (std::size_t t = 0; t < traj.size(); ++t) {
    CHECK(series.cc[t] == std::llround(1e6 * (1.0 - traj[t].s)));
  }

  const auto none = sir_series({1.0, 0.0, 0.0}, {0.3, 0.1}, 50);
  Rng rng2(1);
  const auto flat = observe_counts(none, 1e6, 0.1, rng2);
  CHECK(std::all_of(flat.cc.begin(), flat.cc.end(), [](auto c) { return c == 0; }));

  Rng a(7), b(7);
  const auto x = observe_counts(traj, 1e6, 0.05, a);
  const auto y = observe_counts(traj, 1e6, 0.05, b);
  CHECK(x.cc == y.cc);
  for (std::size_t t = 1; t < x.cc.size(); ++t) CHECK(x.cc[t] >= x.cc[t - 1]);
}
