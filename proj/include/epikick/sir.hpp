// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The epikick Authors

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "epikick/rng.hpp"
#include "epikick/series.hpp"

namespace epikick {

/// Susceptible, infectious and removed population fractions.
struct SirState {
  double s = 1.0;
  double i = 0.0;
  double r = 0.0;

  /// Components in [0, 1] and summing to one within 1e-12.
  bool valid() const;
};

/// Daily transmission rate beta and removal rate gamma.
struct SirParams {
  double beta = 0.0;
  double gamma = 0.0;

  bool valid() const;
};

/// One day of the discrete SIR map:
///   s' = s - beta s i,  i' = i + beta s i - gamma i,  r' = r + gamma i.
/// Throws StabilityError (reporting beta * i) if a component leaves [0, 1].
SirState sir_step(const SirState& state, const SirParams& params);

/// Trajectory of horizon + 1 states starting at `init`.
std::vector<SirState> sir_series(const SirState& init, const SirParams& params,
                                 std::size_t horizon);

/// Maps a trajectory onto reported cumulative confirmed counts:
/// c_t = round(population (1 - s_t) (1 + eps_t)), eps_t ~ N(0, noise_sd),
/// clamped to be non-negative and non-decreasing.
EpidemicSeries observe_counts(const std::vector<SirState>& trajectory, double population,
                              double noise_sd, Rng& rng, std::string region = "SYN",
                              Date start = Date::from_ymd(2020, 1, 21));

EpidemicSeries synth_epidemic(const SirParams& params, const SirState& init, double population,
                              std::size_t horizon, double noise_sd, Rng& rng,
                              std::string region = "SYN",
                              Date start = Date::from_ymd(2020, 1, 21));

}  // namespace epikick
