// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The epikick Authors

#include "epikick/synth.hpp"

#include <algorithm>
#include <array>
#include <cstdio>

#include "epikick/error.hpp"

namespace epikick {

namespace {

constexpr std::array<const char*, 50> kStates = {
    "AZ", "MI", "NJ", "SC", "AK", "AL", "AR", "CA", "CO", "CT", "DE", "FL", "GA",
    "HI", "IA", "ID", "IL", "IN", "KS", "KY", "LA", "MA", "MD", "ME", "MN", "MO",
    "MS", "MT", "NC", "ND", "NE", "NH", "NM", "NV", "NY", "OH", "OK", "OR", "PA",
    "RI", "SD", "TN", "TX", "UT", "VA", "VT", "WA", "WI", "WV", "WY"};

constexpr std::array<const char*, 8> kNuisanceNames = {
    "density",     "gdp_per_capita", "age_65_plus", "age_0_17",
    "race_white",  "race_black",     "high_risk",   "enplanements"};

}  // namespace

void SynthConfig::validate() const {
  if (regions < 1) throw UsageError("--regions must be at least 1");
  if (horizon < 1) throw UsageError("--horizon must be at least 1");
  if (!(beta_min >= 0.0 && beta_max >= beta_min)) {
    throw UsageError("--beta range must satisfy 0 <= min <= max");
  }
  if (!(gamma_min >= 0.0 && gamma_max >= gamma_min && gamma_max <= 1.0)) {
    throw UsageError("--gamma range must lie in [0, 1] with min <= max");
  }
  if (!(population >= 1.0)) throw UsageError("--population must be at least 1");
  if (!(i0 >= 0.0 && i0 <= 1.0)) throw UsageError("--i0 must lie in [0, 1]");
  if (!(noise_sd >= 0.0)) throw UsageError("--noise-sd must be >= 0");
  if (!(restricted_fraction >= 0.0 && restricted_fraction <= 1.0)) {
    throw UsageError("--restricted-fraction must lie in [0, 1]");
  }
  if (!(restriction_effect >= 0.0 && restriction_effect <= 1.0)) {
    throw UsageError("--restriction-effect must lie in [0, 1]");
  }
}

std::vector<std::string> synth_region_names(std::size_t count) {
  std::vector<std::string> names;
  for (std::size_t k = 0; k < count; ++k) {
    if (k < kStates.size()) {
      names.emplace_back(kStates[k]);
    } else {
      char buf[32];
      std::snprintf(buf, sizeof buf, "R%03zu", k + 1);
      names.emplace_back(buf);
    }
  }
  return names;
}

SynthData synth_dataset(const SynthConfig& config) {
  config.validate();
  std::vector<std::string> feature_names{"transmission_index"};
  if (config.include_removal_index) feature_names.emplace_back("removal_index");
  for (std::size_t k = 0; k < config.nuisance_features; ++k) {
    feature_names.push_back(k < kNuisanceNames.size() ? kNuisanceNames[k]
                                                      : "noise_" + std::to_string(k + 1));
  }

  SynthData out;
  const auto names = synth_region_names(config.regions);
  for (std::size_t k = 0; k < names.size(); ++k) {
    const std::string& region = names[k];
    Rng rng(derive_seed(config.seed, k));
    const SirParams params{rng.uniform(config.beta_min, config.beta_max),
                           rng.uniform(config.gamma_min, config.gamma_max)};

    // Restriction interval (inclusive day indices) or none.
    std::vector<bool> restricted(config.horizon + 1, false);
    const bool has_interval = rng.uniform() < config.restricted_fraction;
    const auto start_day = static_cast<std::size_t>(20 + rng.below(30));
    const auto length = static_cast<std::size_t>(30 + rng.below(40));
    if (has_interval && start_day <= config.horizon) {
      const std::size_t end_day = std::min(config.horizon, start_day + length - 1);
      for (std::size_t t = start_day; t <= end_day; ++t) restricted[t] = true;
      out.restrictions.push_back({region, config.start + static_cast<std::int32_t>(start_day),
                                  config.start + static_cast<std::int32_t>(end_day)});
    }

    const SirState init{1.0 - config.i0, config.i0, 0.0};
    std::vector<SirState> trajectory{init};
    trajectory.reserve(config.horizon + 1);
    for (std::size_t t = 0; t < config.horizon; ++t) {
      const double scale = restricted[t] ? 1.0 - config.restriction_effect : 1.0;
      trajectory.push_back(sir_step(trajectory.back(), {params.beta * scale, params.gamma}));
    }

    out.cases.emplace(region, observe_counts(trajectory, config.population, config.noise_sd, rng,
                                             region, config.start));

    DemographicVector demo{region, feature_names, {params.beta}, config.population};
    if (config.include_removal_index) demo.values.push_back(params.gamma);
    for (std::size_t j = 0; j < config.nuisance_features; ++j) demo.values.push_back(rng.normal());
    out.demographics.emplace(region, std::move(demo));
    out.truth.emplace(region, params);
    out.trajectories.emplace(region, std::move(trajectory));
  }
  return out;
}

}  // namespace epikick
