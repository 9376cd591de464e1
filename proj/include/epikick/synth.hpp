// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The epikick Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "epikick/data.hpp"
#include "epikick/sir.hpp"

namespace epikick {

/// Multi-region synthetic fixture built from the discrete SIR map.
///
/// Each region draws beta and gamma uniformly from the configured ranges.
/// The demographics file carries the population, a `transmission_index`
/// equal to the region's beta, optionally a `removal_index` equal to gamma,
/// and `nuisance_features` columns of pure noise.
struct SynthConfig {
  std::size_t regions = 20;
  std::size_t horizon = 150;
  double beta_min = 0.2;
  double beta_max = 0.5;
  double gamma_min = 0.05;
  double gamma_max = 0.2;
  double population = 1e6;
  double i0 = 1e-3;
  double noise_sd = 0.0;
  std::size_t nuisance_features = 4;
  bool include_removal_index = true;
  /// Fraction of regions that get one stay-at-home interval.
  double restricted_fraction = 0.5;
  /// Relative reduction of beta while a restriction is in force.
  double restriction_effect = 0.3;
  Date start = Date::from_ymd(2020, 1, 21);
  std::uint64_t seed = 0;

  void validate() const;
};

struct SynthData {
  CaseMap cases;
  std::vector<RestrictionInterval> restrictions;
  DemographicMap demographics;
  std::map<std::string, SirParams> truth;
  std::map<std::string, std::vector<SirState>> trajectories;
};

/// Region identifiers: AZ, MI, NJ, SC first, then other state codes, then
/// R051, R052, ... when more than fifty are requested.
std::vector<std::string> synth_region_names(std::size_t count);

SynthData synth_dataset(const SynthConfig& config);

}  // namespace epikick
