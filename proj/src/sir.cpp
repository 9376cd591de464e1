// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The epikick Authors

#include "epikick/sir.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "epikick/error.hpp"

namespace epikick {

namespace {

bool in_unit(double x) { return x >= 0.0 && x <= 1.0; }

}  // namespace

bool SirState::valid() const {
  return in_unit(s) && in_unit(i) && in_unit(r) && std::abs(s + i + r - 1.0) <= 1e-12;
}

bool SirParams::valid() const { return beta >= 0.0 && std::isfinite(beta) && in_unit(gamma); }

SirState sir_step(const SirState& state, const SirParams& params) {
  if (!state.valid()) throw ValidationError("sir_step: invalid SIR state");
  if (!params.valid()) throw ValidationError("sir_step: invalid SIR parameters");

  const double infections = params.beta * state.s * state.i;
  const double removals = params.gamma * state.i;
  const SirState next{state.s - infections, state.i + infections - removals,
                      state.r + removals};
  if (!in_unit(next.s) || !in_unit(next.i) || !in_unit(next.r)) {
    std::ostringstream msg;
    msg << "sir_step: state left [0,1] (beta*i = " << params.beta * state.i << ")";
    throw StabilityError(msg.str());
  }
  return next;
}

std::vector<SirState> sir_series(const SirState& init, const SirParams& params,
                                 std::size_t horizon) {
  if (horizon < 1) throw UsageError("sir_series: horizon must be at least 1");
  std::vector<SirState> out;
  out.reserve(horizon + 1);
  out.push_back(init);
  for (std::size_t t = 0; t < horizon; ++t) out.push_back(sir_step(out.back(), params));
  return out;
}

EpidemicSeries observe_counts(const std::vector<SirState>& trajectory, double population,
                              double noise_sd, Rng& rng, std::string region, Date start) {
  if (!(population >= 1.0)) throw UsageError("synth_epidemic: population must be >= 1");
  if (!(noise_sd >= 0.0)) throw UsageError("synth_epidemic: noise_sd must be >= 0");
  std::vector<std::int64_t> cc(trajectory.size());
  std::int64_t previous = 0;
  for (std::size_t t = 0; t < trajectory.size(); ++t) {
    const double eps = noise_sd * rng.normal();
    const double expected = population * (1.0 - trajectory[t].s) * (1.0 + eps);
    const auto observed = static_cast<std::int64_t>(std::llround(expected));
    cc[t] = std::max(observed, previous);
    previous = cc[t];
  }
  return EpidemicSeries::from_cumulative(std::move(region), start, std::move(cc));
}

EpidemicSeries synth_epidemic(const SirParams& params, const SirState& init, double population,
                              std::size_t horizon, double noise_sd, Rng& rng, std::string region,
                              Date start) {
  return observe_counts(sir_series(init, params, horizon), population, noise_sd, rng,
                        std::move(region), start);
}

}  // namespace epikick
