// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The epikick Authors

#pragma once

#include <filesystem>
#include <string>

#include "epikick/data.hpp"
#include "epikick/model.hpp"
#include "epikick/sir.hpp"
#include "epikick/train.hpp"

namespace epikick::testing {

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("epikick-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline ModelConfig small_config(std::size_t hidden = 8, std::size_t demo = 5, std::size_t L = 3) {
  ModelConfig c;
  c.hidden_dim = hidden;
  c.demo_dim = demo;
  c.window_len = L;
  return c;
}

/// Memorization fixture: ten consecutive L=3 windows of a fast noiseless
/// epidemic (targets 0.013 to 0.114 per capita), one region.
struct Memorization {
  std::vector<WindowSample> samples;
  DemoLookup demos{{"AZ", {0.5, -0.5}}};
  ModelConfig model = small_config(12, 2, 3);

  TrainConfig train_config(std::uint64_t seed) const {
    TrainConfig tc;
    tc.lr0 = 5e-3;
    tc.max_epochs = 2000;
    tc.early_stop_patience = 2000;
    tc.seed = seed;
    return tc;
  }
};

inline Memorization memorization_fixture() {
  const auto traj = sir_series({0.99, 0.01, 0.0}, {0.6, 0.1}, 60);
  Rng rng(1);
  const auto series = normalize(observe_counts(traj, 1e6, 0.0, rng, "AZ"), 1e6);
  const RestrictionTimeline timeline{"AZ", std::vector<bool>(series.cc.size(), false)};
  Memorization m;
  m.samples = build_windows(series, timeline, 3);
  m.samples.resize(10);
  return m;
}

}  // namespace epikick::testing
