// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The epikick Authors

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>

namespace epikick {

/// SplitMix64 step: advances `state` and returns the next output.
/// Reference vector: seed 1234567 yields 6457827717110365317,
/// 3203168211198807973, 9817491932198370423, ...
std::uint64_t splitmix64(std::uint64_t& state);

/// Child seed for independent sub-streams (ensemble members, regions).
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index);

/// xoshiro256** seeded through SplitMix64.
///
/// All derived draws (uniform, normal, shuffles) are implemented here rather
/// than with <random> distributions, whose outputs are implementation-defined,
/// so a seed reproduces the same stream on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi);
  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);
  /// Standard normal via Box-Muller (one output per call).
  double normal();

  template <class T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> s_{};
};

}  // namespace epikick
