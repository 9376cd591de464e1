// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The epikick Authors

#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace epikick {

/// Calendar day, stored as days since 1970-01-01.
class Date {
 public:
  constexpr Date() = default;
  constexpr explicit Date(std::int32_t days_since_epoch) : days_(days_since_epoch) {}

  static Date from_ymd(int year, unsigned month, unsigned day);
  /// Parses strict YYYY-MM-DD; throws ValidationError otherwise.
  static Date parse(std::string_view text);

  std::int32_t days_since_epoch() const { return days_; }
  std::string iso() const;

  Date operator+(std::int32_t days) const { return Date(days_ + days); }
  std::int32_t operator-(Date other) const { return days_ - other.days_; }
  friend auto operator<=>(Date, Date) = default;

 private:
  std::int32_t days_ = 0;
};

/// Daily cumulative confirmed counts for one region. dc[0] == cc[0].
struct EpidemicSeries {
  std::string region;
  Date start;
  std::vector<std::int64_t> cc;
  std::vector<std::int64_t> dc;

  std::size_t length() const { return cc.size(); }
  Date date_at(std::size_t t) const { return start + static_cast<std::int32_t>(t); }
  Date end() const { return date_at(cc.size() - 1); }

  /// Builds a series from cumulative counts, deriving dc by first differences.
  static EpidemicSeries from_cumulative(std::string region, Date start,
                                        std::vector<std::int64_t> cc);
  /// Throws ValidationError naming the region and date of the first violation.
  void validate() const;
};

/// Per-day stay-at-home status aligned with an EpidemicSeries.
struct RestrictionTimeline {
  std::string region;
  std::vector<bool> status;
};

/// Static socioeconomic features of one region. `population` is carried
/// beside the features when the CSV has a `population` column; it is the
/// per-capita denominator and not a model input.
struct DemographicVector {
  std::string region;
  std::vector<std::string> names;
  std::vector<double> values;
  std::optional<double> population;
};

/// Per-capita series: counts divided by the region population.
struct NormalizedSeries {
  std::string region;
  Date start;
  double population = 1.0;
  std::vector<double> cc;
  std::vector<double> dc;

  std::size_t length() const { return cc.size(); }
  Date date_at(std::size_t t) const { return start + static_cast<std::int32_t>(t); }
};

}  // namespace epikick
