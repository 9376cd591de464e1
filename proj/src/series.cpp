// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The epikick Authors

#include "epikick/series.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>

#include "epikick/error.hpp"

namespace epikick {

namespace {

bool parse_uint(std::string_view text, int& out) {
  if (text.empty()) return false;
  for (char ch : text)
    if (ch < '0' || ch > '9') return false;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

}  // namespace

Date Date::from_ymd(int year, unsigned month, unsigned day) {
  const std::chrono::year_month_day ymd{std::chrono::year(year), std::chrono::month(month),
                                        std::chrono::day(day)};
  if (!ymd.ok()) throw ValidationError("invalid calendar date");
  return Date(static_cast<std::int32_t>(std::chrono::sys_days(ymd).time_since_epoch().count()));
}

Date Date::parse(std::string_view text) {
  int y = 0;
  int m = 0;
  int d = 0;
  if (text.size() != 10 || text[4] != '-' || text[7] != '-' || !parse_uint(text.substr(0, 4), y) ||
      !parse_uint(text.substr(5, 2), m) || !parse_uint(text.substr(8, 2), d)) {
    throw ValidationError("invalid ISO-8601 date '" + std::string(text) + "'");
  }
  try {
    return from_ymd(y, static_cast<unsigned>(m), static_cast<unsigned>(d));
  } catch (const ValidationError&) {
    throw ValidationError("invalid ISO-8601 date '" + std::string(text) + "'");
  }
}

std::string Date::iso() const {
  const std::chrono::year_month_day ymd{std::chrono::sys_days(std::chrono::days(days_))};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

EpidemicSeries EpidemicSeries::from_cumulative(std::string region, Date start,
                                               std::vector<std::int64_t> cc) {
  EpidemicSeries s{std::move(region), start, std::move(cc), {}};
  s.dc.resize(s.cc.size());
  for (std::size_t t = 0; t < s.cc.size(); ++t) s.dc[t] = t == 0 ? s.cc[0] : s.cc[t] - s.cc[t - 1];
  return s;
}

void EpidemicSeries::validate() const {
  if (dc.size() != cc.size()) {
    throw ValidationError("region " + region + ": cc and dc lengths differ");
  }
  for (std::size_t t = 0; t < cc.size(); ++t) {
    if (cc[t] < 0) {
      throw ValidationError("region " + region + ": negative cumulative count on " +
                            date_at(t).iso());
    }
    if (t > 0 && cc[t] < cc[t - 1]) {
      throw ValidationError("region " + region + ": cumulative confirmed decreases on " +
                            date_at(t).iso());
    }
    const std::int64_t expected = t == 0 ? cc[0] : cc[t] - cc[t - 1];
    if (dc[t] != expected) {
      throw ValidationError("region " + region + ": new cases inconsistent on " +
                            date_at(t).iso());
    }
  }
}

}  // namespace epikick
