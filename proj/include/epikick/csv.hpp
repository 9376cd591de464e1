// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The epikick Authors

#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace epikick::csv {

/// One physical CSV line split on commas. Fields are whitespace-trimmed;
/// quoting is not supported (none of the schemas need it).
struct Row {
  std::size_t line = 0;  // 1-based line number in the source
  std::vector<std::string> fields;
};

/// Reads every non-blank line. Lines starting with '#' are skipped.
std::vector<Row> read(std::istream& in);
std::vector<Row> read_file(const std::string& path);

double parse_double(std::string_view text, std::size_t line, std::string_view what);
long long parse_int(std::string_view text, std::size_t line, std::string_view what);

/// Shortest text that parses back to the same double.
std::string format_double(double value);

void write_file(const std::string& path, const std::string& contents);

}  // namespace epikick::csv
