// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The epikick Authors

#pragma once

#include <string>
#include <vector>

#include "epikick/checkpoint.hpp"
#include "epikick/model.hpp"

namespace epikick {

struct RelevanceEntry {
  std::string feature;
  std::string group;
  double relevance = 0.0;
};

/// Relevance index per demographic feature: the L2 norm of the feature's
/// embedding column. Entries are grouped (age, race, scalar) and sorted by
/// descending relevance inside each group.
struct RelevanceReport {
  std::vector<RelevanceEntry> entries;
  std::string checkpoint_id;
  StandardizationStats stats;

  const RelevanceEntry* find(const std::string& feature) const;
  /// 1-based position of `feature` when all entries are ranked by relevance.
  std::size_t overall_rank(const std::string& feature) const;
};

/// "age" for names starting with age, "race" for race, "scalar" otherwise.
std::string feature_group(const std::string& name);

/// Column norms of `embed_W`, one per feature name.
std::vector<double> embedding_column_norms(const Matrix& embed_W);

RelevanceReport relevance(const ModelParams& params, const std::vector<std::string>& names);
RelevanceReport relevance(const Checkpoint& ckpt, std::string checkpoint_id = {});

/// Writes `feature,group,relevance` to `csv_path` and a JSON twin with the
/// checkpoint id and standardization stats to `json_path`.
void emit_report(const RelevanceReport& report, const std::string& csv_path,
                 const std::string& json_path);

std::string report_csv(const RelevanceReport& report);
std::vector<RelevanceEntry> parse_report_csv(const std::string& text);

}  // namespace epikick
