// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The epikick Authors

#include "epikick/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "epikick/csv.hpp"
#include "epikick/error.hpp"

namespace epikick {

namespace {

int group_order(const std::string& group) {
  if (group == "age") return 0;
  if (group == "race") return 1;
  return 2;
}

}  // namespace

const RelevanceEntry* RelevanceReport::find(const std::string& feature) const {
  for (const auto& e : entries)
    if (e.feature == feature) return &e;
  return nullptr;
}

std::size_t RelevanceReport::overall_rank(const std::string& feature) const {
  const RelevanceEntry* target = find(feature);
  if (!target) throw UsageError("no feature named '" + feature + "' in the report");
  std::size_t rank = 1;
  for (const auto& e : entries)
    if (e.relevance > target->relevance) ++rank;
  return rank;
}

std::string feature_group(const std::string& name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower.starts_with("age")) return "age";
  if (lower.starts_with("race")) return "race";
  return "scalar";
}

std::vector<double> embedding_column_norms(const Matrix& embed_W) {
  std::vector<double> norms(embed_W.cols(), 0.0);
  for (std::size_t k = 0; k < embed_W.rows(); ++k)
    for (std::size_t j = 0; j < embed_W.cols(); ++j) norms[j] += embed_W(k, j) * embed_W(k, j);
  for (double& n : norms) n = std::sqrt(n);
  return norms;
}

RelevanceReport relevance(const ModelParams& params, const std::vector<std::string>& names) {
  if (names.size() != params.embed_W.cols()) {
    throw ValidationError("relevance: " + std::to_string(names.size()) +
                          " feature names for an embedding with " +
                          std::to_string(params.embed_W.cols()) + " columns");
  }
  const auto norms = embedding_column_norms(params.embed_W);
  RelevanceReport report;
  for (std::size_t j = 0; j < names.size(); ++j) {
    report.entries.push_back({names[j], feature_group(names[j]), norms[j]});
  }
  std::stable_sort(report.entries.begin(), report.entries.end(),
                   [](const RelevanceEntry& a, const RelevanceEntry& b) {
                     const int ga = group_order(a.group);
                     const int gb = group_order(b.group);
                     if (ga != gb) return ga < gb;
                     if (a.relevance != b.relevance) return a.relevance > b.relevance;
                     return a.feature < b.feature;
                   });
  return report;
}

RelevanceReport relevance(const Checkpoint& ckpt, std::string checkpoint_id) {
  RelevanceReport report = relevance(ckpt.params, ckpt.feature_names);
  report.checkpoint_id = std::move(checkpoint_id);
  report.stats = ckpt.stats;
  return report;
}

std::string report_csv(const RelevanceReport& report) {
  std::ostringstream out;
  out << "feature,group,relevance\n";
  for (const auto& e : report.entries) {
    out << e.feature << ',' << e.group << ',' << csv::format_double(e.relevance) << '\n';
  }
  return out.str();
}

std::vector<RelevanceEntry> parse_report_csv(const std::string& text) {
  std::istringstream in(text);
  const auto rows = csv::read(in);
  if (rows.empty() || rows.front().fields != std::vector<std::string>{"feature", "group",
                                                                      "relevance"}) {
    throw ValidationError("relevance CSV: header must be 'feature,group,relevance'");
  }
  std::vector<RelevanceEntry> out;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const auto& row = rows[k];
    if (row.fields.size() != 3) {
      throw ValidationError("relevance CSV: line " + std::to_string(row.line) +
                            " must have 3 fields");
    }
    out.push_back({row.fields[0], row.fields[1],
                   csv::parse_double(row.fields[2], row.line, "relevance")});
  }
  return out;
}

void emit_report(const RelevanceReport& report, const std::string& csv_path,
                 const std::string& json_path) {
  csv::write_file(csv_path, report_csv(report));

  nlohmann::json features = nlohmann::json::array();
  for (const auto& e : report.entries) {
    features.push_back({{"feature", e.feature}, {"group", e.group}, {"relevance", e.relevance}});
  }
  const nlohmann::json doc{{"checkpoint_id", report.checkpoint_id},
                           {"features", std::move(features)},
                           {"standardization",
                            {{"names", report.stats.names},
                             {"mean", report.stats.mean},
                             {"scale", report.stats.scale}}}};
  csv::write_file(json_path, doc.dump(2) + "\n");
}

}  // namespace epikick
