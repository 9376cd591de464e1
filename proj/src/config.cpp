// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The epikick Authors

#include "epikick/config.hpp"

#include <charconv>
#include <functional>
#include <sstream>

#include "epikick/checkpoint.hpp"
#include "epikick/csv.hpp"
#include "epikick/error.hpp"

namespace epikick {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double to_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (value.empty() || ec != std::errc() || ptr != value.data() + value.size()) {
    throw UsageError("config key '" + key + "': expected a number, got '" + value + "'");
  }
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (value.empty() || ec != std::errc() || ptr != value.data() + value.size()) {
    throw UsageError("config key '" + key + "': expected a non-negative integer, got '" + value +
                     "'");
  }
  return out;
}

std::size_t to_size(const std::string& key, const std::string& value) {
  return static_cast<std::size_t>(to_u64(key, value));
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw UsageError("config key '" + key + "': expected true or false, got '" + value + "'");
}

std::vector<std::string> to_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string from_list(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& item : items) out += (out.empty() ? "" : ",") + item;
  return out;
}

std::string from_bool(bool b) { return b ? "true" : "false"; }

struct Field {
  std::string key;
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define EPIKICK_STRING_FIELD(name, member)                                              \
  Field {                                                                               \
    name, [](RunConfig& c, const std::string&, const std::string& v) { c.member = v; }, \
        [](const RunConfig& c) { return c.member; }                                     \
  }
#define EPIKICK_TYPED_FIELD(name, member, parse, format)                                       \
  Field {                                                                                      \
    name, [](RunConfig& c, const std::string& k, const std::string& v) { c.member = parse(k, v); }, \
        [](const RunConfig& c) { return format(c.member); }                                    \
  }

std::string fmt_double(double v) { return csv::format_double(v); }
std::string fmt_size(std::size_t v) { return std::to_string(v); }
std::string fmt_u64(std::uint64_t v) { return std::to_string(v); }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      EPIKICK_STRING_FIELD("cases", cases),
      EPIKICK_STRING_FIELD("restrictions", restrictions),
      EPIKICK_STRING_FIELD("demographics", demographics),
      EPIKICK_STRING_FIELD("checkpoint", checkpoint),
      EPIKICK_STRING_FIELD("scenario", scenario),
      EPIKICK_STRING_FIELD("out", out),
      Field{"test_regions",
            [](RunConfig& c, const std::string&, const std::string& v) {
              c.test_regions = to_list(v);
            },
            [](const RunConfig& c) { return from_list(c.test_regions); }},
      EPIKICK_TYPED_FIELD("eval_fraction", eval_fraction, to_double, fmt_double),
      EPIKICK_TYPED_FIELD("window_len", model.window_len, to_size, fmt_size),
      EPIKICK_TYPED_FIELD("hidden_dim", model.hidden_dim, to_size, fmt_size),
      EPIKICK_TYPED_FIELD("num_layers", model.num_layers, to_size, fmt_size),
      EPIKICK_TYPED_FIELD("lr0", train.lr0, to_double, fmt_double),
      EPIKICK_TYPED_FIELD("plateau_factor", train.plateau_factor, to_double, fmt_double),
      EPIKICK_TYPED_FIELD("plateau_patience", train.plateau_patience, to_size, fmt_size),
      EPIKICK_TYPED_FIELD("batch_size", train.batch_size, to_size, fmt_size),
      EPIKICK_TYPED_FIELD("max_epochs", train.max_epochs, to_size, fmt_size),
      EPIKICK_TYPED_FIELD("min_lr", train.min_lr, to_double, fmt_double),
      EPIKICK_TYPED_FIELD("clip_norm", train.clip_norm, to_double, fmt_double),
      EPIKICK_TYPED_FIELD("early_stop_patience", train.early_stop_patience, to_size, fmt_size),
      EPIKICK_TYPED_FIELD("early_stop_delta", train.early_stop_delta, to_double, fmt_double),
      EPIKICK_STRING_FIELD("region", region),
      EPIKICK_TYPED_FIELD("horizon", horizon, to_size, fmt_size),
      EPIKICK_STRING_FIELD("mode", mode),
      EPIKICK_STRING_FIELD("origin", origin),
      EPIKICK_TYPED_FIELD("bootstrap", bootstrap, to_bool, from_bool),
      EPIKICK_TYPED_FIELD("bootstrap_replicates", boot.replicates, to_size, fmt_size),
      EPIKICK_TYPED_FIELD("bootstrap_level", boot.level, to_double, fmt_double),
      EPIKICK_TYPED_FIELD("sim_regions", sim.regions, to_size, fmt_size),
      EPIKICK_TYPED_FIELD("sim_horizon", sim.horizon, to_size, fmt_size),
      EPIKICK_TYPED_FIELD("sim_beta_min", sim.beta_min, to_double, fmt_double),
      EPIKICK_TYPED_FIELD("sim_beta_max", sim.beta_max, to_double, fmt_double),
      EPIKICK_TYPED_FIELD("sim_gamma_min", sim.gamma_min, to_double, fmt_double),
      EPIKICK_TYPED_FIELD("sim_gamma_max", sim.gamma_max, to_double, fmt_double),
      EPIKICK_TYPED_FIELD("sim_population", sim.population, to_double, fmt_double),
      EPIKICK_TYPED_FIELD("sim_i0", sim.i0, to_double, fmt_double),
      EPIKICK_TYPED_FIELD("sim_noise_sd", sim.noise_sd, to_double, fmt_double),
      EPIKICK_TYPED_FIELD("sim_nuisance_features", sim.nuisance_features, to_size, fmt_size),
      EPIKICK_TYPED_FIELD("sim_restricted_fraction", sim.restricted_fraction, to_double,
                          fmt_double),
      EPIKICK_TYPED_FIELD("sim_restriction_effect", sim.restriction_effect, to_double,
                          fmt_double),
      EPIKICK_TYPED_FIELD("seed", seed, to_u64, fmt_u64),
  };
  return table;
}

#undef EPIKICK_STRING_FIELD
#undef EPIKICK_TYPED_FIELD

const Field& field(const std::string& key) {
  for (const auto& f : fields())
    if (f.key == key) return f;
  throw UsageError("unknown config key '" + key + "'");
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  field(key).set(*this, key, trim(value));
}

std::string RunConfig::get(const std::string& key) const { return field(key).get(*this); }

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> out = [] {
    std::vector<std::string> k;
    for (const auto& f : fields()) k.push_back(f.key);
    return k;
  }();
  return out;
}

bool RunConfig::has_key(const std::string& key) {
  for (const auto& f : fields())
    if (f.key == key) return true;
  return false;
}

std::string RunConfig::to_text() const {
  std::string out;
  for (const auto& f : fields()) out += f.key + " = " + f.get(*this) + "\n";
  return out;
}

std::uint64_t RunConfig::split_seed() const { return derive_seed(seed, 1); }
std::uint64_t RunConfig::train_seed() const { return derive_seed(seed, 2); }
std::uint64_t RunConfig::bootstrap_seed() const { return derive_seed(seed, 3); }

void apply_config_text(const std::string& text, RunConfig& config) {
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config line " + std::to_string(number) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    try {
      config.set(key, line.substr(eq + 1));
    } catch (const UsageError& e) {
      throw UsageError("config line " + std::to_string(number) + ": " + e.what());
    }
  }
}

RunConfig load_run_config(const std::string& path) {
  RunConfig config;
  apply_config_text(read_text_file(path), config);
  return config;
}

}  // namespace epikick
