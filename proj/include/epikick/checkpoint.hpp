// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The epikick Authors

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "epikick/data.hpp"
#include "epikick/model.hpp"

namespace epikick {

inline constexpr std::string_view kCheckpointFormat = "epikick-ckpt-1";

/// A trained model together with the demographic schema and the
/// standardization fitted on its training regions.
struct Checkpoint {
  ModelParams params;
  std::vector<std::string> feature_names;
  StandardizationStats stats;
};

/// JSON text: {"format", "config", "features", "standardization",
/// "tensors": [{"name", "shape", "data"}...]}. Doubles are written in
/// shortest round-trip form, so parse(serialize(x)) is bit-exact.
std::string serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint parse_checkpoint(std::string_view text);

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

/// 16 hex digits of FNV-1a over the given bytes.
std::string content_id(std::string_view bytes);

std::string read_text_file(const std::string& path);

}  // namespace epikick
