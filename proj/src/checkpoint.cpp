// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The epikick Authors

#include "epikick/checkpoint.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "epikick/csv.hpp"
#include "epikick/error.hpp"

namespace epikick {

using nlohmann::json;

namespace {

json config_to_json(const ModelConfig& c) {
  return json{{"input_dim", c.input_dim},   {"hidden_dim", c.hidden_dim},
              {"num_layers", c.num_layers}, {"demo_dim", c.demo_dim},
              {"window_len", c.window_len}};
}

ModelConfig config_from_json(const json& j) {
  ModelConfig c;
  c.input_dim = j.at("input_dim").get<std::size_t>();
  c.hidden_dim = j.at("hidden_dim").get<std::size_t>();
  c.num_layers = j.at("num_layers").get<std::size_t>();
  c.demo_dim = j.at("demo_dim").get<std::size_t>();
  c.window_len = j.at("window_len").get<std::size_t>();
  c.validate();
  return c;
}

}  // namespace

std::string serialize_checkpoint(const Checkpoint& ckpt) {
  json tensors = json::array();
  for_each_tensor(ckpt.params, [&](const std::string& name, const Matrix& m) {
    tensors.push_back(json{{"name", name},
                           {"shape", {m.rows(), m.cols()}},
                           {"data", std::vector<double>(m.values().begin(), m.values().end())}});
  });
  json doc{{"format", kCheckpointFormat},
           {"config", config_to_json(ckpt.params.config)},
           {"features", ckpt.feature_names},
           {"standardization",
            {{"names", ckpt.stats.names},
             {"mean", ckpt.stats.mean},
             {"scale", ckpt.stats.scale},
             {"warnings", ckpt.stats.warnings}}},
           {"parameter_count", ckpt.params.parameter_count()},
           {"tensors", std::move(tensors)}};
  return doc.dump() + "\n";
}

Checkpoint parse_checkpoint(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("checkpoint: malformed JSON: ") + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != kCheckpointFormat) {
      throw ValidationError("checkpoint: unsupported format '" +
                            doc.at("format").get<std::string>() + "'");
    }
    Checkpoint ckpt;
    ckpt.params = ModelParams::zeros(config_from_json(doc.at("config")));
    ckpt.feature_names = doc.at("features").get<std::vector<std::string>>();
    const auto& st = doc.at("standardization");
    ckpt.stats.names = st.at("names").get<std::vector<std::string>>();
    ckpt.stats.mean = st.at("mean").get<std::vector<double>>();
    ckpt.stats.scale = st.at("scale").get<std::vector<double>>();
    ckpt.stats.warnings = st.value("warnings", std::vector<std::string>{});

    const auto& tensors = doc.at("tensors");
    std::size_t k = 0;
    for_each_tensor(ckpt.params, [&](const std::string& name, Matrix& m) {
      if (k >= tensors.size()) throw ValidationError("checkpoint: missing tensor " + name);
      const auto& t = tensors[k++];
      if (t.at("name").get<std::string>() != name) {
        throw ValidationError("checkpoint: expected tensor " + name + ", found " +
                              t.at("name").get<std::string>());
      }
      const auto shape = t.at("shape").get<std::vector<std::size_t>>();
      auto data = t.at("data").get<std::vector<double>>();
      if (shape.size() != 2 || shape[0] != m.rows() || shape[1] != m.cols() ||
          data.size() != m.size()) {
        throw ValidationError("checkpoint: tensor " + name + " has the wrong shape");
      }
      m = Matrix(shape[0], shape[1], std::move(data));
    });
    if (k != tensors.size()) throw ValidationError("checkpoint: unexpected extra tensors");
    if (ckpt.feature_names.size() != ckpt.params.config.demo_dim ||
        ckpt.stats.mean.size() != ckpt.feature_names.size() ||
        ckpt.stats.scale.size() != ckpt.feature_names.size()) {
      throw ValidationError("checkpoint: demographic schema does not match demo_dim");
    }
    return ckpt;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  csv::write_file(path, serialize_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::string& path) { return parse_checkpoint(read_text_file(path)); }

std::string content_id(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace epikick
