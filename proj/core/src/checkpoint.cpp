// SPDX-License-Identifier: Apache-2.0
#include "clcrn/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "clcrn/errors.hpp"

namespace clcrn {

using nlohmann::json;

void save_checkpoint(const std::string& path, const json& config,
                     const ParamStore& params) {
  json header;
  header["config"] = config;
  json plist = json::array();
  for (std::size_t i = 0; i < params.size(); ++i) {
    const ad::Tensor& t = params.value(static_cast<int>(i));
    plist.push_back({{"name", params.name(static_cast<int>(i))},
                     {"shape", t.shape}});
  }
  header["params"] = plist;
  const std::string hs = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw MissingFile("cannot write " + path);
  out.write("CLCR", 4);
  const std::uint32_t version = kCheckpointVersion;
  out.write(reinterpret_cast<const char*>(&version), sizeof(version));
  const std::uint64_t len = hs.size();
  out.write(reinterpret_cast<const char*>(&len), sizeof(len));
  out.write(hs.data(), static_cast<std::streamsize>(hs.size()));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const ad::Tensor& t = params.value(static_cast<int>(i));
    out.write(reinterpret_cast<const char*>(t.data.data()),
              static_cast<std::streamsize>(sizeof(double) * t.data.size()));
  }
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFile("cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "CLCR", 4) != 0) {
    throw ConfigError(path + ": not a CLCR checkpoint");
  }
  std::uint32_t version = 0;
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  if (version != kCheckpointVersion) {
    throw ConfigError(path + ": unsupported checkpoint version " +
                      std::to_string(version));
  }
  std::uint64_t len = 0;
  in.read(reinterpret_cast<char*>(&len), sizeof(len));
  std::string hs(len, '\0');
  in.read(hs.data(), static_cast<std::streamsize>(len));
  if (!in) throw SizeMismatch(path + ": truncated header");
  json header;
  try {
    header = json::parse(hs);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": bad header: " + e.what());
  }

  Checkpoint ckpt;
  ckpt.config = header.at("config");
  for (const auto& p : header.at("params")) {
    ad::Tensor t = ad::Tensor::zeros(p.at("shape").get<std::vector<int>>());
    in.read(reinterpret_cast<char*>(t.data.data()),
            static_cast<std::streamsize>(sizeof(double) * t.data.size()));
    if (!in) {
      throw SizeMismatch(path + ": truncated blob for parameter " +
                         p.at("name").get<std::string>());
    }
    ckpt.params.add(p.at("name").get<std::string>(), std::move(t));
  }
  return ckpt;
}

json model_config_to_json(const ModelConfig& cfg) {
  json j;
  j["signal_dim"] = cfg.signal_dim;
  j["hidden"] = cfg.hidden;
  j["layers"] = cfg.layers;
  j["input_len"] = cfg.input_len;
  j["horizon"] = cfg.horizon;
  j["k"] = cfg.k;
  j["map"] = to_string(cfg.map);
  j["kernel_components"] = to_string(cfg.components);
  j["heads"] = cfg.heads;
  j["kernel_hidden"] = cfg.kernel_hidden;
  return j;
}

ModelConfig model_config_from_json(const json& j) {
  ModelConfig cfg;
  cfg.signal_dim = j.at("signal_dim").get<int>();
  cfg.hidden = j.at("hidden").get<int>();
  cfg.layers = j.at("layers").get<int>();
  cfg.input_len = j.at("input_len").get<int>();
  cfg.horizon = j.at("horizon").get<int>();
  cfg.k = j.at("k").get<int>();
  cfg.map = map_kind_from_string(j.at("map").get<std::string>());
  cfg.components = components_from_string(j.at("kernel_components").get<std::string>());
  cfg.heads = j.at("heads").get<int>();
  cfg.kernel_hidden = j.at("kernel_hidden").get<std::vector<int>>();
  return cfg;
}

}  // namespace clcrn
