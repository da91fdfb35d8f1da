// SPDX-License-Identifier: Apache-2.0
#ifndef CLCRN_CHECKPOINT_HPP
#define CLCRN_CHECKPOINT_HPP

#include <string>

#include <nlohmann/json.hpp>

#include "clcrn/model.hpp"

namespace clcrn {

/// Versioned binary checkpoint: magic "CLCR", u32 format version, u64
/// length-prefixed JSON header (config + parameter shapes), then the raw
/// little-endian float64 parameter blobs in header order.
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  nlohmann::json config;
  ParamStore params;
};

void save_checkpoint(const std::string& path, const nlohmann::json& config,
                     const ParamStore& params);

Checkpoint load_checkpoint(const std::string& path);

/// JSON serialization of a model configuration (round-trips through
/// checkpoints and resolved-config files).
nlohmann::json model_config_to_json(const ModelConfig& cfg);
ModelConfig model_config_from_json(const nlohmann::json& j);

}  // namespace clcrn

#endif
