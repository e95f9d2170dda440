// Copyright (c) 2026 vhp-toolkit contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include <json.hpp>

#include "vhp/net_params.hpp"
#include "vhp/records.hpp"

namespace vhp::net {

// On-disk model snapshot. Format: one magic line, one JSON header line
// (format version, model shape, label list, gate-order declaration, training
// metadata, per-tensor shapes), then the raw little-endian float32 tensor
// data in the declared order, each tensor flattened column-major.
struct Checkpoint {
  ModelConfig config;
  LabelMap labels;
  nlohmann::json meta;
  ModelParams params;
};

void save_checkpoint(const std::string& path, const ModelConfig& config,
                     const LabelMap& labels, const ModelParams& params,
                     const nlohmann::json& meta);

Checkpoint load_checkpoint(const std::string& path);

}  // namespace vhp::net
