#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>

#include <json.hpp>

#include "dialpol/policies/policy.hpp"

namespace dialpol::policies {

// Builds a freshly initialized model; `config` holds the keys produced by the
// model's config() and missing keys take the defaults.
std::unique_ptr<Policy> make_policy(Method method, const nlohmann::json& config, core::ActionSpace actions,
                                    std::size_t state_dim, std::uint64_t seed);

// Architecture sizes sized for the 553-dimensional state and 166 atoms of
// the large benchmark.
nlohmann::json large_scale_config(Method method);

// Checkpoint document, version 1:
//   {"format": "dialpol-checkpoint", "version": 1, "method": "...",
//    "state_dim": D, "config": {...}, "action_space": {...},
//    "parameters": [{"name": ..., "shape": [...], "data": [...]}, ...]}
// Doubles are written in shortest round-trip form, so loading restores the
// exact weights.
nlohmann::json checkpoint_to_json(Policy& policy);
std::unique_ptr<Policy> checkpoint_from_json(const nlohmann::json& j);
void save_checkpoint(Policy& policy, const std::filesystem::path& path);
std::unique_ptr<Policy> load_checkpoint(const std::filesystem::path& path);

// Copies weights between models of identical architecture.
void copy_parameters(Policy& from, Policy& to);

// FNV-1a over the raw bytes of every parameter, for change detection.
std::uint64_t parameter_hash(std::span<ad::Parameter* const> params);
std::uint64_t parameter_hash(Policy& policy);

}  // namespace dialpol::policies
