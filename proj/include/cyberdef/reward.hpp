// Copyright 2026 The cyberdef-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "cyberdef/common.hpp"
#include "cyberdef/detection.hpp"
#include "cyberdef/state.hpp"

namespace cyberdef {

struct CIAWeights {
  double confidentiality = 1.0;
  double integrity = 1.0;
  double availability = 1.0;
  double honeypot = 0.5;

  CIAWeights scaled(double c) const {
    return {c * confidentiality, c * integrity, c * availability, c * honeypot};
  }
  friend bool operator==(const CIAWeights&, const CIAWeights&) = default;
};

struct RewardComponents {
  double confidentiality = 0.0;  // C
  double integrity = 0.0;        // I
  double availability = 0.0;     // A
  double honeypot = 0.0;         // H
  friend bool operator==(const RewardComponents&, const RewardComponents&) = default;
};

struct RewardConfig {
  std::string name = "default";
  std::array<double, kTierCount> tier_costs = {0.1, 1.0, 10.0};
  double impact_cost = 10.0;
  int restore_downtime_turns = 1;
  CIAWeights weights;

  double tier_cost(Tier tier) const {
    return tier_costs[static_cast<std::size_t>(tier)];
  }
  friend bool operator==(const RewardConfig&, const RewardConfig&) = default;
};

// C  sum of tier costs over compromised real hosts holding confidential data
// I  impact_cost per successful Impact, plus the tier cost of a host red
//    just escalated on (an unauthorized modification)
// A  tier cost of every live host that is isolated or restoring this turn
// H  number of deployed decoys holding a red session
RewardComponents compute_components(const GameState& state, const World& world,
                                    const TurnEvents& events,
                                    const RewardConfig& config);

// −(w_c·C + w_i·I + w_a·A) + w_h·H
double compute_reward(const RewardComponents& components,
                      const CIAWeights& weights);

// Throws ConfigError(Invariant) for non-positive costs, negative weights or
// negative downtime.
void check_reward_config(const RewardConfig& config);
// Non-fatal findings (all weights zero).
std::vector<std::string> reward_config_warnings(const RewardConfig& config);

RewardConfig reward_config_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const RewardConfig& config);
nlohmann::json to_json(const RewardComponents& components);

// "default" (1,1,1,0.5), "pci" (5,1,1,0.5), "research-honeynet" (1,1,1,5),
// "web-service" (1,1,5,0.5); weights are (C, I, A, H).
RewardConfig reward_preset(std::string_view name);
std::vector<std::string> reward_preset_names();

// Same ref rules as resolve_detector_config.
RewardConfig resolve_reward_config(const std::string& ref,
                                   const std::filesystem::path& base_dir);

}  // namespace cyberdef
