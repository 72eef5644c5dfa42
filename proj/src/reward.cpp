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

#include "cyberdef/reward.hpp"

#include <cmath>
#include <fstream>

namespace cyberdef {

using nlohmann::json;

namespace {

[[noreturn]] void invariant(const std::string& field, const std::string& msg) {
  throw ConfigError(ConfigError::Kind::Invariant, field, field + ": " + msg);
}

[[noreturn]] void parse_error(const std::string& field, const std::string& msg) {
  throw ConfigError(ConfigError::Kind::Parse, field, field + ": " + msg);
}

double read_number(const json& v, const std::string& field) {
  if (!v.is_number()) parse_error(field, "expected a number");
  return v.get<double>();
}

}  // namespace

RewardComponents compute_components(const GameState& state, const World& world,
                                    const TurnEvents& events,
                                    const RewardConfig& config) {
  RewardComponents out;
  for (HostIndex h = 0; h < world.host_count(); ++h) {
    const auto& hs = state.hosts[h];
    const auto& info = world.host(h);
    if (!hs.live()) continue;
    const bool compromised = hs.compromise != HostCompromise::Clean;
    if (info.decoy) {
      if (compromised) out.honeypot += 1.0;
    } else if (compromised && info.confidential_data) {
      out.confidentiality += config.tier_cost(info.tier);
    }
    if (hs.offline()) out.availability += config.tier_cost(info.tier);
  }
  if (events.red && events.red->outcome.success) {
    const auto& [action, outcome] = *events.red;
    if (outcome.impact) out.integrity += config.impact_cost;
    if (action.kind == RedActionKind::PrivilegeEscalate &&
        !world.host(action.target).decoy) {
      out.integrity += config.tier_cost(world.host(action.target).tier);
    }
  }
  return out;
}

double compute_reward(const RewardComponents& x, const CIAWeights& w) {
  return -(w.confidentiality * x.confidentiality + w.integrity * x.integrity +
           w.availability * x.availability) +
         w.honeypot * x.honeypot;
}

void check_reward_config(const RewardConfig& config) {
  for (std::size_t t = 0; t < kTierCount; ++t) {
    const double c = config.tier_costs[t];
    if (!std::isfinite(c) || c <= 0.0) {
      invariant("tier_costs." + std::string(to_string(static_cast<Tier>(t))),
                "must be positive");
    }
  }
  if (!std::isfinite(config.impact_cost) || config.impact_cost <= 0.0) {
    invariant("impact_cost", "must be positive");
  }
  if (config.restore_downtime_turns < 0) {
    invariant("restore_downtime_turns", "must be >= 0");
  }
  const auto& w = config.weights;
  const std::array<std::pair<const char*, double>, 4> named = {{
      {"confidentiality", w.confidentiality},
      {"integrity", w.integrity},
      {"availability", w.availability},
      {"honeypot", w.honeypot},
  }};
  for (auto [name, value] : named) {
    if (!std::isfinite(value) || value < 0.0) {
      invariant(std::string("weights.") + name, "must be >= 0");
    }
  }
}

std::vector<std::string> reward_config_warnings(const RewardConfig& config) {
  const auto& w = config.weights;
  if (w.confidentiality == 0.0 && w.integrity == 0.0 && w.availability == 0.0 &&
      w.honeypot == 0.0) {
    return {"weights: all zero, every episode returns 0"};
  }
  return {};
}

RewardConfig reward_config_from_json(const json& doc) {
  if (!doc.is_object()) parse_error("<root>", "expected a JSON object");
  RewardConfig config;
  for (const auto& [key, value] : doc.items()) {
    if (key == "name") {
      if (!value.is_string()) parse_error(key, "expected a string");
      config.name = value.get<std::string>();
    } else if (key == "tier_costs") {
      if (!value.is_object()) parse_error(key, "expected an object");
      for (const auto& [tier_name, cost] : value.items()) {
        auto tier = parse_tier(tier_name);
        if (!tier) parse_error("tier_costs." + tier_name, "unknown tier");
        config.tier_costs[static_cast<std::size_t>(*tier)] =
            read_number(cost, "tier_costs." + tier_name);
      }
    } else if (key == "impact_cost") {
      config.impact_cost = read_number(value, key);
    } else if (key == "restore_downtime_turns") {
      if (!value.is_number_integer()) parse_error(key, "expected an integer");
      config.restore_downtime_turns = value.get<int>();
    } else if (key == "weights") {
      if (!value.is_object()) parse_error(key, "expected an object");
      for (const auto& [wname, wv] : value.items()) {
        const auto field = "weights." + wname;
        if (wname == "confidentiality") {
          config.weights.confidentiality = read_number(wv, field);
        } else if (wname == "integrity") {
          config.weights.integrity = read_number(wv, field);
        } else if (wname == "availability") {
          config.weights.availability = read_number(wv, field);
        } else if (wname == "honeypot") {
          config.weights.honeypot = read_number(wv, field);
        } else {
          parse_error(field, "unknown key");
        }
      }
    } else {
      parse_error(key, "unknown key");
    }
  }
  check_reward_config(config);
  return config;
}

json to_json(const RewardConfig& config) {
  json costs = json::object();
  for (std::size_t t = 0; t < kTierCount; ++t) {
    costs[std::string(to_string(static_cast<Tier>(t)))] = config.tier_costs[t];
  }
  const auto& w = config.weights;
  return json{{"name", config.name},
              {"tier_costs", std::move(costs)},
              {"impact_cost", config.impact_cost},
              {"restore_downtime_turns", config.restore_downtime_turns},
              {"weights",
               {{"confidentiality", w.confidentiality},
                {"integrity", w.integrity},
                {"availability", w.availability},
                {"honeypot", w.honeypot}}}};
}

json to_json(const RewardComponents& x) {
  return json{{"C", fixed9(x.confidentiality)},
              {"I", fixed9(x.integrity)},
              {"A", fixed9(x.availability)},
              {"H", fixed9(x.honeypot)}};
}

std::vector<std::string> reward_preset_names() {
  return {"default", "pci", "research-honeynet", "web-service"};
}

RewardConfig reward_preset(std::string_view name) {
  RewardConfig config;
  config.name = std::string(name);
  if (name == "default") return config;
  if (name == "pci") {
    config.weights = {5.0, 1.0, 1.0, 0.5};
    return config;
  }
  if (name == "research-honeynet") {
    config.weights = {1.0, 1.0, 1.0, 5.0};
    return config;
  }
  if (name == "web-service") {
    config.weights = {1.0, 1.0, 5.0, 0.5};
    return config;
  }
  std::string available;
  for (const auto& n : reward_preset_names()) {
    available += (available.empty() ? "" : ", ") + n;
  }
  throw ConfigError(ConfigError::Kind::UnknownPreset, "reward_config_ref",
                    "unknown reward preset '" + std::string(name) +
                        "' (available: " + available + ")");
}

RewardConfig resolve_reward_config(const std::string& ref,
                                   const std::filesystem::path& base_dir) {
  if (!ref.ends_with(".json")) return reward_preset(ref);
  std::filesystem::path path(ref);
  if (path.is_relative()) path = base_dir / path;
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(ConfigError::Kind::MissingFile, "reward_config_ref",
                      "cannot open reward config " + path.string());
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(ConfigError::Kind::Parse, "reward_config_ref",
                      path.string() + ": " + e.what());
  }
  return reward_config_from_json(doc);
}

}  // namespace cyberdef
