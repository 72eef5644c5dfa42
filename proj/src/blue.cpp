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

#include "cyberdef/blue.hpp"

#include <array>

namespace cyberdef {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, kBlueActionKindCount> kNames = {
    "Monitor",     "Analyze",         "Remove",      "Restore",
    "DeployDecoy", "BlockSubnetPair", "IsolateHost", "UnisolateHost"};

json subnet_ref(std::size_t s, const World& world) {
  if (s < world.subnet_count()) return world.topology().subnets()[s].id;
  return s;
}

std::size_t read_subnet(const json& v, const World& world) {
  if (v.is_number_unsigned()) return v.get<std::size_t>();
  if (!v.is_string()) throw ContractError("blue action: bad subnet reference");
  auto s = world.topology().find_subnet(v.get<std::string>());
  if (!s) throw ContractError("blue action: unknown subnet " + v.dump());
  return *s;
}

}  // namespace

std::string_view to_string(BlueActionKind kind) {
  return kNames[static_cast<std::size_t>(kind)];
}

std::optional<BlueActionKind> parse_blue_action_kind(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name) return static_cast<BlueActionKind>(i);
  }
  return std::nullopt;
}

bool BlueAction::targets_host() const {
  switch (kind) {
    case BlueActionKind::Analyze:
    case BlueActionKind::Remove:
    case BlueActionKind::Restore:
    case BlueActionKind::IsolateHost:
    case BlueActionKind::UnisolateHost:
      return true;
    default:
      return false;
  }
}

json to_json(const BlueAction& action, const World& world) {
  json out{{"kind", std::string(to_string(action.kind))}};
  if (action.targets_host()) {
    out["host"] = action.a < world.host_count() ? json(world.host(action.a).id)
                                                : json(action.a);
  } else if (action.kind == BlueActionKind::DeployDecoy) {
    out["subnet"] = subnet_ref(action.a, world);
  } else if (action.kind == BlueActionKind::BlockSubnetPair) {
    out["subnets"] = {subnet_ref(action.a, world), subnet_ref(action.b, world)};
  }
  return out;
}

BlueAction blue_action_from_json(const json& doc, const World& world) {
  if (!doc.is_object() || !doc.contains("kind") || !doc["kind"].is_string()) {
    throw ContractError("blue action: missing kind");
  }
  auto kind = parse_blue_action_kind(doc["kind"].get<std::string>());
  if (!kind) throw ContractError("blue action: unknown kind");
  BlueAction action{*kind, 0, 0};
  if (action.targets_host()) {
    const auto& h = doc.at("host");
    if (h.is_number_unsigned()) {
      action.a = h.get<std::size_t>();
    } else {
      auto idx = h.is_string() ? world.find_host(h.get<std::string>())
                               : std::nullopt;
      if (!idx) throw ContractError("blue action: unknown host " + h.dump());
      action.a = *idx;
    }
  } else if (action.kind == BlueActionKind::DeployDecoy) {
    action.a = read_subnet(doc.at("subnet"), world);
  } else if (action.kind == BlueActionKind::BlockSubnetPair) {
    const auto& pair = doc.at("subnets");
    if (!pair.is_array() || pair.size() != 2) {
      throw ContractError("blue action: subnets must be a pair");
    }
    action.a = read_subnet(pair[0], world);
    action.b = read_subnet(pair[1], world);
  }
  return action;
}

ActionCatalog::ActionCatalog(const World& world) {
  actions_.push_back(BlueAction::monitor());
  for (auto kind : {BlueActionKind::Analyze, BlueActionKind::Remove,
                    BlueActionKind::Restore, BlueActionKind::IsolateHost,
                    BlueActionKind::UnisolateHost}) {
    for (HostIndex h = 0; h < world.host_count(); ++h) {
      actions_.push_back(BlueAction::on_host(kind, h));
    }
  }
  if (world.max_decoys() > 0) {
    for (SubnetIndex s = 0; s < world.subnet_count(); ++s) {
      actions_.push_back(BlueAction::deploy_decoy(s));
    }
  }
  for (auto [a, b] : world.topology().links()) {
    actions_.push_back(BlueAction::block(a, b));
  }
  for (std::size_t i = 0; i < actions_.size(); ++i) index_[actions_[i]] = i;
}

std::optional<std::size_t> ActionCatalog::index_of(const BlueAction& action) const {
  auto it = index_.find(action);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

}  // namespace cyberdef
