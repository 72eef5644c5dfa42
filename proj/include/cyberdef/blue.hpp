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

#include <compare>
#include <map>
#include <optional>
#include <vector>

#include "json.hpp"

#include "cyberdef/common.hpp"
#include "cyberdef/detection.hpp"
#include "cyberdef/state.hpp"

namespace cyberdef {

enum class BlueActionKind : std::uint8_t {
  Monitor,
  Analyze,
  Remove,
  Restore,
  DeployDecoy,
  BlockSubnetPair,
  IsolateHost,
  UnisolateHost,
};
inline constexpr std::size_t kBlueActionKindCount = 8;

std::string_view to_string(BlueActionKind kind);
std::optional<BlueActionKind> parse_blue_action_kind(std::string_view name);

// Host kinds use `a` as the host index; DeployDecoy uses `a` as a subnet;
// BlockSubnetPair uses (a, b).
struct BlueAction {
  BlueActionKind kind = BlueActionKind::Monitor;
  std::size_t a = 0;
  std::size_t b = 0;

  static BlueAction monitor() { return {}; }
  static BlueAction on_host(BlueActionKind kind, HostIndex h) { return {kind, h, 0}; }
  static BlueAction deploy_decoy(SubnetIndex s) {
    return {BlueActionKind::DeployDecoy, s, 0};
  }
  static BlueAction block(SubnetIndex x, SubnetIndex y) {
    return {BlueActionKind::BlockSubnetPair, std::min(x, y), std::max(x, y)};
  }

  bool targets_host() const;
  friend auto operator<=>(const BlueAction&, const BlueAction&) = default;
};

// Targets by id; a target that does not name a real host or subnet is kept
// as its raw index so illegal requests still round-trip.
nlohmann::json to_json(const BlueAction& action, const World& world);
BlueAction blue_action_from_json(const nlohmann::json& doc, const World& world);

// The fixed, ordered blue action space of a world:
//   Monitor;
//   Analyze, Remove, Restore, IsolateHost, UnisolateHost for every host slot
//   (grouped by kind, hosts in engine order);
//   DeployDecoy per subnet (only when the scenario allows decoys);
//   BlockSubnetPair per topology link.
class ActionCatalog {
 public:
  explicit ActionCatalog(const World& world);

  std::size_t size() const { return actions_.size(); }
  const BlueAction& operator[](std::size_t i) const { return actions_[i]; }
  const std::vector<BlueAction>& actions() const { return actions_; }
  std::optional<std::size_t> index_of(const BlueAction& action) const;

 private:
  std::vector<BlueAction> actions_;
  std::map<BlueAction, std::size_t> index_;
};

}  // namespace cyberdef
