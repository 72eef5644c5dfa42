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

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "cyberdef/common.hpp"
#include "cyberdef/rng.hpp"
#include "cyberdef/scenario.hpp"

namespace cyberdef {

enum class RedActionKind : std::uint8_t {
  DiscoverSubnet,
  ScanHost,
  Exploit,
  PrivilegeEscalate,
  Impact,
};
inline constexpr std::size_t kRedActionKindCount = 5;

std::string_view to_string(RedActionKind kind);
std::optional<RedActionKind> parse_red_action_kind(std::string_view name);

// `target` is a subnet index for DiscoverSubnet and a host index otherwise.
struct RedAction {
  RedActionKind kind;
  std::size_t target;
  friend auto operator<=>(const RedAction&, const RedAction&) = default;
};

struct RedKnowledge {
  SubnetIndex entry_subnet = 0;
  std::set<SubnetIndex> discovered_subnets;
  std::set<HostIndex> discovered_hosts;
  std::set<HostIndex> scanned_hosts;
  std::set<HostIndex> user_sessions;
  std::set<HostIndex> privileged_sessions;

  // privileged ⊆ user ⊆ scanned ⊆ discovered
  bool chain_holds() const;
  friend bool operator==(const RedKnowledge&, const RedKnowledge&) = default;
};

// Effect record for one action. Shared by red and blue actions.
struct ActionOutcome {
  bool success = false;
  // Hosts the action touched (a sweep touches a whole subnet); detectors
  // emit their alerts against these.
  std::vector<HostIndex> affected;
  std::vector<HostIndex> discovered;
  std::optional<HostIndex> session;  // session created or upgraded
  bool privileged = false;
  bool decoy = false;
  bool impact = false;
  std::vector<HostIndex> evicted;

  friend bool operator==(const ActionOutcome&, const ActionOutcome&) = default;
};

// The board as red can currently use it: subnet links that blue has not
// blocked, and which host slots are live and reachable. Built fresh by the
// engine each turn; tests build it straight from a topology.
struct Terrain {
  std::vector<std::vector<SubnetIndex>> links;        // unblocked adjacency
  std::vector<std::vector<HostIndex>> subnet_hosts;   // live hosts, index order
  std::vector<std::optional<SubnetIndex>> host_subnet;  // nullopt: inactive slot
  std::vector<bool> usable;   // live, not isolated, not restoring
  std::vector<bool> decoy;
  std::vector<bool> exploitable;  // runs at least one exploitable service
  HostIndex critical_host = 0;
  SubnetIndex critical_subnet = 0;

  static Terrain from_topology(const NetworkTopology& topology);

  std::size_t subnet_count() const { return links.size(); }
  std::size_t host_count() const { return host_subnet.size(); }
};

// Subnets red may currently operate in: the entry subnet, every subnet
// holding a usable non-decoy session, and their unblocked neighbours.
std::vector<bool> reachable_subnets(const RedKnowledge& knowledge,
                                    const Terrain& terrain);

bool is_legal(const RedAction& action, const RedKnowledge& knowledge,
              const Terrain& terrain);

// All legal actions in canonical order (kind, then target index).
std::vector<RedAction> legal_actions(const RedKnowledge& knowledge,
                                     const Terrain& terrain);

// One red decision. std::nullopt means Stalled: nothing is legal, and the
// engine treats the turn as a no-op. Only RandomWalk consumes randomness.
std::optional<RedAction> select_action(RedStrategyKind strategy,
                                       const RedKnowledge& knowledge,
                                       const Terrain& terrain, Rng& rng);

// Rolls the action's success against `params` and reports its effects.
// Exploits against decoys always succeed. Consumes exactly one draw.
ActionOutcome resolve_action(const RedAction& action, const Terrain& terrain,
                             const RedParams& params, Rng& rng);

RedKnowledge update_knowledge(RedKnowledge knowledge, const RedAction& action,
                              const ActionOutcome& outcome);

// Blue removed red's foothold on `host`: it leaves both session sets but
// stays discovered and scanned.
RedKnowledge evict(RedKnowledge knowledge, HostIndex host);

}  // namespace cyberdef
