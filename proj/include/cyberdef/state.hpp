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
#include <utility>
#include <vector>

#include "json.hpp"

#include "cyberdef/common.hpp"
#include "cyberdef/red.hpp"
#include "cyberdef/rng.hpp"
#include "cyberdef/scenario.hpp"

namespace cyberdef {

// Static facts about every host slot the engine tracks: the topology's hosts
// in topology order, followed by max_decoys decoy slots ("decoy0", ...).
struct HostInfo {
  std::string id;
  Tier tier = Tier::UserHost;
  bool confidential_data = false;
  bool exploitable = true;
  bool decoy = false;
};

class World {
 public:
  World(NetworkTopology topology, std::size_t max_decoys);

  const NetworkTopology& topology() const { return topology_; }
  const std::vector<HostInfo>& hosts() const { return hosts_; }
  const HostInfo& host(HostIndex h) const { return hosts_.at(h); }
  std::size_t host_count() const { return hosts_.size(); }
  std::size_t subnet_count() const { return topology_.subnets().size(); }
  std::size_t max_decoys() const { return max_decoys_; }
  HostIndex first_decoy() const { return topology_.host_count(); }
  HostIndex critical_host() const { return topology_.critical_host(); }

  std::optional<HostIndex> find_host(std::string_view id) const;

 private:
  NetworkTopology topology_;
  std::size_t max_decoys_;
  std::vector<HostInfo> hosts_;
};

enum class HostCompromise : std::uint8_t { Clean, UserLevel, Privileged };
std::string_view to_string(HostCompromise c);

struct HostState {
  // Topology hosts always have a subnet; a decoy slot gets one when blue
  // deploys it.
  std::optional<SubnetIndex> subnet;
  HostCompromise compromise = HostCompromise::Clean;
  bool isolated = false;
  int restore_downtime_remaining = 0;

  bool live() const { return subnet.has_value(); }
  bool offline() const { return isolated || restore_downtime_remaining > 0; }

  friend bool operator==(const HostState&, const HostState&) = default;
};

struct RngStreams {
  Rng red;
  Rng detect;
  Rng fp;
  Rng topo;
  friend bool operator==(const RngStreams&, const RngStreams&) = default;
};

// Stream seeds for one episode:
//   episode_base = derive_seed(scenario_seed, episode_seed)
//   red/detect/fp = derive_seed(episode_base, "<name>")
//   topo          = derive_seed(scenario_seed, "topo")
// topo depends on the scenario only, so every episode of a scenario plays
// on the same network.
RngStreams make_streams(std::uint64_t scenario_seed, std::uint64_t episode_seed);

// Ground truth.
struct GameState {
  int turn = 0;
  std::vector<HostState> hosts;
  std::set<std::pair<SubnetIndex, SubnetIndex>> blocked_pairs;  // (lo, hi)
  std::size_t decoys_deployed = 0;
  RedKnowledge red_knowledge;
  RngStreams rng_streams;

  bool is_blocked(SubnetIndex a, SubnetIndex b) const {
    return blocked_pairs.count({std::min(a, b), std::max(a, b)}) != 0;
  }
  friend bool operator==(const GameState&, const GameState&) = default;
};

GameState initial_state(const World& world, std::uint64_t scenario_seed,
                        std::uint64_t episode_seed);

// What red may touch under the current blue constraints.
Terrain make_terrain(const World& world, const GameState& state);

// Canonical JSON of the full state (host ids, sorted keys).
nlohmann::json to_json(const GameState& state, const World& world);

// FNV-1a over a compact byte encoding of the state. Cheap enough to record
// every turn.
std::uint64_t state_digest(const GameState& state);

}  // namespace cyberdef
