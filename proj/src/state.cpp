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

#include "cyberdef/state.hpp"

#include <array>

namespace cyberdef {

using nlohmann::json;

World::World(NetworkTopology topology, std::size_t max_decoys)
    : topology_(std::move(topology)), max_decoys_(max_decoys) {
  for (HostIndex h = 0; h < topology_.host_count(); ++h) {
    const auto& host = topology_.host(h);
    hosts_.push_back({host.id, host.tier, host.confidential_data,
                      host.exploitable(), false});
  }
  for (std::size_t d = 0; d < max_decoys_; ++d) {
    hosts_.push_back(
        {"decoy" + std::to_string(d), Tier::UserHost, false, true, true});
  }
}

std::optional<HostIndex> World::find_host(std::string_view id) const {
  for (HostIndex h = 0; h < hosts_.size(); ++h) {
    if (hosts_[h].id == id) return h;
  }
  return std::nullopt;
}

std::string_view to_string(HostCompromise c) {
  static constexpr std::array<std::string_view, 3> kNames = {
      "Clean", "UserLevel", "Privileged"};
  return kNames[static_cast<std::size_t>(c)];
}

RngStreams make_streams(std::uint64_t scenario_seed, std::uint64_t episode_seed) {
  const auto base = derive_seed(scenario_seed, episode_seed);
  return {Rng(derive_seed(base, "red")), Rng(derive_seed(base, "detect")),
          Rng(derive_seed(base, "fp")), Rng(derive_seed(scenario_seed, "topo"))};
}

GameState initial_state(const World& world, std::uint64_t scenario_seed,
                        std::uint64_t episode_seed) {
  GameState state;
  state.hosts.resize(world.host_count());
  const auto& topo = world.topology();
  for (HostIndex h = 0; h < topo.host_count(); ++h) {
    state.hosts[h].subnet = topo.subnet_of(h);
  }
  state.red_knowledge.entry_subnet = 0;
  state.rng_streams = make_streams(scenario_seed, episode_seed);
  return state;
}

Terrain make_terrain(const World& world, const GameState& state) {
  Terrain t;
  const auto n = world.subnet_count();
  const auto& topo = world.topology();
  t.links.resize(n);
  t.subnet_hosts.resize(n);
  for (SubnetIndex s = 0; s < n; ++s) {
    for (auto other : topo.neighbors(s)) {
      if (!state.is_blocked(s, other)) t.links[s].push_back(other);
    }
  }
  for (HostIndex h = 0; h < world.host_count(); ++h) {
    const auto& hs = state.hosts[h];
    t.host_subnet.push_back(hs.subnet);
    if (hs.subnet) t.subnet_hosts[*hs.subnet].push_back(h);
    t.usable.push_back(hs.live() && !hs.offline());
    t.decoy.push_back(world.host(h).decoy);
    t.exploitable.push_back(world.host(h).exploitable);
  }
  t.critical_host = world.critical_host();
  t.critical_subnet = topo.critical_subnet();
  return t;
}

json to_json(const GameState& state, const World& world) {
  auto ids = [&](const std::set<HostIndex>& set) {
    json out = json::array();
    for (auto h : set) out.push_back(world.host(h).id);
    return out;
  };
  const auto& subnets = world.topology().subnets();
  json hosts = json::object();
  for (HostIndex h = 0; h < state.hosts.size(); ++h) {
    const auto& hs = state.hosts[h];
    hosts[world.host(h).id] = {
        {"subnet", hs.subnet ? json(subnets[*hs.subnet].id) : json(nullptr)},
        {"compromise", std::string(to_string(hs.compromise))},
        {"isolated", hs.isolated},
        {"restore_downtime_remaining", hs.restore_downtime_remaining},
        {"is_decoy", world.host(h).decoy}};
  }
  json blocked = json::array();
  for (auto [a, b] : state.blocked_pairs) {
    blocked.push_back({subnets[a].id, subnets[b].id});
  }
  const auto& k = state.red_knowledge;
  json discovered_subnets = json::array();
  for (auto s : k.discovered_subnets) discovered_subnets.push_back(subnets[s].id);
  auto stream = [](const Rng& r) {
    return json{{"seed", r.seed()}, {"draws", r.draws()}};
  };
  const auto& rs = state.rng_streams;
  return json{
      {"turn", state.turn},
      {"hosts", std::move(hosts)},
      {"blocked_pairs", std::move(blocked)},
      {"decoys_deployed", state.decoys_deployed},
      {"red_knowledge",
       {{"entry_subnet", subnets[k.entry_subnet].id},
        {"discovered_subnets", std::move(discovered_subnets)},
        {"discovered_hosts", ids(k.discovered_hosts)},
        {"scanned_hosts", ids(k.scanned_hosts)},
        {"user_sessions", ids(k.user_sessions)},
        {"privileged_sessions", ids(k.privileged_sessions)}}},
      {"rng_streams",
       {{"red", stream(rs.red)},
        {"detect", stream(rs.detect)},
        {"fp", stream(rs.fp)},
        {"topo", stream(rs.topo)}}},
  };
}

namespace {

class Digest {
 public:
  void add(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      hash_ ^= static_cast<std::uint8_t>(v >> (8 * i));
      hash_ *= kFnvPrime;
    }
  }
  void add_set(const std::set<std::size_t>& set) {
    add(set.size());
    for (auto x : set) add(x);
  }
  std::uint64_t value() const { return hash_; }

 private:
  std::uint64_t hash_ = kFnvOffset;
};

}  // namespace

std::uint64_t state_digest(const GameState& state) {
  Digest d;
  d.add(static_cast<std::uint64_t>(state.turn));
  d.add(state.hosts.size());
  for (const auto& hs : state.hosts) {
    d.add(hs.subnet ? *hs.subnet + 1 : 0);
    d.add(static_cast<std::uint64_t>(hs.compromise));
    d.add(hs.isolated);
    d.add(static_cast<std::uint64_t>(hs.restore_downtime_remaining));
  }
  d.add(state.blocked_pairs.size());
  for (auto [a, b] : state.blocked_pairs) {
    d.add(a);
    d.add(b);
  }
  d.add(state.decoys_deployed);
  const auto& k = state.red_knowledge;
  d.add(k.entry_subnet);
  d.add_set(k.discovered_subnets);
  d.add_set(k.discovered_hosts);
  d.add_set(k.scanned_hosts);
  d.add_set(k.user_sessions);
  d.add_set(k.privileged_sessions);
  for (const auto* r : {&state.rng_streams.red, &state.rng_streams.detect,
                        &state.rng_streams.fp, &state.rng_streams.topo}) {
    d.add(r->seed());
    d.add(r->draws());
  }
  return d.value();
}

}  // namespace cyberdef
