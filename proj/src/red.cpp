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

#include "cyberdef/red.hpp"

#include <algorithm>
#include <array>
#include <climits>

namespace cyberdef {
namespace {

constexpr std::array<std::string_view, kRedActionKindCount> kKindNames = {
    "DiscoverSubnet", "ScanHost", "Exploit", "PrivilegeEscalate", "Impact"};

bool contains(const std::set<std::size_t>& set, std::size_t x) {
  return set.find(x) != set.end();
}

bool is_subset(const std::set<std::size_t>& a, const std::set<std::size_t>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

bool has_foothold(SubnetIndex s, const RedKnowledge& k, const Terrain& t) {
  for (auto h : t.subnet_hosts[s]) {
    if (t.usable[h] && !t.decoy[h] && contains(k.user_sessions, h)) return true;
  }
  return false;
}

std::optional<RedAction> first_legal(std::initializer_list<RedAction> options,
                                     const RedKnowledge& k, const Terrain& t) {
  for (const auto& a : options) {
    if (is_legal(a, k, t)) return a;
  }
  return std::nullopt;
}

std::optional<RedAction> meander(const RedKnowledge& k, const Terrain& t) {
  auto legal = legal_actions(k, t);
  if (legal.empty()) return std::nullopt;
  // Finish every known host before sweeping a new subnet.
  for (auto kind : {RedActionKind::Impact, RedActionKind::PrivilegeEscalate,
                    RedActionKind::Exploit, RedActionKind::ScanHost,
                    RedActionKind::DiscoverSubnet}) {
    for (const auto& a : legal) {
      if (a.kind == kind) return a;
    }
  }
  return std::nullopt;
}

std::optional<RedAction> beeline(const RedKnowledge& k, const Terrain& t) {
  const auto crit = t.critical_host;
  const auto crit_subnet = t.critical_subnet;
  if (auto a = first_legal({{RedActionKind::Impact, crit}}, k, t)) return a;

  auto reach = reachable_subnets(k, t);
  if (reach[crit_subnet]) {
    auto a = first_legal({{RedActionKind::DiscoverSubnet, crit_subnet},
                          {RedActionKind::PrivilegeEscalate, crit},
                          {RedActionKind::Exploit, crit},
                          {RedActionKind::ScanHost, crit}},
                         k, t);
    if (a) return a;
  }

  // Next hop: the reachable subnet without a foothold that is closest to
  // the target over unblocked links; ties go to the lower index.
  auto dist = bfs_distances(t.links, crit_subnet);
  std::vector<SubnetIndex> hops;
  for (SubnetIndex s = 0; s < t.subnet_count(); ++s) {
    if (s != crit_subnet && reach[s] && dist[s] >= 0 && !has_foothold(s, k, t)) {
      hops.push_back(s);
    }
  }
  std::stable_sort(hops.begin(), hops.end(), [&](auto a, auto b) {
    return dist[a] < dist[b];
  });
  for (auto s : hops) {
    if (auto a = first_legal({{RedActionKind::DiscoverSubnet, s}}, k, t)) {
      return a;
    }
    for (auto h : t.subnet_hosts[s]) {
      if (auto a = first_legal({{RedActionKind::Exploit, h},
                                {RedActionKind::ScanHost, h}},
                               k, t)) {
        return a;
      }
    }
  }
  return meander(k, t);
}

}  // namespace

std::string_view to_string(RedActionKind kind) {
  return kKindNames[static_cast<std::size_t>(kind)];
}

std::optional<RedActionKind> parse_red_action_kind(std::string_view name) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == name) return static_cast<RedActionKind>(i);
  }
  return std::nullopt;
}

bool RedKnowledge::chain_holds() const {
  return is_subset(privileged_sessions, user_sessions) &&
         is_subset(user_sessions, scanned_hosts) &&
         is_subset(scanned_hosts, discovered_hosts);
}

Terrain Terrain::from_topology(const NetworkTopology& topology) {
  Terrain t;
  const auto n = topology.subnets().size();
  t.links.resize(n);
  t.subnet_hosts.resize(n);
  for (SubnetIndex s = 0; s < n; ++s) t.links[s] = topology.neighbors(s);
  for (HostIndex h = 0; h < topology.host_count(); ++h) {
    auto s = topology.subnet_of(h);
    t.subnet_hosts[s].push_back(h);
    t.host_subnet.emplace_back(s);
    t.usable.push_back(true);
    t.decoy.push_back(false);
    t.exploitable.push_back(topology.host(h).exploitable());
  }
  t.critical_host = topology.critical_host();
  t.critical_subnet = topology.critical_subnet();
  return t;
}

std::vector<bool> reachable_subnets(const RedKnowledge& k, const Terrain& t) {
  std::vector<bool> reach(t.subnet_count(), false);
  reach[k.entry_subnet] = true;
  for (SubnetIndex s = 0; s < t.subnet_count(); ++s) {
    if (!has_foothold(s, k, t)) continue;
    reach[s] = true;
    for (auto n : t.links[s]) reach[n] = true;
  }
  return reach;
}

bool is_legal(const RedAction& a, const RedKnowledge& k, const Terrain& t) {
  if (a.kind == RedActionKind::DiscoverSubnet) {
    return a.target < t.subnet_count() &&
           !contains(k.discovered_subnets, a.target) &&
           reachable_subnets(k, t)[a.target];
  }
  if (a.target >= t.host_count() || !t.host_subnet[a.target] ||
      !t.usable[a.target]) {
    return false;
  }
  const auto h = a.target;
  // Explicit bool: returning the vector<bool> proxy would dangle.
  auto in_reach = [&]() -> bool {
    return reachable_subnets(k, t)[*t.host_subnet[h]];
  };
  switch (a.kind) {
    case RedActionKind::ScanHost:
      return contains(k.discovered_hosts, h) && !contains(k.scanned_hosts, h) &&
             in_reach();
    case RedActionKind::Exploit:
      return contains(k.scanned_hosts, h) && !contains(k.user_sessions, h) &&
             in_reach();
    case RedActionKind::PrivilegeEscalate:
      return contains(k.user_sessions, h) &&
             !contains(k.privileged_sessions, h);
    case RedActionKind::Impact:
      return h == t.critical_host && contains(k.privileged_sessions, h);
    case RedActionKind::DiscoverSubnet:
      break;
  }
  return false;
}

std::vector<RedAction> legal_actions(const RedKnowledge& k, const Terrain& t) {
  std::vector<RedAction> out;
  const auto reach = reachable_subnets(k, t);
  for (SubnetIndex s = 0; s < t.subnet_count(); ++s) {
    if (reach[s] && !contains(k.discovered_subnets, s)) {
      out.push_back({RedActionKind::DiscoverSubnet, s});
    }
  }
  for (auto kind : {RedActionKind::ScanHost, RedActionKind::Exploit,
                    RedActionKind::PrivilegeEscalate, RedActionKind::Impact}) {
    for (HostIndex h = 0; h < t.host_count(); ++h) {
      if (is_legal({kind, h}, k, t)) out.push_back({kind, h});
    }
  }
  return out;
}

std::optional<RedAction> select_action(RedStrategyKind strategy,
                                       const RedKnowledge& knowledge,
                                       const Terrain& terrain, Rng& rng) {
  switch (strategy) {
    case RedStrategyKind::Beeline:
      return beeline(knowledge, terrain);
    case RedStrategyKind::Meander:
      return meander(knowledge, terrain);
    case RedStrategyKind::RandomWalk: {
      auto legal = legal_actions(knowledge, terrain);
      if (legal.empty()) return std::nullopt;
      return legal[rng.uniform_index(legal.size())];
    }
    case RedStrategyKind::None:
      break;
  }
  return std::nullopt;
}

ActionOutcome resolve_action(const RedAction& a, const Terrain& t,
                             const RedParams& params, Rng& rng) {
  const double roll = rng.uniform01();
  ActionOutcome out;
  switch (a.kind) {
    case RedActionKind::DiscoverSubnet:
      for (auto h : t.subnet_hosts[a.target]) {
        if (t.usable[h]) out.affected.push_back(h);
      }
      out.success = roll < params.discover_success;
      if (out.success) out.discovered = out.affected;
      break;
    case RedActionKind::ScanHost:
      out.affected = {a.target};
      out.success = roll < params.scan_success;
      break;
    case RedActionKind::Exploit:
      out.affected = {a.target};
      out.decoy = t.decoy[a.target];
      out.success =
          out.decoy || (t.exploitable[a.target] && roll < params.exploit_success);
      if (out.success) out.session = a.target;
      break;
    case RedActionKind::PrivilegeEscalate:
      out.affected = {a.target};
      out.decoy = t.decoy[a.target];
      out.success = roll < params.escalate_success;
      if (out.success) {
        out.session = a.target;
        out.privileged = true;
      }
      break;
    case RedActionKind::Impact:
      out.affected = {a.target};
      out.success = true;
      out.impact = true;
      break;
  }
  return out;
}

RedKnowledge update_knowledge(RedKnowledge k, const RedAction& a,
                              const ActionOutcome& outcome) {
  if (!outcome.success) return k;
  switch (a.kind) {
    case RedActionKind::DiscoverSubnet:
      k.discovered_subnets.insert(a.target);
      k.discovered_hosts.insert(outcome.discovered.begin(),
                                outcome.discovered.end());
      break;
    case RedActionKind::ScanHost:
      k.scanned_hosts.insert(a.target);
      break;
    case RedActionKind::Exploit:
      k.user_sessions.insert(a.target);
      break;
    case RedActionKind::PrivilegeEscalate:
      k.privileged_sessions.insert(a.target);
      break;
    case RedActionKind::Impact:
      break;
  }
  return k;
}

RedKnowledge evict(RedKnowledge k, HostIndex host) {
  k.user_sessions.erase(host);
  k.privileged_sessions.erase(host);
  return k;
}

}  // namespace cyberdef
