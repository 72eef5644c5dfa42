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
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "cyberdef/common.hpp"

namespace cyberdef {

struct HostRange {
  int lo = 3;
  int hi = 5;
};

// Relative draw weights for host tiers, indexed by Tier.
struct TierWeights {
  std::array<double, kTierCount> weight = {0.6, 0.3, 0.1};
};

// Success probabilities for red actions, overridable under "red_params".
struct RedParams {
  double discover_success = 1.0;
  double scan_success = 1.0;
  double exploit_success = 0.9;
  double escalate_success = 0.9;
};

// Declarative game setup. Every field except subnet_count and
// hosts_per_subnet has a default; see README for the table.
struct ScenarioConfig {
  int subnet_count = 1;
  HostRange hosts_per_subnet;
  TierWeights tier_distribution;
  int horizon = 100;
  RedStrategyKind red_strategy = RedStrategyKind::Beeline;
  RedParams red_params;
  std::string detector_config_ref = "perfect";
  std::string reward_config_ref = "default";
  Encoding encoding = Encoding::Detector;
  int max_decoys = 0;
  std::uint64_t seed = 0;
};

struct Violation {
  std::string field;
  std::string message;
  friend bool operator==(const Violation&, const Violation&) = default;
};

// All invariant violations, in field declaration order. Empty iff valid.
std::vector<Violation> validate(const ScenarioConfig& config);

// Parses and validates a scenario file. Throws ConfigError with kind
// MissingFile, Parse (malformed JSON, wrong types, unknown keys) or
// Invariant (the first violation's field is reported).
ScenarioConfig load_scenario(const std::filesystem::path& path);
ScenarioConfig scenario_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const ScenarioConfig& config);

struct Service {
  std::string_view name;
  bool exploitable;
};

// Fixed catalog hosts draw their services from.
const std::array<Service, 8>& service_catalog();

struct Host {
  std::string id;
  Tier tier = Tier::UserHost;
  std::vector<std::string> services;  // sorted
  bool confidential_data = false;

  bool exploitable() const;
};

struct Subnet {
  std::string id;
  std::vector<Host> hosts;
};

class NetworkTopology {
 public:
  NetworkTopology(std::vector<Subnet> subnets,
                  std::vector<std::pair<SubnetIndex, SubnetIndex>> links,
                  HostIndex critical_host);

  const std::vector<Subnet>& subnets() const { return subnets_; }
  // Undirected subnet links, each stored once as (lo, hi), sorted.
  const std::vector<std::pair<SubnetIndex, SubnetIndex>>& links() const {
    return links_;
  }
  const std::vector<SubnetIndex>& neighbors(SubnetIndex s) const {
    return adjacency_[s];
  }
  bool linked(SubnetIndex a, SubnetIndex b) const;

  // Hosts are numbered subnet by subnet in declaration order.
  std::size_t host_count() const { return host_refs_.size(); }
  const Host& host(HostIndex h) const;
  SubnetIndex subnet_of(HostIndex h) const { return host_refs_[h].first; }
  std::optional<HostIndex> find_host(std::string_view id) const;
  std::optional<SubnetIndex> find_subnet(std::string_view id) const;

  HostIndex critical_host() const { return critical_; }
  SubnetIndex critical_subnet() const { return subnet_of(critical_); }

  // Canonical JSON (sorted keys); dump() of it is the byte form used for
  // determinism checks.
  nlohmann::json to_json() const;

 private:
  std::vector<Subnet> subnets_;
  std::vector<std::pair<SubnetIndex, SubnetIndex>> links_;
  std::vector<std::vector<SubnetIndex>> adjacency_;
  std::vector<std::pair<SubnetIndex, std::size_t>> host_refs_;
  HostIndex critical_;
};

// Seeded topology generator. A random tree over subnets plus
// subnet_count / 4 extra links; the critical OperationalServer is the last
// host of the subnet farthest (in tree hops) from subnet 0, which is red's
// entry point. Throws ConfigError(Invariant) for an invalid config.
NetworkTopology generate_topology(const ScenarioConfig& config,
                                  std::uint64_t seed);

// Hop distances from `from` over the given adjacency; unreachable = -1.
std::vector<int> bfs_distances(
    const std::vector<std::vector<SubnetIndex>>& adjacency, SubnetIndex from);

}  // namespace cyberdef
