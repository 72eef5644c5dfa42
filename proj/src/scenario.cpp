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

#include "cyberdef/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <queue>
#include <set>
#include <sstream>

#include "cyberdef/rng.hpp"

namespace cyberdef {

using nlohmann::json;

namespace {

constexpr std::array<Service, 8> kServices = {{
    {"dns", false},
    {"http", true},
    {"https", false},
    {"mssql", true},
    {"rdp", true},
    {"smb", true},
    {"smtp", false},
    {"ssh", true},
}};

// UserHosts carry sensitive data with this probability; servers are fixed
// (EnterpriseServer yes, OperationalServer no).
constexpr double kUserConfidentialRate = 0.25;

constexpr std::array<std::string_view, 11> kScenarioKeys = {
    "subnet_count",        "hosts_per_subnet",  "tier_distribution",
    "horizon",             "red_strategy",      "red_params",
    "detector_config_ref", "reward_config_ref", "encoding",
    "max_decoys",          "seed"};

constexpr std::array<std::string_view, 4> kRedParamKeys = {
    "discover_success", "scan_success", "exploit_success",
    "escalate_success"};

[[noreturn]] void parse_error(const std::string& field,
                              const std::string& message) {
  throw ConfigError(ConfigError::Kind::Parse, field, field + ": " + message);
}

template <std::size_t N>
void reject_unknown_keys(const json& obj,
                         const std::array<std::string_view, N>& known,
                         const std::string& prefix) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      parse_error(prefix + key, "unknown key");
    }
  }
}

int read_int(const json& v, const std::string& field) {
  if (!v.is_number_integer()) parse_error(field, "expected an integer");
  return v.get<int>();
}

double read_number(const json& v, const std::string& field) {
  if (!v.is_number()) parse_error(field, "expected a number");
  return v.get<double>();
}

std::string read_string(const json& v, const std::string& field) {
  if (!v.is_string()) parse_error(field, "expected a string");
  return v.get<std::string>();
}

bool is_probability(double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; }

}  // namespace

const std::array<Service, 8>& service_catalog() { return kServices; }

bool Host::exploitable() const {
  return std::any_of(services.begin(), services.end(), [](const auto& name) {
    return std::any_of(kServices.begin(), kServices.end(), [&](const auto& s) {
      return s.exploitable && s.name == name;
    });
  });
}

std::vector<Violation> validate(const ScenarioConfig& config) {
  std::vector<Violation> out;
  if (config.subnet_count < 1) {
    out.push_back({"subnet_count", "must be >= 1"});
  }
  const auto& range = config.hosts_per_subnet;
  if (range.lo < 1) {
    out.push_back({"hosts_per_subnet", "lower bound must be >= 1"});
  } else if (range.lo > range.hi) {
    out.push_back({"hosts_per_subnet", "lower bound exceeds upper bound"});
  }
  const auto& w = config.tier_distribution.weight;
  if (std::any_of(w.begin(), w.end(),
                  [](double x) { return !std::isfinite(x) || x < 0.0; })) {
    out.push_back({"tier_distribution", "weights must be finite and >= 0"});
  } else if (std::all_of(w.begin(), w.end(), [](double x) { return x == 0.0; })) {
    out.push_back({"tier_distribution", "weights must not all be zero"});
  }
  if (config.horizon < 1) out.push_back({"horizon", "must be >= 1"});
  const auto& rp = config.red_params;
  for (double p : {rp.discover_success, rp.scan_success, rp.exploit_success,
                   rp.escalate_success}) {
    if (!is_probability(p)) {
      out.push_back({"red_params", "success probabilities must lie in [0, 1]"});
      break;
    }
  }
  if (config.detector_config_ref.empty()) {
    out.push_back({"detector_config_ref", "must not be empty"});
  }
  if (config.reward_config_ref.empty()) {
    out.push_back({"reward_config_ref", "must not be empty"});
  }
  if (config.max_decoys < 0) out.push_back({"max_decoys", "must be >= 0"});
  return out;
}

ScenarioConfig scenario_from_json(const json& doc) {
  if (!doc.is_object()) parse_error("<root>", "expected a JSON object");
  reject_unknown_keys(doc, kScenarioKeys, "");

  ScenarioConfig c;
  if (!doc.contains("subnet_count")) parse_error("subnet_count", "missing");
  c.subnet_count = read_int(doc["subnet_count"], "subnet_count");

  if (!doc.contains("hosts_per_subnet")) {
    parse_error("hosts_per_subnet", "missing");
  }
  const auto& range = doc["hosts_per_subnet"];
  if (!range.is_array() || range.size() != 2) {
    parse_error("hosts_per_subnet", "expected [lo, hi]");
  }
  c.hosts_per_subnet = {read_int(range[0], "hosts_per_subnet"),
                        read_int(range[1], "hosts_per_subnet")};

  if (doc.contains("tier_distribution")) {
    const auto& td = doc["tier_distribution"];
    if (!td.is_object()) parse_error("tier_distribution", "expected an object");
    c.tier_distribution.weight = {0.0, 0.0, 0.0};
    for (const auto& [key, value] : td.items()) {
      auto tier = parse_tier(key);
      if (!tier) parse_error("tier_distribution." + key, "unknown tier");
      c.tier_distribution.weight[static_cast<std::size_t>(*tier)] =
          read_number(value, "tier_distribution." + key);
    }
  }
  if (doc.contains("horizon")) c.horizon = read_int(doc["horizon"], "horizon");
  if (doc.contains("red_strategy")) {
    auto name = read_string(doc["red_strategy"], "red_strategy");
    auto kind = parse_red_strategy(name);
    if (!kind) parse_error("red_strategy", "unknown strategy '" + name + "'");
    c.red_strategy = *kind;
  }
  if (doc.contains("red_params")) {
    const auto& rp = doc["red_params"];
    if (!rp.is_object()) parse_error("red_params", "expected an object");
    reject_unknown_keys(rp, kRedParamKeys, "red_params.");
    auto read = [&](const char* key, double& slot) {
      if (rp.contains(key)) {
        slot = read_number(rp[key], std::string("red_params.") + key);
      }
    };
    read("discover_success", c.red_params.discover_success);
    read("scan_success", c.red_params.scan_success);
    read("exploit_success", c.red_params.exploit_success);
    read("escalate_success", c.red_params.escalate_success);
  }
  if (doc.contains("detector_config_ref")) {
    c.detector_config_ref =
        read_string(doc["detector_config_ref"], "detector_config_ref");
  }
  if (doc.contains("reward_config_ref")) {
    c.reward_config_ref =
        read_string(doc["reward_config_ref"], "reward_config_ref");
  }
  if (doc.contains("encoding")) {
    auto name = read_string(doc["encoding"], "encoding");
    auto enc = parse_encoding(name);
    if (!enc) parse_error("encoding", "expected 'baseline' or 'detector'");
    c.encoding = *enc;
  }
  if (doc.contains("max_decoys")) {
    c.max_decoys = read_int(doc["max_decoys"], "max_decoys");
  }
  if (doc.contains("seed")) {
    const auto& s = doc["seed"];
    if (!s.is_number_unsigned()) parse_error("seed", "expected an unsigned integer");
    c.seed = s.get<std::uint64_t>();
  }

  auto violations = validate(c);
  if (!violations.empty()) {
    std::ostringstream msg;
    for (std::size_t i = 0; i < violations.size(); ++i) {
      if (i) msg << "; ";
      msg << violations[i].field << ": " << violations[i].message;
    }
    throw ConfigError(ConfigError::Kind::Invariant, violations.front().field,
                      msg.str());
  }
  return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(ConfigError::Kind::MissingFile, "",
                      "cannot open scenario file " + path.string());
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(ConfigError::Kind::Parse, "",
                      path.string() + ": " + e.what());
  }
  return scenario_from_json(doc);
}

json to_json(const ScenarioConfig& c) {
  json td = json::object();
  for (std::size_t t = 0; t < kTierCount; ++t) {
    td[std::string(to_string(static_cast<Tier>(t)))] =
        c.tier_distribution.weight[t];
  }
  return json{
      {"subnet_count", c.subnet_count},
      {"hosts_per_subnet", {c.hosts_per_subnet.lo, c.hosts_per_subnet.hi}},
      {"tier_distribution", td},
      {"horizon", c.horizon},
      {"red_strategy", std::string(to_string(c.red_strategy))},
      {"red_params",
       {{"discover_success", c.red_params.discover_success},
        {"scan_success", c.red_params.scan_success},
        {"exploit_success", c.red_params.exploit_success},
        {"escalate_success", c.red_params.escalate_success}}},
      {"detector_config_ref", c.detector_config_ref},
      {"reward_config_ref", c.reward_config_ref},
      {"encoding", std::string(to_string(c.encoding))},
      {"max_decoys", c.max_decoys},
      {"seed", c.seed},
  };
}

NetworkTopology::NetworkTopology(
    std::vector<Subnet> subnets,
    std::vector<std::pair<SubnetIndex, SubnetIndex>> links,
    HostIndex critical_host)
    : subnets_(std::move(subnets)),
      links_(std::move(links)),
      adjacency_(subnets_.size()),
      critical_(critical_host) {
  for (auto& [a, b] : links_) {
    if (a > b) std::swap(a, b);
  }
  std::sort(links_.begin(), links_.end());
  links_.erase(std::unique(links_.begin(), links_.end()), links_.end());
  for (auto [a, b] : links_) {
    if (a == b || b >= subnets_.size()) {
      throw ContractError("topology link out of range");
    }
    adjacency_[a].push_back(b);
    adjacency_[b].push_back(a);
  }
  for (auto& adj : adjacency_) std::sort(adj.begin(), adj.end());
  for (SubnetIndex s = 0; s < subnets_.size(); ++s) {
    if (subnets_[s].hosts.empty()) throw ContractError("empty subnet");
    for (std::size_t i = 0; i < subnets_[s].hosts.size(); ++i) {
      host_refs_.emplace_back(s, i);
    }
  }
  if (critical_ >= host_refs_.size()) {
    throw ContractError("critical host out of range");
  }
}

bool NetworkTopology::linked(SubnetIndex a, SubnetIndex b) const {
  const auto& adj = adjacency_[a];
  return std::binary_search(adj.begin(), adj.end(), b);
}

const Host& NetworkTopology::host(HostIndex h) const {
  auto [s, i] = host_refs_.at(h);
  return subnets_[s].hosts[i];
}

std::optional<HostIndex> NetworkTopology::find_host(std::string_view id) const {
  for (HostIndex h = 0; h < host_refs_.size(); ++h) {
    if (host(h).id == id) return h;
  }
  return std::nullopt;
}

std::optional<SubnetIndex> NetworkTopology::find_subnet(
    std::string_view id) const {
  for (SubnetIndex s = 0; s < subnets_.size(); ++s) {
    if (subnets_[s].id == id) return s;
  }
  return std::nullopt;
}

json NetworkTopology::to_json() const {
  json subnets = json::array();
  for (const auto& subnet : subnets_) {
    json hosts = json::array();
    for (const auto& h : subnet.hosts) {
      hosts.push_back({{"id", h.id},
                       {"tier", std::string(cyberdef::to_string(h.tier))},
                       {"services", h.services},
                       {"confidential_data", h.confidential_data}});
    }
    subnets.push_back({{"id", subnet.id}, {"hosts", std::move(hosts)}});
  }
  json reach = json::array();
  for (auto [a, b] : links_) {
    reach.push_back({subnets_[a].id, subnets_[b].id});
  }
  return json{{"subnets", std::move(subnets)},
              {"reachability", std::move(reach)},
              {"critical_host", host(critical_).id}};
}

std::vector<int> bfs_distances(
    const std::vector<std::vector<SubnetIndex>>& adjacency, SubnetIndex from) {
  std::vector<int> dist(adjacency.size(), -1);
  std::queue<SubnetIndex> frontier;
  dist[from] = 0;
  frontier.push(from);
  while (!frontier.empty()) {
    auto s = frontier.front();
    frontier.pop();
    for (auto t : adjacency[s]) {
      if (dist[t] < 0) {
        dist[t] = dist[s] + 1;
        frontier.push(t);
      }
    }
  }
  return dist;
}

namespace {

Tier draw_tier(const TierWeights& weights, Rng& rng) {
  double total = 0.0;
  for (double w : weights.weight) total += w;
  double u = rng.uniform01() * total;
  for (std::size_t t = 0; t < kTierCount; ++t) {
    if (u < weights.weight[t]) return static_cast<Tier>(t);
    u -= weights.weight[t];
  }
  // Rounding fell off the end; take the last tier with weight.
  for (std::size_t t = kTierCount; t-- > 0;) {
    if (weights.weight[t] > 0.0) return static_cast<Tier>(t);
  }
  return Tier::UserHost;
}

std::vector<std::string> draw_services(Rng& rng) {
  std::vector<std::string_view> exploitable;
  for (const auto& s : kServices) {
    if (s.exploitable) exploitable.push_back(s.name);
  }
  std::set<std::string> chosen;
  chosen.emplace(exploitable[rng.uniform_index(exploitable.size())]);
  const auto extra = rng.uniform_index(3);
  for (std::uint64_t i = 0; i < extra; ++i) {
    chosen.emplace(kServices[rng.uniform_index(kServices.size())].name);
  }
  return {chosen.begin(), chosen.end()};
}

}  // namespace

NetworkTopology generate_topology(const ScenarioConfig& config,
                                  std::uint64_t seed) {
  auto violations = validate(config);
  if (!violations.empty()) {
    throw ConfigError(ConfigError::Kind::Invariant, violations.front().field,
                      violations.front().field + ": " +
                          violations.front().message);
  }
  Rng rng(derive_seed(seed, "topo"));
  const auto n = static_cast<std::size_t>(config.subnet_count);
  const auto& range = config.hosts_per_subnet;

  std::vector<std::size_t> sizes(n);
  for (auto& size : sizes) {
    size = static_cast<std::size_t>(range.lo) +
           rng.uniform_index(static_cast<std::uint64_t>(range.hi - range.lo + 1));
  }

  std::vector<std::pair<SubnetIndex, SubnetIndex>> links;
  std::vector<std::vector<SubnetIndex>> tree(n);
  for (SubnetIndex s = 1; s < n; ++s) {
    auto parent = static_cast<SubnetIndex>(rng.uniform_index(s));
    links.emplace_back(parent, s);
    tree[parent].push_back(s);
    tree[s].push_back(parent);
  }
  std::vector<std::pair<SubnetIndex, SubnetIndex>> candidates;
  for (SubnetIndex a = 0; a < n; ++a) {
    for (SubnetIndex b = a + 1; b < n; ++b) {
      if (std::find(links.begin(), links.end(), std::pair{a, b}) ==
          links.end()) {
        candidates.emplace_back(a, b);
      }
    }
  }
  for (std::size_t k = n / 4; k > 0 && !candidates.empty(); --k) {
    auto pick = rng.uniform_index(candidates.size());
    links.push_back(candidates[pick]);
    candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(pick));
  }

  auto dist = bfs_distances(tree, 0);
  SubnetIndex critical_subnet = 0;
  for (SubnetIndex s = 1; s < n; ++s) {
    if (dist[s] > dist[critical_subnet]) critical_subnet = s;
  }

  std::vector<Subnet> subnets(n);
  HostIndex critical = 0;
  HostIndex next_index = 0;
  for (SubnetIndex s = 0; s < n; ++s) {
    subnets[s].id = "s" + std::to_string(s);
    for (std::size_t i = 0; i < sizes[s]; ++i, ++next_index) {
      Host h;
      h.id = subnets[s].id + "h" + std::to_string(i);
      h.tier = draw_tier(config.tier_distribution, rng);
      h.services = draw_services(rng);
      bool user_confidential = rng.bernoulli(kUserConfidentialRate);
      h.confidential_data = h.tier == Tier::EnterpriseServer ||
                            (h.tier == Tier::UserHost && user_confidential);
      if (s == critical_subnet && i + 1 == sizes[s]) {
        h.tier = Tier::OperationalServer;
        h.confidential_data = false;
        critical = next_index;
      }
      subnets[s].hosts.push_back(std::move(h));
    }
  }
  return NetworkTopology(std::move(subnets), std::move(links), critical);
}

}  // namespace cyberdef
