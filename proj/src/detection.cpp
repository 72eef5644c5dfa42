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

#include "cyberdef/detection.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>

namespace cyberdef {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 5> kComponents = {
    "user-account-creation", "process-creation", "network-session",
    "network-traffic-flow", "file-modification"};

constexpr std::string_view kUserAccount = kComponents[0];
constexpr std::string_view kProcess = kComponents[1];
constexpr std::string_view kSession = kComponents[2];
constexpr std::string_view kFlow = kComponents[3];
constexpr std::string_view kFile = kComponents[4];

constexpr std::array<std::string_view, 1> kDiscoverTouches = {kFlow};
constexpr std::array<std::string_view, 2> kScanTouches = {kFlow, kSession};
constexpr std::array<std::string_view, 2> kExploitTouches = {kProcess, kSession};
constexpr std::array<std::string_view, 2> kEscalateTouches = {kUserAccount,
                                                              kProcess};
constexpr std::array<std::string_view, 2> kImpactTouches = {kFile, kProcess};

constexpr double kRealisticFalsePositiveRate = 0.01;

constexpr std::array<std::string_view, 3> kActivityNames = {"None", "Scan",
                                                            "Exploit"};
constexpr std::array<std::string_view, 4> kCompromiseNames = {
    "No", "Unknown", "User", "Privileged"};

bool touches(RedActionKind kind, std::string_view component) {
  auto t = touched_components(kind);
  return std::find(t.begin(), t.end(), component) != t.end();
}

[[noreturn]] void invariant(const std::string& field, const std::string& msg) {
  throw ConfigError(ConfigError::Kind::Invariant, field, field + ": " + msg);
}

[[noreturn]] void parse_error(const std::string& field, const std::string& msg) {
  throw ConfigError(ConfigError::Kind::Parse, field, field + ": " + msg);
}

bool is_probability(double p) {
  return std::isfinite(p) && p >= 0.0 && p <= 1.0;
}

DetectorConfig uniform_config(std::string name, double p, double fp) {
  DetectorConfig config{std::move(name), {}};
  for (auto component : kComponents) {
    Detector d;
    d.component = std::string(component);
    d.false_positive_rate = fp;
    for (std::size_t k = 0; k < kRedActionKindCount; ++k) {
      if (touches(static_cast<RedActionKind>(k), component)) {
        d.detect_prob[k] = p;
      }
    }
    config.detectors.push_back(std::move(d));
  }
  return config;
}

}  // namespace

std::span<const std::string_view> data_components() { return kComponents; }

std::span<const std::string_view> touched_components(RedActionKind kind) {
  switch (kind) {
    case RedActionKind::DiscoverSubnet: return kDiscoverTouches;
    case RedActionKind::ScanHost: return kScanTouches;
    case RedActionKind::Exploit: return kExploitTouches;
    case RedActionKind::PrivilegeEscalate: return kEscalateTouches;
    case RedActionKind::Impact: return kImpactTouches;
  }
  return {};
}

void check_detector_config(const DetectorConfig& config) {
  for (std::size_t i = 0; i < config.detectors.size(); ++i) {
    const auto& d = config.detectors[i];
    const auto field = "detectors[" + std::to_string(i) + "]";
    if (std::find(kComponents.begin(), kComponents.end(), d.component) ==
        kComponents.end()) {
      invariant(field + ".component", "unknown data component '" + d.component + "'");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (config.detectors[j].component == d.component) {
        invariant(field + ".component", "duplicate detector for " + d.component);
      }
    }
    for (std::size_t k = 0; k < kRedActionKindCount; ++k) {
      const auto kind = static_cast<RedActionKind>(k);
      const auto prob_field =
          field + ".detect_prob." + std::string(to_string(kind));
      const auto& p = d.detect_prob[k];
      if (touches(kind, d.component) && !p) {
        invariant(prob_field, "missing; this action touches " + d.component);
      }
      if (!touches(kind, d.component) && p) {
        invariant(prob_field, "this action does not touch " + d.component);
      }
      if (p && !is_probability(*p)) invariant(prob_field, "must lie in [0, 1]");
    }
    if (!is_probability(d.false_positive_rate)) {
      invariant(field + ".false_positive_rate", "must lie in [0, 1]");
    }
  }
}

DetectorConfig detector_config_from_json(const json& doc) {
  if (!doc.is_object()) parse_error("<root>", "expected a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (key != "name" && key != "detectors") parse_error(key, "unknown key");
  }
  DetectorConfig config;
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) parse_error("name", "expected a string");
    config.name = doc["name"].get<std::string>();
  }
  if (!doc.contains("detectors") || !doc["detectors"].is_array()) {
    parse_error("detectors", "expected an array");
  }
  for (std::size_t i = 0; i < doc["detectors"].size(); ++i) {
    const auto& entry = doc["detectors"][i];
    const auto field = "detectors[" + std::to_string(i) + "]";
    if (!entry.is_object()) parse_error(field, "expected an object");
    Detector d;
    for (const auto& [key, value] : entry.items()) {
      if (key == "component") {
        if (!value.is_string()) parse_error(field + ".component", "expected a string");
        d.component = value.get<std::string>();
      } else if (key == "false_positive_rate") {
        if (!value.is_number()) parse_error(field + "." + key, "expected a number");
        d.false_positive_rate = value.get<double>();
      } else if (key == "detect_prob") {
        if (!value.is_object()) parse_error(field + "." + key, "expected an object");
        for (const auto& [kind_name, p] : value.items()) {
          auto kind = parse_red_action_kind(kind_name);
          const auto pf = field + ".detect_prob." + kind_name;
          if (!kind) parse_error(pf, "unknown red action kind");
          if (!p.is_number()) parse_error(pf, "expected a number");
          d.detect_prob[static_cast<std::size_t>(*kind)] = p.get<double>();
        }
      } else {
        parse_error(field + "." + key, "unknown key");
      }
    }
    config.detectors.push_back(std::move(d));
  }
  check_detector_config(config);
  return config;
}

json to_json(const DetectorConfig& config) {
  json detectors = json::array();
  for (const auto& d : config.detectors) {
    json probs = json::object();
    for (std::size_t k = 0; k < kRedActionKindCount; ++k) {
      if (d.detect_prob[k]) {
        probs[std::string(to_string(static_cast<RedActionKind>(k)))] =
            *d.detect_prob[k];
      }
    }
    detectors.push_back({{"component", d.component},
                         {"detect_prob", std::move(probs)},
                         {"false_positive_rate", d.false_positive_rate}});
  }
  return json{{"name", config.name}, {"detectors", std::move(detectors)}};
}

std::vector<std::string> detector_preset_names() {
  return {"perfect", "realistic", "uniform:<p>"};
}

DetectorConfig detector_preset(std::string_view name) {
  if (name == "perfect") return uniform_config("perfect", 1.0, 0.0);
  if (name == "realistic") {
    auto config = uniform_config("realistic", 0.0, kRealisticFalsePositiveRate);
    const std::array<double, 5> probs = {0.50, 0.15, 0.05, 0.30, 0.25};
    for (std::size_t c = 0; c < config.detectors.size(); ++c) {
      for (auto& p : config.detectors[c].detect_prob) {
        if (p) p = probs[c];
      }
    }
    return config;
  }
  constexpr std::string_view kUniform = "uniform:";
  if (name.substr(0, kUniform.size()) == kUniform) {
    auto text = name.substr(kUniform.size());
    double p = std::numeric_limits<double>::quiet_NaN();
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), p);
    if (ec == std::errc() && end == text.data() + text.size() &&
        is_probability(p)) {
      return uniform_config(std::string(name), p, 0.0);
    }
  }
  std::string available;
  for (const auto& n : detector_preset_names()) {
    available += (available.empty() ? "" : ", ") + n;
  }
  throw ConfigError(ConfigError::Kind::UnknownPreset, "detector_config_ref",
                    "unknown detector preset '" + std::string(name) +
                        "' (available: " + available + ")");
}

DetectorConfig resolve_detector_config(const std::string& ref,
                                       const std::filesystem::path& base_dir) {
  if (!ref.ends_with(".json")) return detector_preset(ref);
  std::filesystem::path path(ref);
  if (path.is_relative()) path = base_dir / path;
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(ConfigError::Kind::MissingFile, "detector_config_ref",
                      "cannot open detector config " + path.string());
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(ConfigError::Kind::Parse, "detector_config_ref",
                      path.string() + ": " + e.what());
  }
  return detector_config_from_json(doc);
}

std::vector<Alert> detect(const RedAction& action, const ActionOutcome& outcome,
                          const DetectorConfig& detectors, int turn, Rng& rng) {
  std::vector<Alert> alerts;
  const auto kind = static_cast<std::size_t>(action.kind);
  for (auto component : touched_components(action.kind)) {
    for (std::size_t c = 0; c < detectors.size(); ++c) {
      const auto& d = detectors.detectors[c];
      if (d.component != component) continue;
      if (!d.detect_prob[kind]) {
        throw ContractError("detector " + d.component + " has no probability for " +
                            std::string(to_string(action.kind)));
      }
      if (rng.bernoulli(*d.detect_prob[kind])) {
        for (auto h : outcome.affected) alerts.push_back({h, c, turn, true});
      }
    }
  }
  return alerts;
}

std::vector<Alert> generate_false_positives(const DetectorConfig& detectors,
                                            const std::vector<bool>& live,
                                            int turn, Rng& rng) {
  std::vector<Alert> alerts;
  for (HostIndex h = 0; h < live.size(); ++h) {
    if (!live[h]) continue;
    for (std::size_t c = 0; c < detectors.size(); ++c) {
      if (rng.bernoulli(detectors.detectors[c].false_positive_rate)) {
        alerts.push_back({h, c, turn, false});
      }
    }
  }
  return alerts;
}

std::string_view to_string(Activity activity) {
  return kActivityNames[static_cast<std::size_t>(activity)];
}

std::string_view to_string(Compromise compromise) {
  return kCompromiseNames[static_cast<std::size_t>(compromise)];
}

unsigned Observation::activity_level(HostIndex h) const {
  if (encoding == Encoding::Baseline) return activity[h] != Activity::None;
  unsigned total = 0;
  for (std::size_t c = 0; c < component_count; ++c) total += count(h, c);
  return total;
}

std::vector<int> Observation::flatten() const {
  std::vector<int> out;
  if (encoding == Encoding::Baseline) {
    out.reserve(2 * host_count());
    for (HostIndex h = 0; h < host_count(); ++h) {
      out.push_back(static_cast<int>(activity[h]));
      out.push_back(static_cast<int>(compromised[h]));
    }
  } else {
    out.reserve(host_count() * (component_count + 1));
    for (HostIndex h = 0; h < host_count(); ++h) {
      for (std::size_t c = 0; c < component_count; ++c) out.push_back(count(h, c));
      out.push_back(static_cast<int>(compromised[h]));
    }
  }
  return out;
}

Observation initial_observation(Encoding encoding, std::size_t host_count,
                                std::size_t component_count) {
  Observation obs;
  obs.encoding = encoding;
  obs.compromised.assign(host_count, Compromise::No);
  if (encoding == Encoding::Baseline) {
    obs.activity.assign(host_count, Activity::None);
  } else {
    obs.component_count = component_count;
    obs.alert_counts.assign(host_count * component_count, 0);
  }
  return obs;
}

json to_json(const Observation& obs) {
  json out{{"encoding", std::string(to_string(obs.encoding))}};
  json hosts = json::array();
  for (HostIndex h = 0; h < obs.host_count(); ++h) {
    json entry{{"compromised", std::string(to_string(obs.compromised[h]))}};
    if (obs.encoding == Encoding::Baseline) {
      entry["activity"] = std::string(to_string(obs.activity[h]));
    } else {
      json counts = json::array();
      for (std::size_t c = 0; c < obs.component_count; ++c) {
        counts.push_back(obs.count(h, c));
      }
      entry["alerts"] = std::move(counts);
    }
    hosts.push_back(std::move(entry));
  }
  out["hosts"] = std::move(hosts);
  return out;
}

namespace {

void apply_evidence(const TurnEvents& events, Observation& obs) {
  if (!events.blue) return;
  if (events.blue->host >= obs.host_count()) {
    throw ContractError("blue evidence for unknown host");
  }
  obs.compromised[events.blue->host] = events.blue->revealed;
}

}  // namespace

Observation encode_baseline(const TurnEvents& events, const Observation& prior,
                            bool detected) {
  if (prior.encoding != Encoding::Baseline) {
    throw ContractError("encode_baseline needs a baseline prior");
  }
  Observation next = prior;
  std::fill(next.activity.begin(), next.activity.end(), Activity::None);
  apply_evidence(events, next);
  if (!events.red || !detected) return next;

  const auto& [action, outcome] = *events.red;
  const bool scan_like = action.kind == RedActionKind::DiscoverSubnet ||
                         action.kind == RedActionKind::ScanHost;
  for (auto h : outcome.affected) {
    if (h >= next.host_count()) throw ContractError("event on unknown host");
    next.activity[h] = scan_like ? Activity::Scan : Activity::Exploit;
    if (!outcome.success) continue;
    auto& belief = next.compromised[h];
    if (action.kind == RedActionKind::Exploit && belief < Compromise::User) {
      belief = Compromise::User;
    } else if (action.kind == RedActionKind::PrivilegeEscalate) {
      belief = Compromise::Privileged;
    }
  }
  return next;
}

bool is_host_component(std::string_view component) {
  return component == "user-account-creation" ||
         component == "process-creation" || component == "file-modification";
}

Observation encode_detector(const std::vector<Alert>& alerts,
                            const Observation& prior, const TurnEvents& events,
                            const DetectorConfig& detectors) {
  if (prior.encoding != Encoding::Detector) {
    throw ContractError("encode_detector needs a detector prior");
  }
  if (detectors.size() != prior.component_count) {
    throw ContractError("detector config does not match the observation");
  }
  Observation next = prior;
  std::fill(next.alert_counts.begin(), next.alert_counts.end(), 0);
  for (const auto& a : alerts) {
    if (a.host >= next.host_count() || a.component >= next.component_count) {
      throw ContractError("alert references unknown host or component");
    }
    auto& cell = next.alert_counts[a.host * next.component_count + a.component];
    if (cell < std::numeric_limits<std::uint16_t>::max()) ++cell;
  }
  apply_evidence(events, next);
  for (const auto& a : alerts) {
    if (next.compromised[a.host] == Compromise::No &&
        is_host_component(detectors.detectors[a.component].component)) {
      next.compromised[a.host] = Compromise::Unknown;
    }
  }
  return next;
}

}  // namespace cyberdef
