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
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "cyberdef/common.hpp"
#include "cyberdef/red.hpp"
#include "cyberdef/rng.hpp"

namespace cyberdef {

// ---------------------------------------------------------------------------
// Detectors
// ---------------------------------------------------------------------------

// Known Data Component ids, in canonical order.
std::span<const std::string_view> data_components();

// Data Components each red action kind touches. Every kind touches at
// least one.
std::span<const std::string_view> touched_components(RedActionKind kind);

// A stochastic alert source watching one Data Component. detect_prob holds
// a probability for every action kind that touches the component (checked
// at load) and nothing for the others.
struct Detector {
  std::string component;
  std::array<std::optional<double>, kRedActionKindCount> detect_prob{};
  // Expected false alerts per host per turn; one Bernoulli trial each.
  double false_positive_rate = 0.0;

  friend bool operator==(const Detector&, const Detector&) = default;
};

struct DetectorConfig {
  std::string name;
  std::vector<Detector> detectors;

  std::size_t size() const { return detectors.size(); }
  friend bool operator==(const DetectorConfig&, const DetectorConfig&) = default;
};

// Throws ConfigError(Invariant) naming the offending detector field.
void check_detector_config(const DetectorConfig& config);

DetectorConfig detector_config_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const DetectorConfig& config);

// Built-in presets:
//   "perfect"    every probability 1.0, no false positives
//   "realistic"  user-account-creation 0.50, process-creation 0.15,
//                network-session 0.05, network-traffic-flow 0.30,
//                file-modification 0.25; false-positive rate 0.01
//   "uniform:P"  every probability P, no false positives
// Throws ConfigError(UnknownPreset) listing the available names.
DetectorConfig detector_preset(std::string_view name);
std::vector<std::string> detector_preset_names();

// A ref ending in ".json" is a file (relative refs resolve against
// base_dir); anything else is a preset name.
DetectorConfig resolve_detector_config(const std::string& ref,
                                       const std::filesystem::path& base_dir);

// ---------------------------------------------------------------------------
// Alerts
// ---------------------------------------------------------------------------

struct Alert {
  HostIndex host;
  std::size_t component;  // index into DetectorConfig::detectors
  int turn;
  bool genuine;  // trace-only; never reaches an Observation

  friend bool operator==(const Alert&, const Alert&) = default;
};

// For each Data Component the action touches that has a detector, flip one
// coin with that detector's probability for the action kind. A success
// raises one genuine alert on every host the action touched. Consumes one
// draw per watched component whether or not the action succeeded.
std::vector<Alert> detect(const RedAction& action, const ActionOutcome& outcome,
                          const DetectorConfig& detectors, int turn, Rng& rng);

// One Bernoulli(false_positive_rate) trial per (live host, detector), host
// major. Consumes one draw per trial.
std::vector<Alert> generate_false_positives(const DetectorConfig& detectors,
                                            const std::vector<bool>& live,
                                            int turn, Rng& rng);

// ---------------------------------------------------------------------------
// Observations
// ---------------------------------------------------------------------------

enum class Activity : std::uint8_t { None, Scan, Exploit };
enum class Compromise : std::uint8_t { No, Unknown, User, Privileged };

std::string_view to_string(Activity activity);
std::string_view to_string(Compromise compromise);

// What blue sees. Baseline: an (Activity, Compromise) pair per host.
// Detector: a host x detector grid of alert counts for this turn, plus a
// Compromise per host. Host order is the engine's host order throughout.
struct Observation {
  Encoding encoding = Encoding::Baseline;
  std::size_t component_count = 0;
  std::vector<Activity> activity;           // baseline only
  std::vector<Compromise> compromised;      // both
  std::vector<std::uint16_t> alert_counts;  // detector only, host-major

  std::size_t host_count() const { return compromised.size(); }
  std::uint16_t count(HostIndex h, std::size_t c) const {
    return alert_counts[h * component_count + c];
  }
  // Sum of a host's alert counts (detector), or 1/0 for active/idle
  // (baseline).
  unsigned activity_level(HostIndex h) const;

  // Flat numeric vector; its length depends only on the encoding, host
  // count and detector count.
  std::vector<int> flatten() const;

  friend bool operator==(const Observation&, const Observation&) = default;
};

Observation initial_observation(Encoding encoding, std::size_t host_count,
                                std::size_t component_count);

nlohmann::json to_json(const Observation& obs);

// Result of a blue Analyze/Remove/Restore: the target's true compromise
// after blue's action.
struct BlueEvidence {
  HostIndex host;
  Compromise revealed;
};

struct RedEvent {
  RedAction action;
  ActionOutcome outcome;
};

struct TurnEvents {
  std::optional<BlueEvidence> blue;
  std::optional<RedEvent> red;
};

// Baseline encoding. Blue evidence is applied first. Then, only if the red
// event was detected, its touched hosts show Scan (discover/scan) or
// Exploit (exploit/escalate/impact), and a successful exploit or escalation
// raises Compromise to User or Privileged. Everything else carries over.
Observation encode_baseline(const TurnEvents& events, const Observation& prior,
                            bool detected);

// Detector encoding. Counts are exactly this turn's alerts, genuine or not.
// True for components recorded on the host itself (accounts, processes,
// files) as opposed to network telemetry.
bool is_host_component(std::string_view component);

// Compromise carries over and takes blue evidence. A host believed clean
// becomes Unknown once a host-based component alerts on it; network alerts
// alone (a subnet sweep, a port scan) say nothing about compromise.
Observation encode_detector(const std::vector<Alert>& alerts,
                            const Observation& prior, const TurnEvents& events,
                            const DetectorConfig& detectors);

}  // namespace cyberdef
