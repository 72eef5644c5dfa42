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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cyberdef/blue.hpp"
#include "cyberdef/detection.hpp"
#include "cyberdef/policy.hpp"
#include "cyberdef/reward.hpp"
#include "cyberdef/scenario.hpp"
#include "cyberdef/state.hpp"

namespace cyberdef {

// A scenario with its detector and reward references resolved.
struct Scenario {
  ScenarioConfig config;
  DetectorConfig detectors;
  RewardConfig reward;

  // Loads the scenario file and resolves its refs relative to the file's
  // directory. Non-empty overrides replace the file's refs.
  static Scenario load(const std::filesystem::path& path,
                       const std::string& detector_override = "",
                       const std::string& reward_override = "");
  static Scenario resolve(const ScenarioConfig& config,
                          const std::filesystem::path& base_dir = ".");

  // FNV-1a of the canonical JSON of each part.
  std::uint64_t config_hash() const;
  std::uint64_t detector_hash() const;
  std::uint64_t reward_hash() const;
};

inline constexpr std::string_view kTraceFormat = "cdtrace/1";

struct TraceHeader {
  std::string format{kTraceFormat};
  std::uint64_t scenario_hash = 0;
  std::uint64_t scenario_seed = 0;
  std::uint64_t episode_seed = 0;
  std::uint64_t detector_config_hash = 0;
  std::uint64_t reward_config_hash = 0;
  Encoding encoding = Encoding::Detector;
  int horizon = 0;
};

struct TraceRecord {
  int turn = 0;  // 1-based
  BlueAction blue_action;  // as requested by the policy
  bool blue_illegal = false;  // applied as Monitor
  bool blue_success = false;
  std::optional<RedAction> red_action;
  bool red_stalled = false;
  ActionOutcome outcome;  // red's
  std::vector<Alert> alerts;
  RewardComponents reward_components;
  double reward = 0.0;
  std::uint64_t state_digest = 0;  // state after the turn
};

// Self-contained: carries the world and detector names it needs to render
// ids.
struct EpisodeTrace {
  TraceHeader header;
  std::vector<TraceRecord> records;
  double total_return = 0.0;
  std::shared_ptr<const World> world;
  std::vector<std::string> components;

  int terminal_turn() const { return static_cast<int>(records.size()); }
};

// JSON-Lines form: header line, one line per record, footer line. Lines are
// compact JSON with sorted keys; reals are fixed 9-decimal strings. The
// trace hash is FNV-1a over the header and record lines, each followed by
// '\n'.
std::string header_line(const TraceHeader& header);
std::string record_line(const EpisodeTrace& trace, std::size_t index);
std::uint64_t trace_hash(const EpisodeTrace& trace);
std::string serialize_trace(const EpisodeTrace& trace);
void write_trace(const EpisodeTrace& trace, const std::filesystem::path& path);

struct StepResult {
  Observation observation;
  double reward = 0.0;
  bool done = false;
};

// One game. Owns ground truth and the trace being recorded. Each step runs
// blue's action, then red's, then detection, observation encoding and
// reward, then advances the turn.
class Engine {
 public:
  explicit Engine(Scenario scenario);

  const Observation& reset(std::uint64_t episode_seed);
  StepResult step(const BlueAction& action);

  bool done() const { return started_ && state_.turn >= scenario_.config.horizon; }
  const Scenario& scenario() const { return scenario_; }
  const World& world() const { return *world_; }
  const ActionCatalog& catalog() const { return catalog_; }
  const GameState& state() const { return state_; }
  const Observation& observation() const { return observation_; }
  const EpisodeTrace& trace() const { return trace_; }

  bool is_legal(const BlueAction& action) const;

 private:
  bool apply_blue(const BlueAction& action, TurnEvents& events);
  void apply_red(const RedAction& action, const ActionOutcome& outcome);

  Scenario scenario_;
  std::shared_ptr<const World> world_;
  ActionCatalog catalog_;
  GameState state_;
  Observation observation_;
  EpisodeTrace trace_;
  bool started_ = false;
};

// reset, then act/step until done. The returned trace is the engine's own
// and lives until its next reset.
const EpisodeTrace& run_episode(Engine& engine, Policy& policy,
                                std::uint64_t episode_seed);
EpisodeTrace run_episode(const Scenario& scenario, Policy& policy,
                         std::uint64_t episode_seed);

class ReplayError : public std::runtime_error {
 public:
  enum class Kind { Format, Version, Hash, Divergence };

  ReplayError(Kind kind, const std::string& message, int turn = 0)
      : std::runtime_error(message), kind_(kind), turn_(turn) {}

  Kind kind() const noexcept { return kind_; }
  // Turn of the first divergence; 0 for other kinds.
  int turn() const noexcept { return turn_; }

 private:
  Kind kind_;
  int turn_;
};

struct ReplayReport {
  bool identical = false;
  int turns = 0;
  std::uint64_t trace_hash = 0;
  double total_return = 0.0;
};

// A trace file split into parsed lines. Throws ReplayError(Format) for
// anything that is not a complete trace: bad JSON, missing header or
// footer, record count not matching the footer's terminal turn.
struct ParsedTrace {
  nlohmann::json header;
  std::vector<nlohmann::json> records;
  nlohmann::json footer;
  std::uint64_t computed_hash = 0;  // over the raw header and record lines
};
ParsedTrace parse_trace(std::istream& in);
ParsedTrace parse_trace_file(const std::filesystem::path& path);

// Re-simulates a recorded episode by feeding its recorded blue actions
// through a fresh engine and compares every turn. Order of checks: format
// version, scenario hashes, per-turn records (first mismatch is a
// Divergence at that turn), footer, trace hash.
ReplayReport replay(const ParsedTrace& trace, const Scenario& scenario);

}  // namespace cyberdef
