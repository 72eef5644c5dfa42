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

#include "cyberdef/engine.hpp"

#include <fstream>
#include <sstream>

namespace cyberdef {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Scenario

Scenario Scenario::load(const std::filesystem::path& path,
                        const std::string& detector_override,
                        const std::string& reward_override) {
  auto config = load_scenario(path);
  if (!detector_override.empty()) config.detector_config_ref = detector_override;
  if (!reward_override.empty()) config.reward_config_ref = reward_override;
  return resolve(config, path.parent_path());
}

Scenario Scenario::resolve(const ScenarioConfig& config,
                           const std::filesystem::path& base_dir) {
  auto violations = validate(config);
  if (!violations.empty()) {
    throw ConfigError(ConfigError::Kind::Invariant, violations.front().field,
                      violations.front().field + ": " +
                          violations.front().message);
  }
  // Resolved into locals first: GCC 11 leaks already-built members when a
  // later initializer of a braced aggregate throws.
  auto detectors = resolve_detector_config(config.detector_config_ref, base_dir);
  auto reward = resolve_reward_config(config.reward_config_ref, base_dir);
  return {config, std::move(detectors), std::move(reward)};
}

std::uint64_t Scenario::config_hash() const {
  return fnv1a64(to_json(config).dump());
}
std::uint64_t Scenario::detector_hash() const {
  return fnv1a64(to_json(detectors).dump());
}
std::uint64_t Scenario::reward_hash() const {
  return fnv1a64(to_json(reward).dump());
}

// ---------------------------------------------------------------------------
// Trace serialization

namespace {

json host_ref(HostIndex h, const World& world) {
  return h < world.host_count() ? json(world.host(h).id) : json(h);
}

json host_list(const std::vector<HostIndex>& hosts, const World& world) {
  json out = json::array();
  for (auto h : hosts) out.push_back(host_ref(h, world));
  return out;
}

json to_json(const RedAction& action, const World& world) {
  json target = action.kind == RedActionKind::DiscoverSubnet
                    ? json(world.topology().subnets().at(action.target).id)
                    : host_ref(action.target, world);
  return json{{"kind", std::string(to_string(action.kind))},
              {"target", std::move(target)}};
}

json to_json(const ActionOutcome& o, const World& world) {
  return json{{"success", o.success},
              {"affected", host_list(o.affected, world)},
              {"discovered", host_list(o.discovered, world)},
              {"session", o.session ? host_ref(*o.session, world) : json(nullptr)},
              {"privileged", o.privileged},
              {"decoy", o.decoy},
              {"impact", o.impact},
              {"evicted", host_list(o.evicted, world)}};
}

}  // namespace

std::string header_line(const TraceHeader& h) {
  return json{{"type", "header"},
              {"format", h.format},
              {"scenario_hash", hex64(h.scenario_hash)},
              {"scenario_seed", h.scenario_seed},
              {"episode_seed", h.episode_seed},
              {"detector_config_hash", hex64(h.detector_config_hash)},
              {"reward_config_hash", hex64(h.reward_config_hash)},
              {"encoding", std::string(to_string(h.encoding))},
              {"horizon", h.horizon}}
      .dump();
}

std::string record_line(const EpisodeTrace& trace, std::size_t index) {
  const auto& world = *trace.world;
  const auto& r = trace.records.at(index);
  json alerts = json::array();
  for (const auto& a : r.alerts) {
    alerts.push_back({{"host", host_ref(a.host, world)},
                      {"component", trace.components.at(a.component)},
                      {"turn", a.turn},
                      {"genuine", a.genuine}});
  }
  return json{{"type", "turn"},
              {"turn", r.turn},
              {"blue_action", to_json(r.blue_action, world)},
              {"blue_illegal", r.blue_illegal},
              {"blue_success", r.blue_success},
              {"red_action",
               r.red_action ? to_json(*r.red_action, world) : json(nullptr)},
              {"red_stalled", r.red_stalled},
              {"outcome", to_json(r.outcome, world)},
              {"alerts", std::move(alerts)},
              {"reward_components", to_json(r.reward_components)},
              {"reward", fixed9(r.reward)},
              {"state_digest", hex64(r.state_digest)}}
      .dump();
}

namespace {

std::string footer_line(const EpisodeTrace& trace, std::uint64_t hash) {
  return json{{"type", "footer"},
              {"return", fixed9(trace.total_return)},
              {"terminal_turn", trace.terminal_turn()},
              {"trace_hash", hex64(hash)}}
      .dump();
}

}  // namespace

std::uint64_t trace_hash(const EpisodeTrace& trace) {
  auto hash = fnv1a64(header_line(trace.header) + "\n");
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    hash = fnv1a64(record_line(trace, i) + "\n", hash);
  }
  return hash;
}

std::string serialize_trace(const EpisodeTrace& trace) {
  std::string out = header_line(trace.header) + "\n";
  auto hash = fnv1a64(out);
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    auto line = record_line(trace, i) + "\n";
    hash = fnv1a64(line, hash);
    out += line;
  }
  out += footer_line(trace, hash) + "\n";
  return out;
}

void write_trace(const EpisodeTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << serialize_trace(trace);
}

// ---------------------------------------------------------------------------
// Engine

namespace {

Compromise observed(HostCompromise c) {
  switch (c) {
    case HostCompromise::Clean: return Compromise::No;
    case HostCompromise::UserLevel: return Compromise::User;
    case HostCompromise::Privileged: return Compromise::Privileged;
  }
  return Compromise::No;
}

}  // namespace

Engine::Engine(Scenario scenario)
    : scenario_(std::move(scenario)),
      world_(std::make_shared<const World>(
          generate_topology(scenario_.config, scenario_.config.seed),
          static_cast<std::size_t>(scenario_.config.max_decoys))),
      catalog_(*world_) {}

const Observation& Engine::reset(std::uint64_t episode_seed) {
  const auto& config = scenario_.config;
  state_ = initial_state(*world_, config.seed, episode_seed);
  observation_ = initial_observation(config.encoding, world_->host_count(),
                                     scenario_.detectors.size());
  trace_ = EpisodeTrace{};
  trace_.header = TraceHeader{std::string(kTraceFormat),
                              scenario_.config_hash(),
                              config.seed,
                              episode_seed,
                              scenario_.detector_hash(),
                              scenario_.reward_hash(),
                              config.encoding,
                              config.horizon};
  trace_.world = world_;
  for (const auto& d : scenario_.detectors.detectors) {
    trace_.components.push_back(d.component);
  }
  trace_.records.reserve(static_cast<std::size_t>(config.horizon));
  started_ = true;
  return observation_;
}

bool Engine::is_legal(const BlueAction& action) const {
  const auto& w = *world_;
  if (action.targets_host()) {
    return action.a < w.host_count() && state_.hosts[action.a].live();
  }
  switch (action.kind) {
    case BlueActionKind::Monitor:
      return true;
    case BlueActionKind::DeployDecoy:
      return action.a < w.subnet_count() &&
             state_.decoys_deployed < w.max_decoys();
    case BlueActionKind::BlockSubnetPair:
      return action.a < w.subnet_count() && action.b < w.subnet_count() &&
             action.a != action.b && w.topology().linked(action.a, action.b);
    default:
      return false;
  }
}

bool Engine::apply_blue(const BlueAction& action, TurnEvents& events) {
  auto& k = state_.red_knowledge;
  switch (action.kind) {
    case BlueActionKind::Monitor:
      return true;
    case BlueActionKind::Analyze: {
      events.blue = BlueEvidence{action.a, observed(state_.hosts[action.a].compromise)};
      return true;
    }
    case BlueActionKind::Remove: {
      auto& host = state_.hosts[action.a];
      const bool removed = host.compromise == HostCompromise::UserLevel;
      if (removed) {
        host.compromise = HostCompromise::Clean;
        k = evict(std::move(k), action.a);
      }
      events.blue = BlueEvidence{action.a, observed(host.compromise)};
      return removed;
    }
    case BlueActionKind::Restore: {
      auto& host = state_.hosts[action.a];
      host.compromise = HostCompromise::Clean;
      host.restore_downtime_remaining = scenario_.reward.restore_downtime_turns;
      k = evict(std::move(k), action.a);
      events.blue = BlueEvidence{action.a, Compromise::No};
      return true;
    }
    case BlueActionKind::DeployDecoy: {
      const auto slot = world_->first_decoy() + state_.decoys_deployed;
      ++state_.decoys_deployed;
      state_.hosts[slot].subnet = action.a;
      // A decoy is visible to anyone who has already swept its subnet.
      if (k.discovered_subnets.count(action.a)) k.discovered_hosts.insert(slot);
      return true;
    }
    case BlueActionKind::BlockSubnetPair:
      return state_.blocked_pairs
          .insert({std::min(action.a, action.b), std::max(action.a, action.b)})
          .second;
    case BlueActionKind::IsolateHost: {
      auto& host = state_.hosts[action.a];
      const bool changed = !host.isolated;
      host.isolated = true;
      return changed;
    }
    case BlueActionKind::UnisolateHost: {
      auto& host = state_.hosts[action.a];
      const bool changed = host.isolated;
      host.isolated = false;
      return changed;
    }
  }
  return false;
}

void Engine::apply_red(const RedAction& action, const ActionOutcome& outcome) {
  if (outcome.success) {
    auto& host = state_.hosts[action.target];
    if (action.kind == RedActionKind::Exploit &&
        host.compromise == HostCompromise::Clean) {
      host.compromise = HostCompromise::UserLevel;
    } else if (action.kind == RedActionKind::PrivilegeEscalate) {
      host.compromise = HostCompromise::Privileged;
    }
  }
  state_.red_knowledge =
      update_knowledge(std::move(state_.red_knowledge), action, outcome);
}

StepResult Engine::step(const BlueAction& action) {
  if (!started_) throw ContractError("step() before reset()");
  if (done()) throw ContractError("step() after the episode ended");
  const auto& config = scenario_.config;
  const int turn = state_.turn + 1;

  for (auto& host : state_.hosts) {
    if (host.restore_downtime_remaining > 0) --host.restore_downtime_remaining;
  }

  TraceRecord record;
  record.turn = turn;
  record.blue_action = action;
  TurnEvents events;
  if (is_legal(action)) {
    record.blue_success = apply_blue(action, events);
  } else {
    record.blue_illegal = true;
    record.blue_success = apply_blue(BlueAction::monitor(), events);
  }

  if (config.red_strategy != RedStrategyKind::None) {
    auto& rng = state_.rng_streams.red;
    const auto terrain = make_terrain(*world_, state_);
    if (auto red = select_action(config.red_strategy, state_.red_knowledge,
                                 terrain, rng)) {
      auto outcome = resolve_action(*red, terrain, config.red_params, rng);
      apply_red(*red, outcome);
      events.red = RedEvent{*red, std::move(outcome)};
    } else {
      record.red_stalled = true;
    }
  }

  std::vector<Alert> alerts;
  if (events.red) {
    alerts = detect(events.red->action, events.red->outcome, scenario_.detectors,
                    turn, state_.rng_streams.detect);
  }
  const bool detected = !alerts.empty();
  std::vector<bool> live(state_.hosts.size());
  for (HostIndex h = 0; h < live.size(); ++h) live[h] = state_.hosts[h].live();
  auto false_alerts = generate_false_positives(scenario_.detectors, live, turn,
                                               state_.rng_streams.fp);
  alerts.insert(alerts.end(), false_alerts.begin(), false_alerts.end());

  observation_ = config.encoding == Encoding::Baseline
                     ? encode_baseline(events, observation_, detected)
                     : encode_detector(alerts, observation_, events,
                                       scenario_.detectors);

  record.reward_components =
      compute_components(state_, *world_, events, scenario_.reward);
  record.reward =
      compute_reward(record.reward_components, scenario_.reward.weights);

  state_.turn = turn;
  if (events.red) {
    record.red_action = events.red->action;
    record.outcome = std::move(events.red->outcome);
  }
  record.alerts = std::move(alerts);
  record.state_digest = state_digest(state_);
  trace_.total_return += record.reward;
  const double reward = record.reward;
  trace_.records.push_back(std::move(record));
  return {observation_, reward, done()};
}

const EpisodeTrace& run_episode(Engine& engine, Policy& policy,
                                std::uint64_t episode_seed) {
  const Observation* obs = &engine.reset(episode_seed);
  policy.begin_episode(episode_seed);
  while (!engine.done()) {
    auto result = engine.step(policy.act(*obs, engine.catalog()));
    policy.notify(result.reward, result.done);
    obs = &engine.observation();
  }
  return engine.trace();
}

EpisodeTrace run_episode(const Scenario& scenario, Policy& policy,
                         std::uint64_t episode_seed) {
  Engine engine(scenario);
  return run_episode(engine, policy, episode_seed);
}

// ---------------------------------------------------------------------------
// Replay

namespace {

[[noreturn]] void format_error(const std::string& message) {
  throw ReplayError(ReplayError::Kind::Format, "malformed trace: " + message);
}

std::string get_string(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key) || !obj[key].is_string()) {
    format_error(std::string("missing string field '") + key + "'");
  }
  return obj[key].get<std::string>();
}

std::uint64_t get_hex(const json& obj, const char* key) {
  auto value = parse_hex64(get_string(obj, key));
  if (!value) format_error(std::string("bad hash in '") + key + "'");
  return *value;
}

std::uint64_t get_unsigned(const json& obj, const char* key) {
  if (!obj.contains(key) || !obj[key].is_number_unsigned()) {
    format_error(std::string("missing unsigned field '") + key + "'");
  }
  return obj[key].get<std::uint64_t>();
}

}  // namespace

ParsedTrace parse_trace(std::istream& in) {
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) lines.push_back(std::move(line));
  }
  if (lines.size() < 2) format_error("needs at least a header and a footer");

  ParsedTrace parsed;
  std::vector<json> docs;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    try {
      docs.push_back(json::parse(lines[i]));
    } catch (const json::parse_error&) {
      format_error("line " + std::to_string(i + 1) + " is not JSON");
    }
  }
  if (get_string(docs.front(), "type") != "header") format_error("no header");
  if (get_string(docs.back(), "type") != "footer") format_error("no footer");
  parsed.header = std::move(docs.front());
  parsed.footer = std::move(docs.back());
  get_string(parsed.footer, "return");
  get_hex(parsed.footer, "trace_hash");
  if (!parsed.footer.contains("terminal_turn") ||
      !parsed.footer["terminal_turn"].is_number_integer()) {
    format_error("footer lacks terminal_turn");
  }

  parsed.computed_hash = fnv1a64(lines.front() + "\n");
  for (std::size_t i = 1; i + 1 < docs.size(); ++i) {
    if (get_string(docs[i], "type") != "turn") {
      format_error("line " + std::to_string(i + 1) + " is not a turn record");
    }
    parsed.computed_hash = fnv1a64(lines[i] + "\n", parsed.computed_hash);
    parsed.records.push_back(std::move(docs[i]));
  }
  if (parsed.footer["terminal_turn"].get<long long>() !=
      static_cast<long long>(parsed.records.size())) {
    format_error("record count does not match terminal_turn");
  }
  return parsed;
}

ParsedTrace parse_trace_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) format_error("cannot open " + path.string());
  return parse_trace(in);
}

ReplayReport replay(const ParsedTrace& trace, const Scenario& scenario) {
  const auto format = get_string(trace.header, "format");
  if (format != kTraceFormat) {
    throw ReplayError(ReplayError::Kind::Version,
                      "unsupported trace format '" + format + "' (expected " +
                          std::string(kTraceFormat) + ")");
  }
  const std::pair<const char*, std::uint64_t> expected[] = {
      {"scenario_hash", scenario.config_hash()},
      {"detector_config_hash", scenario.detector_hash()},
      {"reward_config_hash", scenario.reward_hash()},
  };
  for (auto [key, value] : expected) {
    if (get_hex(trace.header, key) != value) {
      throw ReplayError(ReplayError::Kind::Hash,
                        std::string(key) + " does not match the scenario");
    }
  }

  Engine engine(scenario);
  engine.reset(get_unsigned(trace.header, "episode_seed"));
  if (header_line(engine.trace().header) != trace.header.dump()) {
    throw ReplayError(ReplayError::Kind::Divergence,
                      "header differs from a fresh reset", 0);
  }
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const auto& recorded = trace.records[i];
    const int turn = static_cast<int>(i) + 1;
    if (engine.done()) {
      throw ReplayError(ReplayError::Kind::Divergence,
                        "trace runs past the horizon", turn);
    }
    BlueAction action;
    try {
      action = blue_action_from_json(recorded.at("blue_action"), engine.world());
    } catch (const std::exception& e) {
      throw ReplayError(ReplayError::Kind::Divergence,
                        "turn " + std::to_string(turn) +
                            ": unreadable blue action: " + e.what(),
                        turn);
    }
    engine.step(action);
    const auto resimulated = json::parse(record_line(engine.trace(), i));
    if (resimulated != recorded) {
      std::string field = "record";
      for (const auto& [key, value] : resimulated.items()) {
        if (!recorded.contains(key) || recorded[key] != value) {
          field = key;
          break;
        }
      }
      throw ReplayError(ReplayError::Kind::Divergence,
                        "turn " + std::to_string(turn) + ": " + field +
                            " differs from the recording",
                        turn);
    }
  }
  if (!engine.done()) {
    throw ReplayError(ReplayError::Kind::Divergence,
                      "trace ends before the horizon",
                      static_cast<int>(trace.records.size()) + 1);
  }
  const auto& sim = engine.trace();
  if (get_string(trace.footer, "return") != fixed9(sim.total_return)) {
    throw ReplayError(ReplayError::Kind::Divergence,
                      "footer return differs from the recording",
                      sim.terminal_turn());
  }
  const auto recorded_hash = get_hex(trace.footer, "trace_hash");
  const auto sim_hash = trace_hash(sim);
  if (recorded_hash != trace.computed_hash || recorded_hash != sim_hash) {
    throw ReplayError(ReplayError::Kind::Hash,
                      "trace hash mismatch: footer " + hex64(recorded_hash) +
                          ", recomputed " + hex64(trace.computed_hash));
  }
  return {true, sim.terminal_turn(), sim_hash, sim.total_return};
}

}  // namespace cyberdef
