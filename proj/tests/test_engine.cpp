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


#include <sstream>

#include "doctest.h"
#include "json.hpp"

#include "cyberdef/agents.hpp"
#include "cyberdef/engine.hpp"
#include "test_util.hpp"

namespace cyberdef {
namespace {

using nlohmann::json;
using testing::small_config;

Scenario make_scenario(ScenarioConfig config) { return Scenario::resolve(config); }

Scenario minimal(int horizon = 10, Encoding encoding = Encoding::Baseline) {
  auto c = small_config(1, 1, 1);
  c.horizon = horizon;
  c.encoding = encoding;
  return make_scenario(c);
}

// Steps Monitor until `pred` holds; returns false if the episode ends first.
template <typename Pred>
bool monitor_until(Engine& engine, Pred pred) {
  while (!engine.done()) {
    if (pred(engine.state())) return true;
    engine.step(BlueAction::monitor());
  }
  return pred(engine.state());
}

TEST_CASE("reset is deterministic and splits streams per episode") {
  auto scenario = testing::load_named("default");
  Engine a(scenario), b(scenario);
  a.reset(5);
  b.reset(5);
  CHECK(to_json(a.state(), a.world()) == to_json(b.state(), b.world()));
  CHECK(a.observation() == b.observation());

  b.reset(6);
  CHECK(a.world().topology().to_json() == b.world().topology().to_json());
  const auto& sa = a.state().rng_streams;
  const auto& sb = b.state().rng_streams;
  CHECK(sa.red.seed() != sb.red.seed());
  CHECK(sa.detect.seed() != sb.detect.seed());
  CHECK(sa.fp.seed() != sb.fp.seed());
  CHECK(sa.topo.seed() == sb.topo.seed());
  // The documented derivation.
  const auto base = derive_seed(scenario.config.seed, 5);
  CHECK(sa.red.seed() == derive_seed(base, "red"));
  CHECK(sa.detect.seed() == derive_seed(base, "detect"));
  CHECK(sa.fp.seed() == derive_seed(base, "fp"));
  CHECK(sa.topo.seed() == derive_seed(scenario.config.seed, "topo"));
  CHECK(a.state().turn == 0);
  for (const auto& h : a.state().hosts) CHECK(h.compromise == HostCompromise::Clean);
}

TEST_CASE("minimal scenario starts all clear") {
  Engine engine(minimal());
  const auto& obs = engine.reset(0);
  CHECK(obs.encoding == Encoding::Baseline);
  CHECK(obs.activity == std::vector<Activity>{Activity::None});
  CHECK(obs.compromised == std::vector<Compromise>{Compromise::No});
}

TEST_CASE("Monitor versus Beeline on the minimal scenario") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Engine engine(minimal(20));
    engine.reset(seed);
    REQUIRE(monitor_until(engine, [](const GameState& s) {
      return s.hosts[0].compromise == HostCompromise::Privileged;
    }));
    const auto& records = engine.trace().records;
    const auto privileged_turn = engine.state().turn;
    // Discover, scan, exploit, escalate plus one retry per failed roll.
    int failures = 0;
    for (const auto& r : records) failures += r.red_action && !r.outcome.success;
    CHECK(privileged_turn == 4 + failures);
    engine.step(BlueAction::monitor());
    const auto& last = engine.trace().records.back();
    REQUIRE(last.red_action.has_value());
    CHECK(last.red_action->kind == RedActionKind::Impact);
    CHECK(last.outcome.impact);
    const auto& config = engine.scenario().reward;
    CHECK(last.reward == -config.weights.integrity * config.impact_cost);
  }
}

TEST_CASE("Restore on a privileged host") {
  Engine engine(minimal(30));
  engine.reset(3);
  REQUIRE(monitor_until(engine, [](const GameState& s) {
    return s.hosts[0].compromise == HostCompromise::Privileged;
  }));
  engine.step(BlueAction::on_host(BlueActionKind::Restore, 0));
  const auto& s = engine.state();
  CHECK(s.hosts[0].compromise == HostCompromise::Clean);
  CHECK(s.red_knowledge.user_sessions.empty());
  CHECK(s.red_knowledge.privileged_sessions.empty());
  CHECK(s.red_knowledge.discovered_hosts.count(0) == 1);
  CHECK(engine.observation().compromised[0] == Compromise::No);
  const auto& config = engine.scenario().reward;
  const auto& restore_turn = engine.trace().records.back();
  CHECK(restore_turn.blue_success);
  // Red could not touch the restoring host.
  CHECK_FALSE(restore_turn.red_action.has_value());
  CHECK(restore_turn.red_stalled);
  CHECK(restore_turn.reward_components.availability ==
        config.tier_cost(Tier::OperationalServer));
  engine.step(BlueAction::monitor());
  CHECK(engine.trace().records.back().reward_components.availability == 0.0);
}

TEST_CASE("restore downtime lasts restore_downtime_turns turns") {
  auto c = small_config(1, 1, 1);
  c.horizon = 10;
  c.red_strategy = RedStrategyKind::None;
  auto scenario = make_scenario(c);
  scenario.reward.restore_downtime_turns = 3;
  Engine engine(scenario);
  engine.reset(0);
  engine.step(BlueAction::on_host(BlueActionKind::Restore, 0));
  std::vector<double> charges = {engine.trace().records.back().reward_components.availability};
  for (int i = 0; i < 4; ++i) {
    engine.step(BlueAction::monitor());
    charges.push_back(engine.trace().records.back().reward_components.availability);
  }
  CHECK(charges == std::vector<double>{10, 10, 10, 0, 0});
}

TEST_CASE("Remove clears user-level footholds only") {
  Engine engine(minimal(30));
  engine.reset(1);
  REQUIRE(monitor_until(engine, [](const GameState& s) {
    return s.hosts[0].compromise == HostCompromise::UserLevel;
  }));
  engine.step(BlueAction::on_host(BlueActionKind::Remove, 0));
  CHECK(engine.trace().records.back().blue_success);
  // Red acted after the removal; it can only have re-exploited.
  CHECK(engine.state().hosts[0].compromise != HostCompromise::Privileged);

  REQUIRE(monitor_until(engine, [](const GameState& s) {
    return s.hosts[0].compromise == HostCompromise::Privileged;
  }));
  if (!engine.done()) {
    engine.step(BlueAction::on_host(BlueActionKind::Remove, 0));
    CHECK_FALSE(engine.trace().records.back().blue_success);
    CHECK(engine.state().hosts[0].compromise == HostCompromise::Privileged);
  }
}

TEST_CASE("horizon contract") {
  Engine engine(minimal(3));
  CHECK_THROWS_AS(engine.step(BlueAction::monitor()), ContractError);
  engine.reset(0);
  CHECK_FALSE(engine.step(BlueAction::monitor()).done);
  CHECK_FALSE(engine.step(BlueAction::monitor()).done);
  CHECK(engine.step(BlueAction::monitor()).done);
  CHECK(engine.trace().records.size() == 3);
  CHECK_THROWS_AS(engine.step(BlueAction::monitor()), ContractError);
}

TEST_CASE("illegal blue actions run as Monitor and are flagged") {
  Engine engine(testing::load_named("default"));
  engine.reset(0);
  const BlueAction bad[] = {
      BlueAction::on_host(BlueActionKind::Analyze, 999),
      BlueAction::deploy_decoy(0),  // no decoys in this scenario
      BlueAction::block(0, 0),
      BlueAction::block(0, 99),
  };
  for (const auto& a : bad) {
    auto before = engine.state().hosts;
    engine.step(a);
    const auto& r = engine.trace().records.back();
    CHECK(r.blue_illegal);
    CHECK(r.blue_action == a);
  }
  engine.step(BlueAction::monitor());
  CHECK_FALSE(engine.trace().records.back().blue_illegal);
}

TEST_CASE("a no-op defender against no red scores exactly zero") {
  auto c = small_config(3, 2, 4, 1);
  c.horizon = 25;
  c.red_strategy = RedStrategyKind::None;
  NoOpPolicy noop;
  auto trace = run_episode(make_scenario(c), noop, 17);
  CHECK(trace.total_return == 0.0);
  CHECK(trace.records.size() == 25);
  CHECK(trace.terminal_turn() == 25);
}

TEST_CASE("run_episode is reproducible") {
  auto scenario = testing::load_named("honeynet");
  RandomPolicy p1(4), p2(4);
  auto a = run_episode(scenario, p1, 9);
  auto b = run_episode(scenario, p2, 9);
  CHECK(trace_hash(a) == trace_hash(b));
  CHECK(serialize_trace(a) == serialize_trace(b));
  CHECK(a.total_return == b.total_return);
  RandomPolicy p3(5);
  CHECK(trace_hash(run_episode(scenario, p3, 9)) != trace_hash(a));
}

// Brute-force invariant checks over whole episodes: conservation of
// privilege, isolation, fixed observation shape, decoys never critical.
void check_invariants(const Scenario& scenario, Policy& policy, std::uint64_t seed) {
  Engine engine(scenario);
  engine.reset(seed);
  policy.begin_episode(seed);
  const auto shape = engine.observation().flatten().size();
  std::vector<bool> escalated(engine.world().host_count(), false);
  while (!engine.done()) {
    auto action = policy.act(engine.observation(), engine.catalog());
    const bool legal = engine.is_legal(action);
    auto result = engine.step(action);
    policy.notify(result.reward, result.done);
    const auto& r = engine.trace().records.back();
    CHECK(r.blue_illegal == !legal);
    if (legal && action.kind == BlueActionKind::Restore) escalated[action.a] = false;
    if (legal && action.kind == BlueActionKind::Remove && r.blue_success) {
      escalated[action.a] = false;
    }
    if (r.red_action && r.red_action->kind != RedActionKind::DiscoverSubnet) {
      CHECK_FALSE(engine.state().hosts[r.red_action->target].isolated);
      if (r.red_action->kind == RedActionKind::PrivilegeEscalate && r.outcome.success) {
        escalated[r.red_action->target] = true;
      }
    }
    for (HostIndex h = 0; h < escalated.size(); ++h) {
      if (engine.state().hosts[h].compromise == HostCompromise::Privileged) {
        REQUIRE(escalated[h]);
      }
    }
    CHECK(engine.observation().flatten().size() == shape);
    CHECK(r.state_digest == state_digest(engine.state()));
    CHECK(r.turn == engine.state().turn);
    CHECK(std::isfinite(r.reward));
  }
  CHECK(engine.trace().records.size() ==
        static_cast<std::size_t>(scenario.config.horizon));
  CHECK_FALSE(engine.world().host(engine.world().critical_host()).decoy);
}

TEST_CASE("property: engine invariants under random play") {
  for (auto name : {"default", "honeynet", "minimal", "one_subnet"}) {
    auto scenario = testing::load_named(name);
    for (auto strategy : {RedStrategyKind::Beeline, RedStrategyKind::Meander,
                          RedStrategyKind::RandomWalk}) {
      scenario.config.red_strategy = strategy;
      RandomPolicy policy(21);
      for (std::uint64_t seed = 0; seed < 15; ++seed) {
        CAPTURE(name);
        CAPTURE(seed);
        check_invariants(scenario, policy, seed);
      }
    }
  }
}

TEST_CASE("decoys") {
  auto scenario = testing::load_named("honeynet");
  scenario.config.red_strategy = RedStrategyKind::RandomWalk;
  Engine engine(scenario);
  engine.reset(0);
  const auto& world = engine.world();
  REQUIRE(world.max_decoys() == 2);
  const auto first = world.first_decoy();
  CHECK(world.host(first).id == "decoy0");
  CHECK(world.host(first).decoy);
  CHECK(engine.catalog().index_of(BlueAction::deploy_decoy(0)).has_value());
  CHECK_FALSE(engine.state().hosts[first].live());

  // Red sweeps the entry subnet on turn 1; a decoy placed there later is
  // already known to red.
  engine.step(BlueAction::monitor());
  REQUIRE(engine.state().red_knowledge.discovered_subnets.count(0));
  engine.step(BlueAction::deploy_decoy(0));
  CHECK(engine.state().hosts[first].subnet == SubnetIndex{0});
  CHECK(engine.state().red_knowledge.discovered_hosts.count(first));
  engine.step(BlueAction::deploy_decoy(1));
  CHECK(engine.state().decoys_deployed == 2);
  engine.step(BlueAction::deploy_decoy(0));
  CHECK(engine.trace().records.back().blue_illegal);
}

TEST_CASE("blocking every link from the entry subnet confines red") {
  auto scenario = testing::load_named("default");
  Engine engine(scenario);
  engine.reset(2);
  std::vector<BlueAction> blocks;
  for (auto n : engine.world().topology().neighbors(0)) blocks.push_back(BlueAction::block(0, n));
  std::size_t i = 0;
  while (!engine.done()) {
    engine.step(i < blocks.size() ? blocks[i] : BlueAction::monitor());
    ++i;
    const auto& r = engine.trace().records.back();
    if (r.red_action && r.red_action->kind != RedActionKind::DiscoverSubnet) {
      CHECK(engine.world().topology().subnet_of(r.red_action->target) == 0);
    }
  }
  CHECK(engine.state().red_knowledge.discovered_subnets == std::set<SubnetIndex>{0});
}

TEST_CASE("action catalog layout") {
  Engine engine(testing::load_named("honeynet"));
  const auto& cat = engine.catalog();
  const auto n = engine.world().host_count();
  const auto links = engine.world().topology().links().size();
  CHECK(cat.size() == 1 + 5 * n + engine.world().subnet_count() + links);
  CHECK(cat[0] == BlueAction::monitor());
  CHECK(cat[1] == BlueAction::on_host(BlueActionKind::Analyze, 0));
  CHECK(cat[1 + n] == BlueAction::on_host(BlueActionKind::Remove, 0));
  for (std::size_t i = 0; i < cat.size(); ++i) CHECK(cat.index_of(cat[i]) == i);

  Engine plain(testing::load_named("default"));
  for (const auto& a : plain.catalog().actions()) {
    CHECK(a.kind != BlueActionKind::DeployDecoy);
  }
}

TEST_CASE("blue action JSON round trip") {
  Engine engine(testing::load_named("honeynet"));
  const auto& world = engine.world();
  for (const auto& a : engine.catalog().actions()) {
    CHECK(blue_action_from_json(to_json(a, world), world) == a);
  }
  auto stray = BlueAction::on_host(BlueActionKind::Analyze, 500);
  CHECK(to_json(stray, world)["host"] == 500);
  CHECK(blue_action_from_json(to_json(stray, world), world) == stray);
  CHECK(to_json(BlueAction::block(1, 0), world)["subnets"] == json::array({"s0", "s1"}));
  CHECK_THROWS_AS(blue_action_from_json(json{{"kind", "Dance"}}, world), ContractError);
  CHECK_THROWS_AS(blue_action_from_json(json{{"kind", "Analyze"}, {"host", "nope"}}, world),
                  ContractError);
}

TEST_CASE("trace serialization") {
  auto scenario = testing::load_named("default");
  HeuristicPolicy policy;
  auto trace = run_episode(scenario, policy, 3);
  auto text = serialize_trace(trace);
  std::istringstream in(text);
  auto parsed = parse_trace(in);
  CHECK(parsed.records.size() == trace.records.size());
  CHECK(parsed.header["format"] == "cdtrace/1");
  CHECK(parsed.header["scenario_hash"] == hex64(scenario.config_hash()));
  CHECK(parsed.header["episode_seed"] == 3);
  CHECK(parsed.footer["terminal_turn"] == scenario.config.horizon);
  CHECK(parsed.footer["return"] == fixed9(trace.total_return));
  CHECK(parsed.computed_hash == trace_hash(trace));
  CHECK(parsed.footer["trace_hash"] == hex64(trace_hash(trace)));

  // The hash is FNV-1a over the header and record lines with newlines.
  std::uint64_t h = fnv1a64(header_line(trace.header) + "\n");
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    h = fnv1a64(record_line(trace, i) + "\n", h);
  }
  CHECK(h == trace_hash(trace));

  // Lines are canonical: re-dumping the parsed JSON reproduces them.
  std::istringstream lines(text);
  for (std::string line; std::getline(lines, line);) {
    CHECK(json::parse(line).dump() == line);
  }
  // Alerts keep their genuine flag in the trace.
  CHECK(text.find("\"genuine\":true") != std::string::npos);
}

std::string replay_text(const std::string& text, const Scenario& scenario,
                        ReplayError::Kind* kind = nullptr, int* turn = nullptr) {
  std::istringstream in(text);
  try {
    auto report = replay(parse_trace(in), scenario);
    return report.identical ? "identical" : "different";
  } catch (const ReplayError& e) {
    if (kind) *kind = e.kind();
    if (turn) *turn = e.turn();
    return "error";
  }
}

TEST_CASE("replay") {
  auto scenario = testing::load_named("honeynet");
  RandomPolicy policy(8);
  auto trace = run_episode(scenario, policy, 12);
  const auto text = serialize_trace(trace);
  std::istringstream in(text);
  auto report = replay(parse_trace(in), scenario);
  CHECK(report.identical);
  CHECK(report.turns == scenario.config.horizon);
  CHECK(report.trace_hash == trace_hash(trace));
  CHECK(fixed9(report.total_return) == fixed9(trace.total_return));

  std::vector<std::string> lines;
  std::istringstream split(text);
  for (std::string line; std::getline(split, line);) lines.push_back(line);

  auto join = [](const std::vector<std::string>& ls) {
    std::string out;
    for (const auto& l : ls) out += l + "\n";
    return out;
  };

  SUBCASE("edited reward diverges at that turn") {
    auto edited = lines;
    auto rec = json::parse(edited[5]);
    rec["reward"] = "123.000000000";
    edited[5] = rec.dump();
    ReplayError::Kind kind{};
    int turn = 0;
    CHECK(replay_text(join(edited), scenario, &kind, &turn) == "error");
    CHECK(kind == ReplayError::Kind::Divergence);
    CHECK(turn == 5);
  }
  SUBCASE("edited blue action diverges") {
    auto edited = lines;
    auto rec = json::parse(edited[2]);
    rec["blue_action"] = json{{"kind", "Restore"}, {"host", "s0h0"}};
    edited[2] = rec.dump();
    ReplayError::Kind kind{};
    int turn = 0;
    CHECK(replay_text(join(edited), scenario, &kind, &turn) == "error");
    CHECK(kind == ReplayError::Kind::Divergence);
    CHECK(turn == 2);
  }
  SUBCASE("truncated file is a format error") {
    auto cut = lines;
    cut.pop_back();
    ReplayError::Kind kind{};
    CHECK(replay_text(join(cut), scenario, &kind) == "error");
    CHECK(kind == ReplayError::Kind::Format);
    CHECK(replay_text(text.substr(0, text.size() / 2), scenario, &kind) == "error");
    CHECK(kind == ReplayError::Kind::Format);
    CHECK(replay_text("", scenario, &kind) == "error");
    CHECK(kind == ReplayError::Kind::Format);
  }
  SUBCASE("empty footer is a format error") {
    auto bad = lines;
    bad.back() = R"({"type":"footer"})";
    ReplayError::Kind kind{};
    CHECK(replay_text(join(bad), scenario, &kind) == "error");
    CHECK(kind == ReplayError::Kind::Format);
  }
  SUBCASE("version mismatch") {
    auto bad = lines;
    auto header = json::parse(bad[0]);
    header["format"] = "cdtrace/0";
    bad[0] = header.dump();
    ReplayError::Kind kind{};
    CHECK(replay_text(join(bad), scenario, &kind) == "error");
    CHECK(kind == ReplayError::Kind::Version);
  }
  SUBCASE("different scenario is a hash error") {
    auto other = scenario;
    other.reward = reward_preset("pci");
    ReplayError::Kind kind{};
    CHECK(replay_text(text, other, &kind) == "error");
    CHECK(kind == ReplayError::Kind::Hash);
  }
  SUBCASE("tampered footer hash") {
    auto bad = lines;
    auto footer = json::parse(bad.back());
    footer["trace_hash"] = hex64(1);
    bad.back() = footer.dump();
    ReplayError::Kind kind{};
    CHECK(replay_text(join(bad), scenario, &kind) == "error");
    CHECK(kind == ReplayError::Kind::Hash);
  }
}

TEST_CASE("scenario hashes track every part") {
  auto a = testing::load_named("default");
  auto b = a;
  b.config.encoding = Encoding::Baseline;
  CHECK(a.config_hash() != b.config_hash());
  auto c = Scenario::load(testing::scenario_path("default"), "realistic", "pci");
  CHECK(c.detector_hash() != a.detector_hash());
  CHECK(c.reward_hash() != a.reward_hash());
  CHECK(c.config.detector_config_ref == "realistic");
  CHECK_THROWS_AS(Scenario::load(testing::scenario_path("default"), "psychic"),
                  ConfigError);
  // File refs resolve against the scenario's own directory.
  auto honeynet = testing::load_named("honeynet");
  CHECK(honeynet.detectors == detector_preset("realistic"));
  CHECK(honeynet.reward.weights == reward_preset("research-honeynet").weights);
}

TEST_CASE("perfect detectors: detector activity matches baseline activity") {
  auto scenario = testing::load_named("default");
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto base = scenario;
    base.config.encoding = Encoding::Baseline;
    auto det = scenario;
    det.config.encoding = Encoding::Detector;
    Engine eb(base), ed(det);
    eb.reset(seed);
    ed.reset(seed);
    RandomPolicy pb(seed), pd(seed);
    pb.begin_episode(seed);
    pd.begin_episode(seed);
    while (!eb.done()) {
      // Same blue actions in both so the ground truth stays in lockstep.
      auto action = pb.act(eb.observation(), eb.catalog());
      eb.step(action);
      ed.step(action);
      for (HostIndex h = 0; h < eb.world().host_count(); ++h) {
        CHECK((eb.observation().activity_level(h) > 0) ==
              (ed.observation().activity_level(h) > 0));
      }
    }
  }
}

}  // namespace
}  // namespace cyberdef
