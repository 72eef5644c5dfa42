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


#include <cmath>
#include <filesystem>
#include <numbers>

#include "doctest.h"

#include "cyberdef/agents.hpp"
#include "test_util.hpp"

namespace cyberdef {
namespace {

Observation baseline_obs(std::vector<Activity> activity, std::vector<Compromise> compromised) {
  auto obs = initial_observation(Encoding::Baseline, activity.size(), 0);
  obs.activity = std::move(activity);
  obs.compromised = std::move(compromised);
  return obs;
}

TEST_CASE("heuristic ladder") {
  using enum Activity;
  using enum Compromise;
  CHECK(heuristic_act(baseline_obs({None, None}, {No, No})) == BlueAction::monitor());
  CHECK(heuristic_act(baseline_obs({None, Exploit}, {No, Privileged})) ==
        BlueAction::on_host(BlueActionKind::Restore, 1));
  CHECK(heuristic_act(baseline_obs({None, Exploit}, {No, Unknown})) ==
        BlueAction::on_host(BlueActionKind::Remove, 1));
  CHECK(heuristic_act(baseline_obs({Scan, None}, {No, User})) ==
        BlueAction::on_host(BlueActionKind::Remove, 1));
  // Restore outranks Remove even on a later host.
  CHECK(heuristic_act(baseline_obs({Exploit, None}, {No, Privileged})) ==
        BlueAction::on_host(BlueActionKind::Restore, 1));
  // Lowest index wins baseline ties.
  CHECK(heuristic_act(baseline_obs({None, Scan, Scan}, {No, No, No})) ==
        BlueAction::on_host(BlueActionKind::Analyze, 1));

  auto det = initial_observation(Encoding::Detector, 3, 2);
  det.alert_counts = {0, 0, 2, 1, 0, 1};
  CHECK(heuristic_act(det) == BlueAction::on_host(BlueActionKind::Analyze, 1));
  det.alert_counts = {0, 0, 3, 0, 1, 0};
  CHECK(heuristic_act(det) == BlueAction::on_host(BlueActionKind::Analyze, 1));
  det.alert_counts = {1, 0, 0, 0, 0, 1};
  CHECK(heuristic_act(det) == BlueAction::on_host(BlueActionKind::Analyze, 0));
  det.compromised[2] = Compromise::User;
  CHECK(heuristic_act(det) == BlueAction::on_host(BlueActionKind::Remove, 2));
}

TEST_CASE("q_update examples") {
  QTable t(3);
  q_update(t, 7, 1, -1.0, 8, true, 1.0, 0.95);
  CHECK(t.value(7, 1) == -1.0);
  CHECK(t.value(7, 0) == 0.0);
  CHECK(t.value(7, 2) == 0.0);

  QTable zero(3);
  q_update(zero, 1, 0, 0.0, 2, false, 0.1, 0.95);
  CHECK(zero == QTable(3));

  QTable h(2);
  h.set(9, 1, 1.0);
  q_update(h, 4, 0, -1.0, 9, false, 0.5, 0.9);
  CHECK(h.value(4, 0) == doctest::Approx(-0.05).epsilon(1e-12));
  CHECK(h.value(9, 1) == 1.0);
  CHECK(h.value(4, 1) == 0.0);

  CHECK_THROWS_AS(q_update(h, 4, 0, std::nan(""), 9, false, 0.5, 0.9), ContractError);
  CHECK_THROWS_AS(q_update(h, 4, 0, INFINITY, 9, false, 0.5, 0.9), ContractError);
  CHECK_THROWS_AS(q_update(h, 4, 0, 0, 9, false, 0.0, 0.9), ContractError);
  CHECK_THROWS_AS(q_update(h, 4, 0, 0, 9, false, 0.5, 1.5), ContractError);
}

TEST_CASE("property: q_update touches exactly one cell") {
  Rng rng(5);
  QTable t(4);
  for (int i = 0; i < 2000; ++i) {
    const auto before = t;
    const std::uint64_t key = rng.uniform_index(20);
    const std::size_t action = rng.uniform_index(4);
    const double reward = static_cast<double>(rng.uniform_index(21)) - 10.0;
    q_update(t, key, action, reward, rng.uniform_index(20), rng.bernoulli(0.1), 0.1, 0.95);
    for (std::uint64_t k = 0; k < 20; ++k) {
      for (std::size_t a = 0; a < 4; ++a) {
        if (k == key && a == action) continue;
        REQUIRE(t.value(k, a) == before.value(k, a));
      }
    }
  }
}

TEST_CASE("greedy ties go to the lowest action") {
  QTable t(4);
  CHECK(t.greedy_action(123) == 0);
  t.set(1, 2, 0.5);
  t.set(1, 3, 0.5);
  CHECK(t.greedy_action(1) == 2);
  t.set(2, 0, -1.0);
  CHECK(t.greedy_action(2) == 1);
  CHECK(t.max_value(2) == 0.0);
}

TEST_CASE("epsilon schedule") {
  QLearningParams p;
  CHECK(p.alpha == 0.1);
  CHECK(p.gamma == 0.95);
  CHECK(p.epsilon(0) == 1.0);
  CHECK(p.epsilon(1) == doctest::Approx(0.9995));
  CHECK(p.epsilon(1000) == doctest::Approx(std::pow(0.9995, 1000)));
  // 0.9995^n falls below 0.05 near n = 5990.
  CHECK(p.epsilon(5980) > 0.05);
  CHECK(p.epsilon(6000) == 0.05);
  CHECK(p.epsilon(20000) == 0.05);
}

TEST_CASE("Q-table checkpoints round trip") {
  QTable t(5);
  t.set(0xdeadbeefcafef00dULL, 3, -1.25);
  t.set(1, 0, 0.1 + 0.2);
  t.set(2, 4, -1e-300);
  auto path = std::filesystem::temp_directory_path() / "cyberdef_qtable_test.json";
  save_qtable(t, path);
  auto loaded = load_qtable(path);
  CHECK(loaded == t);
  CHECK(qtable_from_json(to_json(t)) == t);
  CHECK(to_json(t)["format"] == "cdqtable/1");
  auto bad = to_json(t);
  bad["format"] = "cdqtable/9";
  CHECK_THROWS_AS(qtable_from_json(bad), ConfigError);
  bad = to_json(t);
  bad["entries"]["0000000000000001"] = {1.0};
  CHECK_THROWS_AS(qtable_from_json(bad), ConfigError);
  std::filesystem::remove(path);
}

TEST_CASE("observation keys are stable and quantized") {
  auto a = baseline_obs({Activity::None, Activity::Exploit},
                        {Compromise::No, Compromise::Privileged});
  // Pinned value: the key must not depend on the process.
  CHECK(observation_key(a) == observation_key(a));
  std::string bytes = {0, 0, 0, 2, 3};
  CHECK(observation_key(a) == fnv1a64(bytes));
  auto b = a;
  b.compromised[1] = Compromise::User;
  CHECK(observation_key(a) != observation_key(b));

  auto d = initial_observation(Encoding::Detector, 2, 2);
  auto e = d;
  d.alert_counts = {0, 2, 1, 0};
  e.alert_counts = {0, 7, 1, 0};
  CHECK(observation_key(d) == observation_key(e));
  e.alert_counts = {0, 1, 1, 0};
  CHECK(observation_key(d) != observation_key(e));
}

TEST_CASE("train and evaluate are deterministic") {
  auto scenario = testing::load_named("one_subnet");
  Engine probe(scenario);
  const auto actions = probe.catalog().size();
  QLearner a(actions, {}, 3), b(actions, {}, 3);
  auto ca = train(scenario, a, 200, 11);
  auto cb = train(scenario, b, 200, 11);
  CHECK(ca == cb);
  CHECK(a.table() == b.table());
  QLearner one(actions, {}, 3);
  CHECK(train(scenario, one, 1, 11).size() == 1);
  QLearner none(actions, {}, 3);
  CHECK_THROWS_AS(train(scenario, none, 0, 11), ContractError);

  auto ea = evaluate(scenario, a, 30, 4);
  auto eb = evaluate(scenario, a, 30, 4);
  CHECK(ea.returns == eb.returns);
  CHECK(ea.seeds == eb.seeds);
  CHECK(ea.mean == eb.mean);
  CHECK(ea.stddev == eb.stddev);
  CHECK(ea.seeds[3] == episode_seed(4, 3));
  CHECK(ea.seeds[3] == derive_seed(4, 3));
}

TEST_CASE("no-op against no red") {
  auto c = testing::small_config(3, 2, 3);
  c.red_strategy = RedStrategyKind::None;
  NoOpPolicy noop;
  auto stats = evaluate(Scenario::resolve(c), noop, 10, 1);
  CHECK(stats.mean == 0.0);
  CHECK(stats.stddev == 0.0);
  CHECK(stats.returns.size() == 10);
}

TEST_CASE("summary statistics") {
  CHECK(mean_of({1, 2, 3, 4}) == 2.5);
  CHECK(stddev_of({2, 4, 4, 4, 5, 5, 7, 9}) == doctest::Approx(std::sqrt(32.0 / 7.0)));
  CHECK(stddev_of({5}) == 0.0);
}

TEST_CASE("paired t-test against closed forms") {
  // df = 1 is Cauchy: P(T > t) = 1/2 - atan(t)/pi. Diffs {1, 3}: t = 2.
  CHECK(paired_t_test_greater({1, 3}, {0, 0}) ==
        doctest::Approx(0.5 - std::atan(2.0) / std::numbers::pi).epsilon(1e-12));
  // df = 2: P(T > t) = 1/2 - t / (2 sqrt(2 + t^2)). Diffs {1, 2, 3}: t = 2 sqrt 3.
  const double t = 2.0 * std::sqrt(3.0);
  CHECK(paired_t_test_greater({2, 3, 4}, {1, 1, 1}) ==
        doctest::Approx(0.5 - t / (2.0 * std::sqrt(2.0 + t * t))).epsilon(1e-12));
  CHECK(paired_t_test_greater({3, 1}, {0, 0}) ==
        paired_t_test_greater({1, 3}, {0, 0}));
  CHECK(paired_t_test_greater({0, 0}, {1, 3}) ==
        doctest::Approx(0.5 + std::atan(2.0) / std::numbers::pi));
  CHECK(paired_t_test_greater({2, 2}, {1, 1}) == 0.0);
  CHECK(paired_t_test_greater({1, 1}, {1, 1}) == 1.0);
  CHECK_THROWS_AS(paired_t_test_greater({1}, {0}), ContractError);
  CHECK_THROWS_AS(paired_t_test_greater({1, 2}, {0}), ContractError);
}

TEST_CASE("heuristic beats random on the default scenario") {
  auto scenario = testing::load_named("default");
  HeuristicPolicy heuristic;
  RandomPolicy random(7);
  auto h = evaluate(scenario, heuristic, 100, 1);
  auto r = evaluate(scenario, random, 100, 1);
  CHECK(h.seeds == r.seeds);
  CHECK(h.mean >= r.mean);
  CHECK(paired_t_test_greater(h.returns, r.returns) < 0.01);
}

TEST_CASE("learning sanity on one subnet") {
  auto scenario = testing::load_named("one_subnet");
  Engine probe(scenario);
  QLearner learner(probe.catalog().size(), {}, 1);
  auto curve = train(scenario, learner, 4000, 2);
  learner.set_training(false);
  RandomPolicy random(3);
  auto greedy = evaluate(scenario, learner, 100, 77);
  auto baseline = evaluate(scenario, random, 100, 77);
  MESSAGE("greedy " << greedy.mean << " random " << baseline.mean << " +- " << baseline.stddev);
  CHECK(greedy.mean > baseline.mean - baseline.stddev);
  // The greedy policy performs no exploration.
  CHECK(evaluate(scenario, learner, 20, 5).returns == evaluate(scenario, learner, 20, 5).returns);
}

}  // namespace
}  // namespace cyberdef
