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
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "cyberdef/engine.hpp"
#include "cyberdef/policy.hpp"
#include "cyberdef/rng.hpp"

namespace cyberdef {

// Always Monitor.
class NoOpPolicy final : public Policy {
 public:
  BlueAction act(const Observation&, const ActionCatalog&) override {
    return BlueAction::monitor();
  }
};

// Uniform over the catalog. Reseeds per episode from
// derive_seed(seed, episode_seed), so each episode is reproducible alone.
class RandomPolicy final : public Policy {
 public:
  explicit RandomPolicy(std::uint64_t seed) : seed_(seed), rng_(seed) {}

  void begin_episode(std::uint64_t episode_seed) override {
    rng_ = Rng(derive_seed(seed_, episode_seed));
  }
  BlueAction act(const Observation& observation,
                 const ActionCatalog& catalog) override;

 private:
  std::uint64_t seed_;
  Rng rng_;
};

// Scripted reference defender:
//   1. Restore the first host observed Privileged;
//   2. else Remove the first host observed User, or showing Exploit activity;
//   3. else Analyze the host with the most alerts this turn (lowest index
//      wins ties);
//   4. else Monitor.
BlueAction heuristic_act(const Observation& observation);

class HeuristicPolicy final : public Policy {
 public:
  BlueAction act(const Observation& observation, const ActionCatalog&) override {
    return heuristic_act(observation);
  }
};

// Feature hash used as the Q-table key: FNV-1a over one byte per field.
// Baseline keys on the exact (Activity, Compromise) sequence; detector keys
// quantize each alert count to {0, 1, 2+} and append the Compromise.
std::uint64_t observation_key(const Observation& observation);

struct QLearningParams {
  double alpha = 0.1;
  double gamma = 0.95;
  double epsilon_start = 1.0;
  double epsilon_decay = 0.9995;
  double epsilon_floor = 0.05;

  // max(floor, start * decay^episode)
  double epsilon(std::size_t episode) const;
};

class QTable {
 public:
  explicit QTable(std::size_t action_count = 0) : action_count_(action_count) {}

  std::size_t action_count() const { return action_count_; }
  std::size_t size() const { return values_.size(); }

  // Unseen keys read as zeros.
  double value(std::uint64_t key, std::size_t action) const;
  std::vector<double> row(std::uint64_t key) const;
  double max_value(std::uint64_t key) const;
  // Highest-valued action; lowest index wins ties.
  std::size_t greedy_action(std::uint64_t key) const;
  void set(std::uint64_t key, std::size_t action, double value);

  const std::unordered_map<std::uint64_t, std::vector<double>>& entries() const {
    return values_;
  }

  friend bool operator==(const QTable&, const QTable&) = default;

 private:
  std::size_t action_count_;
  std::unordered_map<std::uint64_t, std::vector<double>> values_;
};

// Q(k,a) += alpha * (r + gamma * max_a' Q(k',a') * (1 - done) - Q(k,a)).
// Only that one cell changes. Throws ContractError for a non-finite reward
// or alpha/gamma out of range.
void q_update(QTable& table, std::uint64_t key, std::size_t action,
              double reward, std::uint64_t next_key, bool done,
              double alpha, double gamma);

// Checkpoint: {"format":"cdqtable/1","action_count":N,"entries":{hex:[...]}}
// with entries in key order.
nlohmann::json to_json(const QTable& table);
QTable qtable_from_json(const nlohmann::json& doc);
void save_qtable(const QTable& table, const std::filesystem::path& path);
QTable load_qtable(const std::filesystem::path& path);

// Tabular epsilon-greedy learner. While training it explores with the
// current epsilon and updates on every notify(); frozen, it is greedy.
class QLearner final : public Policy {
 public:
  QLearner(std::size_t action_count, QLearningParams params, std::uint64_t seed);
  QLearner(QTable table, QLearningParams params, std::uint64_t seed);

  void set_training(bool training) { training_ = training; }
  void set_epsilon(double epsilon) { epsilon_ = epsilon; }
  double epsilon() const { return epsilon_; }

  void begin_episode(std::uint64_t episode_seed) override;
  BlueAction act(const Observation& observation,
                 const ActionCatalog& catalog) override;
  void notify(double reward, bool done) override;

  const QTable& table() const { return table_; }
  const QLearningParams& params() const { return params_; }

 private:
  QTable table_;
  QLearningParams params_;
  Rng rng_;
  bool training_ = true;
  double epsilon_;
  std::uint64_t last_key_ = 0;
  std::size_t last_action_ = 0;
  bool pending_ = false;
  double pending_reward_ = 0.0;
};

// Episode i of a run seeded `seed` uses derive_seed(seed, i).
std::uint64_t episode_seed(std::uint64_t seed, std::size_t index);

// Trains for `episodes` episodes with epsilon = params.epsilon(i) in
// episode i. Returns the per-episode return curve.
std::vector<double> train(const Scenario& scenario, QLearner& learner,
                          std::size_t episodes, std::uint64_t seed);

struct EvalStats {
  std::vector<double> returns;
  std::vector<std::uint64_t> seeds;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation; 0 for one episode
};

double mean_of(const std::vector<double>& xs);
double stddev_of(const std::vector<double>& xs);

// Runs the policy (a QLearner is frozen for the duration) on episode seeds
// derived from `seed`.
EvalStats evaluate(const Scenario& scenario, Policy& policy,
                   std::size_t episodes, std::uint64_t seed);

// One-sided paired t-test of H1: mean(a - b) > 0. Returns the p-value.
double paired_t_test_greater(const std::vector<double>& a,
                             const std::vector<double>& b);

}  // namespace cyberdef
