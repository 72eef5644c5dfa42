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

#include "cyberdef/agents.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include <boost/math/distributions/students_t.hpp>

namespace cyberdef {

using nlohmann::json;

BlueAction RandomPolicy::act(const Observation&, const ActionCatalog& catalog) {
  return catalog[rng_.uniform_index(catalog.size())];
}

BlueAction heuristic_act(const Observation& obs) {
  const auto n = obs.host_count();
  for (HostIndex h = 0; h < n; ++h) {
    if (obs.compromised[h] == Compromise::Privileged) {
      return BlueAction::on_host(BlueActionKind::Restore, h);
    }
  }
  for (HostIndex h = 0; h < n; ++h) {
    const bool exploit_seen = obs.encoding == Encoding::Baseline &&
                              obs.activity[h] == Activity::Exploit;
    if (obs.compromised[h] == Compromise::User || exploit_seen) {
      return BlueAction::on_host(BlueActionKind::Remove, h);
    }
  }
  std::optional<HostIndex> busiest;
  unsigned most = 0;
  for (HostIndex h = 0; h < n; ++h) {
    if (auto level = obs.activity_level(h); level > most) {
      most = level;
      busiest = h;
    }
  }
  if (busiest) return BlueAction::on_host(BlueActionKind::Analyze, *busiest);
  return BlueAction::monitor();
}

std::uint64_t observation_key(const Observation& obs) {
  std::string bytes;
  bytes.push_back(static_cast<char>(obs.encoding));
  for (HostIndex h = 0; h < obs.host_count(); ++h) {
    if (obs.encoding == Encoding::Baseline) {
      bytes.push_back(static_cast<char>(obs.activity[h]));
    } else {
      for (std::size_t c = 0; c < obs.component_count; ++c) {
        bytes.push_back(static_cast<char>(std::min<unsigned>(obs.count(h, c), 2)));
      }
    }
    bytes.push_back(static_cast<char>(obs.compromised[h]));
  }
  return fnv1a64(bytes);
}

double QLearningParams::epsilon(std::size_t episode) const {
  return std::max(epsilon_floor,
                  epsilon_start * std::pow(epsilon_decay,
                                           static_cast<double>(episode)));
}

double QTable::value(std::uint64_t key, std::size_t action) const {
  auto it = values_.find(key);
  return it == values_.end() ? 0.0 : it->second.at(action);
}

std::vector<double> QTable::row(std::uint64_t key) const {
  auto it = values_.find(key);
  return it == values_.end() ? std::vector<double>(action_count_, 0.0)
                             : it->second;
}

double QTable::max_value(std::uint64_t key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return 0.0;
  return *std::max_element(it->second.begin(), it->second.end());
}

std::size_t QTable::greedy_action(std::uint64_t key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return 0;
  const auto& row = it->second;
  return static_cast<std::size_t>(
      std::max_element(row.begin(), row.end()) - row.begin());
}

void QTable::set(std::uint64_t key, std::size_t action, double value) {
  if (action >= action_count_) throw ContractError("Q-table action out of range");
  auto [it, inserted] = values_.try_emplace(key);
  if (inserted) it->second.assign(action_count_, 0.0);
  it->second[action] = value;
}

void q_update(QTable& table, std::uint64_t key, std::size_t action,
              double reward, std::uint64_t next_key, bool done, double alpha,
              double gamma) {
  if (!std::isfinite(reward)) throw ContractError("non-finite reward");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ContractError("alpha must be in (0, 1]");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ContractError("gamma must be in [0, 1]");
  const double bootstrap = done ? 0.0 : gamma * table.max_value(next_key);
  const double current = table.value(key, action);
  const double updated = current + alpha * (reward + bootstrap - current);
  // Leave untouched keys absent rather than materializing zero rows.
  if (updated == current && table.entries().count(key) == 0) return;
  table.set(key, action, updated);
}

json to_json(const QTable& table) {
  std::map<std::uint64_t, const std::vector<double>*> ordered;
  for (const auto& [key, row] : table.entries()) ordered[key] = &row;
  json entries = json::object();
  for (const auto& [key, row] : ordered) entries[hex64(key)] = *row;
  return json{{"format", "cdqtable/1"},
              {"action_count", table.action_count()},
              {"entries", std::move(entries)}};
}

QTable qtable_from_json(const json& doc) {
  auto bad = [](const std::string& why) -> ConfigError {
    return ConfigError(ConfigError::Kind::Parse, "qtable", "Q-table: " + why);
  };
  if (!doc.is_object() || doc.value("format", "") != "cdqtable/1") {
    throw bad("expected format cdqtable/1");
  }
  if (!doc.contains("action_count") || !doc["action_count"].is_number_unsigned()) {
    throw bad("missing action_count");
  }
  QTable table(doc["action_count"].get<std::size_t>());
  if (!doc.contains("entries") || !doc["entries"].is_object()) {
    throw bad("missing entries");
  }
  for (const auto& [hex, row] : doc["entries"].items()) {
    auto key = parse_hex64(hex);
    if (!key) throw bad("bad key " + hex);
    if (!row.is_array() || row.size() != table.action_count()) {
      throw bad("row " + hex + " has the wrong length");
    }
    for (std::size_t a = 0; a < row.size(); ++a) {
      if (!row[a].is_number() || !std::isfinite(row[a].get<double>())) {
        throw bad("row " + hex + " holds a non-finite value");
      }
      table.set(*key, a, row[a].get<double>());
    }
  }
  return table;
}

void save_qtable(const QTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_json(table).dump() << '\n';
}

QTable load_qtable(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(ConfigError::Kind::MissingFile, "qtable",
                      "cannot open " + path.string());
  }
  try {
    return qtable_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ConfigError(ConfigError::Kind::Parse, "qtable", e.what());
  }
}

QLearner::QLearner(std::size_t action_count, QLearningParams params,
                   std::uint64_t seed)
    : QLearner(QTable(action_count), params, seed) {}

QLearner::QLearner(QTable table, QLearningParams params, std::uint64_t seed)
    : table_(std::move(table)),
      params_(params),
      rng_(derive_seed(seed, "explore")),
      epsilon_(params.epsilon_start) {}

void QLearner::begin_episode(std::uint64_t) { pending_ = false; }

BlueAction QLearner::act(const Observation& obs, const ActionCatalog& catalog) {
  if (catalog.size() != table_.action_count()) {
    throw ContractError("Q-table was built for a different action catalog");
  }
  const auto key = observation_key(obs);
  if (training_ && pending_) {
    q_update(table_, last_key_, last_action_, pending_reward_, key, false,
             params_.alpha, params_.gamma);
  }
  pending_ = false;
  std::size_t action;
  if (training_ && rng_.bernoulli(epsilon_)) {
    action = rng_.uniform_index(catalog.size());
  } else {
    action = table_.greedy_action(key);
  }
  last_key_ = key;
  last_action_ = action;
  return catalog[action];
}

void QLearner::notify(double reward, bool done) {
  if (!training_) return;
  if (done) {
    q_update(table_, last_key_, last_action_, reward, 0, true, params_.alpha,
             params_.gamma);
    pending_ = false;
  } else {
    pending_ = true;
    pending_reward_ = reward;
  }
}

std::uint64_t episode_seed(std::uint64_t seed, std::size_t index) {
  return derive_seed(seed, static_cast<std::uint64_t>(index));
}

std::vector<double> train(const Scenario& scenario, QLearner& learner,
                          std::size_t episodes, std::uint64_t seed) {
  if (episodes < 1) throw ContractError("train needs at least one episode");
  Engine engine(scenario);
  std::vector<double> curve;
  curve.reserve(episodes);
  learner.set_training(true);
  for (std::size_t i = 0; i < episodes; ++i) {
    learner.set_epsilon(learner.params().epsilon(i));
    curve.push_back(
        run_episode(engine, learner, episode_seed(seed, i)).total_return);
  }
  learner.set_training(false);
  return curve;
}

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

double stddev_of(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

EvalStats evaluate(const Scenario& scenario, Policy& policy,
                   std::size_t episodes, std::uint64_t seed) {
  if (episodes < 1) throw ContractError("evaluate needs at least one episode");
  auto* learner = dynamic_cast<QLearner*>(&policy);
  if (learner) learner->set_training(false);
  Engine engine(scenario);
  EvalStats stats;
  for (std::size_t i = 0; i < episodes; ++i) {
    const auto s = episode_seed(seed, i);
    stats.seeds.push_back(s);
    stats.returns.push_back(run_episode(engine, policy, s).total_return);
  }
  stats.mean = mean_of(stats.returns);
  stats.stddev = stddev_of(stats.returns);
  return stats;
}

double paired_t_test_greater(const std::vector<double>& a,
                             const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw ContractError("paired test needs two equal samples of size >= 2");
  }
  std::vector<double> diff(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
  const double m = mean_of(diff);
  const double sd = stddev_of(diff);
  if (sd == 0.0) return m > 0.0 ? 0.0 : 1.0;
  const double n = static_cast<double>(diff.size());
  const double t = m / (sd / std::sqrt(n));
  boost::math::students_t dist(n - 1.0);
  return boost::math::cdf(boost::math::complement(dist, t));
}

}  // namespace cyberdef
