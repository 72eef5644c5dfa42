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

// cyberdef: command-line front end for the simulator.
//
//   cyberdef gen     --scenario S --out DIR
//   cyberdef train   --scenario S --episodes N --out DIR
//   cyberdef eval    --scenario S --policy P --episodes N --out DIR [--traces]
//   cyberdef sweep   --scenario S --settings a,b,... --out DIR
//   cyberdef compare --scenario S --episodes N --out DIR
//   cyberdef replay  --scenario S --trace FILE [--turn N]
//
// Exit codes: 0 success, 1 usage, 2 config, 3 divergence/verification.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cyberdef/agents.hpp"
#include "cyberdef/engine.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cyberdef;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitConfig = 2;
constexpr int kExitVerify = 3;

struct Options {
  std::string scenario;
  std::uint64_t seed = 0;
  std::size_t episodes = 0;
  std::string reward_preset;
  std::string detector_preset;
  std::string encoding;
  std::string out = "out";
  std::string policy = "heuristic";
  std::string qtable;
  std::vector<std::string> settings;
  std::size_t window = 1000;
  bool traces = false;
  std::string trace;
  int turn = 0;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Scenario load(const Options& opt) {
  auto scenario =
      Scenario::load(opt.scenario, opt.detector_preset, opt.reward_preset);
  if (!opt.encoding.empty()) {
    auto enc = parse_encoding(opt.encoding);
    if (!enc) throw UsageError("--encoding must be baseline or detector");
    scenario.config.encoding = *enc;
  }
  for (const auto& w : reward_config_warnings(scenario.reward)) {
    std::cerr << "warning: " << w << '\n';
  }
  return scenario;
}

fs::path prepare_out(const Options& opt) {
  fs::path dir(opt.out);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

// Everything needed to rerun the command; no timestamps, so reruns produce
// identical bytes.
void write_manifest(const fs::path& dir, const std::string& command,
                    const Options& opt, const Scenario& scenario,
                    const std::vector<std::string>& files, json extra = {}) {
  json m{{"command", command},
         {"scenario", opt.scenario},
         {"scenario_hash", hex64(scenario.config_hash())},
         {"scenario_seed", scenario.config.seed},
         {"detector_config", scenario.config.detector_config_ref},
         {"detector_config_hash", hex64(scenario.detector_hash())},
         {"reward_config", scenario.config.reward_config_ref},
         {"reward_config_hash", hex64(scenario.reward_hash())},
         {"encoding", std::string(to_string(scenario.config.encoding))},
         {"seed", opt.seed},
         {"episodes", opt.episodes},
         {"files", files}};
  if (extra.is_object()) m.update(extra);
  write_file(dir / "manifest.json", m.dump(2) + "\n");
}

std::string returns_csv(const std::vector<double>& returns) {
  std::string out = "episode,return\n";
  for (std::size_t i = 0; i < returns.size(); ++i) {
    out += std::to_string(i) + "," + fixed9(returns[i]) + "\n";
  }
  return out;
}

std::unique_ptr<Policy> make_policy(const Options& opt, const Engine& engine) {
  if (opt.policy == "noop") return std::make_unique<NoOpPolicy>();
  if (opt.policy == "random") return std::make_unique<RandomPolicy>(opt.seed);
  if (opt.policy == "heuristic") return std::make_unique<HeuristicPolicy>();
  if (opt.policy == "qtable") {
    if (opt.qtable.empty()) throw UsageError("--policy qtable needs --qtable PATH");
    auto table = load_qtable(opt.qtable);
    if (table.action_count() != engine.catalog().size()) {
      throw ConfigError(ConfigError::Kind::Invariant, "qtable",
                        "Q-table action count does not match the scenario");
    }
    auto learner = std::make_unique<QLearner>(std::move(table),
                                              QLearningParams{}, opt.seed);
    learner->set_training(false);
    return learner;
  }
  throw UsageError("unknown policy '" + opt.policy +
                   "' (noop, random, heuristic, qtable)");
}

int cmd_gen(const Options& opt) {
  auto scenario = load(opt);
  auto dir = prepare_out(opt);
  auto topology = generate_topology(scenario.config, scenario.config.seed);
  write_file(dir / "topology.json", topology.to_json().dump() + "\n");
  write_file(dir / "scenario.json", to_json(scenario.config).dump(2) + "\n");
  write_manifest(dir, "gen", opt, scenario, {"topology.json", "scenario.json"});
  std::cout << "wrote " << (dir / "topology.json").string() << " ("
            << topology.subnets().size() << " subnets, " << topology.host_count()
            << " hosts, critical " << topology.host(topology.critical_host()).id
            << ")\n";
  return kExitOk;
}

int cmd_train(const Options& opt) {
  auto scenario = load(opt);
  auto dir = prepare_out(opt);
  Engine probe(scenario);
  QLearner learner(probe.catalog().size(), QLearningParams{}, opt.seed);
  auto curve = train(scenario, learner, opt.episodes, opt.seed);
  write_file(dir / "curve.csv", returns_csv(curve));
  save_qtable(learner.table(), dir / "qtable.json");
  write_manifest(dir, "train", opt, scenario, {"curve.csv", "qtable.json"});
  const auto window = std::min<std::size_t>(100, curve.size());
  std::vector<double> tail(curve.end() - static_cast<std::ptrdiff_t>(window),
                           curve.end());
  std::cout << "trained " << curve.size() << " episodes; last " << window
            << " mean return " << fixed9(mean_of(tail)) << "\n";
  return kExitOk;
}

int cmd_eval(const Options& opt) {
  auto scenario = load(opt);
  auto dir = prepare_out(opt);
  Engine engine(scenario);
  auto policy = make_policy(opt, engine);
  std::vector<std::string> files = {"stats.csv"};
  if (opt.traces) fs::create_directories(dir / "traces");
  std::vector<double> returns;
  for (std::size_t i = 0; i < opt.episodes; ++i) {
    const auto& trace = run_episode(engine, *policy, episode_seed(opt.seed, i));
    returns.push_back(trace.total_return);
    if (opt.traces) {
      char name[64];
      std::snprintf(name, sizeof name, "traces/episode_%04zu.cdtrace.jsonl", i);
      write_trace(trace, dir / name);
      files.emplace_back(name);
    }
  }
  write_file(dir / "stats.csv", returns_csv(returns));
  write_manifest(dir, "eval", opt, scenario, files,
                 {{"policy", opt.policy},
                  {"mean_return", fixed9(mean_of(returns))},
                  {"std_return", fixed9(stddev_of(returns))}});
  std::cout << opt.policy << ": mean " << fixed9(mean_of(returns)) << ", std "
            << fixed9(stddev_of(returns)) << " over " << returns.size()
            << " episodes\n";
  return kExitOk;
}

int cmd_sweep(const Options& opt) {
  if (opt.settings.size() < 2) {
    throw UsageError("sweep needs at least two --settings");
  }
  auto base = load(opt);
  auto dir = prepare_out(opt);
  std::string csv = "setting,policy,episodes,mean_return,std_return\n";
  for (const auto& setting : opt.settings) {
    auto config = base.config;
    config.detector_config_ref = setting;
    auto scenario = Scenario::resolve(config, fs::path(opt.scenario).parent_path());
    Engine engine(scenario);
    auto policy = make_policy(opt, engine);
    auto stats = evaluate(scenario, *policy, opt.episodes, opt.seed);
    csv += setting + "," + opt.policy + "," + std::to_string(opt.episodes) + "," +
           fixed9(stats.mean) + "," + fixed9(stats.stddev) + "\n";
    std::cout << setting << ": mean " << fixed9(stats.mean) << "\n";
  }
  write_file(dir / "sweep.csv", csv);
  write_manifest(dir, "sweep", opt, base, {"sweep.csv"},
                 {{"policy", opt.policy}, {"settings", opt.settings}});
  return kExitOk;
}

int cmd_compare(const Options& opt) {
  auto base = load(opt);
  auto dir = prepare_out(opt);
  std::vector<std::vector<double>> curves;
  const Encoding encodings[] = {Encoding::Baseline, Encoding::Detector};
  for (auto enc : encodings) {
    auto scenario = base;
    scenario.config.encoding = enc;
    Engine probe(scenario);
    QLearner learner(probe.catalog().size(), QLearningParams{}, opt.seed);
    curves.push_back(train(scenario, learner, opt.episodes, opt.seed));
  }
  std::string csv = "episode,baseline_return,detector_return\n";
  for (std::size_t i = 0; i < opt.episodes; ++i) {
    csv += std::to_string(i) + "," + fixed9(curves[0][i]) + "," +
           fixed9(curves[1][i]) + "\n";
  }
  const auto window = std::min(opt.window, opt.episodes);
  std::string summary = "encoding,episodes,window,final_window_mean,final_window_std\n";
  for (std::size_t e = 0; e < 2; ++e) {
    std::vector<double> tail(curves[e].end() - static_cast<std::ptrdiff_t>(window),
                             curves[e].end());
    summary += std::string(to_string(encodings[e])) + "," +
               std::to_string(opt.episodes) + "," + std::to_string(window) + "," +
               fixed9(mean_of(tail)) + "," + fixed9(stddev_of(tail)) + "\n";
  }
  write_file(dir / "compare.csv", csv);
  write_file(dir / "compare_summary.csv", summary);
  write_manifest(dir, "compare", opt, base, {"compare.csv", "compare_summary.csv"},
                 {{"window", window}});
  std::cout << summary;
  return kExitOk;
}

std::string describe_red(const json& r) {
  if (r["red_action"].is_null()) return r["red_stalled"].get<bool>() ? "stalled" : "-";
  const auto& a = r["red_action"];
  const auto& o = r["outcome"];
  std::string s = a["kind"].get<std::string>() + " " + a["target"].get<std::string>() +
                  (o["success"].get<bool>() ? " -> success" : " -> failed");
  if (o["decoy"].get<bool>()) s += " (decoy)";
  if (o["impact"].get<bool>()) s += " (impact)";
  return s;
}

std::string describe_blue(const json& r) {
  const auto& a = r["blue_action"];
  std::string s = a["kind"].get<std::string>();
  for (const char* key : {"host", "subnet"}) {
    if (a.contains(key)) s += " " + (a[key].is_string() ? a[key].get<std::string>() : a[key].dump());
  }
  if (a.contains("subnets")) s += " " + a["subnets"][0].dump() + "-" + a["subnets"][1].dump();
  if (r["blue_illegal"].get<bool>()) s += " [illegal, ran as Monitor]";
  return s;
}

int cmd_replay(const Options& opt) {
  auto scenario = load(opt);
  ParsedTrace parsed;
  ReplayReport report;
  try {
    parsed = parse_trace_file(opt.trace);
    report = replay(parsed, scenario);
  } catch (const ReplayError& e) {
    std::cerr << "replay: " << e.what();
    if (e.kind() == ReplayError::Kind::Divergence) {
      std::cerr << " (diverged at turn " << e.turn() << ")";
    }
    std::cerr << '\n';
    return kExitVerify;
  }
  if (opt.turn < 0 || opt.turn > report.turns) {
    throw UsageError("--turn must lie in [1, " + std::to_string(report.turns) + "]");
  }
  for (const auto& r : parsed.records) {
    const int turn = r["turn"].get<int>();
    if (opt.turn != 0 && turn != opt.turn) continue;
    std::cout << "turn " << turn << "\n";
    std::cout << "  blue    " << describe_blue(r) << "\n";
    std::cout << "  red     " << describe_red(r) << "\n";
    std::cout << "  alerts ";
    if (r["alerts"].empty()) std::cout << " none";
    for (const auto& a : r["alerts"]) {
      std::cout << " " << a["component"].get<std::string>() << "@"
                << a["host"].get<std::string>()
                << (a["genuine"].get<bool>() ? "[genuine]" : "[false]");
    }
    const auto& c = r["reward_components"];
    std::cout << "\n  reward  " << r["reward"].get<std::string>() << "  (C "
              << c["C"].get<std::string>() << ", I " << c["I"].get<std::string>()
              << ", A " << c["A"].get<std::string>() << ", H "
              << c["H"].get<std::string>() << ")\n";
  }
  std::cout << "summary: " << report.turns << " turns, return "
            << fixed9(report.total_return) << ", trace hash "
            << hex64(report.trace_hash) << ", replay identical\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Autonomous cyber-defense simulator"};
  app.require_subcommand(1);
  Options opt;
  if (const char* env = std::getenv("CYBERDEF_SIM_SEED")) {
    try {
      opt.seed = std::stoull(env);
    } catch (const std::exception&) {
      std::cerr << "CYBERDEF_SIM_SEED is not an unsigned integer\n";
      return kExitUsage;
    }
  }

  // Episode defaults differ per command; 0 means "not given".
  std::vector<std::pair<CLI::App*, std::size_t>> episode_defaults;
  auto common = [&](CLI::App* sub, std::size_t default_episodes) {
    episode_defaults.emplace_back(sub, default_episodes);
    sub->add_option("--scenario", opt.scenario, "Scenario JSON file")->required();
    sub->add_option("--seed", opt.seed, "Run seed (default: $CYBERDEF_SIM_SEED or 0)");
    sub->add_option("--reward-preset", opt.reward_preset, "Reward preset or file");
    sub->add_option("--detector-preset", opt.detector_preset,
                    "Detector preset or file");
    sub->add_option("--encoding", opt.encoding, "baseline or detector")
        ->check(CLI::IsMember({"baseline", "detector"}));
  };
  auto with_out = [&](CLI::App* sub) {
    sub->add_option("--out", opt.out, "Output directory");
  };
  auto with_episodes = [&](CLI::App* sub) {
    sub->add_option("--episodes", opt.episodes, "Episode count")
        ->check(CLI::PositiveNumber);
  };
  auto with_policy = [&](CLI::App* sub) {
    sub->add_option("--policy", opt.policy, "noop, random, heuristic or qtable");
    sub->add_option("--qtable", opt.qtable, "Q-table checkpoint for --policy qtable");
  };

  auto* gen = app.add_subcommand("gen", "Generate a topology");
  common(gen, 1);
  with_out(gen);
  auto* tr = app.add_subcommand("train", "Train a tabular Q-learner");
  common(tr, 1000);
  with_out(tr);
  with_episodes(tr);
  auto* ev = app.add_subcommand("eval", "Evaluate a policy");
  common(ev, 100);
  with_out(ev);
  with_episodes(ev);
  with_policy(ev);
  ev->add_flag("--traces", opt.traces, "Write one trace file per episode");
  auto* sw = app.add_subcommand("sweep", "Evaluate a policy across detector settings");
  common(sw, 500);
  with_out(sw);
  with_episodes(sw);
  with_policy(sw);
  sw->add_option("--settings", opt.settings,
                 "Detector presets/files, e.g. perfect,realistic,uniform:0.5")
      ->delimiter(',')
      ->required();
  auto* cmp = app.add_subcommand("compare", "Train on both encodings and compare");
  common(cmp, 1000);
  with_out(cmp);
  with_episodes(cmp);
  cmp->add_option("--window", opt.window, "Final window for the summary")
      ->check(CLI::PositiveNumber);
  auto* rp = app.add_subcommand("replay", "Verify and render a trace");
  common(rp, 1);
  rp->add_option("--trace", opt.trace, "Trace file")->required();
  rp->add_option("--turn", opt.turn, "Render only this turn");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }
  for (auto [sub, episodes] : episode_defaults) {
    if (*sub && opt.episodes == 0) opt.episodes = episodes;
  }

  try {
    if (*gen) return cmd_gen(opt);
    if (*tr) return cmd_train(opt);
    if (*ev) return cmd_eval(opt);
    if (*sw) return cmd_sweep(opt);
    if (*cmp) return cmd_compare(opt);
    if (*rp) return cmd_replay(opt);
  } catch (const UsageError& e) {
    std::cerr << "usage: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "config: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitUsage;
}
