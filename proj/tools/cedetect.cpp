// Copyright 2026 The cedetect Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line driver. Exit codes: 0 success, 1 verification failure,
// 2 usage or configuration error, 3 runtime or feasibility error.

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cedetect/adversary.hpp"
#include "cedetect/config.hpp"
#include "cedetect/csv.hpp"
#include "cedetect/detection.hpp"
#include "cedetect/equilibrium.hpp"
#include "cedetect/game.hpp"
#include "cedetect/rng.hpp"
#include "cedetect/simulation.hpp"
#include "cedetect/tilted_family.hpp"

#ifndef CEDETECT_VERSION
#define CEDETECT_VERSION "dev"
#endif

namespace fs = std::filesystem;
using cedetect::config::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw cedetect::Error("SHA-256 computation failed");
  }
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof(buf), "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

// Options shared by all subcommands.
struct Common {
  std::string config_path;
  std::string out_dir = "out";
  unsigned workers = cedetect::default_workers();
  std::optional<double> epsilon;
  std::vector<double> alpha_grid;
  std::optional<std::size_t> episodes;
  std::optional<std::size_t> horizon;
  std::optional<std::uint64_t> seed;
};

struct Run {
  json doc;
  fs::path base_dir;
  fs::path out_dir;
  std::vector<std::string> outputs;
  std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();
};

void add_common(CLI::App* cmd, Common& c, bool experiment_flags) {
  cmd->add_option("-c,--config", c.config_path, "configuration document (JSON)")
      ->required();
  cmd->add_option("-o,--out", c.out_dir, "output directory")->capture_default_str();
  cmd->add_option("-w,--workers", c.workers,
                  "worker threads (default: CEDETECT_WORKERS or hardware count)");
  if (!experiment_flags) return;
  cmd->add_option("--epsilon", c.epsilon, "minimum per-step attack cost");
  cmd->add_option("--alpha-grid", c.alpha_grid, "false-alarm budgets")->delimiter(',');
  cmd->add_option("--episodes", c.episodes, "Monte-Carlo episodes per point");
  cmd->add_option("--horizon", c.horizon, "maximum episode length");
  cmd->add_option("--seed", c.seed, "master seed");
}

// Reads the config and folds command-line overrides into its experiment
// section; flags win over file values.
Run open_run(const Common& c) {
  Run run;
  run.doc = cedetect::config::load_json_file(c.config_path);
  if (!run.doc.is_object()) throw cedetect::ConfigError("configuration must be a JSON object");
  run.base_dir = fs::path(c.config_path).parent_path();
  json& exp = run.doc["experiment"];
  if (exp.is_null()) exp = json::object();
  if (c.epsilon) exp["epsilon"] = *c.epsilon;
  if (!c.alpha_grid.empty()) exp["alpha_grid"] = c.alpha_grid;
  if (c.episodes) exp["episodes"] = *c.episodes;
  if (c.horizon) exp["horizon"] = *c.horizon;
  if (c.seed) exp["seed"] = *c.seed;
  run.out_dir = c.out_dir;
  fs::create_directories(run.out_dir);
  return run;
}

std::ofstream open_output(Run& run, const std::string& name) {
  std::ofstream out(run.out_dir / name, std::ios::binary);
  if (!out) throw cedetect::Error("cannot write " + (run.out_dir / name).string());
  run.outputs.push_back(name);
  return out;
}

void write_manifest(const Run& run, const std::string& command, std::uint64_t seed) {
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                    run.started)
                          .count();
  json m{{"command", command},
         {"config_digest", "sha256:" + sha256_hex(cedetect::config::canonical(run.doc))},
         {"tool_version", CEDETECT_VERSION},
         {"master_seed", seed},
         {"outputs", run.outputs},
         {"wall_time", wall}};
  std::ofstream out(run.out_dir / "manifest.json", std::ios::binary);
  out << m.dump(2) << '\n';
}

std::shared_ptr<const cedetect::TiltedFamily> require_family(const cedetect::config::Setup& s) {
  if (!s.family) {
    throw cedetect::InfeasibleError(
        "the victim observes fewer than two distinct utilities; nothing to tilt");
  }
  return s.family;
}

int cmd_verify(const Common& c, double tolerance_flag, const std::string& kind) {
  Run run = open_run(c);
  const auto setup = cedetect::config::build_setup(run.doc, run.base_dir);
  const double tol =
      tolerance_flag >= 0.0 ? tolerance_flag
                            : cedetect::config::get_or<double>(run.doc, "tolerance", 1e-9);
  const auto ce = cedetect::ce_report(*setup.game, setup.distribution);
  const auto cce = cedetect::cce_report(*setup.game, setup.distribution);
  auto out = open_output(run, "verify.csv");
  out << "player,ce_gap,cce_gap\n";
  for (std::size_t i = 0; i < setup.game->num_players(); ++i) {
    cedetect::csv::row(out, {std::to_string(i), cedetect::csv::num(ce.per_player_gap[i]),
                             cedetect::csv::num(cce.per_player_gap[i])});
    std::printf("player %zu  ce_gap %.6g  cce_gap %.6g\n", i, ce.per_player_gap[i],
                cce.per_player_gap[i]);
  }
  const double gap = kind == "cce" ? cce.max_gap : ce.max_gap;
  const bool pass = gap <= tol;
  std::printf("%s check %s: max gap %.6g (tolerance %.3g)\n", kind == "cce" ? "CCE" : "CE",
              pass ? "PASS" : "FAIL", gap, tol);
  write_manifest(run, "verify", 0);
  return pass ? kExitOk : kExitVerifyFail;
}

int cmd_tilt(const Common& c, std::vector<double> grid) {
  Run run = open_run(c);
  const auto setup = cedetect::config::build_setup(run.doc, run.base_dir);
  const auto family = require_family(setup);
  if (grid.empty()) {
    grid = cedetect::config::get_or<std::vector<double>>(
        run.doc.contains("tilt") ? run.doc["tilt"] : json(), "theta_grid", {});
  }
  if (grid.empty()) {
    for (int i = 0; i <= 40; ++i) grid.push_back(std::pow(10.0, -3.0 + 0.1 * i));
  }
  std::printf("u_pi %.17g  u_min %.17g  kl_limit %.17g\n", family->base_mean(),
              family->u_min(), family->kl_limit());
  const json& exp = run.doc["experiment"];
  if (exp.contains("epsilon")) {
    const double eps = exp["epsilon"].get<double>();
    const auto solve = family->solve_theta_for_mean(family->base_mean() - eps);
    std::printf("epsilon %.17g  theta_min %.17g  d(theta_min) %.17g\n", eps, solve.theta,
                family->kl_from_base(solve.theta));
  }
  auto out = open_output(run, "tilt.csv");
  out << "theta,u_theta,d_theta,g_theta\n";
  for (double th : grid) {
    if (!(th >= 0.0)) throw cedetect::ConfigError("theta grid values must be nonnegative");
    const double g = th > 0.0 ? family->impact_efficiency(th)
                              : std::numeric_limits<double>::quiet_NaN();
    cedetect::csv::row(out, {cedetect::csv::num(th),
                             cedetect::csv::num(family->mean_utility(th)),
                             cedetect::csv::num(family->kl_from_base(th)),
                             cedetect::csv::num(g)});
  }
  write_manifest(run, "tilt", 0);
  return kExitOk;
}

std::vector<cedetect::AttackSpec> attacks_from(const json& doc,
                                               const cedetect::TiltedFamily& family,
                                               double epsilon, double theta_min) {
  if (doc.contains("attacks")) {
    return cedetect::config::parse_attacks(doc.at("attacks"), family, epsilon, theta_min);
  }
  return {cedetect::make_tilted_attack(family, theta_min, cedetect::FixedStart{1},
                                       theta_min, "theta_min")};
}

int cmd_sweep(const Common& c, bool dump_episodes) {
  Run run = open_run(c);
  const auto setup = cedetect::config::build_setup(run.doc, run.base_dir);
  const auto family = require_family(setup);
  const auto exp = cedetect::config::parse_experiment(run.doc["experiment"]);
  const double theta_min =
      family->solve_theta_for_mean(family->base_mean() - exp.epsilon).theta;
  const auto attacks = attacks_from(run.doc, *family, exp.epsilon, theta_min);

  cedetect::SweepOptions opt;
  opt.epsilon = exp.epsilon;
  opt.alpha_grid = exp.alpha_grid;
  opt.episodes = exp.episodes;
  opt.horizon = exp.horizon;
  opt.seed = exp.seed;
  opt.workers = c.workers;
  opt.snap_to_alphabet = exp.snap_to_alphabet;
  const auto rows = cedetect::sweep(family, attacks, opt);
  {
    auto out = open_output(run, "sweep.csv");
    cedetect::write_sweep_csv(out, rows);
  }
  {
    auto out = open_output(run, "attacks.json");
    json list = json::array();
    for (const auto& a : attacks) list.push_back(cedetect::config::attack_to_json(a));
    out << list.dump(2) << '\n';
  }
  if (dump_episodes) {
    std::vector<cedetect::AttackSpec> scenarios = attacks;
    scenarios.push_back(cedetect::make_no_attack(*family));
    for (std::size_t ai = 0; ai < exp.alpha_grid.size(); ++ai) {
      const auto det = cedetect::DetectorConfig::build(family, exp.epsilon, exp.alpha_grid[ai]);
      for (std::size_t si = 0; si < scenarios.size(); ++si) {
        const auto runs = cedetect::run_episodes(det, scenarios[si], exp.episodes,
                                                 exp.horizon, exp.seed, c.workers,
                                                 exp.false_alarm_cost);
        auto out = open_output(run, "episodes_a" + std::to_string(ai) + "_s" +
                                        std::to_string(si) + ".csv");
        cedetect::write_episode_csv(out, runs, exp.false_alarm_cost, family->base_mean());
      }
    }
  }
  for (const auto& r : rows) {
    std::printf("%-16s alpha %-8.3g mu %-8.4g mtbfa %-10.5g delay %-10.5g impact %-10.5g "
                "detect %.3f\n",
                r.attack_label.c_str(), r.alpha, r.mu, r.mtbfa, r.mean_delay, r.mean_impact,
                r.detect_rate);
  }
  write_manifest(run, "sweep", exp.seed);
  return kExitOk;
}

int cmd_tolerable_impact(const Common& c, std::vector<double> eps_grid,
                         std::vector<double> targets) {
  Run run = open_run(c);
  const auto setup = cedetect::config::build_setup(run.doc, run.base_dir);
  const auto family = require_family(setup);
  json& section = run.doc["tolerable_impact"];
  if (section.is_null()) section = json::object();
  if (!eps_grid.empty()) section["epsilon_grid"] = eps_grid;
  if (!targets.empty()) section["mtbfa_targets"] = targets;
  eps_grid = cedetect::config::get_or<std::vector<double>>(section, "epsilon_grid", {});
  targets = cedetect::config::get_or<std::vector<double>>(section, "mtbfa_targets", {});
  if (eps_grid.empty() || targets.empty()) {
    throw cedetect::ConfigError("tolerable_impact needs epsilon_grid and mtbfa_targets");
  }
  const auto exp = cedetect::config::parse_experiment(run.doc["experiment"]);
  const auto rows = cedetect::tolerable_impact(family, eps_grid, targets, exp.episodes,
                                               exp.horizon, exp.seed, c.workers,
                                               exp.snap_to_alphabet);
  {
    auto out = open_output(run, "tolerable_impact.csv");
    cedetect::write_tolerable_impact_csv(out, rows);
  }
  for (const auto& r : rows) {
    if (r.feasible) {
      std::printf("epsilon %-8.4g target %-10.5g alpha %-10.4g mtbfa %-10.5g impact %.5g\n",
                  r.epsilon, r.target_mtbfa, r.alpha, r.mtbfa, r.impact);
    } else {
      std::fprintf(stderr, "epsilon %g target %g infeasible: %s\n", r.epsilon,
                   r.target_mtbfa, r.note.c_str());
    }
  }
  write_manifest(run, "tolerable-impact", exp.seed);
  return kExitOk;
}

int cmd_learn(const Common& c, std::optional<std::size_t> rounds_flag,
              std::optional<std::string> mode_flag, std::size_t trace_every) {
  Run run = open_run(c);
  json& section = run.doc["learn"];
  if (section.is_null()) section = json::object();
  if (rounds_flag) section["rounds"] = *rounds_flag;
  if (mode_flag) section["mode"] = *mode_flag;
  if (c.seed) section["seed"] = *c.seed;
  if (!run.doc.contains("game")) throw cedetect::ConfigError("missing 'game' section");
  const auto game = cedetect::config::parse_game(run.doc["game"]);
  const std::size_t rounds = cedetect::config::get_or<std::size_t>(section, "rounds", 100000);
  const auto mode = cedetect::config::parse_mode(
      cedetect::config::get_or<std::string>(section, "mode", "external"));
  const auto seed = cedetect::config::get_or<std::uint64_t>(section, "seed", 0);
  if (trace_every == 0) throw cedetect::ConfigError("--trace-every must be positive");

  const auto learned = cedetect::regret_matching_learn(game, rounds, mode, seed);
  {
    auto out = open_output(run, "distribution.json");
    out << cedetect::config::distribution_to_json(learned.empirical).dump(2) << '\n';
  }
  {
    auto out = open_output(run, "regret.csv");
    out << "round,player,avg_regret\n";
    for (std::size_t t = 0; t < learned.rounds; ++t) {
      if ((t + 1) % trace_every != 0 && t + 1 != learned.rounds) continue;
      for (std::size_t i = 0; i < game.num_players(); ++i) {
        cedetect::csv::row(out, {std::to_string(t + 1), std::to_string(i),
                                 cedetect::csv::num(learned.regret_trace[t][i])});
      }
    }
  }
  const auto ce = cedetect::ce_report(game, learned.empirical);
  const auto cce = cedetect::cce_report(game, learned.empirical);
  for (std::size_t i = 0; i < game.num_players(); ++i) {
    std::printf("player %zu  ce_gap %.6g  cce_gap %.6g\n", i, ce.per_player_gap[i],
                cce.per_player_gap[i]);
  }
  write_manifest(run, "learn", seed);
  return kExitOk;
}

int cmd_trace(const Common& c, std::size_t attack_index, std::size_t episode,
              std::optional<double> alpha_flag) {
  Run run = open_run(c);
  const auto setup = cedetect::config::build_setup(run.doc, run.base_dir);
  const auto family = require_family(setup);
  const auto exp = cedetect::config::parse_experiment(run.doc["experiment"]);
  const double alpha = alpha_flag ? *alpha_flag : exp.alpha_grid.at(exp.alpha_grid.size() / 2);
  auto det = cedetect::DetectorConfig::build(family, exp.epsilon, alpha);
  det.snap_to_alphabet = exp.snap_to_alphabet;
  auto attacks = attacks_from(run.doc, *family, exp.epsilon, det.theta_min);
  attacks.push_back(cedetect::make_no_attack(*family));
  if (attack_index >= attacks.size()) {
    throw cedetect::ConfigError("attack index out of range (the last index is 'none')");
  }
  cedetect::EpisodeConfig cfg;
  cfg.detector = &det;
  cfg.attack = &attacks[attack_index];
  cfg.horizon = exp.horizon;
  cfg.seed = cedetect::derive_seed(exp.seed, episode);
  cfg.record_stream = true;
  const auto result = cedetect::run_episode(cfg);
  const auto rows = cedetect::detector_trace(det, result.stream);
  auto out = open_output(run, "trace.csv");
  out << "t,u,R,reason\n";
  for (const auto& r : rows) {
    std::string reason = cedetect::to_string(r.reason);
    if (r.reason == cedetect::StopReason::kWindow) reason += ":" + std::to_string(r.window);
    cedetect::csv::row(out, {std::to_string(r.t), cedetect::csv::num(r.u),
                             cedetect::csv::num(r.R), reason});
  }
  std::printf("attack %s  nu %s  T %s  outcome %s\n", attacks[attack_index].label.c_str(),
              result.change_time ? std::to_string(*result.change_time).c_str() : "inf",
              result.stop_time ? std::to_string(*result.stop_time).c_str() : "none",
              cedetect::to_string(result.outcome));
  write_manifest(run, "trace", exp.seed);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mediator-signal manipulation and generalized CUSUM detection"};
  app.set_version_flag("--version", CEDETECT_VERSION);
  app.require_subcommand(1);

  Common common;

  double tolerance = -1.0;
  std::string kind = "ce";
  auto* verify = app.add_subcommand("verify", "check CE / CCE deviation gaps");
  add_common(verify, common, false);
  verify->add_option("--tolerance", tolerance, "pass threshold on the max gap");
  verify->add_option("--kind", kind, "ce or cce")->check(CLI::IsMember({"ce", "cce"}));

  std::vector<double> theta_grid;
  auto* tilt = app.add_subcommand("tilt", "tabulate u_theta, d(theta), g(theta)");
  add_common(tilt, common, true);
  tilt->add_option("--theta-grid", theta_grid, "tilt values")->delimiter(',');

  bool dump = false;
  auto* sweep = app.add_subcommand("sweep", "delay / impact / MTBFA over an alpha grid");
  add_common(sweep, common, true);
  sweep->add_flag("--dump-episodes", dump, "also write per-episode CSVs");

  std::vector<double> eps_grid, targets;
  auto* tol = app.add_subcommand("tolerable-impact",
                                 "theta_min impact at calibrated MTBFA targets");
  add_common(tol, common, true);
  tol->add_option("--epsilon-grid", eps_grid, "epsilon values")->delimiter(',');
  tol->add_option("--targets", targets, "target MTBFA values")->delimiter(',');

  std::optional<std::size_t> rounds;
  std::optional<std::string> mode;
  std::size_t trace_every = 100;
  auto* learn = app.add_subcommand("learn", "regret-matching equilibrium learning");
  add_common(learn, common, false);
  learn->add_option("--rounds", rounds, "learning rounds");
  learn->add_option("--mode", mode, "external or internal")
      ->check(CLI::IsMember({"external", "internal"}));
  learn->add_option("--seed", common.seed, "learning seed");
  learn->add_option("--trace-every", trace_every, "regret CSV row stride")
      ->capture_default_str();

  std::size_t attack_index = 0, episode = 0;
  std::optional<double> trace_alpha;
  auto* trace = app.add_subcommand("trace", "detector statistic along one episode");
  add_common(trace, common, true);
  trace->add_option("--attack", attack_index, "attack index; one past the list is 'none'");
  trace->add_option("--episode", episode, "episode index (selects the seed)");
  trace->add_option("--alpha", trace_alpha, "false-alarm budget (default: middle of grid)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*verify) return cmd_verify(common, tolerance, kind);
    if (*tilt) return cmd_tilt(common, theta_grid);
    if (*sweep) return cmd_sweep(common, dump);
    if (*tol) return cmd_tolerable_impact(common, eps_grid, targets);
    if (*learn) return cmd_learn(common, rounds, mode, trace_every);
    if (*trace) return cmd_trace(common, attack_index, episode, trace_alpha);
  } catch (const cedetect::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const json::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const cedetect::InfeasibleError& e) {
    std::fprintf(stderr, "infeasible: %s\n", e.what());
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitConfig;
}
