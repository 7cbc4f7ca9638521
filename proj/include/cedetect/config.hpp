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

// JSON configuration documents. The schema is described in docs/FORMATS.md.

#ifndef CEDETECT_CONFIG_HPP_
#define CEDETECT_CONFIG_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cedetect/adversary.hpp"
#include "cedetect/congestion.hpp"
#include "cedetect/equilibrium.hpp"
#include "cedetect/error.hpp"
#include "cedetect/game.hpp"
#include "cedetect/tilted_family.hpp"
#include <nlohmann/json.hpp>

namespace cedetect::config {

using json = nlohmann::json;

inline constexpr double kLoadTolerance = 1e-9;

inline json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("key '") + key + "': " + e.what());
  }
}

template <typename T>
T require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw ConfigError(std::string("missing key '") + key + "'");
  }
  return get_or<T>(j, key, T{});
}

inline CongestionSpec parse_congestion(const json& j) {
  CongestionSpec spec;
  spec.nodes = require<std::size_t>(j, "nodes");
  for (const json& l : j.at("links")) {
    spec.links.push_back({require<std::size_t>(l, "from"), require<std::size_t>(l, "to"),
                          get_or<double>(l, "capacity", 1.0),
                          get_or<double>(l, "free_flow_time", 1.0)});
  }
  for (const json& p : j.at("players")) {
    spec.players.push_back({require<std::size_t>(p, "origin"),
                            require<std::size_t>(p, "destination"),
                            get_or<double>(p, "demand", 1.0)});
  }
  spec.paths_per_player = get_or<std::size_t>(j, "paths_per_player", 1);
  spec.utility_scale = get_or<double>(j, "utility_scale", 1.0);
  if (j.contains("offset")) spec.offset = j.at("offset").get<double>();
  return spec;
}

// "game": {"builtin": "chicken"}
//       | {"action_counts": [...], "utilities": [[...], ...]}
//       | {"congestion": {...}}
inline StrategicGame parse_game(const json& j) {
  try {
    if (j.contains("builtin")) {
      const auto name = j.at("builtin").get<std::string>();
      if (name == "chicken") return build_chicken_game();
      throw ConfigError("unknown builtin game '" + name + "'");
    }
    if (j.contains("congestion")) {
      return build_congestion_game(parse_congestion(j.at("congestion"))).game;
    }
    return StrategicGame(require<std::vector<std::size_t>>(j, "action_counts"),
                         require<std::vector<std::vector<double>>>(j, "utilities"));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("game: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("game: ") + e.what());
  }
}

inline RegretMode parse_mode(const std::string& s) {
  if (s == "external") return RegretMode::kExternal;
  if (s == "internal") return RegretMode::kInternal;
  throw ConfigError("learning mode must be 'external' or 'internal', got '" + s + "'");
}

inline json distribution_to_json(const JointDistribution& dist) {
  json entries = json::array();
  for (const auto& [index, p] : dist.support()) entries.push_back({index, p});
  return json{{"num_profiles", dist.size()}, {"entries", entries}};
}

// "distribution": {"builtin": "chicken_ce"} | {"uniform": true}
//               | {"entries": [[index, p], ...]} | {"file": "path"}
//               | {"learn": {"rounds": n, "mode": "external", "seed": s}}
// A "file" reference is replaced in `j` by the file's contents so that the
// resolved document is self-contained.
inline JointDistribution parse_distribution(json& j, const StrategicGame& game,
                                            const std::filesystem::path& base_dir) {
  try {
    if (j.contains("file")) {
      std::filesystem::path p = j.at("file").get<std::string>();
      if (p.is_relative()) p = base_dir / p;
      json loaded = load_json_file(p);
      j = loaded;
      return parse_distribution(j, game, p.parent_path());
    }
    if (j.contains("builtin")) {
      const auto name = j.at("builtin").get<std::string>();
      if (name == "chicken_ce") return chicken_ce();
      throw ConfigError("unknown builtin distribution '" + name + "'");
    }
    if (get_or<bool>(j, "uniform", false)) {
      return JointDistribution::uniform(game.num_profiles());
    }
    if (j.contains("learn")) {
      const json& l = j.at("learn");
      const auto learned = regret_matching_learn(
          game, require<std::size_t>(l, "rounds"),
          parse_mode(get_or<std::string>(l, "mode", "external")),
          get_or<std::uint64_t>(l, "seed", 0));
      return learned.empirical;
    }
    if (j.contains("num_profiles") &&
        j.at("num_profiles").get<std::size_t>() != game.num_profiles()) {
      throw ConfigError("distribution was written for a different profile space");
    }
    std::vector<std::pair<std::size_t, double>> entries;
    for (const json& e : j.at("entries")) {
      entries.emplace_back(e.at(0).get<std::size_t>(), e.at(1).get<double>());
    }
    return JointDistribution::from_entries(game.num_profiles(), entries, kLoadTolerance);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("distribution: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("distribution: ") + e.what());
  }
}

// "start": 3 | {"fixed": 3} | "never" | {"adaptive": 0.01} | "adaptive"
inline StartLaw parse_start(const json& j) {
  if (j.is_null()) return FixedStart{1};
  if (j.is_number_unsigned() || j.is_number_integer()) {
    const auto t = j.get<long long>();
    if (t < 1) throw ConfigError("fixed start must be at least 1");
    return FixedStart{static_cast<std::size_t>(t)};
  }
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "never") return NeverStart{};
    if (s == "adaptive") return AdaptiveStart{};
    throw ConfigError("unknown start law '" + s + "'");
  }
  if (j.contains("fixed")) {
    return parse_start(j.at("fixed"));
  }
  if (j.contains("adaptive")) {
    const double p = j.at("adaptive").get<double>();
    if (!(p > 0.0 && p <= 1.0)) throw ConfigError("adaptive p must lie in (0, 1]");
    return AdaptiveStart{p};
  }
  throw ConfigError("cannot parse start law " + j.dump());
}

inline json start_to_json(const StartLaw& law) {
  if (const auto* f = std::get_if<FixedStart>(&law)) return json{{"fixed", f->t}};
  if (std::holds_alternative<NeverStart>(law)) return "never";
  return json{{"adaptive", std::get<AdaptiveStart>(law).p}};
}

// Each attack: {"kind": "tilted", "theta": 0.09 | "theta_min"}
//            | {"kind": "random", "seed": 7}
//            | {"kind": "explicit", "pmf": [...]}
// plus optional "start" and "label".
inline std::vector<AttackSpec> parse_attacks(const json& list, const TiltedFamily& family,
                                             double epsilon, double theta_min) {
  std::vector<AttackSpec> out;
  try {
    for (const json& a : list) {
      const auto kind = require<std::string>(a, "kind");
      const StartLaw start = parse_start(a.contains("start") ? a.at("start") : json());
      const auto label = get_or<std::string>(a, "label", "");
      if (kind == "tilted") {
        const json& th = a.at("theta");
        const double theta =
            th.is_string() && th.get<std::string>() == "theta_min" ? theta_min
                                                                   : th.get<double>();
        out.push_back(make_tilted_attack(family, theta, start, theta_min, label));
      } else if (kind == "random") {
        AttackSpec s = sample_random_attack(family, epsilon,
                                            get_or<std::uint64_t>(a, "seed", 0), start);
        if (!label.empty()) s.label = label;
        out.push_back(std::move(s));
      } else if (kind == "explicit") {
        out.push_back(make_explicit_attack(family, require<std::vector<double>>(a, "pmf"),
                                           start, label.empty() ? "explicit" : label));
      } else {
        throw ConfigError("unknown attack kind '" + kind + "'");
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("attacks: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("attacks: ") + e.what());
  }
  return out;
}

inline json attack_to_json(const AttackSpec& spec) {
  json j{{"label", spec.label}, {"start", start_to_json(spec.start)},
         {"pmf", spec.distribution}};
  switch (spec.kind) {
    case AttackKind::kTilted:
      j["kind"] = "tilted";
      j["theta"] = *spec.theta;
      break;
    case AttackKind::kRandom:
      j["kind"] = "random";
      j["seed"] = *spec.seed;
      break;
    case AttackKind::kNone:
      j["kind"] = "none";
      break;
    default:
      j["kind"] = "explicit";
  }
  return j;
}

struct Experiment {
  double epsilon = 0.5;
  std::vector<double> alpha_grid{1e-1, 1e-2, 1e-3};
  std::size_t episodes = 500;
  std::size_t horizon = 100000;
  std::uint64_t seed = 1;
  double false_alarm_cost = 0.0;
  bool snap_to_alphabet = false;
};

inline Experiment parse_experiment(const json& j) {
  Experiment e;
  if (j.is_null()) return e;
  try {
    e.epsilon = get_or<double>(j, "epsilon", e.epsilon);
    e.alpha_grid = get_or<std::vector<double>>(j, "alpha_grid", e.alpha_grid);
    e.episodes = get_or<std::size_t>(j, "episodes", e.episodes);
    e.horizon = get_or<std::size_t>(j, "horizon", e.horizon);
    e.seed = get_or<std::uint64_t>(j, "seed", e.seed);
    e.false_alarm_cost = get_or<double>(j, "false_alarm_cost", e.false_alarm_cost);
    e.snap_to_alphabet = get_or<bool>(j, "snap_to_alphabet", e.snap_to_alphabet);
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("experiment: ") + ex.what());
  }
  if (e.episodes == 0 || e.horizon == 0) {
    throw ConfigError("experiment: episodes and horizon must be positive");
  }
  for (double a : e.alpha_grid) {
    if (!(a > 0.0 && a < 1.0)) throw ConfigError("experiment: alpha values must lie in (0, 1)");
  }
  return e;
}

// Game, mediator distribution and the victim's (optionally quantised) view.
struct Setup {
  std::shared_ptr<const StrategicGame> game;
  JointDistribution distribution;
  std::size_t victim = 0;
  std::optional<std::size_t> quantize_bins;
  VictimView view;
  std::shared_ptr<const TiltedFamily> family;  // null when the view is degenerate
};

inline Setup build_setup(json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("configuration must be a JSON object");
  if (!doc.contains("game")) throw ConfigError("missing 'game' section");
  if (!doc.contains("distribution")) throw ConfigError("missing 'distribution' section");
  Setup s;
  s.game = std::make_shared<StrategicGame>(parse_game(doc.at("game")));
  s.distribution = parse_distribution(doc["distribution"], *s.game, base_dir);
  s.victim = get_or<std::size_t>(doc, "victim", 0);
  if (s.victim >= s.game->num_players()) throw ConfigError("victim index out of range");
  if (doc.contains("quantize_bins")) {
    s.quantize_bins = doc.at("quantize_bins").get<std::size_t>();
    if (*s.quantize_bins == 0) throw ConfigError("quantize_bins must be positive");
  }
  s.view = victim_view(*s.game, s.distribution, s.victim);
  if (s.quantize_bins) s.view = quantize_view(s.view, *s.quantize_bins);
  if (s.view.size() >= 2) s.family = std::make_shared<TiltedFamily>(s.view);
  return s;
}

// Canonical text of a document: object keys sorted, compact separators.
inline std::string canonical(const json& doc) { return doc.dump(); }

}  // namespace cedetect::config

#endif  // CEDETECT_CONFIG_HPP_
