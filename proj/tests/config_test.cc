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

#include "cedetect/config.hpp"

#include <filesystem>
#include <fstream>

#include "gtest/gtest.h"

namespace cedetect::config {
namespace {

namespace fs = std::filesystem;

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "cedetect_config_test";
  fs::create_directories(dir);
  return dir;
}

TEST(Canonical, StableUnderKeyOrder) {
  const json a = json::parse(R"({"game": {"builtin": "chicken"}, "victim": 0,
                                 "experiment": {"seed": 3, "epsilon": 0.5}})");
  const json b = json::parse(R"({"experiment": {"epsilon": 0.50, "seed": 3}, "victim": 0,
                                 "game": {"builtin": "chicken"}})");
  EXPECT_EQ(canonical(a), canonical(b));
  json c = a;
  c["experiment"]["seed"] = 4;
  EXPECT_NE(canonical(a), canonical(c));
}

TEST(Setup, ChickenRecipe) {
  json doc = json::parse(R"({"game": {"builtin": "chicken"},
                             "distribution": {"builtin": "chicken_ce"}, "victim": 0})");
  const config::Setup s = build_setup(doc, ".");
  ASSERT_TRUE(s.family);
  EXPECT_EQ(s.family->size(), 6u);
  EXPECT_NEAR(s.family->base_mean(), 73.0 / 12.0, 1e-14);
}

TEST(Setup, ExplicitGameAndEntries) {
  json doc = json::parse(R"({
    "game": {"action_counts": [2, 2], "utilities": [[1, 2, 3, 4], [4, 3, 2, 1]]},
    "distribution": {"entries": [[0, 0.25], [3, 0.75]]},
    "victim": 1, "quantize_bins": 2})");
  const config::Setup s = build_setup(doc, ".");
  EXPECT_EQ(s.view.size(), 2u);
  EXPECT_NEAR(s.view.base_pmf[0], 0.75, 1e-15);
}

TEST(Setup, DegenerateViewHasNoFamily) {
  json doc = json::parse(R"({"game": {"builtin": "chicken"},
                             "distribution": {"entries": [[4, 1.0]]}})");
  const config::Setup s = build_setup(doc, ".");
  EXPECT_FALSE(s.family);
}

TEST(Distribution, FileReferenceIsInlined) {
  const fs::path dir = scratch_dir();
  {
    std::ofstream out(dir / "dist.json");
    out << distribution_to_json(chicken_ce()).dump();
  }
  json doc = json::parse(R"({"game": {"builtin": "chicken"},
                             "distribution": {"file": "dist.json"}})");
  const config::Setup s = build_setup(doc, dir);
  EXPECT_FALSE(doc["distribution"].contains("file"));
  EXPECT_EQ(doc["distribution"]["num_profiles"], 9);
  for (std::size_t a = 0; a < 9; ++a) EXPECT_NEAR(s.distribution[a], chicken_ce()[a], 1e-15);
}

TEST(Distribution, Errors) {
  const StrategicGame g = build_chicken_game();
  json missing = json::parse(R"({"file": "/nonexistent/dist.json"})");
  EXPECT_THROW(parse_distribution(missing, g, "."), ConfigError);
  json wrong_space = json::parse(R"({"num_profiles": 4, "entries": [[0, 1.0]]})");
  EXPECT_THROW(parse_distribution(wrong_space, g, "."), ConfigError);
  json bad_mass = json::parse(R"({"entries": [[0, 0.5]]})");
  EXPECT_THROW(parse_distribution(bad_mass, g, "."), ConfigError);
  json unknown = json::parse(R"({"builtin": "nash"})");
  EXPECT_THROW(parse_distribution(unknown, g, "."), ConfigError);
}

TEST(Start, Forms) {
  EXPECT_EQ(std::get<FixedStart>(parse_start(json())).t, 1u);
  EXPECT_EQ(std::get<FixedStart>(parse_start(json(5))).t, 5u);
  EXPECT_EQ(std::get<FixedStart>(parse_start(json::parse(R"({"fixed": 7})"))).t, 7u);
  EXPECT_TRUE(std::holds_alternative<NeverStart>(parse_start(json("never"))));
  EXPECT_EQ(std::get<AdaptiveStart>(parse_start(json("adaptive"))).p, 0.01);
  EXPECT_EQ(std::get<AdaptiveStart>(parse_start(json::parse(R"({"adaptive": 0.2})"))).p, 0.2);
  EXPECT_THROW(parse_start(json(0)), ConfigError);
  EXPECT_THROW(parse_start(json("sometimes")), ConfigError);
  EXPECT_THROW(parse_start(json::parse(R"({"adaptive": 2})")), ConfigError);
  for (const StartLaw& law : {StartLaw{FixedStart{3}}, StartLaw{NeverStart{}},
                              StartLaw{AdaptiveStart{0.3}}}) {
    EXPECT_EQ(describe(parse_start(start_to_json(law))), describe(law));
  }
}

TEST(Attacks, ParseAllKinds) {
  const TiltedFamily f(victim_view(build_chicken_game(), chicken_ce(), 0));
  const double tm = f.solve_theta_for_mean(f.base_mean() - 0.5).theta;
  const json list = json::parse(R"([
    {"kind": "tilted", "theta": "theta_min", "label": "theta_min"},
    {"kind": "tilted", "theta": 0.1, "start": {"adaptive": 0.05}},
    {"kind": "random", "seed": 7},
    {"kind": "explicit", "pmf": [1, 0, 0, 0, 0, 0], "start": "never"}])");
  const auto attacks = parse_attacks(list, f, 0.5, tm);
  ASSERT_EQ(attacks.size(), 4u);
  EXPECT_EQ(attacks[0].label, "theta_min");
  EXPECT_EQ(*attacks[0].theta, tm);
  EXPECT_EQ(attacks[1].label, "tilted:0.1");
  EXPECT_EQ(attacks[2].label, "random:7");
  EXPECT_EQ(attacks[3].label, "explicit");
  EXPECT_EQ(attack_to_json(attacks[2])["seed"], 7);
  EXPECT_THROW(parse_attacks(json::parse(R"([{"kind": "magic"}])"), f, 0.5, tm), ConfigError);
  EXPECT_THROW(parse_attacks(json::parse(R"([{"kind": "explicit", "pmf": [1]}])"), f, 0.5, tm),
               ConfigError);
}

TEST(Experiment, DefaultsAndValidation) {
  const Experiment d = parse_experiment(json());
  EXPECT_EQ(d.epsilon, 0.5);
  EXPECT_EQ(d.episodes, 500u);
  const Experiment e = parse_experiment(json::parse(R"({"alpha_grid": [0.2], "seed": 9})"));
  EXPECT_EQ(e.alpha_grid, std::vector<double>{0.2});
  EXPECT_EQ(e.seed, 9u);
  EXPECT_THROW(parse_experiment(json::parse(R"({"alpha_grid": [1.5]})")), ConfigError);
  EXPECT_THROW(parse_experiment(json::parse(R"({"episodes": 0})")), ConfigError);
  EXPECT_THROW(parse_experiment(json::parse(R"({"epsilon": "big"})")), ConfigError);
}

TEST(Game, Errors) {
  EXPECT_THROW(parse_game(json::parse(R"({"builtin": "prisoners"})")), ConfigError);
  EXPECT_THROW(parse_game(json::parse(R"({"action_counts": [2, 2], "utilities": [[1]]})")),
               ConfigError);
  json doc = json::parse(R"({"game": {"builtin": "chicken"}})");
  EXPECT_THROW(build_setup(doc, "."), ConfigError);
  EXPECT_THROW(load_json_file("/nonexistent.json"), ConfigError);
}

TEST(Game, CongestionSection) {
  const json j = json::parse(R"({"congestion": {
    "nodes": 2,
    "links": [{"from": 0, "to": 1, "capacity": 1, "free_flow_time": 1},
              {"from": 0, "to": 1, "capacity": 2, "free_flow_time": 1.5}],
    "players": [{"origin": 0, "destination": 1}, {"origin": 0, "destination": 1}],
    "paths_per_player": 2}})");
  const StrategicGame g = parse_game(j);
  EXPECT_EQ(g.num_players(), 2u);
  EXPECT_EQ(g.num_profiles(), 4u);
}

}  // namespace
}  // namespace cedetect::config
