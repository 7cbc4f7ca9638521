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

#include "cedetect/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "cedetect/game.hpp"
#include "gtest/gtest.h"

namespace cedetect {
namespace {

// Enumerates every swap map sigma: A^i -> A^i.
double brute_force_ce_gap(const StrategicGame& g, const JointDistribution& d,
                          std::size_t player) {
  const std::size_t n = g.num_actions(player);
  std::size_t maps = 1;
  for (std::size_t k = 0; k < n; ++k) maps *= n;
  double best = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> sigma(n);
  for (std::size_t m = 0; m < maps; ++m) {
    std::size_t rest = m;
    for (std::size_t k = 0; k < n; ++k) {
      sigma[k] = rest % n;
      rest /= n;
    }
    double total = 0.0;
    for (std::size_t a = 0; a < g.num_profiles(); ++a) {
      const std::size_t j = g.action_of(a, player);
      total += d[a] * (g.utility(player, g.with_action(a, player, sigma[j])) -
                       g.utility(player, a));
    }
    best = std::max(best, total);
  }
  return best;
}

StrategicGame random_game(std::mt19937_64& rng, std::vector<std::size_t> counts) {
  std::size_t profiles = 1;
  for (auto c : counts) profiles *= c;
  std::uniform_real_distribution<double> unif(0.0, 10.0);
  std::vector<std::vector<double>> u(counts.size(), std::vector<double>(profiles));
  for (auto& row : u) for (double& x : row) x = std::floor(unif(rng));
  return StrategicGame(std::move(counts), std::move(u));
}

JointDistribution random_dist(std::mt19937_64& rng, std::size_t n) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> p(n);
  double total = 0.0;
  for (double& x : p) total += (x = e(rng));
  for (double& x : p) x /= total;
  return JointDistribution(p, 1e-9);
}

TEST(DeviationGap, ChickenCeHasZeroGap) {
  const StrategicGame g = build_chicken_game();
  const JointDistribution pi = chicken_ce();
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_NEAR(ce_deviation_gap(g, pi, i), 0.0, 1e-12);
    EXPECT_NEAR(brute_force_ce_gap(g, pi, i), 0.0, 1e-12);
    EXPECT_LE(cce_deviation_gap(g, pi, i), 1e-12);
  }
  const DeviationReport r = ce_report(g, pi);
  EXPECT_LE(r.max_gap, 1e-12);
}

TEST(DeviationGap, UniformIsNotCe) {
  const StrategicGame g = build_chicken_game();
  const JointDistribution u = JointDistribution::uniform(9);
  EXPECT_GT(ce_deviation_gap(g, u, 0), 0.1);
  EXPECT_NEAR(ce_deviation_gap(g, u, 0), brute_force_ce_gap(g, u, 0), 1e-12);
}

TEST(DeviationGap, DominantStrategyPointMass) {
  // Player 0 strictly prefers action 1, player 1 strictly prefers action 0.
  const StrategicGame g({2, 2}, {{1, 1, 3, 3}, {4, 2, 4, 2}});
  const std::vector<std::size_t> a{1, 0};
  const JointDistribution d = JointDistribution::point_mass(4, g.profile_index(a));
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(ce_deviation_gap(g, d, i), 0.0);
    EXPECT_LE(cce_deviation_gap(g, d, i), 0.0);
  }
}

TEST(DeviationGap, DecompositionMatchesBruteForceOnRandomGames) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    std::uniform_int_distribution<std::size_t> size(1, 4);
    const StrategicGame g = random_game(rng, {size(rng), size(rng), size(rng)});
    const JointDistribution d = random_dist(rng, g.num_profiles());
    for (std::size_t i = 0; i < 3; ++i) {
      const double ce = ce_deviation_gap(g, d, i);
      EXPECT_NEAR(ce, brute_force_ce_gap(g, d, i), 1e-10);
      EXPECT_GE(ce + 1e-12, cce_deviation_gap(g, d, i));
    }
    const DeviationReport r = cce_report(g, d);
    EXPECT_EQ(r.max_gap, *std::max_element(r.per_player_gap.begin(), r.per_player_gap.end()));
  }
}

TEST(DeviationGap, ReportIdentifiesWorstSwap) {
  const StrategicGame g = build_chicken_game();
  const DeviationReport r = ce_report(g, JointDistribution::uniform(9));
  ASSERT_EQ(r.worst_deviation.swap_map.size(), 3u);
  EXPECT_EQ(r.max_gap, r.per_player_gap[r.worst_player]);
}

TEST(RegretMatching, SinglePlayerConcentratesOnArgmax) {
  const StrategicGame g({3}, {{1.0, 4.0, 2.0}});
  for (RegretMode mode : {RegretMode::kExternal, RegretMode::kInternal}) {
    const LearnedEquilibrium le = regret_matching_learn(g, 5000, mode, 3);
    EXPECT_GT(le.empirical[1], 0.99);
    EXPECT_LT(le.regret_trace.back()[0], 0.01);
    EXPECT_EQ(le.regret_trace.size(), 5000u);
  }
}

TEST(RegretMatching, ChickenInternalReachesApproximateCe) {
  const StrategicGame g = build_chicken_game();
  const LearnedEquilibrium le = regret_matching_learn(g, 100000, RegretMode::kInternal, 17);
  for (std::size_t i = 0; i < 2; ++i) {
    const double gap = ce_deviation_gap(g, le.empirical, i);
    EXPECT_LE(gap, 0.05);
    // The trace is the mode-matched gap of the empirical distribution.
    EXPECT_LE(gap, std::max(0.0, le.regret_trace.back()[i]) + 1e-9);
  }
}

TEST(RegretMatching, ExternalTraceBoundsCceGap) {
  std::mt19937_64 rng(23);
  const StrategicGame g = random_game(rng, {3, 3, 2});
  const LearnedEquilibrium le = regret_matching_learn(g, 20000, RegretMode::kExternal, 5);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_LE(cce_deviation_gap(g, le.empirical, i), le.regret_trace.back()[i] + 1e-9);
  }
}

TEST(RegretMatching, AverageRegretShrinks) {
  const StrategicGame g = build_chicken_game();
  for (RegretMode mode : {RegretMode::kExternal, RegretMode::kInternal}) {
    const LearnedEquilibrium le = regret_matching_learn(g, 100000, mode, 9);
    for (std::size_t i = 0; i < 2; ++i) {
      const double r3 = std::max(0.0, le.regret_trace[999][i]);
      const double r4 = std::max(0.0, le.regret_trace[9999][i]);
      const double r5 = std::max(0.0, le.regret_trace[99999][i]);
      EXPECT_LE(r4, r3 + 1e-12);
      EXPECT_LE(r5, r4 + 1e-12);
    }
  }
}

TEST(RegretMatching, Deterministic) {
  const StrategicGame g = build_chicken_game();
  const auto a = regret_matching_learn(g, 3000, RegretMode::kInternal, 42);
  const auto b = regret_matching_learn(g, 3000, RegretMode::kInternal, 42);
  const auto c = regret_matching_learn(g, 3000, RegretMode::kInternal, 43);
  ASSERT_EQ(a.empirical.size(), b.empirical.size());
  for (std::size_t k = 0; k < a.empirical.size(); ++k) EXPECT_EQ(a.empirical[k], b.empirical[k]);
  bool differs = false;
  for (std::size_t k = 0; k < a.empirical.size(); ++k) differs |= a.empirical[k] != c.empirical[k];
  EXPECT_TRUE(differs);
  EXPECT_THROW(regret_matching_learn(g, 0, RegretMode::kExternal, 1), InvalidArgument);
}

}  // namespace
}  // namespace cedetect
