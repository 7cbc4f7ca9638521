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

#include "cedetect/adversary.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "cedetect/game.hpp"
#include "cedetect/rng.hpp"
#include "gtest/gtest.h"

namespace cedetect {
namespace {

TiltedFamily chicken_family() {
  return TiltedFamily(victim_view(build_chicken_game(), chicken_ce(), 0));
}

double theta_min_for(const TiltedFamily& f, double eps) {
  return f.solve_theta_for_mean(f.base_mean() - eps).theta;
}

TEST(Cost, TiltedAttacksOrderedByTheta) {
  const TiltedFamily f = chicken_family();
  const double tm = theta_min_for(f, 0.5);
  const AttackSpec at_min = make_tilted_attack(f, tm, FixedStart{1}, tm);
  EXPECT_NEAR(per_step_cost(f, at_min.distribution), 0.5, 1e-9);
  EXPECT_TRUE(at_min.meets_epsilon);
  const AttackSpec t1 = make_tilted_attack(f, 0.09);
  const AttackSpec t2 = make_tilted_attack(f, 0.1);
  EXPECT_LT(per_step_cost(f, at_min.distribution), per_step_cost(f, t1.distribution));
  EXPECT_LT(per_step_cost(f, t1.distribution), per_step_cost(f, t2.distribution));
  EXPECT_EQ(t1.label, "tilted:0.09");
  const AttackSpec zero = make_tilted_attack(f, 0.0, FixedStart{1}, tm);
  for (std::size_t k = 0; k < f.size(); ++k) {
    EXPECT_NEAR(zero.distribution[k], f.base_pmf()[k], 1e-15);
  }
  EXPECT_FALSE(zero.meets_epsilon);
  EXPECT_NEAR(per_step_cost(f, zero.distribution), 0.0, 1e-12);
  EXPECT_THROW(make_tilted_attack(f, -0.1), InvalidArgument);
}

TEST(Cost, NoAttackIsBaseline) {
  const TiltedFamily f = chicken_family();
  const AttackSpec none = make_no_attack(f);
  EXPECT_EQ(none.label, "none");
  EXPECT_TRUE(std::holds_alternative<NeverStart>(none.start));
  EXPECT_EQ(describe(none.start), describe(StartLaw{NeverStart{}}));
}

TEST(DEpsilon, Membership) {
  const TiltedFamily f = chicken_family();
  const std::vector<double> worst{1.0, 0, 0, 0, 0, 0};
  EXPECT_TRUE(in_D_epsilon(f, worst, 5.0));
  EXPECT_FALSE(in_D_epsilon(f, worst, 73.0 / 12.0));
  EXPECT_FALSE(in_D_epsilon(f, f.base_pmf(), 1e-9));
  const std::vector<double> bad{0.5, 0.5, 0.1, 0, 0, 0};
  EXPECT_THROW(in_D_epsilon(f, bad, 0.1), InvalidArgument);
  EXPECT_THROW(make_explicit_attack(f, {0.5, 0.5}, FixedStart{1}, "x"), InvalidArgument);
}

TEST(RandomAttack, SatisfiesConstraintAndIsDeterministic) {
  const TiltedFamily f = chicken_family();
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto a = sample_random_attack(f, 0.5, seed);
    EXPECT_GE(per_step_cost(f, a.distribution), 0.5);
    EXPECT_NO_THROW(check_pmf(f, a.distribution));
    EXPECT_EQ(a.label, "random:" + std::to_string(seed));
    const auto b = sample_random_attack(f, 0.5, seed);
    EXPECT_EQ(a.distribution, b.distribution);
  }
  EXPECT_THROW(sample_random_attack(f, 6.0, 1), InfeasibleError);
  EXPECT_THROW(sample_random_attack(f, 0.0, 1), InfeasibleError);
}

// Mean number of draws should be 1 / P(cost >= eps) with P estimated by an
// independent sampler using gamma variates.
TEST(RandomAttack, AcceptanceRateMatchesIndependentSampler) {
  const TiltedFamily f = chicken_family();
  const double eps = 1.5;
  std::mt19937 rng(2024);
  std::gamma_distribution<double> g(1.0, 1.0);
  const int n = 1000000;
  int hits = 0;
  std::vector<double> tau(f.size());
  for (int i = 0; i < n; ++i) {
    double total = 0.0, mean = 0.0;
    for (double& x : tau) total += (x = g(rng));
    for (std::size_t k = 0; k < f.size(); ++k) mean += tau[k] / total * f.alphabet()[k];
    hits += f.base_mean() - mean >= eps;
  }
  const double p = static_cast<double>(hits) / n;
  ASSERT_GT(p, 0.01);
  const int seeds = 4000;
  double sum = 0.0, sumsq = 0.0;
  for (int s = 0; s < seeds; ++s) {
    const double d = static_cast<double>(sample_random_attack_detailed(f, eps, s + 1000).draws);
    sum += d;
    sumsq += d * d;
  }
  const double mean = sum / seeds;
  const double se = std::sqrt((sumsq / seeds - mean * mean) / seeds);
  EXPECT_NEAR(mean, 1.0 / p, 3.0 * se + 0.01 / p);
}

TEST(Efficiency, TiltedThetaMinIsMaxmin) {
  const TiltedFamily f = chicken_family();
  const double tm = theta_min_for(f, 0.5);
  const double best = attack_efficiency(f, f.tilt(tm));
  EXPECT_NEAR(best, f.impact_efficiency(tm), 1e-9);
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const auto a = sample_random_attack(f, 0.5, seed);
    EXPECT_LE(attack_efficiency(f, a.distribution), best + 1e-12);
  }
  for (double th : {0.09, 0.1, 0.5}) {
    EXPECT_LT(attack_efficiency(f, f.tilt(th)), best);
  }
  EXPECT_THROW(attack_efficiency(f, f.base_pmf()), InvalidArgument);
}

TEST(AdaptiveStart, Probability) {
  const TiltedFamily f = chicken_family();
  const double tm = theta_min_for(f, 0.5);
  AdaptiveStartTracker tr(f, tm);
  EXPECT_EQ(tr.start_probability(0.01), 0.01);
  const auto llr = f.llr_table(tm);
  // A high-utility symbol has negative LLR: R stays 0 and the start is likely.
  tr.observe(5);
  EXPECT_EQ(tr.R, 0.0);
  EXPECT_NEAR(tr.start_probability(0.01), 0.01 * (1.0 - std::exp(llr[5])), 1e-15);
  // Low-utility symbols push R up; once R + l >= 0 the attacker holds off.
  tr.observe(0);
  EXPECT_NEAR(tr.R, llr[0], 1e-15);
  EXPECT_EQ(tr.start_probability(0.01), 0.0);
  Rng rng(1);
  for (int i = 0; i < 100; ++i) EXPECT_FALSE(next_change_decision(AdaptiveStart{1.0}, tr, rng));
  AdaptiveStartTracker fresh(f, tm);
  EXPECT_TRUE(next_change_decision(AdaptiveStart{1.0}, fresh, rng));
}

TEST(AdaptiveStart, EmpiricalRate) {
  const TiltedFamily f = chicken_family();
  AdaptiveStartTracker tr(f, theta_min_for(f, 0.5));
  tr.observe(5);
  const double p = tr.start_probability(0.5);
  Rng rng(5);
  int hits = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) hits += next_change_decision(AdaptiveStart{0.5}, tr, rng);
  EXPECT_NEAR(static_cast<double>(hits) / n, p, 4.0 * std::sqrt(p * (1 - p) / n));
}

}  // namespace
}  // namespace cedetect
