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

#ifndef CEDETECT_ADVERSARY_HPP_
#define CEDETECT_ADVERSARY_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cedetect/error.hpp"
#include "cedetect/rng.hpp"
#include "cedetect/tilted_family.hpp"

namespace cedetect {

struct FixedStart {
  std::size_t t = 1;
};
struct NeverStart {};
// Randomised start driven by the attacker's own CUSUM on the public stream.
struct AdaptiveStart {
  double p = 0.01;
};
using StartLaw = std::variant<FixedStart, NeverStart, AdaptiveStart>;

inline std::string describe(const StartLaw& law) {
  if (const auto* f = std::get_if<FixedStart>(&law)) return "fixed:" + std::to_string(f->t);
  if (std::holds_alternative<NeverStart>(law)) return "never";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "adaptive:%.17g", std::get<AdaptiveStart>(law).p);
  return buf;
}

enum class AttackKind { kNone, kTilted, kExplicit, kRandom };

struct AttackSpec {
  std::vector<double> distribution;
  StartLaw start = FixedStart{1};
  std::string label;
  AttackKind kind = AttackKind::kExplicit;
  std::optional<double> theta;        // tilted attacks
  std::optional<std::uint64_t> seed;  // random attacks
  // False when a tilted attack uses theta below theta_min and so may fall
  // outside D_epsilon.
  bool meets_epsilon = true;
};

inline double per_step_cost(const TiltedFamily& family, std::span<const double> tau) {
  if (tau.size() != family.size()) {
    throw InvalidArgument("attack distribution does not match the alphabet");
  }
  return family.base_mean() - mean_of(family.alphabet(), tau);
}

inline void check_pmf(const TiltedFamily& family, std::span<const double> tau) {
  if (tau.size() != family.size()) {
    throw InvalidArgument("attack distribution has " + std::to_string(tau.size()) +
                          " entries, alphabet has " + std::to_string(family.size()));
  }
  double total = 0.0;
  for (double p : tau) {
    if (!std::isfinite(p) || p < 0.0) throw InvalidArgument("attack pmf must be nonnegative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw InvalidArgument("attack pmf mass off the alphabet support exceeds 1e-12");
  }
}

inline bool in_D_epsilon(const TiltedFamily& family, std::span<const double> tau,
                         double epsilon) {
  check_pmf(family, tau);
  return per_step_cost(family, tau) >= epsilon;
}

// (u_pi - u_tau) / D_KL(tau || pi); the attacker's cost per unit of
// detectability.
inline double attack_efficiency(const TiltedFamily& family, std::span<const double> tau) {
  const double kl = kl_divergence(tau, family.base_pmf());
  if (!(kl > 0.0)) throw InvalidArgument("attack equals the base distribution");
  return per_step_cost(family, tau) / kl;
}

inline AttackSpec make_no_attack(const TiltedFamily& family) {
  AttackSpec spec;
  spec.distribution.assign(family.base_pmf().begin(), family.base_pmf().end());
  spec.start = NeverStart{};
  spec.label = "none";
  spec.kind = AttackKind::kNone;
  return spec;
}

inline AttackSpec make_tilted_attack(const TiltedFamily& family, double theta,
                                     StartLaw start = FixedStart{1},
                                     std::optional<double> theta_min = std::nullopt,
                                     std::string label = "") {
  if (!(theta >= 0.0) || !std::isfinite(theta)) {
    throw InvalidArgument("tilt parameter must be finite and nonnegative");
  }
  AttackSpec spec;
  spec.distribution = family.tilt(theta);
  spec.start = start;
  spec.kind = AttackKind::kTilted;
  spec.theta = theta;
  spec.meets_epsilon = !theta_min || theta >= *theta_min;
  if (label.empty()) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "tilted:%.6g", theta);
    label = buf;
  }
  spec.label = std::move(label);
  return spec;
}

inline AttackSpec make_explicit_attack(const TiltedFamily& family,
                                       std::vector<double> tau, StartLaw start,
                                       std::string label) {
  check_pmf(family, tau);
  AttackSpec spec;
  spec.distribution = std::move(tau);
  spec.start = start;
  spec.label = std::move(label);
  spec.kind = AttackKind::kExplicit;
  return spec;
}

struct RandomAttackSample {
  AttackSpec attack;
  std::size_t draws = 0;
};

// Uniform (Dirichlet(1)) draws on the support simplex, rejected until the
// per-step cost reaches epsilon.
inline RandomAttackSample sample_random_attack_detailed(const TiltedFamily& family,
                                                        double epsilon,
                                                        std::uint64_t seed,
                                                        StartLaw start = FixedStart{1}) {
  constexpr std::size_t kMaxDraws = 100000;
  if (!(epsilon > 0.0) || !(epsilon < family.base_mean() - family.u_min())) {
    throw InfeasibleError("epsilon outside (0, u_pi - u_min)");
  }
  Rng rng(seed);
  std::exponential_distribution<double> gamma1(1.0);
  std::vector<double> tau(family.size());
  for (std::size_t draw = 1; draw <= kMaxDraws; ++draw) {
    double total = 0.0;
    for (double& x : tau) {
      x = gamma1(rng);
      total += x;
    }
    for (double& x : tau) x /= total;
    if (per_step_cost(family, tau) >= epsilon) {
      RandomAttackSample out;
      out.attack.distribution = tau;
      out.attack.start = start;
      out.attack.kind = AttackKind::kRandom;
      out.attack.seed = seed;
      out.attack.label = "random:" + std::to_string(seed);
      out.draws = draw;
      return out;
    }
  }
  throw InfeasibleError("no Dirichlet draw reached epsilon in " +
                        std::to_string(kMaxDraws) +
                        " attempts (acceptance rate 0); epsilon is too close to "
                        "u_pi - u_min for rejection sampling");
}

inline AttackSpec sample_random_attack(const TiltedFamily& family, double epsilon,
                                       std::uint64_t seed,
                                       StartLaw start = FixedStart{1}) {
  return sample_random_attack_detailed(family, epsilon, seed, start).attack;
}

// The attacker's CUSUM statistic on the pre-change stream, taken against
// tau_theta_min whatever the actual attack is.
struct AdaptiveStartTracker {
  std::vector<double> llr;
  double R = 0.0;
  double last_llr = -std::numeric_limits<double>::infinity();
  std::size_t observed = 0;

  AdaptiveStartTracker() = default;
  AdaptiveStartTracker(const TiltedFamily& family, double theta_min)
      : llr(family.llr_table(theta_min)) {}

  void observe(std::size_t index) {
    last_llr = llr.at(index);
    R = std::max(0.0, R + last_llr);
    ++observed;
  }

  // p (1 - exp(R + l))^+ with R the post-update statistic and l the latest
  // log-likelihood ratio. Before any observation this is p.
  double start_probability(double p) const {
    if (observed == 0) return p;
    const double q = std::exp(R + last_llr);
    return p * std::max(0.0, 1.0 - q);
  }
};

inline bool next_change_decision(const AdaptiveStart& law,
                                 const AdaptiveStartTracker& tracker, Rng& rng) {
  const double prob = tracker.start_probability(law.p);
  if (prob <= 0.0) return false;
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < prob;
}

}  // namespace cedetect

#endif  // CEDETECT_ADVERSARY_HPP_
