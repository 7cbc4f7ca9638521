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

#ifndef CEDETECT_EQUILIBRIUM_HPP_
#define CEDETECT_EQUILIBRIUM_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "cedetect/error.hpp"
#include "cedetect/game.hpp"
#include "cedetect/rng.hpp"

namespace cedetect {

// Largest gain available to one player from a deviation rule.
//
// For correlated equilibria the rule is a swap map sigma: A^i -> A^i (stored
// as `swap_map`); for coarse correlated equilibria it is a fixed action
// (`fixed_action`).
struct PlayerDeviation {
  double gain = 0.0;
  std::vector<std::size_t> swap_map;
  std::size_t fixed_action = 0;
};

struct DeviationReport {
  std::vector<double> per_player_gap;
  double max_gap = 0.0;
  std::size_t worst_player = 0;
  PlayerDeviation worst_deviation;
};

// Best swap-map deviation. The maximum over sigma decomposes into an
// independent choice of replacement for every recommended action. Ties go to
// the lowest action index, so a recommendation that cannot be improved maps
// to itself only if no lower index ties with it.
inline PlayerDeviation best_swap_deviation(const StrategicGame& game,
                                           const JointDistribution& dist,
                                           std::size_t player) {
  game.check_player(player);
  dist.check_compatible(game);
  const std::size_t n = game.num_actions(player);
  // gain[j][k]: benefit of playing k whenever j is recommended.
  std::vector<double> gain(n * n, 0.0);
  for (std::size_t a = 0; a < game.num_profiles(); ++a) {
    const double p = dist[a];
    if (p <= 0.0) continue;
    const std::size_t j = game.action_of(a, player);
    const double base = game.utility(player, a);
    for (std::size_t k = 0; k < n; ++k) {
      gain[j * n + k] +=
          p * (game.utility(player, game.with_action(a, player, k)) - base);
    }
  }
  PlayerDeviation out;
  out.swap_map.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t best = j;
    double best_gain = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double g = gain[j * n + k];
      if (g > best_gain || (g == best_gain && k < best)) {
        best = k;
        best_gain = g;
      }
    }
    out.swap_map[j] = best;
    out.gain += best_gain;
  }
  return out;
}

inline PlayerDeviation best_fixed_deviation(const StrategicGame& game,
                                            const JointDistribution& dist,
                                            std::size_t player) {
  game.check_player(player);
  dist.check_compatible(game);
  const std::size_t n = game.num_actions(player);
  std::vector<double> gain(n, 0.0);
  for (std::size_t a = 0; a < game.num_profiles(); ++a) {
    const double p = dist[a];
    if (p <= 0.0) continue;
    const double base = game.utility(player, a);
    for (std::size_t k = 0; k < n; ++k) {
      gain[k] += p * (game.utility(player, game.with_action(a, player, k)) - base);
    }
  }
  PlayerDeviation out;
  out.fixed_action = static_cast<std::size_t>(
      std::max_element(gain.begin(), gain.end()) - gain.begin());
  out.gain = gain[out.fixed_action];
  return out;
}

// max_sigma sum_a pi(a) [u^i(sigma(a^i), a^-i) - u^i(a)]; <= 0 iff CE for i.
inline double ce_deviation_gap(const StrategicGame& game,
                               const JointDistribution& dist,
                               std::size_t player) {
  return best_swap_deviation(game, dist, player).gain;
}

// max_{a'} sum_a pi(a) [u^i(a', a^-i) - u^i(a)]; <= 0 iff CCE for i.
inline double cce_deviation_gap(const StrategicGame& game,
                                const JointDistribution& dist,
                                std::size_t player) {
  return best_fixed_deviation(game, dist, player).gain;
}

namespace detail {

template <typename Deviation>
DeviationReport make_report(const StrategicGame& game,
                            const JointDistribution& dist, Deviation deviation) {
  DeviationReport report;
  report.max_gap = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < game.num_players(); ++i) {
    PlayerDeviation d = deviation(game, dist, i);
    report.per_player_gap.push_back(d.gain);
    if (d.gain > report.max_gap) {
      report.max_gap = d.gain;
      report.worst_player = i;
      report.worst_deviation = std::move(d);
    }
  }
  return report;
}

}  // namespace detail

inline DeviationReport ce_report(const StrategicGame& game,
                                 const JointDistribution& dist) {
  return detail::make_report(game, dist, &best_swap_deviation);
}

inline DeviationReport cce_report(const StrategicGame& game,
                                  const JointDistribution& dist) {
  return detail::make_report(game, dist, &best_fixed_deviation);
}

enum class RegretMode { kExternal, kInternal };

struct LearnedEquilibrium {
  JointDistribution empirical;
  std::size_t rounds = 0;
  // regret_trace[t][i]: player i's average regret after t + 1 rounds,
  // measured on realised play. External mode reports max_k R(k) / T, internal
  // mode sum_j max(0, max_k D(j, k)) / T; these coincide with the CCE and CE
  // gaps of the empirical distribution.
  std::vector<std::vector<double>> regret_trace;
  RegretMode mode = RegretMode::kExternal;
};

namespace detail {

inline std::vector<double> regret_matching_strategy(const std::vector<double>& regret) {
  std::vector<double> p(regret.size());
  double total = 0.0;
  for (std::size_t k = 0; k < regret.size(); ++k) {
    p[k] = std::max(0.0, regret[k]);
    total += p[k];
  }
  if (total > 0.0) {
    for (double& x : p) x /= total;
  } else {
    std::fill(p.begin(), p.end(), 1.0 / static_cast<double>(p.size()));
  }
  return p;
}

// Fixed point p = p Q of the lazy chain built from positive swap regrets
// D+(j, k); p keeps no incentive to swap any action for another.
inline std::vector<double> swap_regret_strategy(const std::vector<double>& swap,
                                                std::size_t n,
                                                std::vector<double> start) {
  double norm = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double row = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (k != j) row += std::max(0.0, swap[j * n + k]);
    }
    norm = std::max(norm, row);
  }
  if (norm <= 0.0) {
    return std::vector<double>(n, 1.0 / static_cast<double>(n));
  }
  norm *= 2.0;  // self-loop mass >= 1/2 keeps the chain aperiodic
  std::vector<double> p = std::move(start);
  std::vector<double> next(n);
  for (int iter = 0; iter < 10000; ++iter) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      double leave = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        if (k == j) continue;
        const double move = p[j] * std::max(0.0, swap[j * n + k]) / norm;
        next[k] += move;
        leave += move;
      }
      next[j] += p[j] - leave;
    }
    double change = 0.0;
    for (std::size_t k = 0; k < n; ++k) change += std::abs(next[k] - p[k]);
    p.swap(next);
    if (change < 1e-13) break;
  }
  double total = 0.0;
  for (double x : p) total += x;
  for (double& x : p) x /= total;
  return p;
}

inline std::size_t sample_index(const std::vector<double>& p, double uniform) {
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < p.size(); ++k) {
    acc += p[k];
    if (uniform < acc) return k;
  }
  return p.size() - 1;
}

}  // namespace detail

// Simultaneous regret matching for every player. External mode drives the
// empirical distribution of play toward the CCE set, internal mode toward the
// CE set. Deterministic for a given seed.
inline LearnedEquilibrium regret_matching_learn(const StrategicGame& game,
                                                std::size_t rounds,
                                                RegretMode mode,
                                                std::uint64_t seed) {
  if (rounds == 0) throw InvalidArgument("rounds must be at least 1");
  const std::size_t players = game.num_players();
  Rng rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  // swap[i][j * n + k]: cumulative realised gain of playing k instead of j
  // in the rounds where player i played j.
  std::vector<std::vector<double>> swap(players);
  std::vector<std::vector<double>> external(players);
  std::vector<std::vector<double>> strategy(players);
  for (std::size_t i = 0; i < players; ++i) {
    const std::size_t n = game.num_actions(i);
    swap[i].assign(n * n, 0.0);
    external[i].assign(n, 0.0);
    strategy[i].assign(n, 1.0 / static_cast<double>(n));
  }

  std::vector<double> counts(game.num_profiles(), 0.0);
  std::vector<std::size_t> actions(players);
  LearnedEquilibrium out;
  out.mode = mode;
  out.rounds = rounds;
  out.regret_trace.reserve(rounds);

  for (std::size_t t = 1; t <= rounds; ++t) {
    for (std::size_t i = 0; i < players; ++i) {
      actions[i] = detail::sample_index(strategy[i], unif(rng));
    }
    const std::size_t profile = game.profile_index(actions);
    counts[profile] += 1.0;

    std::vector<double> row(players);
    for (std::size_t i = 0; i < players; ++i) {
      const std::size_t n = game.num_actions(i);
      const std::size_t j = actions[i];
      const double base = game.utility(i, profile);
      double best_external = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < n; ++k) {
        const double delta =
            game.utility(i, game.with_action(profile, i, k)) - base;
        swap[i][j * n + k] += delta;
        external[i][k] += delta;
        best_external = std::max(best_external, external[i][k]);
      }
      const double T = static_cast<double>(t);
      if (mode == RegretMode::kExternal) {
        row[i] = best_external / T;
        strategy[i] = detail::regret_matching_strategy(external[i]);
      } else {
        double total = 0.0;
        for (std::size_t a = 0; a < n; ++a) {
          double best = 0.0;
          for (std::size_t k = 0; k < n; ++k) best = std::max(best, swap[i][a * n + k]);
          total += best;
        }
        row[i] = total / T;
        strategy[i] = detail::swap_regret_strategy(swap[i], n, strategy[i]);
      }
    }
    out.regret_trace.push_back(std::move(row));
  }

  for (double& c : counts) c /= static_cast<double>(rounds);
  out.empirical = JointDistribution(std::move(counts), 1e-9);
  return out;
}

}  // namespace cedetect

#endif  // CEDETECT_EQUILIBRIUM_HPP_
