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

#ifndef CEDETECT_GAME_HPP_
#define CEDETECT_GAME_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cedetect/error.hpp"

namespace cedetect {

// Finite N-player normal-form game with a dense utility tensor.
//
// Action profiles are addressed by a flat row-major index in which player 0
// is the most significant digit: for two players with |A^0| = 3, |A^1| = 3
// the profile (a^0, a^1) has index 3 * a^0 + a^1.
class StrategicGame {
 public:
  static constexpr std::size_t kMaxProfiles = std::size_t{1} << 24;

  StrategicGame(std::vector<std::size_t> action_counts,
                std::vector<std::vector<double>> utilities)
      : action_counts_(std::move(action_counts)),
        utilities_(std::move(utilities)) {
    if (action_counts_.empty()) {
      throw InvalidArgument("game needs at least one player");
    }
    num_profiles_ = 1;
    strides_.assign(action_counts_.size(), 1);
    for (std::size_t i = action_counts_.size(); i-- > 0;) {
      if (action_counts_[i] == 0) {
        throw InvalidArgument("player " + std::to_string(i) +
                              " has an empty action set");
      }
      strides_[i] = num_profiles_;
      if (num_profiles_ > kMaxProfiles / action_counts_[i]) {
        throw InvalidArgument("profile space too large for dense storage");
      }
      num_profiles_ *= action_counts_[i];
    }
    if (utilities_.size() != action_counts_.size()) {
      throw InvalidArgument("expected one utility array per player");
    }
    for (std::size_t i = 0; i < utilities_.size(); ++i) {
      if (utilities_[i].size() != num_profiles_) {
        throw InvalidArgument("utility array of player " + std::to_string(i) +
                              " has " + std::to_string(utilities_[i].size()) +
                              " entries, expected " +
                              std::to_string(num_profiles_));
      }
      for (double u : utilities_[i]) {
        if (!std::isfinite(u) || u < 0.0) {
          throw InvalidArgument("utilities must be finite and nonnegative");
        }
      }
    }
  }

  std::size_t num_players() const { return action_counts_.size(); }
  std::size_t num_profiles() const { return num_profiles_; }
  std::size_t num_actions(std::size_t player) const {
    return action_counts_.at(player);
  }
  std::span<const std::size_t> action_counts() const { return action_counts_; }

  double utility(std::size_t player, std::size_t profile) const {
    return utilities_[player][profile];
  }
  std::span<const double> utilities(std::size_t player) const {
    return utilities_.at(player);
  }

  std::size_t action_of(std::size_t profile, std::size_t player) const {
    return (profile / strides_[player]) % action_counts_[player];
  }

  // Profile obtained from `profile` by replacing player's action.
  std::size_t with_action(std::size_t profile, std::size_t player,
                          std::size_t action) const {
    const std::size_t current = action_of(profile, player);
    return profile + (action - current) * strides_[player];
  }

  std::size_t profile_index(std::span<const std::size_t> actions) const {
    if (actions.size() != num_players()) {
      throw InvalidArgument("profile has wrong number of actions");
    }
    std::size_t index = 0;
    for (std::size_t i = 0; i < actions.size(); ++i) {
      if (actions[i] >= action_counts_[i]) {
        throw InvalidArgument("action index out of range");
      }
      index += actions[i] * strides_[i];
    }
    return index;
  }

  std::vector<std::size_t> profile_actions(std::size_t profile) const {
    std::vector<std::size_t> actions(num_players());
    for (std::size_t i = 0; i < actions.size(); ++i) {
      actions[i] = action_of(profile, i);
    }
    return actions;
  }

  void check_player(std::size_t player) const {
    if (player >= num_players()) {
      throw InvalidArgument("player index " + std::to_string(player) +
                            " out of range");
    }
  }

 private:
  std::vector<std::size_t> action_counts_;
  std::vector<std::size_t> strides_;
  std::vector<std::vector<double>> utilities_;
  std::size_t num_profiles_ = 0;
};

// Probability distribution over the profile space of a game.
class JointDistribution {
 public:
  static constexpr double kSumTolerance = 1e-12;

  JointDistribution() = default;

  // Takes a dense probability vector. `tolerance` bounds |sum - 1| before the
  // vector is renormalised to sum to one.
  explicit JointDistribution(std::vector<double> probs,
                             double tolerance = kSumTolerance)
      : probs_(std::move(probs)) {
    if (probs_.empty()) throw InvalidArgument("empty distribution");
    double total = 0.0;
    for (double p : probs_) {
      if (!std::isfinite(p) || p < 0.0 || p > 1.0 + tolerance) {
        throw InvalidArgument("probabilities must lie in [0, 1]");
      }
      total += p;
    }
    if (std::abs(total - 1.0) > tolerance) {
      throw InvalidArgument("probabilities sum to " + std::to_string(total) +
                            ", expected 1");
    }
    if (total != 1.0) {
      for (double& p : probs_) p /= total;
    }
  }

  // Sparse construction from (profile index, probability) pairs. Repeated
  // indices accumulate.
  static JointDistribution from_entries(
      std::size_t num_profiles,
      std::span<const std::pair<std::size_t, double>> entries,
      double tolerance = kSumTolerance) {
    std::vector<double> probs(num_profiles, 0.0);
    for (const auto& [index, p] : entries) {
      if (index >= num_profiles) {
        throw InvalidArgument("profile index " + std::to_string(index) +
                              " outside the game's profile space");
      }
      probs[index] += p;
    }
    return JointDistribution(std::move(probs), tolerance);
  }

  static JointDistribution point_mass(std::size_t num_profiles,
                                      std::size_t profile) {
    std::vector<double> probs(num_profiles, 0.0);
    probs.at(profile) = 1.0;
    return JointDistribution(std::move(probs));
  }

  static JointDistribution uniform(std::size_t num_profiles) {
    return JointDistribution(
        std::vector<double>(num_profiles, 1.0 / static_cast<double>(num_profiles)));
  }

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t profile) const { return probs_[profile]; }
  std::span<const double> probs() const { return probs_; }

  // (index, probability) pairs of the support in increasing index order.
  std::vector<std::pair<std::size_t, double>> support() const {
    std::vector<std::pair<std::size_t, double>> out;
    for (std::size_t i = 0; i < probs_.size(); ++i) {
      if (probs_[i] > 0.0) out.emplace_back(i, probs_[i]);
    }
    return out;
  }

  void check_compatible(const StrategicGame& game) const {
    if (probs_.size() != game.num_profiles()) {
      throw InvalidArgument("distribution does not match the game's profile space");
    }
  }

 private:
  std::vector<double> probs_;
};

// Victim-side view of a mediated game: the distinct utility values the victim
// can observe (ascending, zero-mass values dropped) with their base masses and
// the action profiles behind each value.
struct VictimView {
  std::size_t victim = 0;
  std::vector<double> alphabet;
  std::vector<double> base_pmf;
  std::vector<std::vector<std::size_t>> profile_groups;
  // Interval used for quantisation; fixed at construction so that repeated
  // quantisation with the same bin count is a no-op.
  double range_lo = 0.0;
  double range_hi = 0.0;

  std::size_t size() const { return alphabet.size(); }
  bool empty() const { return alphabet.empty(); }
};

inline double expected_utility(const StrategicGame& game,
                               const JointDistribution& dist,
                               std::size_t player) {
  game.check_player(player);
  dist.check_compatible(game);
  double total = 0.0;
  for (std::size_t a = 0; a < game.num_profiles(); ++a) {
    if (dist[a] > 0.0) total += dist[a] * game.utility(player, a);
  }
  return total;
}

inline VictimView victim_view(const StrategicGame& game,
                              const JointDistribution& dist,
                              std::size_t victim) {
  game.check_player(victim);
  dist.check_compatible(game);
  // Exact grouping by utility value.
  std::map<double, std::pair<double, std::vector<std::size_t>>> groups;
  for (std::size_t a = 0; a < game.num_profiles(); ++a) {
    if (dist[a] <= 0.0) continue;
    auto& group = groups[game.utility(victim, a)];
    group.first += dist[a];
    group.second.push_back(a);
  }
  VictimView view;
  view.victim = victim;
  for (auto& [value, group] : groups) {
    view.alphabet.push_back(value);
    view.base_pmf.push_back(group.first);
    view.profile_groups.push_back(std::move(group.second));
  }
  view.range_lo = view.alphabet.front();
  view.range_hi = view.alphabet.back();
  return view;
}

// Merges alphabet values into `bins` equal-width bins over the view's range.
// Each occupied bin becomes one symbol located at the bin midpoint.
inline VictimView quantize_view(const VictimView& view, std::size_t bins) {
  if (bins == 0) throw InvalidArgument("bins must be positive");
  if (view.empty()) throw InvalidArgument("cannot quantize an empty view");
  const double lo = view.range_lo;
  const double hi = view.range_hi;
  const double width = (hi - lo) / static_cast<double>(bins);

  std::vector<double> mass(bins, 0.0);
  std::vector<std::vector<std::size_t>> members(bins);
  for (std::size_t k = 0; k < view.size(); ++k) {
    std::size_t bin = 0;
    if (width > 0.0) {
      const double pos = std::floor((view.alphabet[k] - lo) / width);
      bin = pos <= 0.0 ? 0
                       : std::min(bins - 1, static_cast<std::size_t>(pos));
    }
    mass[bin] += view.base_pmf[k];
    members[bin].insert(members[bin].end(), view.profile_groups[k].begin(),
                        view.profile_groups[k].end());
  }

  VictimView out;
  out.victim = view.victim;
  out.range_lo = lo;
  out.range_hi = hi;
  for (std::size_t b = 0; b < bins; ++b) {
    if (mass[b] <= 0.0) continue;
    std::sort(members[b].begin(), members[b].end());
    out.alphabet.push_back(width > 0.0
                               ? lo + (static_cast<double>(b) + 0.5) * width
                               : lo);
    out.base_pmf.push_back(mass[b]);
    out.profile_groups.push_back(std::move(members[b]));
  }
  return out;
}

// Three-action extension of the game of chicken. Actions are indexed
// A = 0, B = 1, C = 2 for both players; player 0 is the row player.
inline StrategicGame build_chicken_game() {
  //            A2     B2     C2
  // A1        0,0    6,1    9,3
  // B1        1,6    5,5    4,2
  // C1        3,9    2,4    7,7
  return StrategicGame({3, 3}, {{0, 6, 9, 1, 5, 4, 3, 2, 7},
                                {0, 1, 3, 6, 5, 2, 9, 4, 7}});
}

// Correlated equilibrium of the chicken game above with u_pi = 73/12.
inline JointDistribution chicken_ce() {
  constexpr double kSmall = 1.0 / 36.0;
  constexpr double kThird = 1.0 / 3.0;
  // AA    AB      AC      BA      BB      BC   CA      CB   CC
  return JointDistribution(
      {0.0, kSmall, kThird, kSmall, kSmall, 0.0, kThird, 0.0, 0.25});
}

}  // namespace cedetect

#endif  // CEDETECT_GAME_HPP_
