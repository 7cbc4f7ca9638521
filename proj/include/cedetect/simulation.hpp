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

#ifndef CEDETECT_SIMULATION_HPP_
#define CEDETECT_SIMULATION_HPP_

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cedetect/adversary.hpp"
#include "cedetect/csv.hpp"
#include "cedetect/detection.hpp"
#include "cedetect/error.hpp"
#include "cedetect/rng.hpp"
#include "cedetect/tilted_family.hpp"

namespace cedetect {

enum class Outcome { kDetected, kFalseAlarm, kCensoredNoStop, kCensoredPreChange };

inline const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::kDetected:
      return "detected";
    case Outcome::kFalseAlarm:
      return "false_alarm";
    case Outcome::kCensoredNoStop:
      return "censored_no_stop";
    default:
      return "censored_pre_change";
  }
}

struct EpisodeConfig {
  const DetectorConfig* detector = nullptr;
  const AttackSpec* attack = nullptr;
  std::size_t horizon = 100000;
  double false_alarm_cost = 0.0;
  std::uint64_t seed = 0;
  bool record_stream = false;
};

struct EpisodeResult {
  std::uint64_t seed = 0;
  std::optional<std::size_t> stop_time;
  std::optional<std::size_t> change_time;
  Outcome outcome = Outcome::kCensoredPreChange;
  std::size_t steps = 0;  // observations consumed: T, or the horizon
  double impact = 0.0;
  double realized_cost = 0.0;
  double pre_change_utility_sum = 0.0;
  double utility_sum = 0.0;  // over all consumed observations
  StopReason stop_reason = StopReason::kNone;
  std::vector<std::size_t> stream;  // symbol indices, when recorded

  bool censored() const {
    return outcome == Outcome::kCensoredNoStop ||
           outcome == Outcome::kCensoredPreChange;
  }
};

// Cost of an episode to the defender:
//   false alarm            C - sum_{t <= T} U_t
//   change before stop     sum_{t = nu}^{T} (u_pi - U_t) - sum_{t < nu} U_t
// Censored episodes are evaluated at T = horizon. An episode censored before
// any change raised no alarm, so it is charged -sum U_t without C.
inline double realized_cost(const EpisodeResult& r, double C, double u_pi) {
  (void)u_pi;  // already folded into r.impact
  switch (r.outcome) {
    case Outcome::kFalseAlarm:
      return C - r.pre_change_utility_sum;
    case Outcome::kCensoredPreChange:
      return -r.pre_change_utility_sum;
    default:
      return r.impact - r.pre_change_utility_sum;
  }
}

inline EpisodeResult run_episode(const EpisodeConfig& cfg) {
  if (cfg.detector == nullptr || cfg.attack == nullptr) {
    throw InvalidArgument("episode needs a detector and an attack");
  }
  if (cfg.horizon == 0) throw InvalidArgument("horizon must be at least 1");
  const DetectorConfig& det = *cfg.detector;
  const AttackSpec& attack = *cfg.attack;
  const TiltedFamily& family = *det.family;
  const auto alphabet = family.alphabet();
  const double u_pi = family.base_mean();
  if (attack.distribution.size() != family.size()) {
    throw InvalidArgument("attack distribution does not match the alphabet");
  }

  Rng rng(cfg.seed);
  std::discrete_distribution<std::size_t> pre(family.base_pmf().begin(),
                                              family.base_pmf().end());
  std::discrete_distribution<std::size_t> post(attack.distribution.begin(),
                                               attack.distribution.end());
  const auto* fixed = std::get_if<FixedStart>(&attack.start);
  const auto* adaptive = std::get_if<AdaptiveStart>(&attack.start);
  if (adaptive && !(adaptive->p > 0.0 && adaptive->p <= 1.0)) {
    throw InvalidArgument("adaptive start probability must lie in (0, 1]");
  }
  AdaptiveStartTracker tracker;
  if (adaptive) tracker = AdaptiveStartTracker(family, det.theta_min);

  EpisodeResult r;
  r.seed = cfg.seed;
  DetectorState state(det);
  bool started = false;
  for (std::size_t t = 1; t <= cfg.horizon; ++t) {
    if (!started) {
      if (fixed) {
        started = t >= fixed->t;
      } else if (adaptive) {
        started = next_change_decision(*adaptive, tracker, rng);
      }
      if (started) r.change_time = t;
    }
    const std::size_t idx = started ? post(rng) : pre(rng);
    const double u = alphabet[idx];
    r.utility_sum += u;
    if (started) {
      r.impact += u_pi - u;
    } else {
      r.pre_change_utility_sum += u;
      if (adaptive) tracker.observe(idx);
    }
    if (cfg.record_stream) r.stream.push_back(idx);
    r.steps = t;
    if (detector_step(det, state, idx).stop) {
      r.stop_time = t;
      r.stop_reason = state.stop_reason;
      break;
    }
  }

  if (r.stop_time) {
    r.outcome = (r.change_time && *r.change_time <= *r.stop_time)
                    ? Outcome::kDetected
                    : Outcome::kFalseAlarm;
  } else {
    r.outcome = r.change_time ? Outcome::kCensoredNoStop : Outcome::kCensoredPreChange;
  }
  r.realized_cost = realized_cost(r, cfg.false_alarm_cost, u_pi);
  return r;
}

// Episode i uses seed derive_seed(master, i) in every scenario, so different
// attacks and thresholds see common random numbers.
inline std::vector<EpisodeResult> run_episodes(const DetectorConfig& det,
                                               const AttackSpec& attack,
                                               std::size_t episodes,
                                               std::size_t horizon,
                                               std::uint64_t seed, unsigned workers,
                                               double false_alarm_cost = 0.0,
                                               bool record_stream = false) {
  if (episodes == 0) throw InvalidArgument("episodes must be at least 1");
  return parallel_map<EpisodeResult>(episodes, workers, [&](std::size_t i) {
    EpisodeConfig cfg;
    cfg.detector = &det;
    cfg.attack = &attack;
    cfg.horizon = horizon;
    cfg.false_alarm_cost = false_alarm_cost;
    cfg.seed = derive_seed(seed, i);
    cfg.record_stream = record_stream;
    return run_episode(cfg);
  });
}

struct SampleStats {
  double mean = std::numeric_limits<double>::quiet_NaN();
  double se = std::numeric_limits<double>::quiet_NaN();
  std::size_t n = 0;
};

inline SampleStats summarize(std::span<const double> xs) {
  SampleStats s;
  s.n = xs.size();
  if (xs.empty()) return s;
  double total = 0.0;
  for (double x : xs) total += x;
  s.mean = total / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.se = std::sqrt(ss / static_cast<double>(xs.size() - 1) /
                     static_cast<double>(xs.size()));
  } else {
    s.se = 0.0;
  }
  return s;
}

struct MtbfaEstimate {
  double mean = 0.0;  // lower bound when episodes are censored
  double se = 0.0;
  double censored_fraction = 0.0;
  std::size_t episodes = 0;
};

inline MtbfaEstimate summarize_mtbfa(std::span<const EpisodeResult> runs) {
  std::vector<double> times;
  std::size_t censored = 0;
  for (const auto& r : runs) {
    times.push_back(static_cast<double>(r.steps));
    if (!r.stop_time) ++censored;
  }
  const SampleStats s = summarize(times);
  return {s.mean, s.se, static_cast<double>(censored) / static_cast<double>(runs.size()),
          runs.size()};
}

inline MtbfaEstimate estimate_mtbfa(const DetectorConfig& det, std::size_t episodes,
                                    std::size_t horizon, std::uint64_t seed,
                                    unsigned workers = default_workers()) {
  const AttackSpec none = make_no_attack(*det.family);
  return summarize_mtbfa(run_episodes(det, none, episodes, horizon, seed, workers));
}

struct DelayImpact {
  double mean_delay = std::numeric_limits<double>::quiet_NaN();
  double delay_se = std::numeric_limits<double>::quiet_NaN();
  double mean_impact = 0.0;
  double impact_se = 0.0;
  double detect_rate = 0.0;
  std::size_t detected = 0;
  std::size_t false_alarms = 0;
  std::size_t censored = 0;
  std::size_t episodes = 0;
};

// Delay T - nu + 1 averages over detected episodes only; impact averages over
// every episode. mean_delay is NaN when nothing was detected.
inline DelayImpact summarize_delay_impact(std::span<const EpisodeResult> runs) {
  std::vector<double> delays;
  std::vector<double> impacts;
  DelayImpact out;
  out.episodes = runs.size();
  for (const auto& r : runs) {
    impacts.push_back(r.impact);
    switch (r.outcome) {
      case Outcome::kDetected:
        delays.push_back(static_cast<double>(*r.stop_time - *r.change_time + 1));
        break;
      case Outcome::kFalseAlarm:
        ++out.false_alarms;
        break;
      default:
        ++out.censored;
    }
  }
  out.detected = delays.size();
  const SampleStats d = summarize(delays);
  const SampleStats i = summarize(impacts);
  out.mean_delay = d.mean;
  out.delay_se = d.se;
  out.mean_impact = i.mean;
  out.impact_se = i.se;
  out.detect_rate = static_cast<double>(out.detected) / static_cast<double>(runs.size());
  return out;
}

inline DelayImpact estimate_delay_and_impact(const DetectorConfig& det,
                                             const AttackSpec& attack,
                                             std::size_t episodes, std::size_t horizon,
                                             std::uint64_t seed,
                                             unsigned workers = default_workers()) {
  return summarize_delay_impact(
      run_episodes(det, attack, episodes, horizon, seed, workers));
}

struct SweepRow {
  std::string attack_label;
  double alpha = 0.0;
  double mu = 0.0;
  double mtbfa = 0.0;
  double mtbfa_se = 0.0;
  double censored_fraction = 0.0;
  double mean_delay = 0.0;
  double delay_se = 0.0;
  double mean_impact = 0.0;
  double impact_se = 0.0;
  double detect_rate = 0.0;
};

struct SweepOptions {
  double epsilon = 0.5;
  std::vector<double> alpha_grid;
  std::size_t episodes = 500;
  std::size_t horizon = 100000;
  std::uint64_t seed = 0;
  unsigned workers = default_workers();
  bool snap_to_alphabet = false;
};

// One detector per alpha; every attack is run against it, then the no-attack
// scenario. The "none" row reports the alarm rate within the horizon in
// detect_rate and has no delay.
inline std::vector<SweepRow> sweep(std::shared_ptr<const TiltedFamily> family,
                                   const std::vector<AttackSpec>& attacks,
                                   const SweepOptions& opt) {
  if (opt.alpha_grid.empty()) throw InvalidArgument("alpha grid is empty");
  std::vector<SweepRow> rows;
  const AttackSpec none = make_no_attack(*family);
  for (double alpha : opt.alpha_grid) {
    DetectorConfig det = DetectorConfig::build(family, opt.epsilon, alpha);
    det.snap_to_alphabet = opt.snap_to_alphabet;
    const auto null_runs =
        run_episodes(det, none, opt.episodes, opt.horizon, opt.seed, opt.workers);
    const MtbfaEstimate m = summarize_mtbfa(null_runs);
    auto base_row = [&](const std::string& label) {
      SweepRow row;
      row.attack_label = label;
      row.alpha = alpha;
      row.mu = det.mu;
      row.mtbfa = m.mean;
      row.mtbfa_se = m.se;
      row.censored_fraction = m.censored_fraction;
      return row;
    };
    for (const AttackSpec& attack : attacks) {
      const DelayImpact di = estimate_delay_and_impact(det, attack, opt.episodes,
                                                       opt.horizon, opt.seed, opt.workers);
      SweepRow row = base_row(attack.label);
      row.mean_delay = di.mean_delay;
      row.delay_se = di.delay_se;
      row.mean_impact = di.mean_impact;
      row.impact_se = di.impact_se;
      row.detect_rate = di.detect_rate;
      rows.push_back(std::move(row));
    }
    SweepRow row = base_row("none");
    row.mean_delay = std::numeric_limits<double>::quiet_NaN();
    row.delay_se = std::numeric_limits<double>::quiet_NaN();
    row.detect_rate = 1.0 - m.censored_fraction;
    rows.push_back(std::move(row));
  }
  return rows;
}

inline void write_sweep_csv(std::ostream& os, std::span<const SweepRow> rows) {
  os << "attack_label,alpha,mu,mtbfa,mean_delay,mean_impact,detect_rate\n";
  for (const auto& r : rows) {
    csv::row(os, {csv::field(r.attack_label), csv::num(r.alpha), csv::num(r.mu),
                  csv::num(r.mtbfa), csv::num(r.mean_delay), csv::num(r.mean_impact),
                  csv::num(r.detect_rate)});
  }
}

inline void write_episode_csv(std::ostream& os, std::span<const EpisodeResult> runs,
                              double false_alarm_cost, double u_pi) {
  os << "episode,seed,nu,T,outcome,impact,cost\n";
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& r = runs[i];
    csv::row(os, {std::to_string(i), std::to_string(r.seed),
                  r.change_time ? std::to_string(*r.change_time) : "inf",
                  r.stop_time ? std::to_string(*r.stop_time) : "none",
                  to_string(r.outcome), csv::num(r.impact),
                  csv::num(realized_cost(r, false_alarm_cost, u_pi))});
  }
}

struct CostCalibration {
  double mu = 0.0;
  double residual = 0.0;  // u_pi E[T | no attack] + eps E[T | theta_min, nu = 1] - C
  double residual_se = 0.0;
  double mtbfa = 0.0;
  double attacked_mean_stop = 0.0;
  double censored_fraction = 0.0;
  int iterations = 0;
};

// Threshold mu at which the expected cost of always raising an alarm at the
// detector's stop matches C. Bisection over mu; common random numbers make
// the Monte-Carlo objective monotone in mu.
inline CostCalibration calibrate_mu_for_cost(std::shared_ptr<const TiltedFamily> family,
                                             double epsilon, double C,
                                             std::size_t episodes, std::size_t horizon,
                                             std::uint64_t seed,
                                             unsigned workers = default_workers()) {
  const double u_pi = family->base_mean();
  if (!(C > u_pi)) {
    throw InfeasibleError("false-alarm cost must exceed u_pi for a solution to exist");
  }
  const AttackSpec none = make_no_attack(*family);
  const double theta_min =
      family->solve_theta_for_mean(u_pi - epsilon).theta;
  const AttackSpec worst = make_tilted_attack(*family, theta_min, FixedStart{1});

  auto evaluate = [&](double mu) {
    const DetectorConfig det = DetectorConfig::with_threshold(family, epsilon, mu);
    const auto null_runs = run_episodes(det, none, episodes, horizon, seed, workers);
    const auto attack_runs = run_episodes(det, worst, episodes, horizon, seed, workers);
    std::vector<double> combined(episodes);
    std::vector<double> t_null(episodes);
    std::vector<double> t_att(episodes);
    std::size_t censored = 0;
    for (std::size_t i = 0; i < episodes; ++i) {
      t_null[i] = static_cast<double>(null_runs[i].steps);
      t_att[i] = static_cast<double>(attack_runs[i].steps);
      if (!null_runs[i].stop_time) ++censored;
      if (!attack_runs[i].stop_time) ++censored;
      combined[i] = u_pi * t_null[i] + epsilon * t_att[i];
    }
    const SampleStats s = summarize(combined);
    CostCalibration c;
    c.mu = mu;
    c.residual = s.mean - C;
    c.residual_se = s.se;
    c.mtbfa = summarize(t_null).mean;
    c.attacked_mean_stop = summarize(t_att).mean;
    c.censored_fraction =
        static_cast<double>(censored) / static_cast<double>(2 * episodes);
    return c;
  };

  double lo = 1e-6;
  CostCalibration at_lo = evaluate(lo);
  if (at_lo.residual >= 0.0) return at_lo;
  double hi = 1.0;
  CostCalibration at_hi = evaluate(hi);
  int iterations = 0;
  while (at_hi.residual < 0.0) {
    if (at_hi.censored_fraction > 0.05) {
      throw InfeasibleError("horizon censoring exceeds 5% before reaching C; "
                            "increase the horizon");
    }
    lo = hi;
    at_lo = at_hi;
    hi *= 2.0;
    at_hi = evaluate(hi);
    if (++iterations > 40) throw NumericalError("could not bracket mu(C)");
  }
  // Censored runs only understate both expectations, so a censored point
  // with a nonnegative residual still brackets the root from above. A
  // negative residual under heavy censoring is ambiguous.
  while (iterations < 80 && hi - lo > 1e-6 * hi) {
    const double mid = 0.5 * (lo + hi);
    CostCalibration at_mid = evaluate(mid);
    ++iterations;
    if (at_mid.residual < 0.0) {
      if (at_mid.censored_fraction > 0.05) {
        throw InfeasibleError("horizon censoring exceeds 5% inside the bracket; "
                              "increase the horizon");
      }
      lo = mid;
      at_lo = at_mid;
    } else {
      hi = mid;
      at_hi = at_mid;
    }
  }
  CostCalibration best =
      std::abs(at_lo.residual) <= std::abs(at_hi.residual) ? at_lo : at_hi;
  if (best.censored_fraction > 0.05) {
    throw InfeasibleError("horizon censoring exceeds 5% at the calibrated mu; "
                          "increase the horizon");
  }
  best.iterations = iterations;
  return best;
}

// Relative miss of the calibrated MTBFA beyond which the target counts as
// unattainable.
inline constexpr double kAlphaCalibrationTolerance = 0.2;

struct AlphaCalibration {
  double alpha = 0.0;
  double mu = 0.0;
  MtbfaEstimate mtbfa;
};

// alpha in [1e-15, 1/e] whose Monte-Carlo MTBFA is closest to the target.
// On that range mu_alpha decreases in alpha, so the MTBFA does too.
inline AlphaCalibration calibrate_alpha_for_mtbfa(std::shared_ptr<const TiltedFamily> family,
                                                  double epsilon, double target,
                                                  std::size_t episodes,
                                                  std::size_t horizon, std::uint64_t seed,
                                                  unsigned workers = default_workers(),
                                                  bool snap_to_alphabet = false) {
  if (!(target >= 1.0) || target >= static_cast<double>(horizon)) {
    throw InfeasibleError("target MTBFA must lie in [1, horizon)");
  }
  auto evaluate = [&](double log_alpha) {
    DetectorConfig det = DetectorConfig::build(family, epsilon, std::exp(log_alpha));
    det.snap_to_alphabet = snap_to_alphabet;
    AlphaCalibration a;
    a.alpha = std::exp(log_alpha);
    a.mu = det.mu;
    a.mtbfa = estimate_mtbfa(det, episodes, horizon, seed, workers);
    return a;
  };
  double lo = std::log(1e-15);  // small alpha, long MTBFA
  double hi = -1.0;             // alpha = 1/e
  // The MTBFA is a step function of alpha when single rare symbols decide
  // the alarm, so the closest grid value can still miss the target badly.
  auto accept = [&](const AlphaCalibration& a) {
    if (std::abs(a.mtbfa.mean - target) > kAlphaCalibrationTolerance * target) {
      char buf[160];
      std::snprintf(buf, sizeof(buf),
                    "target MTBFA %.6g not attainable: closest is %.6g at alpha %.3g",
                    target, a.mtbfa.mean, a.alpha);
      throw InfeasibleError(buf);
    }
    return a;
  };
  AlphaCalibration at_lo = evaluate(lo);
  AlphaCalibration at_hi = evaluate(hi);
  if (at_hi.mtbfa.mean >= target) return accept(at_hi);
  if (at_lo.mtbfa.mean < target) {
    throw InfeasibleError("target MTBFA is not reachable within the horizon");
  }
  for (int it = 0; it < 60 && hi - lo > 1e-4; ++it) {
    const double mid = 0.5 * (lo + hi);
    AlphaCalibration at_mid = evaluate(mid);
    if (at_mid.mtbfa.mean >= target) {
      lo = mid;
      at_lo = at_mid;
    } else {
      hi = mid;
      at_hi = at_mid;
    }
  }
  return accept(std::abs(at_lo.mtbfa.mean - target) <= std::abs(at_hi.mtbfa.mean - target)
                    ? at_lo
                    : at_hi);
}

struct TolerableImpactRow {
  double epsilon = 0.0;
  double target_mtbfa = 0.0;
  bool feasible = false;
  double alpha = std::numeric_limits<double>::quiet_NaN();
  double mu = std::numeric_limits<double>::quiet_NaN();
  double mtbfa = std::numeric_limits<double>::quiet_NaN();
  double impact = std::numeric_limits<double>::quiet_NaN();
  double impact_se = std::numeric_limits<double>::quiet_NaN();
  std::string note;
};

// For every (epsilon, target MTBFA): calibrate alpha, then measure the mean
// impact of the theta_min attack started at t = 1. Infeasible cells keep NaN
// values and carry the reason in `note`.
inline std::vector<TolerableImpactRow> tolerable_impact(
    std::shared_ptr<const TiltedFamily> family, std::span<const double> epsilons,
    std::span<const double> targets, std::size_t episodes, std::size_t horizon,
    std::uint64_t seed, unsigned workers = default_workers(),
    bool snap_to_alphabet = false) {
  std::vector<TolerableImpactRow> rows;
  for (double eps : epsilons) {
    for (double target : targets) {
      TolerableImpactRow row;
      row.epsilon = eps;
      row.target_mtbfa = target;
      try {
        const AlphaCalibration cal = calibrate_alpha_for_mtbfa(
            family, eps, target, episodes, horizon, seed, workers, snap_to_alphabet);
        DetectorConfig det = DetectorConfig::build(family, eps, cal.alpha);
        det.snap_to_alphabet = snap_to_alphabet;
        const AttackSpec worst = make_tilted_attack(*family, det.theta_min, FixedStart{1});
        const DelayImpact di =
            estimate_delay_and_impact(det, worst, episodes, horizon, seed, workers);
        row.feasible = true;
        row.alpha = cal.alpha;
        row.mu = cal.mu;
        row.mtbfa = cal.mtbfa.mean;
        row.impact = di.mean_impact;
        row.impact_se = di.impact_se;
      } catch (const InfeasibleError& e) {
        row.note = e.what();
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

inline void write_tolerable_impact_csv(std::ostream& os,
                                       std::span<const TolerableImpactRow> rows) {
  os << "epsilon,target_mtbfa,mtbfa,impact_at_theta_min\n";
  for (const auto& r : rows) {
    csv::row(os, {csv::num(r.epsilon), csv::num(r.target_mtbfa), csv::num(r.mtbfa),
                  csv::num(r.impact)});
  }
}

struct WaldResult {
  double relative_error = 0.0;
  double mean_utility_sum = 0.0;
  double mean_stop_time = 0.0;
  std::size_t uncensored = 0;
};

// Compares E[sum_{t <= T} U_t] with u_pi E[T] over no-attack episodes that
// stopped. `stream_pmf` replaces the pre-change law (a planted mismatch).
inline WaldResult wald_check(const DetectorConfig& det, std::size_t episodes,
                             std::size_t horizon, std::uint64_t seed,
                             unsigned workers = default_workers(),
                             std::optional<std::vector<double>> stream_pmf = std::nullopt) {
  const TiltedFamily& family = *det.family;
  AttackSpec source = make_no_attack(family);
  if (stream_pmf) {
    source = make_explicit_attack(family, *stream_pmf, FixedStart{1}, "stream");
  }
  const auto runs = run_episodes(det, source, episodes, horizon, seed, workers);
  std::vector<double> sums;
  std::vector<double> times;
  for (const auto& r : runs) {
    if (!r.stop_time) continue;
    sums.push_back(r.utility_sum);
    times.push_back(static_cast<double>(*r.stop_time));
  }
  WaldResult w;
  w.uncensored = sums.size();
  if (sums.empty()) throw InfeasibleError("no episode stopped within the horizon");
  w.mean_utility_sum = summarize(sums).mean;
  w.mean_stop_time = summarize(times).mean;
  const double expected = family.base_mean() * w.mean_stop_time;
  w.relative_error = std::abs(w.mean_utility_sum - expected) / expected;
  return w;
}

}  // namespace cedetect

#endif  // CEDETECT_SIMULATION_HPP_
