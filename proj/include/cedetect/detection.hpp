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

#ifndef CEDETECT_DETECTION_HPP_
#define CEDETECT_DETECTION_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cedetect/error.hpp"
#include "cedetect/tilted_family.hpp"

namespace cedetect {

// Detection threshold for a false-alarm budget alpha:
//   mu = log(3 (d_min + 1)^2) - log(alpha |log alpha|).
inline double mu_alpha(double d_min, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidArgument("alpha must lie in (0, 1)");
  }
  if (!(d_min >= 0.0)) throw InvalidArgument("d_min must be nonnegative");
  return std::log(3.0 * (d_min + 1.0) * (d_min + 1.0)) -
         std::log(alpha * std::abs(std::log(alpha)));
}

// Threshold for the window test on the sum S of the last k observations:
// the window fires iff S < z, where
//   z = -inf_{theta >= theta_min} (mu + k b(theta)) / theta.
// Returns nothing when mu / k >= -log pi(u_min): then sup_theta of the
// window log-likelihood ratio never exceeds mu and the test cannot fire.
struct WindowThreshold {
  double theta = 0.0;
  double z = 0.0;
};

inline std::optional<WindowThreshold> window_threshold(const TiltedFamily& family,
                                                       double theta_min,
                                                       double d_min, double mu,
                                                       std::size_t k) {
  const double target = mu / static_cast<double>(k);
  if (target >= family.kl_limit()) return std::nullopt;
  WindowThreshold w;
  w.theta = target <= d_min ? theta_min
                            : std::max(theta_min, family.solve_theta_for_kl(target).theta);
  w.z = -(mu + static_cast<double>(k) * family.log_partition(w.theta)) / w.theta;
  return w;
}

enum class StopReason { kNone, kCusum, kWindow };

inline const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::kCusum:
      return "cusum";
    case StopReason::kWindow:
      return "window";
    default:
      return "none";
  }
}

struct Verdict {
  bool stop = false;
  StopReason reason = StopReason::kNone;
  std::size_t window = 0;  // k of the window test that fired
};

// Precomputed thresholds of the recursive generalised CUSUM.
struct DetectorConfig {
  std::shared_ptr<const TiltedFamily> family;
  double epsilon = 0.0;
  double alpha = 0.0;  // NaN when the threshold was set directly
  double theta_min = 0.0;
  double d_min = 0.0;
  double mu = 0.0;
  std::size_t M = 0;
  // Index k = 1..M; entry 0 unused.
  std::vector<double> theta_k;
  std::vector<double> z_k;
  std::vector<char> reachable;
  std::size_t first_reachable = 1;  // smallest reachable k (> M if none)
  std::vector<double> llr;          // log(tau_theta_min / pi) per symbol
  bool snap_to_alphabet = false;

  static DetectorConfig build(std::shared_ptr<const TiltedFamily> family,
                              double epsilon, double alpha) {
    const double theta_min = solve_theta_min(*family, epsilon);
    const double d_min = family->kl_from_base(theta_min);
    DetectorConfig cfg = assemble(std::move(family), epsilon, theta_min, d_min,
                                  mu_alpha(d_min, alpha));
    cfg.alpha = alpha;
    return cfg;
  }

  // Same detector with an explicit threshold mu instead of one derived from
  // alpha.
  static DetectorConfig with_threshold(std::shared_ptr<const TiltedFamily> family,
                                       double epsilon, double mu) {
    if (!(mu > 0.0) || !std::isfinite(mu)) {
      throw InvalidArgument("threshold mu must be positive and finite");
    }
    const double theta_min = solve_theta_min(*family, epsilon);
    const double d_min = family->kl_from_base(theta_min);
    return assemble(std::move(family), epsilon, theta_min, d_min, mu);
  }

  std::size_t index_of(double u) const {
    if (auto k = family->index_of(u)) return *k;
    if (snap_to_alphabet) return family->nearest_index(u);
    throw InvalidArgument("observation is not in the victim's alphabet");
  }

 private:
  static double solve_theta_min(const TiltedFamily& family, double epsilon) {
    if (!(epsilon > 0.0)) throw InfeasibleError("epsilon must be positive");
    return family.solve_theta_for_mean(family.base_mean() - epsilon).theta;
  }

  static DetectorConfig assemble(std::shared_ptr<const TiltedFamily> family,
                                 double epsilon, double theta_min, double d_min,
                                 double mu) {
    DetectorConfig cfg;
    cfg.epsilon = epsilon;
    cfg.alpha = std::numeric_limits<double>::quiet_NaN();
    cfg.theta_min = theta_min;
    cfg.d_min = d_min;
    cfg.mu = mu;
    const double windows = std::floor(mu / d_min);
    if (windows > 1e8) throw InvalidArgument("threshold implies too many window tests");
    cfg.M = static_cast<std::size_t>(windows);
    cfg.theta_k.assign(cfg.M + 1, 0.0);
    cfg.z_k.assign(cfg.M + 1, -std::numeric_limits<double>::infinity());
    cfg.reachable.assign(cfg.M + 1, 0);
    cfg.first_reachable = cfg.M + 1;
    for (std::size_t k = cfg.M; k >= 1; --k) {
      auto w = window_threshold(*family, theta_min, d_min, mu, k);
      if (!w) break;  // smaller k are unreachable as well
      cfg.theta_k[k] = w->theta;
      cfg.z_k[k] = w->z;
      cfg.reachable[k] = 1;
      cfg.first_reachable = k;
    }
    cfg.llr = family->llr_table(theta_min);
    cfg.family = std::move(family);
    return cfg;
  }
};

struct DetectorState {
  double R = 0.0;
  // Q[k] for k = 0..M; Q[0] is identically zero.
  std::vector<double> Q;
  std::size_t t = 0;
  std::size_t t1 = 0;
  bool stopped = false;
  std::optional<std::size_t> stop_time;
  StopReason stop_reason = StopReason::kNone;
  std::size_t stop_window = 0;

  DetectorState() = default;
  explicit DetectorState(const DetectorConfig& cfg) : Q(cfg.M + 1, 0.0) {}

  // Number of Q entries currently holding sums (the rest are zero).
  std::size_t filled(const DetectorConfig& cfg) const {
    return std::min(cfg.M, t - t1);
  }
};

// One step of the recursive generalised CUSUM on alphabet symbol `index`.
inline Verdict detector_step(const DetectorConfig& cfg, DetectorState& state,
                             std::size_t index) {
  if (state.stopped) throw InvalidArgument("detector has already stopped");
  if (index >= cfg.llr.size()) throw InvalidArgument("symbol index out of range");
  const double u = cfg.family->alphabet()[index];
  ++state.t;
  state.R = std::max(0.0, state.R + cfg.llr[index]);
  Verdict v;
  if (state.R > cfg.mu) {
    v = {true, StopReason::kCusum, 0};
  } else if (state.R > 0.0) {
    // High k first so Q[k - 1] still holds the previous step's value.
    const std::size_t n = state.filled(cfg);
    double* Q = state.Q.data();
    for (std::size_t k = n; k >= 1; --k) Q[k] = u + Q[k - 1];
    for (std::size_t k = cfg.first_reachable; k <= n; ++k) {
      if (Q[k] < cfg.z_k[k]) {
        v = {true, StopReason::kWindow, k};
        break;
      }
    }
  } else {
    const std::size_t n = std::min(cfg.M, state.t - 1 - state.t1);
    std::fill(state.Q.begin() + 1, state.Q.begin() + 1 + n, 0.0);
    state.t1 = state.t;
  }
  if (v.stop) {
    state.stopped = true;
    state.stop_time = state.t;
    state.stop_reason = v.reason;
    state.stop_window = v.window;
  }
  return v;
}

inline Verdict detector_step_value(const DetectorConfig& cfg, DetectorState& state,
                                   double u) {
  return detector_step(cfg, state, cfg.index_of(u));
}

// Runs the detector over a stream of symbol indices; returns the stop time.
inline std::optional<std::size_t> run_detector(const DetectorConfig& cfg,
                                               std::span<const std::size_t> stream) {
  DetectorState state(cfg);
  for (std::size_t idx : stream) {
    if (detector_step(cfg, state, idx).stop) return state.t;
  }
  return std::nullopt;
}

// Plain CUSUM against a known tilt tau_theta.
struct CusumConfig {
  std::shared_ptr<const TiltedFamily> family;
  double theta = 0.0;
  double mu = 0.0;
  std::vector<double> llr;

  CusumConfig() = default;
  CusumConfig(std::shared_ptr<const TiltedFamily> fam, double theta_, double mu_)
      : family(std::move(fam)), theta(theta_), mu(mu_), llr(family->llr_table(theta_)) {}
};

struct CusumState {
  double R = 0.0;
  std::size_t t = 0;
  bool stopped = false;
};

inline Verdict cusum_step(const CusumConfig& cfg, CusumState& state,
                          std::size_t index) {
  if (state.stopped) throw InvalidArgument("detector has already stopped");
  if (index >= cfg.llr.size()) throw InvalidArgument("symbol index out of range");
  ++state.t;
  state.R = std::max(0.0, state.R + cfg.llr[index]);
  if (state.R >= cfg.mu) {
    state.stopped = true;
    return {true, StopReason::kCusum, 0};
  }
  return {};
}

inline Verdict cusum_step(const TiltedFamily& family, double theta, double mu,
                          CusumState& state, double u) {
  auto k = family.index_of(u);
  if (!k) throw InvalidArgument("observation is not in the victim's alphabet");
  if (state.stopped) throw InvalidArgument("detector has already stopped");
  ++state.t;
  state.R = std::max(0.0, state.R + family.llr(theta, *k));
  if (state.R >= mu) {
    state.stopped = true;
    return {true, StopReason::kCusum, 0};
  }
  return {};
}

// First t at which sup_{theta >= theta_min} of the cumulative log-likelihood
// ratio of the whole stream exceeds mu, via the closed-form threshold on the
// running sum.
inline std::optional<std::size_t> gen_sprt_stop(const TiltedFamily& family,
                                                double theta_min, double mu,
                                                std::span<const double> stream) {
  const double d_min = family.kl_from_base(theta_min);
  double sum = 0.0;
  for (std::size_t t = 1; t <= stream.size(); ++t) {
    sum += stream[t - 1];
    auto w = window_threshold(family, theta_min, d_min, mu, t);
    if (w && sum < w->z) return t;
  }
  return std::nullopt;
}

struct TraceRow {
  std::size_t t = 0;
  double u = 0.0;
  double R = 0.0;
  StopReason reason = StopReason::kNone;
  std::size_t window = 0;
};

inline std::vector<TraceRow> detector_trace(const DetectorConfig& cfg,
                                            std::span<const std::size_t> stream) {
  DetectorState state(cfg);
  std::vector<TraceRow> rows;
  for (std::size_t idx : stream) {
    const Verdict v = detector_step(cfg, state, idx);
    rows.push_back({state.t, cfg.family->alphabet()[idx], state.R, v.reason, v.window});
    if (v.stop) break;
  }
  return rows;
}

}  // namespace cedetect

#endif  // CEDETECT_DETECTION_HPP_
