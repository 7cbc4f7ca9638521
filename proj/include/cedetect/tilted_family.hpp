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

#ifndef CEDETECT_TILTED_FAMILY_HPP_
#define CEDETECT_TILTED_FAMILY_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cedetect/error.hpp"
#include "cedetect/game.hpp"

namespace cedetect {

inline double mean_of(std::span<const double> values, std::span<const double> pmf) {
  double total = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) total += pmf[k] * values[k];
  return total;
}

// D_KL(p || q). Infinite when p puts mass where q has none.
inline double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw InvalidArgument("pmf sizes differ");
  double total = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] <= 0.0) continue;
    if (q[k] <= 0.0) return std::numeric_limits<double>::infinity();
    total += p[k] * std::log(p[k] / q[k]);
  }
  return std::max(0.0, total);
}

struct ThetaSolve {
  double theta = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

// Exponential tilts tau_theta(u) = pi(u) exp(-theta u - b(theta)) of a base
// pmf on a finite, strictly increasing alphabet.
//
// Everything is evaluated on the shifted alphabet v = u - u_min >= 0, which
// keeps exp(-theta v) in (0, 1] for theta >= 0 and avoids overflow for large
// tilts. b(theta) = -theta u_min + log sum pi exp(-theta v).
class TiltedFamily {
 public:
  static constexpr double kSolveTolerance = 1e-10;
  static constexpr int kMaxIterations = 200;

  explicit TiltedFamily(const VictimView& view)
      : TiltedFamily(view.alphabet, view.base_pmf) {
    view_ = view;
  }

  TiltedFamily(std::vector<double> alphabet, std::vector<double> pmf)
      : alphabet_(std::move(alphabet)), pmf_(std::move(pmf)) {
    if (alphabet_.size() != pmf_.size()) {
      throw InvalidArgument("alphabet and pmf sizes differ");
    }
    if (alphabet_.size() < 2) {
      throw InvalidArgument("tilting needs at least two distinct utilities");
    }
    double total = 0.0;
    for (std::size_t k = 0; k < alphabet_.size(); ++k) {
      if (!std::isfinite(alphabet_[k])) throw InvalidArgument("alphabet must be finite");
      if (k > 0 && !(alphabet_[k] > alphabet_[k - 1])) {
        throw InvalidArgument("alphabet must be strictly increasing");
      }
      if (!(pmf_[k] > 0.0)) {
        throw InvalidArgument("base pmf must be positive on the alphabet");
      }
      total += pmf_[k];
    }
    if (std::abs(total - 1.0) > 1e-12) {
      throw InvalidArgument("base pmf sums to " + std::to_string(total));
    }
    log_pmf_.resize(pmf_.size());
    shifted_.resize(pmf_.size());
    for (std::size_t k = 0; k < pmf_.size(); ++k) {
      log_pmf_[k] = std::log(pmf_[k]);
      shifted_[k] = alphabet_[k] - alphabet_[0];
    }
    base_mean_ = alphabet_[0] + mean_of(shifted_, pmf_);
    if (!view_) {
      VictimView v;
      v.alphabet = alphabet_;
      v.base_pmf = pmf_;
      v.profile_groups.assign(alphabet_.size(), {});
      v.range_lo = alphabet_.front();
      v.range_hi = alphabet_.back();
      view_ = std::move(v);
    }
  }

  std::size_t size() const { return alphabet_.size(); }
  std::span<const double> alphabet() const { return alphabet_; }
  std::span<const double> base_pmf() const { return pmf_; }
  std::span<const double> log_base_pmf() const { return log_pmf_; }
  const VictimView& view() const { return *view_; }
  double base_mean() const { return base_mean_; }
  double u_min() const { return alphabet_.front(); }
  double u_max() const { return alphabet_.back(); }
  // lim d(theta) as theta grows: -log pi(u_min).
  double kl_limit() const { return -log_pmf_.front(); }

  double log_partition(double theta) const { return shifted_log_partition(theta) - theta * u_min(); }

  std::vector<double> tilt(double theta) const {
    const double bv = shifted_log_partition(theta);
    std::vector<double> tau(size());
    for (std::size_t k = 0; k < size(); ++k) {
      tau[k] = std::exp(log_pmf_[k] - theta * shifted_[k] - bv);
    }
    return tau;
  }

  // u_theta = -b'(theta).
  double mean_utility(double theta) const {
    return u_min() + shifted_mean(theta);
  }

  // d(theta) = theta b'(theta) - b(theta) = D_KL(tau_theta || pi).
  double kl_from_base(double theta) const {
    return std::max(0.0, -theta * shifted_mean(theta) - shifted_log_partition(theta));
  }

  // The same divergence summed over the materialised tilt.
  double kl_sum_form(double theta) const { return kl_divergence(tilt(theta), pmf_); }

  // Log-likelihood ratio log(tau_theta(u_k) / pi(u_k)) of alphabet symbol k.
  double llr(double theta, std::size_t k) const {
    return -theta * shifted_[k] - shifted_log_partition(theta);
  }

  std::vector<double> llr_table(double theta) const {
    const double bv = shifted_log_partition(theta);
    std::vector<double> out(size());
    for (std::size_t k = 0; k < size(); ++k) out[k] = -theta * shifted_[k] - bv;
    return out;
  }

  // theta >= 0 with u_theta = target; used with target = u_pi - epsilon.
  ThetaSolve solve_theta_for_mean(double target) const {
    if (!(target > u_min() && target < base_mean_)) {
      throw InfeasibleError(
          "mean target " + format_double(target) + " outside (" +
          format_double(u_min()) + ", " + format_double(base_mean_) +
          "); attack cost must lie in (0, " +
          format_double(base_mean_ - u_min()) + ")");
    }
    return bisect([&](double th) { return target - mean_utility(th); }, "mean");
  }

  ThetaSolve solve_theta_for_kl(double delta) const {
    if (!(delta > 0.0)) throw InvalidArgument("KL budget must be positive");
    if (delta >= kl_limit()) {
      throw InfeasibleError("KL budget " + format_double(delta) +
                            " is not below -log pi(u_min) = " +
                            format_double(kl_limit()) +
                            "; the infimum is only approached as theta grows");
    }
    return bisect([&](double th) { return kl_from_base(th) - delta; }, "KL");
  }

  // Minimiser of E_tau[U] subject to D_KL(tau || pi) <= delta.
  std::vector<double> optimal_attack(double delta) const {
    if (delta == 0.0) return pmf_;
    return tilt(solve_theta_for_kl(delta).theta);
  }

  // g(theta) = (u_pi - u_theta) / d(theta); defined for theta > 0 only.
  double impact_efficiency(double theta) const {
    if (!(theta > 0.0)) throw InvalidArgument("impact efficiency needs theta > 0");
    return (base_mean_ - mean_utility(theta)) / kl_from_base(theta);
  }

  std::optional<std::size_t> index_of(double u) const {
    auto it = std::lower_bound(alphabet_.begin(), alphabet_.end(), u);
    if (it == alphabet_.end() || *it != u) return std::nullopt;
    return static_cast<std::size_t>(it - alphabet_.begin());
  }

  std::size_t nearest_index(double u) const {
    auto it = std::lower_bound(alphabet_.begin(), alphabet_.end(), u);
    if (it == alphabet_.begin()) return 0;
    if (it == alphabet_.end()) return size() - 1;
    const std::size_t hi = static_cast<std::size_t>(it - alphabet_.begin());
    return (u - alphabet_[hi - 1] <= alphabet_[hi] - u) ? hi - 1 : hi;
  }

 private:
  static std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", x);
    return buf;
  }

  // log sum_k pi_k exp(-theta v_k), max-shifted.
  double shifted_log_partition(double theta) const {
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < size(); ++k) {
      peak = std::max(peak, log_pmf_[k] - theta * shifted_[k]);
    }
    double total = 0.0;
    for (std::size_t k = 0; k < size(); ++k) {
      total += std::exp(log_pmf_[k] - theta * shifted_[k] - peak);
    }
    return peak + std::log(total);
  }

  double shifted_mean(double theta) const {
    const std::vector<double> tau = tilt(theta);
    return mean_of(shifted_, tau);
  }

  // Root of an increasing function f on [0, inf) with f(0) < 0.
  template <typename F>
  ThetaSolve bisect(F f, const char* what) const {
    double lo = 0.0;
    double hi = 1.0;
    int iterations = 0;
    while (f(hi) < 0.0) {
      lo = hi;
      hi *= 2.0;
      if (++iterations > kMaxIterations || !std::isfinite(hi)) {
        throw NumericalError(std::string("could not bracket the ") + what +
                             " equation");
      }
    }
    ThetaSolve out;
    double mid = hi;
    double value = f(hi);
    while (iterations < kMaxIterations && std::abs(value) > kSolveTolerance) {
      mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      value = f(mid);
      ++iterations;
      if (value < 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    out.theta = mid;
    out.residual = value;
    out.iterations = iterations;
    if (std::abs(value) > kSolveTolerance) {
      throw NumericalError(std::string("bisection for the ") + what +
                           " equation stalled with residual " +
                           format_double(value));
    }
    return out;
  }

  std::vector<double> alphabet_;
  std::vector<double> pmf_;
  std::vector<double> log_pmf_;
  std::vector<double> shifted_;
  double base_mean_ = 0.0;
  std::optional<VictimView> view_;
};

}  // namespace cedetect

#endif  // CEDETECT_TILTED_FAMILY_HPP_
