#pragma once

#include <memory>
#include <string>
#include <vector>

#include "hdsched/fading.hpp"

namespace hdsched {

// A scheduling rule.  allocate() returns the bits to serve in the current
// slot given `slots_left` remaining slots (1 means this is the deadline
// slot), the unserved backlog, and the current channel gain.  The result is
// always in [0, backlog], and every policy serves the full backlog when
// slots_left == 1.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual double allocate(int slots_left, double backlog, double gain) const = 0;
  virtual std::string name() const = 0;
};

using PolicyPtr = std::shared_ptr<const Policy>;

// Serves total_bits / horizon per slot (backlog-capped, remainder at the
// deadline).
PolicyPtr equal_bit_policy(double total_bits, int horizon);

// Water level used by the boundary-relaxed rule with t slots left:
// 1 / geo_mean(nu_{t-1}, ..., nu_1).  Requires t >= 2 and moments up to t-1.
double relaxed_threshold(const MomentTable& moments, int slots_left);

// Closed-form rule obtained by relaxing the 0 <= b <= backlog constraint and
// clamping: b = backlog/t + ((t-1)/t) * log(gain / threshold), clamped to
// [0, backlog] (lower clamp first).
PolicyPtr boundary_relaxed_policy(const MomentTable& moments);

// Expected inverse-gain levels for the one-shot rule.  level(1) = +inf,
// level(2) = E[1/g], level(t) = E[min(1/g, level(t-1))].  The rule transmits
// everything in the first slot whose gain strictly exceeds 1/level(t).
class OneShotThresholds {
 public:
  OneShotThresholds(const FadingDistribution& dist, int horizon);

  int horizon() const { return horizon_; }
  double level(int t) const;              // omega_t, t in [1, horizon+1]
  double channel_threshold(int t) const;  // 1/omega_t
  // Expected energy of the rule over the full horizon, forced deadline
  // transmission included: (e^B - 1) * level(horizon + 1).
  double expected_cost(double total_bits) const;
  const std::string& distribution_id() const { return dist_id_; }

 private:
  std::vector<double> level_;  // level_[t], index 0 unused
  int horizon_ = 0;
  std::string dist_id_;
};

PolicyPtr one_shot_policy(const OneShotThresholds& thresholds, double total_bits);

// Waterfilling threshold eta solving E[max(0, log(g / eta))] = mean_rate.
struct WaterfillSolution {
  double threshold = 0.0;   // eta
  double mean_rate = 0.0;   // requested long-run bits per slot
  double residual = 0.0;    // achieved minus requested rate at the solution
};

WaterfillSolution waterfill_threshold(const FadingDistribution& dist, double mean_rate);

// Expected per-slot energy of the unconstrained waterfilling rule at the
// given mean rate: E[max(0, 1/eta - 1/g)].
double ergodic_energy(const FadingDistribution& dist, double mean_rate);

// Deadline-aware variant of waterfilling: serves min(backlog,
// max(0, log(g/eta))) with eta sized for mean rate total_bits/horizon + delta,
// and flushes the backlog in the final slot.
PolicyPtr constrained_ergodic_policy(const FadingDistribution& dist, double total_bits,
                                     int horizon, double delta);

}  // namespace hdsched
