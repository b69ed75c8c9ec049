#pragma once

#include <span>
#include <vector>

#include "hdsched/dp.hpp"
#include "hdsched/fading.hpp"
#include "hdsched/policies.hpp"

namespace hdsched {

// Ratio of equal-split to optimal expected energy, in dB (10 log10).
// optimal_cost is the expected total energy of the exact rule at (B, T).
double scheduling_gain_db(const MomentTable& moments, double total_bits, int horizon,
                          double optimal_cost);

// Limit of the gain as total_bits -> 0: nu_1 / level(horizon + 1), in dB.
double gain_limit_small_b_db(const MomentTable& moments, const OneShotThresholds& thresholds);

// Limit of the gain as total_bits -> infinity: nu_1 / geo_mean(horizon), in dB.
double gain_limit_large_b_db(const MomentTable& moments, int horizon);

// Affine descriptions of energy per bit at the SNR extremes.  High-SNR rate
// curves approach log(P) - offset with unit slope; low-SNR curves are
// characterized by the minimal energy per bit and the slope at that point.
struct SnrApproximation {
  int horizon = 0;
  double high_slope = 1.0;
  double offset_equal = 0.0;    // log nu_1
  double offset_optimal = 0.0;  // log geo_mean(horizon)
  double offset_ergodic = 0.0;  // log limit
  double low_slope_equal = 2.0;
  double low_slope_oneshot = 0.0;  // 2 / horizon
  double min_energy_per_bit_equal = 0.0;    // log(2) * nu_1, linear scale
  double min_energy_per_bit_oneshot = 0.0;  // log(2) * level(horizon + 1)
  double min_energy_per_bit_ergodic = 0.0;  // 0: unbounded support in time
};

SnrApproximation high_snr_offsets(const MomentTable& moments, int horizon);
SnrApproximation low_snr_params(const MomentTable& moments,
                                const OneShotThresholds& thresholds);
// Both halves in one report.
SnrApproximation snr_approximation(const MomentTable& moments,
                                   const OneShotThresholds& thresholds);

struct RatePoint {
  double power = 0.0;  // average power per slot
  double rate = 0.0;   // bits per slot
};

// Rate achieved by the exact rule at each average power: inverts the
// deadline-horizon cost row of the table (total energy = power * horizon).
std::vector<RatePoint> spectral_efficiency_curve(const ValueTable& table,
                                                 std::span<const double> powers);

struct GainReport {
  std::string distribution_id;
  int horizon = 0;
  std::vector<double> total_bits;
  std::vector<double> gain_db;
  double limit_small_b_db = 0.0;
  double limit_large_b_db = 0.0;
};

// Gain curve over a bit sweep using the exact cost from the table.
GainReport gain_report(const MomentTable& moments, const OneShotThresholds& thresholds,
                       const ValueTable& table, std::span<const double> total_bits);

}  // namespace hdsched
