#include "hdsched/analysis.hpp"

#include <cmath>

#include "hdsched/errors.hpp"
#include "hdsched/numeric.hpp"
#include "hdsched/sim.hpp"

namespace hdsched {

double scheduling_gain_db(const MomentTable& moments, double total_bits, int horizon,
                          double optimal_cost) {
  check_arg(std::isfinite(total_bits) && total_bits > 0.0,
            "scheduling_gain_db: total_bits must be > 0");
  check_arg(horizon >= 1, "scheduling_gain_db: horizon must be >= 1");
  check_arg(std::isfinite(optimal_cost) && optimal_cost > 0.0,
            "scheduling_gain_db: optimal_cost must be > 0");
  const double equal = equal_bit_cost(moments, total_bits, horizon);
  return 10.0 * std::log10(equal / optimal_cost);
}

double gain_limit_small_b_db(const MomentTable& moments, const OneShotThresholds& thresholds) {
  return 10.0 * std::log10(moments.moment(1) / thresholds.level(thresholds.horizon() + 1));
}

double gain_limit_large_b_db(const MomentTable& moments, int horizon) {
  check_arg(horizon >= 1 && horizon <= moments.max_order(),
            "gain_limit_large_b_db: horizon out of range");
  return 10.0 * std::log10(moments.moment(1) / moments.geo_mean(horizon));
}

SnrApproximation high_snr_offsets(const MomentTable& moments, int horizon) {
  check_arg(horizon >= 1 && horizon <= moments.max_order(),
            "high_snr_offsets: horizon out of range");
  SnrApproximation a;
  a.horizon = horizon;
  a.high_slope = 1.0;
  a.offset_equal = std::log(moments.moment(1));
  a.offset_optimal = std::log(moments.geo_mean(horizon));
  a.offset_ergodic = std::log(moments.limit());
  return a;
}

SnrApproximation low_snr_params(const MomentTable& moments,
                                const OneShotThresholds& thresholds) {
  SnrApproximation a;
  a.horizon = thresholds.horizon();
  a.low_slope_equal = 2.0;
  a.low_slope_oneshot = 2.0 / thresholds.horizon();
  a.min_energy_per_bit_equal = std::log(2.0) * moments.moment(1);
  a.min_energy_per_bit_oneshot = std::log(2.0) * thresholds.level(thresholds.horizon() + 1);
  a.min_energy_per_bit_ergodic = 0.0;
  return a;
}

SnrApproximation snr_approximation(const MomentTable& moments,
                                   const OneShotThresholds& thresholds) {
  SnrApproximation a = high_snr_offsets(moments, thresholds.horizon());
  const SnrApproximation low = low_snr_params(moments, thresholds);
  a.low_slope_equal = low.low_slope_equal;
  a.low_slope_oneshot = low.low_slope_oneshot;
  a.min_energy_per_bit_equal = low.min_energy_per_bit_equal;
  a.min_energy_per_bit_oneshot = low.min_energy_per_bit_oneshot;
  a.min_energy_per_bit_ergodic = low.min_energy_per_bit_ergodic;
  return a;
}

std::vector<RatePoint> spectral_efficiency_curve(const ValueTable& table,
                                                 std::span<const double> powers) {
  const int horizon = table.horizon();
  const double beta_max = table.grid().beta_max;
  const double max_cost = table.cost(horizon, beta_max);

  std::vector<RatePoint> out;
  out.reserve(powers.size());
  for (double p : powers) {
    RatePoint pt;
    pt.power = p;
    if (p > 0.0) {
      const double budget = p * horizon;
      if (budget > max_cost) {
        throw std::out_of_range(
            "spectral_efficiency_curve: power exceeds the tabulated cost range");
      }
      const double bits = bisect_increasing(
          [&](double b) { return table.cost(horizon, b) - budget; }, 0.0, beta_max, 1e-12);
      pt.rate = bits / horizon;
    }
    out.push_back(pt);
  }
  return out;
}

GainReport gain_report(const MomentTable& moments, const OneShotThresholds& thresholds,
                       const ValueTable& table, std::span<const double> total_bits) {
  check_arg(thresholds.horizon() == table.horizon(),
            "gain_report: thresholds and table horizons differ");
  GainReport rep;
  rep.distribution_id = table.distribution_id();
  rep.horizon = table.horizon();
  rep.limit_small_b_db = gain_limit_small_b_db(moments, thresholds);
  rep.limit_large_b_db = gain_limit_large_b_db(moments, table.horizon());
  for (double b : total_bits) {
    const double opt = table.cost(table.horizon(), b);
    rep.total_bits.push_back(b);
    rep.gain_db.push_back(scheduling_gain_db(moments, b, table.horizon(), opt));
  }
  return rep;
}

}  // namespace hdsched
