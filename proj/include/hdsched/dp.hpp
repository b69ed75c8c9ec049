#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hdsched/fading.hpp"
#include "hdsched/policies.hpp"

namespace hdsched {

// Uniform backlog grid on [0, beta_max] with n_beta points and an n_g-node
// channel expectation rule.
struct GridConfig {
  double beta_max = 0.0;
  int n_beta = 2048;
  int n_g = 512;

  void validate() const;
  double spacing() const { return beta_max / (n_beta - 1); }
};

// Expected cost-to-go tables: row t holds the expected minimal energy to
// serve a backlog within t slots, before the slot-t gain is revealed,
// tabulated on the backlog grid.  Lookups interpolate linearly; no
// extrapolation beyond beta_max.
class ValueTable {
 public:
  int horizon() const { return horizon_; }
  const GridConfig& grid() const { return grid_; }
  const std::string& distribution_id() const { return dist_id_; }
  double g_min() const { return g_min_; }
  double g_max() const { return g_max_; }

  double cost(int slots_left, double backlog) const;
  // Derivative of cost in the backlog, from central differences on the grid
  // (one-sided at the ends), interpolated linearly between nodes.
  double cost_derivative(int slots_left, double backlog) const;

  std::span<const double> row(int slots_left) const;
  std::span<const double> channel_nodes() const { return nodes_; }
  std::span<const double> channel_weights() const { return weights_; }

  std::string cache_key() const;
  void save(const std::string& path) const;
  static ValueTable load(const std::string& path);

 private:
  friend ValueTable solve_dp(const FadingDistribution&, int, const GridConfig&);

  double interp(const std::vector<double>& ys, double x) const;
  const std::vector<double>& deriv_row(int slots_left) const;

  int horizon_ = 0;
  GridConfig grid_;
  double g_min_ = 0.0;
  double g_max_ = 0.0;
  std::string dist_id_;
  std::vector<std::vector<double>> rows_;    // rows_[t], t = 1..horizon
  std::vector<std::vector<double>> derivs_;  // node derivatives per row
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

// Backward induction for the minimal expected energy.  Row 1 is
// (e^beta - 1) * E[1/g]; later rows take the channel expectation of the
// slotwise minimization.
ValueTable solve_dp(const FadingDistribution& dist, int horizon, const GridConfig& grid);

// Bits served by the exact rule with `slots_left` slots remaining, derived
// from the table of the previous row: serve nothing when the gain is at or
// below the water level, everything when even the full backlog is cheap, and
// the interior stationarity root otherwise.
double optimal_allocate(const ValueTable& table, int slots_left, double backlog, double gain);

PolicyPtr optimal_policy(std::shared_ptr<const ValueTable> table);

}  // namespace hdsched
