#include "hdsched/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hdsched/errors.hpp"
#include "hdsched/numeric.hpp"
#include "hdsched/rng.hpp"

namespace hdsched {
namespace {

constexpr std::size_t kShardTrials = 1 << 16;

struct Welford {
  std::size_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }

  void merge(const Welford& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const double d = o.mean - mean;
    const std::size_t total = n + o.n;
    mean += d * static_cast<double>(o.n) / static_cast<double>(total);
    m2 += o.m2 + d * d * static_cast<double>(n) * static_cast<double>(o.n) /
                     static_cast<double>(total);
    n = total;
  }
};

double run_trial(const FadingDistribution& dist, const Policy& policy, double total_bits,
                 int horizon, Rng* rng) {
  double backlog = total_bits;
  CompensatedSum energy;
  for (int t = horizon; t >= 1; --t) {
    const double gain = dist.quantile(rng->uniform01());
    const double bits = policy.allocate(t, backlog, gain);
    if (!(bits >= -1e-12) || bits > backlog * (1.0 + 1e-12) + 1e-12) {
      throw contract_violation("simulate: policy '" + policy.name() +
                               "' allocated outside [0, backlog] with " +
                               std::to_string(t) + " slots left");
    }
    const double served = std::clamp(bits, 0.0, backlog);
    energy.add(std::expm1(served) / gain);
    backlog -= served;
  }
  if (backlog > 1e-9 * std::max(1.0, total_bits)) {
    throw contract_violation("simulate: policy '" + policy.name() +
                             "' left backlog unserved at the deadline");
  }
  return energy.value();
}

}  // namespace

SimulationReport simulate(const FadingDistribution& dist, const Policy& policy,
                          double total_bits, int horizon, std::size_t n_trials,
                          std::uint64_t seed) {
  check_arg(std::isfinite(total_bits) && total_bits >= 0.0,
            "simulate: total_bits must be >= 0");
  check_arg(horizon >= 1, "simulate: horizon must be >= 1");
  check_arg(n_trials >= 1, "simulate: n_trials must be >= 1");

  Welford stats;
  std::size_t done = 0;
  for (std::uint64_t shard = 0; done < n_trials; ++shard) {
    const std::size_t batch = std::min(kShardTrials, n_trials - done);
    Rng rng(shard_seed(seed, shard));
    Welford local;
    for (std::size_t i = 0; i < batch; ++i) {
      local.add(run_trial(dist, policy, total_bits, horizon, &rng));
    }
    stats.merge(local);
    done += batch;
  }

  SimulationReport report;
  report.policy = policy.name();
  report.distribution_id = dist.id();
  report.total_bits = total_bits;
  report.horizon = horizon;
  report.n_trials = n_trials;
  report.seed = seed;
  report.mean_energy = stats.mean;
  if (n_trials >= 2) {
    const double var = std::max(0.0, stats.m2 / static_cast<double>(n_trials - 1));
    report.std_error = std::sqrt(var / static_cast<double>(n_trials));
  }
  report.per_slot_energy = stats.mean / horizon;
  return report;
}

double equal_bit_cost(const MomentTable& moments, double total_bits, int horizon) {
  check_arg(std::isfinite(total_bits) && total_bits >= 0.0,
            "equal_bit_cost: total_bits must be >= 0");
  check_arg(horizon >= 1, "equal_bit_cost: horizon must be >= 1");
  return horizon * std::expm1(total_bits / horizon) * moments.moment(1);
}

double relaxed_cost_closed_form(const MomentTable& moments, double total_bits, int slots) {
  check_arg(std::isfinite(total_bits) && total_bits >= 0.0,
            "relaxed_cost_closed_form: total_bits must be >= 0");
  check_arg(slots >= 1, "relaxed_cost_closed_form: slots must be >= 1");
  check_arg(slots <= moments.max_order(), "relaxed_cost_closed_form: moment table too short");
  const double t = slots;
  return t * std::exp(total_bits / t) * moments.geo_mean(slots) - t * moments.moment(1);
}

double one_shot_cost(const FadingDistribution& dist, double total_bits, int horizon) {
  return OneShotThresholds(dist, horizon).expected_cost(total_bits);
}

DeltaSearchResult optimize_delta(const FadingDistribution& dist, double total_bits,
                                 int horizon, std::size_t n_trials, std::uint64_t seed) {
  check_arg(std::isfinite(total_bits) && total_bits > 0.0,
            "optimize_delta: total_bits must be > 0");
  check_arg(horizon >= 2, "optimize_delta: horizon must be >= 2");
  check_arg(n_trials >= 1, "optimize_delta: n_trials must be >= 1");

  const double lo = 1e-6;
  const double hi = std::max(2.0 * total_bits / horizon, 2.0);

  DeltaSearchResult best;
  best.cost = std::numeric_limits<double>::infinity();
  auto probe = [&](double delta) {
    const PolicyPtr policy = constrained_ergodic_policy(dist, total_bits, horizon, delta);
    const double cost = simulate(dist, *policy, total_bits, horizon, n_trials, seed).mean_energy;
    if (cost < best.cost) {
      best.cost = cost;
      best.delta = delta;
    }
    return cost;
  };

  const double tol = std::max(1e-4, 1e-3 * (hi - lo));
  golden_min(probe, lo, hi, tol);
  best.bracket_warning = (best.delta - lo < 2.0 * tol) || (hi - best.delta < 2.0 * tol);
  return best;
}

}  // namespace hdsched
