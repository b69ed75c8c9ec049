#pragma once

#include <cstdint>
#include <string>

#include "hdsched/fading.hpp"
#include "hdsched/policies.hpp"

namespace hdsched {

struct SimulationReport {
  std::string policy;
  std::string distribution_id;
  double total_bits = 0.0;
  int horizon = 0;
  std::size_t n_trials = 0;
  std::uint64_t seed = 0;
  double mean_energy = 0.0;
  double std_error = 0.0;       // standard error of mean_energy
  double per_slot_energy = 0.0; // mean_energy / horizon
};

// Monte Carlo estimate of the expected total energy a policy spends serving
// total_bits within horizon slots.  Gains are drawn i.i.d. by inverse-CDF
// from a deterministic per-shard stream, so identical inputs reproduce
// identical reports.  Throws contract_violation if the policy allocates
// outside [0, backlog] or leaves backlog at the deadline.
SimulationReport simulate(const FadingDistribution& dist, const Policy& policy,
                          double total_bits, int horizon, std::size_t n_trials,
                          std::uint64_t seed);

// Expected total energy of the equal-split rule: T * (e^(B/T) - 1) * nu_1.
double equal_bit_cost(const MomentTable& moments, double total_bits, int horizon);

// Expected total energy of the boundary-relaxed rule when the clamps never
// bind: t * e^(B/t) * geo_mean(t) - t * nu_1.
double relaxed_cost_closed_form(const MomentTable& moments, double total_bits, int slots);

// Expected total energy of the one-shot rule: (e^B - 1) * level(horizon + 1).
double one_shot_cost(const FadingDistribution& dist, double total_bits, int horizon);

struct DeltaSearchResult {
  double delta = 0.0;
  double cost = 0.0;            // simulated mean energy at delta
  bool bracket_warning = false; // best delta landed at a search boundary
};

// Golden-section search over the rate margin delta for the deadline-aware
// waterfilling rule, minimizing simulated cost with common random numbers
// (every probe reuses the same seed and consumes one gain per slot).
DeltaSearchResult optimize_delta(const FadingDistribution& dist, double total_bits,
                                 int horizon, std::size_t n_trials, std::uint64_t seed);

}  // namespace hdsched
