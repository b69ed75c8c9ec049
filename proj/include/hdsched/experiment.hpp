#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hdsched/dp.hpp"
#include "hdsched/fading.hpp"

namespace hdsched {

// One experiment: a distribution, a deadline horizon, a sweep of bit targets,
// a set of policies, and the reports to emit.
struct ExperimentConfig {
  nlohmann::json distribution;  // object form, see parse_distribution
  std::vector<double> bits;
  int horizon = 0;
  std::vector<std::string> policies;
  GridConfig grid;
  bool grid_given = false;
  std::size_t n_trials = 100000;
  std::optional<std::uint64_t> seed;
  std::optional<double> delta;
  int max_moment = 0;  // 0: use max(horizon, 64)
  std::vector<std::string> reports;
  std::vector<double> powers;
  std::string output_dir = "out";
  std::string cache_dir;  // empty: <output_dir>/cache; env HDSCHED_CACHE_DIR wins
  std::vector<std::string> unknown_keys;  // unrecognized config fields, reported by validate

  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig from_file(const std::string& path);

  // Effective settings with defaults applied, canonical key order.
  nlohmann::json canonical() const;
  // FNV-1a of the canonical form, as 16 hex digits.
  std::string hash() const;
};

// Distribution spec: {"kind": "trunc_exp", "g_min": ..., "g_max": ...},
// {"kind": "deterministic", "g": ...}, or {"kind": "tabulated", "path": ...}.
// The compact string forms "trunc_exp:g_min=...,g_max=...",
// "deterministic:g=...", "tabulated:path=..." parse to the same objects.
nlohmann::json parse_distribution_string(const std::string& spec);
FadingDistribution parse_distribution(const nlohmann::json& spec);

// Policy spec strings: equal | relaxed | oneshot | optimal | cerg |
// cerg:delta=<x>.
struct PolicySpec {
  std::string kind;
  std::optional<double> delta;
};
PolicySpec parse_policy_spec(const std::string& spec);

// All problems found in the config; empty means runnable.
std::vector<std::string> validate(const ExperimentConfig& config);

// Executes every requested report, writing one CSV per report into
// output_dir (atomically: temp file then rename).  Returns the paths
// written.  Throws on invalid configs and runtime failures.
std::vector<std::string> run(const ExperimentConfig& config);

// Directory used for value-table caching under this config.
std::string effective_cache_dir(const ExperimentConfig& config);

// Loads the cached table for (dist, horizon, grid) or solves it.  Solved
// tables are persisted only when persist_on_miss is set (the dp report);
// other callers keep the result in memory.
std::shared_ptr<const ValueTable> obtain_value_table(const FadingDistribution& dist,
                                                     int horizon, const GridConfig& grid,
                                                     const std::string& cache_dir,
                                                     bool persist_on_miss);

}  // namespace hdsched
