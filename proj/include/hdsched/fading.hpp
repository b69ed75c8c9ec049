#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace hdsched {

enum class FadingKind { TruncatedExponential, Deterministic, Tabulated };

// Channel gain distribution on a bounded positive support [g_min, g_max].
//
// Three kinds are supported:
//  - truncated exponential, pdf c * exp(-(g - g_min)) on [g_min, g_max]
//  - deterministic (point mass at a single gain)
//  - tabulated (piecewise-linear pdf from (gain, density) pairs, renormalized)
class FadingDistribution {
 public:
  static FadingDistribution truncated_exponential(double g_min, double g_max);
  static FadingDistribution deterministic(double gain);
  static FadingDistribution tabulated(std::vector<double> gain, std::vector<double> density);
  // Two-column CSV (gain, density), one pair per line, '#' comments allowed.
  static FadingDistribution tabulated_from_csv(const std::string& path);

  FadingKind kind() const { return kind_; }
  double g_min() const { return g_min_; }
  double g_max() const { return g_max_; }
  // Normalizing constant of the pdf (1 for deterministic).
  double normalization() const { return norm_; }

  // For the deterministic kind pdf() returns +inf at the atom and 0 elsewhere;
  // cdf and quantile behave as the usual step/constant functions.
  double pdf(double g) const;
  double cdf(double g) const;
  double quantile(double u) const;

  // E[h(g)] by deterministic quadrature (abs tol 1e-10).  `name` labels the
  // integrand in error messages.
  double expect(const std::function<double(double)>& h, const char* name = "integrand") const;

  // Partial expectation E[h(g); lo <= g <= hi].  The window is clipped to the
  // support and may be empty.  Callers integrating a piecewise integrand
  // should split it here so every window sees a smooth h.
  double expect(const std::function<double(double)>& h, double lo, double hi,
                const char* name = "integrand") const;

  // (E[(1/g)^(1/m)])^m for integer m >= 1.
  double fractional_moment(int m) const;

  // exp(E[log(1/g)]), the m -> infinity limit of fractional_moment.
  double inverse_gain_geomean() const;

  // n i.i.d. draws via inverse-CDF sampling; identical (seed, n) give
  // identical output.
  std::vector<double> sample(std::uint64_t seed, std::size_t n) const;

  // Canonical textual form, also used as a cache/report identifier.
  const std::string& id() const { return id_; }

 private:
  FadingDistribution() = default;

  FadingKind kind_ = FadingKind::Deterministic;
  double g_min_ = 1.0;
  double g_max_ = 1.0;
  double norm_ = 1.0;
  // Tabulated kind only.
  std::vector<double> tab_g_;
  std::vector<double> tab_p_;    // renormalized densities
  std::vector<double> tab_cdf_;  // cdf at each node
  std::string id_;
};

// Cached fractional moments nu_m = (E[(1/g)^(1/m)])^m for m = 1..max_order,
// their running geometric means, and the m -> infinity limit.
class MomentTable {
 public:
  MomentTable(const FadingDistribution& dist, int max_order);

  int max_order() const { return static_cast<int>(nu_.size()) - 1; }
  double moment(int m) const;    // nu_m
  double geo_mean(int t) const;  // (nu_1 * ... * nu_t)^(1/t)
  double limit() const { return limit_; }
  double g_min() const { return g_min_; }
  double g_max() const { return g_max_; }
  const std::string& distribution_id() const { return dist_id_; }

 private:
  std::vector<double> nu_;   // nu_[m], index 0 unused
  std::vector<double> gm_;   // gm_[t], index 0 unused
  double limit_ = 0.0;
  double g_min_ = 0.0;
  double g_max_ = 0.0;
  std::string dist_id_;
};

}  // namespace hdsched
