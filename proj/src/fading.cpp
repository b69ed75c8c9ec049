#include "hdsched/fading.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "hdsched/errors.hpp"
#include "hdsched/numeric.hpp"
#include "hdsched/quadrature.hpp"
#include "hdsched/rng.hpp"

namespace hdsched {
namespace {

std::string fmt_g(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

constexpr double kLogSpanForSubstitution = 1e3;

}  // namespace

FadingDistribution FadingDistribution::truncated_exponential(double g_min, double g_max) {
  check_arg(std::isfinite(g_min) && std::isfinite(g_max) && g_min > 0.0 && g_max > g_min,
            "truncated_exponential: need 0 < g_min < g_max < inf");
  FadingDistribution d;
  d.kind_ = FadingKind::TruncatedExponential;
  d.g_min_ = g_min;
  d.g_max_ = g_max;
  d.norm_ = 1.0 / (-std::expm1(-(g_max - g_min)));
  d.id_ = "trunc_exp:g_min=" + fmt_g(g_min) + ",g_max=" + fmt_g(g_max);
  return d;
}

FadingDistribution FadingDistribution::deterministic(double gain) {
  check_arg(std::isfinite(gain) && gain > 0.0, "deterministic: need 0 < gain < inf");
  FadingDistribution d;
  d.kind_ = FadingKind::Deterministic;
  d.g_min_ = gain;
  d.g_max_ = gain;
  d.norm_ = 1.0;
  d.id_ = "deterministic:g=" + fmt_g(gain);
  return d;
}

FadingDistribution FadingDistribution::tabulated(std::vector<double> gain,
                                                 std::vector<double> density) {
  check_arg(gain.size() == density.size(), "tabulated: gain/density size mismatch");
  check_arg(gain.size() >= 2, "tabulated: need at least two points");
  check_arg(gain.front() > 0.0 && std::isfinite(gain.front()),
            "tabulated: gains must be positive and finite");
  for (std::size_t i = 0; i < gain.size(); ++i) {
    check_arg(std::isfinite(gain[i]) && std::isfinite(density[i]) && density[i] >= 0.0,
              "tabulated: densities must be finite and nonnegative");
    if (i > 0) check_arg(gain[i] > gain[i - 1], "tabulated: gains must be strictly increasing");
  }

  // Trapezoidal mass of the raw table.
  CompensatedSum raw;
  for (std::size_t i = 0; i + 1 < gain.size(); ++i) {
    raw.add(0.5 * (density[i] + density[i + 1]) * (gain[i + 1] - gain[i]));
  }
  check_arg(raw.value() > 0.0, "tabulated: table carries no probability mass");

  FadingDistribution d;
  d.kind_ = FadingKind::Tabulated;
  d.g_min_ = gain.front();
  d.g_max_ = gain.back();
  d.norm_ = 1.0 / raw.value();
  d.tab_g_ = std::move(gain);
  d.tab_p_ = std::move(density);
  for (double& p : d.tab_p_) p *= d.norm_;
  d.tab_cdf_.resize(d.tab_g_.size());
  CompensatedSum acc;
  d.tab_cdf_[0] = 0.0;
  for (std::size_t i = 0; i + 1 < d.tab_g_.size(); ++i) {
    acc.add(0.5 * (d.tab_p_[i] + d.tab_p_[i + 1]) * (d.tab_g_[i + 1] - d.tab_g_[i]));
    d.tab_cdf_[i + 1] = std::min(1.0, acc.value());
  }
  d.tab_cdf_.back() = 1.0;

  std::string bytes;
  bytes.reserve(d.tab_g_.size() * 16);
  for (std::size_t i = 0; i < d.tab_g_.size(); ++i) {
    bytes.append(reinterpret_cast<const char*>(&d.tab_g_[i]), sizeof(double));
    bytes.append(reinterpret_cast<const char*>(&d.tab_p_[i]), sizeof(double));
  }
  char hex[20];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  d.id_ = "tabulated:n=" + std::to_string(d.tab_g_.size()) + ",hash=" + hex;
  return d;
}

FadingDistribution FadingDistribution::tabulated_from_csv(const std::string& path) {
  std::ifstream in(path);
  check_arg(in.good(), "tabulated_from_csv: cannot open " + path);
  std::vector<double> g, p;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double gi, pi;
    if (!(row >> gi >> pi)) {
      throw std::invalid_argument("tabulated_from_csv: " + path + ":" +
                                  std::to_string(lineno) + ": expected two numeric columns");
    }
    g.push_back(gi);
    p.push_back(pi);
  }
  return tabulated(std::move(g), std::move(p));
}

double FadingDistribution::pdf(double g) const {
  switch (kind_) {
    case FadingKind::TruncatedExponential:
      if (g < g_min_ || g > g_max_) return 0.0;
      return norm_ * std::exp(-(g - g_min_));
    case FadingKind::Deterministic:
      if (g == g_min_) return std::numeric_limits<double>::infinity();
      return 0.0;
    case FadingKind::Tabulated: {
      if (g < g_min_ || g > g_max_) return 0.0;
      auto it = std::upper_bound(tab_g_.begin(), tab_g_.end(), g);
      std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(
          0, (it - tab_g_.begin()) - 1));
      if (i + 1 >= tab_g_.size()) i = tab_g_.size() - 2;
      const double w = (g - tab_g_[i]) / (tab_g_[i + 1] - tab_g_[i]);
      return tab_p_[i] + w * (tab_p_[i + 1] - tab_p_[i]);
    }
  }
  return 0.0;
}

double FadingDistribution::cdf(double g) const {
  if (g < g_min_) return 0.0;
  if (g >= g_max_) return 1.0;
  switch (kind_) {
    case FadingKind::TruncatedExponential:
      return norm_ * -std::expm1(-(g - g_min_));
    case FadingKind::Deterministic:
      return 1.0;  // g >= g_max_ was handled above; g == atom only
    case FadingKind::Tabulated: {
      auto it = std::upper_bound(tab_g_.begin(), tab_g_.end(), g);
      std::size_t i = static_cast<std::size_t>((it - tab_g_.begin()) - 1);
      const double dx = g - tab_g_[i];
      const double slope = (tab_p_[i + 1] - tab_p_[i]) / (tab_g_[i + 1] - tab_g_[i]);
      return std::min(1.0, tab_cdf_[i] + tab_p_[i] * dx + 0.5 * slope * dx * dx);
    }
  }
  return 1.0;
}

double FadingDistribution::quantile(double u) const {
  check_domain(u >= 0.0 && u <= 1.0, "quantile: u outside [0, 1]");
  switch (kind_) {
    case FadingKind::Deterministic:
      return g_min_;
    case FadingKind::TruncatedExponential: {
      const double g = g_min_ - std::log1p(-u / norm_);
      return std::clamp(g, g_min_, g_max_);
    }
    case FadingKind::Tabulated: {
      if (u <= 0.0) return g_min_;
      if (u >= 1.0) return g_max_;
      auto it = std::upper_bound(tab_cdf_.begin(), tab_cdf_.end(), u);
      std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(
          0, (it - tab_cdf_.begin()) - 1));
      if (i + 1 >= tab_g_.size()) i = tab_g_.size() - 2;
      const double m = u - tab_cdf_[i];
      if (m <= 0.0) return tab_g_[i];
      const double h = tab_g_[i + 1] - tab_g_[i];
      const double slope = (tab_p_[i + 1] - tab_p_[i]) / h;
      const double disc = tab_p_[i] * tab_p_[i] + 2.0 * slope * m;
      const double dx = 2.0 * m / (tab_p_[i] + std::sqrt(std::max(0.0, disc)));
      return std::min(tab_g_[i] + dx, tab_g_[i + 1]);
    }
  }
  return g_min_;
}

double FadingDistribution::expect(const std::function<double(double)>& h,
                                  const char* name) const {
  return expect(h, g_min_, g_max_, name);
}

double FadingDistribution::expect(const std::function<double(double)>& h, double lo,
                                  double hi, const char* name) const {
  if (kind_ == FadingKind::Deterministic) {
    return (lo <= g_min_ && g_min_ <= hi) ? h(g_min_) : 0.0;
  }
  lo = std::max(lo, g_min_);
  hi = std::min(hi, g_max_);
  if (!(lo < hi)) return 0.0;
  switch (kind_) {
    case FadingKind::Deterministic:
      return 0.0;  // handled above
    case FadingKind::TruncatedExponential: {
      QuadratureOptions opt;
      if (g_max_ / g_min_ > kLogSpanForSubstitution) {
        // Substituting g = e^y keeps the node density even across decades.
        auto integrand = [&](double y) {
          const double g = std::exp(y);
          return h(g) * pdf(g) * g;
        };
        return integrate(integrand, std::log(lo), std::log(hi), opt, name);
      }
      auto integrand = [&](double g) { return h(g) * pdf(g); };
      return integrate(integrand, lo, hi, opt, name);
    }
    case FadingKind::Tabulated: {
      // Trapezoid on the table nodes, matching how the table was normalized.
      // Cells straddling the window edge are clipped; pdf() interpolates there.
      CompensatedSum sum;
      for (std::size_t i = 0; i + 1 < tab_g_.size(); ++i) {
        const double a = std::max(lo, tab_g_[i]);
        const double b = std::min(hi, tab_g_[i + 1]);
        if (!(a < b)) continue;
        sum.add(0.5 * (h(a) * pdf(a) + h(b) * pdf(b)) * (b - a));
      }
      return sum.value();
    }
  }
  return 0.0;
}

double FadingDistribution::fractional_moment(int m) const {
  check_arg(m >= 1, "fractional_moment: order must be >= 1");
  const double inv_m = 1.0 / static_cast<double>(m);
  const double e = expect([inv_m](double g) { return std::pow(1.0 / g, inv_m); },
                          "fractional_moment");
  return std::pow(e, static_cast<double>(m));
}

double FadingDistribution::inverse_gain_geomean() const {
  return std::exp(-expect([](double g) { return std::log(g); }, "inverse_gain_geomean"));
}

std::vector<double> FadingDistribution::sample(std::uint64_t seed, std::size_t n) const {
  Rng rng(seed);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = quantile(rng.uniform01());
  return out;
}

MomentTable::MomentTable(const FadingDistribution& dist, int max_order) {
  check_arg(max_order >= 1, "MomentTable: max_order must be >= 1");
  nu_.assign(static_cast<std::size_t>(max_order) + 1, 0.0);
  gm_.assign(static_cast<std::size_t>(max_order) + 1, 0.0);
  CompensatedSum log_sum;
  for (int m = 1; m <= max_order; ++m) {
    nu_[m] = dist.fractional_moment(m);
    log_sum.add(std::log(nu_[m]));
    gm_[m] = std::exp(log_sum.value() / m);
  }
  limit_ = dist.inverse_gain_geomean();
  g_min_ = dist.g_min();
  g_max_ = dist.g_max();
  dist_id_ = dist.id();
}

double MomentTable::moment(int m) const {
  check_arg(m >= 1 && m <= max_order(), "MomentTable::moment: order out of range");
  return nu_[m];
}

double MomentTable::geo_mean(int t) const {
  check_arg(t >= 1 && t <= max_order(), "MomentTable::geo_mean: order out of range");
  return gm_[t];
}

}  // namespace hdsched
