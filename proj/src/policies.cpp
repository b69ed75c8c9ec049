#include "hdsched/policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hdsched/errors.hpp"
#include "hdsched/numeric.hpp"

namespace hdsched {
namespace {

constexpr double kSupportSlack = 1e-9;

void check_state(int slots_left, double backlog) {
  check_arg(slots_left >= 1, "allocate: slots_left must be >= 1");
  check_arg(std::isfinite(backlog) && backlog >= 0.0, "allocate: backlog must be >= 0");
}

void check_gain_support(double gain, double g_min, double g_max) {
  check_domain(gain >= g_min * (1.0 - kSupportSlack) && gain <= g_max * (1.0 + kSupportSlack),
               "allocate: gain outside the channel support");
}

class EqualBitPolicy final : public Policy {
 public:
  EqualBitPolicy(double total_bits, int horizon)
      : per_slot_(total_bits / horizon) {}

  double allocate(int slots_left, double backlog, double gain) const override {
    check_state(slots_left, backlog);
    check_domain(gain > 0.0, "allocate: gain must be positive");
    if (slots_left == 1) return backlog;
    return std::min(backlog, per_slot_);
  }

  std::string name() const override { return "equal"; }

 private:
  double per_slot_;
};

class BoundaryRelaxedPolicy final : public Policy {
 public:
  explicit BoundaryRelaxedPolicy(MomentTable moments) : moments_(std::move(moments)) {}

  double allocate(int slots_left, double backlog, double gain) const override {
    check_state(slots_left, backlog);
    check_gain_support(gain, moments_.g_min(), moments_.g_max());
    if (slots_left == 1) return backlog;
    check_arg(slots_left - 1 <= moments_.max_order(),
              "allocate: moment table too short for this horizon");
    const double t = slots_left;
    const double b = backlog / t +
                     ((t - 1.0) / t) * std::log(gain * moments_.geo_mean(slots_left - 1));
    return std::min(std::max(b, 0.0), backlog);
  }

  std::string name() const override { return "relaxed"; }

 private:
  MomentTable moments_;
};

class OneShotPolicy final : public Policy {
 public:
  OneShotPolicy(const OneShotThresholds& thresholds, double total_bits)
      : thresholds_(thresholds), total_bits_(total_bits) {}

  double allocate(int slots_left, double backlog, double gain) const override {
    check_state(slots_left, backlog);
    check_domain(gain > 0.0, "allocate: gain must be positive");
    check_arg(slots_left <= thresholds_.horizon(),
              "allocate: slots_left exceeds the threshold horizon");
    if (slots_left == 1) return backlog;
    if (backlog > 0.0 && gain > thresholds_.channel_threshold(slots_left)) return backlog;
    return 0.0;
  }

  std::string name() const override { return "oneshot"; }

 private:
  OneShotThresholds thresholds_;
  double total_bits_;
};

class ConstrainedErgodicPolicy final : public Policy {
 public:
  ConstrainedErgodicPolicy(double eta, double g_min, double g_max, double delta)
      : eta_(eta), g_min_(g_min), g_max_(g_max), delta_(delta) {}

  double allocate(int slots_left, double backlog, double gain) const override {
    check_state(slots_left, backlog);
    check_gain_support(gain, g_min_, g_max_);
    if (slots_left == 1) return backlog;
    return std::min(backlog, std::max(0.0, std::log(gain / eta_)));
  }

  std::string name() const override {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "cerg:delta=%.6g", delta_);
    return buf;
  }

 private:
  double eta_;
  double g_min_;
  double g_max_;
  double delta_;
};

}  // namespace

PolicyPtr equal_bit_policy(double total_bits, int horizon) {
  check_arg(std::isfinite(total_bits) && total_bits >= 0.0,
            "equal_bit_policy: total_bits must be >= 0");
  check_arg(horizon >= 1, "equal_bit_policy: horizon must be >= 1");
  return std::make_shared<EqualBitPolicy>(total_bits, horizon);
}

double relaxed_threshold(const MomentTable& moments, int slots_left) {
  check_arg(slots_left >= 2, "relaxed_threshold: need at least two slots left");
  check_arg(slots_left - 1 <= moments.max_order(),
            "relaxed_threshold: moment table too short");
  return 1.0 / moments.geo_mean(slots_left - 1);
}

PolicyPtr boundary_relaxed_policy(const MomentTable& moments) {
  return std::make_shared<BoundaryRelaxedPolicy>(moments);
}

OneShotThresholds::OneShotThresholds(const FadingDistribution& dist, int horizon) {
  check_arg(horizon >= 1, "OneShotThresholds: horizon must be >= 1");
  horizon_ = horizon;
  dist_id_ = dist.id();
  level_.assign(static_cast<std::size_t>(horizon) + 2, 0.0);
  level_[1] = std::numeric_limits<double>::infinity();
  if (horizon >= 1) {
    level_[2] = dist.expect([](double g) { return 1.0 / g; }, "one_shot_level");
  }
  for (int t = 3; t <= horizon + 1; ++t) {
    const double prev = level_[t - 1];
    // min(1/g, prev) kinks at g = 1/prev; splitting there keeps the
    // quadrature on smooth pieces.
    const double kink = 1.0 / prev;
    if (kink >= dist.g_max()) {
      level_[t] = prev;
    } else {
      level_[t] = prev * dist.cdf(kink) +
                  dist.expect([](double g) { return 1.0 / g; }, kink, dist.g_max(),
                              "one_shot_level");
    }
  }
}

double OneShotThresholds::level(int t) const {
  check_arg(t >= 1 && t <= horizon_ + 1, "OneShotThresholds::level: t out of range");
  return level_[t];
}

double OneShotThresholds::channel_threshold(int t) const { return 1.0 / level(t); }

double OneShotThresholds::expected_cost(double total_bits) const {
  check_arg(std::isfinite(total_bits) && total_bits >= 0.0,
            "OneShotThresholds::expected_cost: total_bits must be >= 0");
  return std::expm1(total_bits) * level_[horizon_ + 1];
}

PolicyPtr one_shot_policy(const OneShotThresholds& thresholds, double total_bits) {
  check_arg(std::isfinite(total_bits) && total_bits >= 0.0,
            "one_shot_policy: total_bits must be >= 0");
  return std::make_shared<OneShotPolicy>(thresholds, total_bits);
}

WaterfillSolution waterfill_threshold(const FadingDistribution& dist, double mean_rate) {
  check_arg(std::isfinite(mean_rate) && mean_rate > 0.0,
            "waterfill_threshold: mean_rate must be > 0");
  auto rate_at = [&dist](double eta) {
    // log(g / eta) is positive only above eta, so integrate just that window.
    return dist.expect([eta](double g) { return std::log(g / eta); },
                       std::max(eta, dist.g_min()), dist.g_max(), "waterfill_rate");
  };

  // rate_at is decreasing in eta, 0 at eta >= g_max.  Walk the lower bracket
  // end down until the target rate is enclosed.
  double hi = dist.g_max();
  double lo = dist.g_max();
  for (int i = 0; i < 200 && rate_at(lo) <= mean_rate; ++i) lo *= 0.5;
  check_arg(rate_at(lo) > mean_rate, "waterfill_threshold: mean_rate not bracketable");

  const double eta = bisect_increasing(
      [&](double x) { return mean_rate - rate_at(x); }, lo, hi, 1e-12);

  WaterfillSolution sol;
  sol.threshold = eta;
  sol.mean_rate = mean_rate;
  sol.residual = rate_at(eta) - mean_rate;
  return sol;
}

double ergodic_energy(const FadingDistribution& dist, double mean_rate) {
  const double eta = waterfill_threshold(dist, mean_rate).threshold;
  return dist.expect([eta](double g) { return 1.0 / eta - 1.0 / g; },
                     std::max(eta, dist.g_min()), dist.g_max(), "ergodic_energy");
}

PolicyPtr constrained_ergodic_policy(const FadingDistribution& dist, double total_bits,
                                     int horizon, double delta) {
  check_arg(std::isfinite(total_bits) && total_bits >= 0.0,
            "constrained_ergodic_policy: total_bits must be >= 0");
  check_arg(horizon >= 1, "constrained_ergodic_policy: horizon must be >= 1");
  check_arg(std::isfinite(delta) && delta > 0.0,
            "constrained_ergodic_policy: delta must be > 0");
  const double eta =
      waterfill_threshold(dist, total_bits / horizon + delta).threshold;
  return std::make_shared<ConstrainedErgodicPolicy>(eta, dist.g_min(), dist.g_max(), delta);
}

}  // namespace hdsched
