#include "hdsched/dp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "hdsched/errors.hpp"
#include "hdsched/numeric.hpp"

namespace hdsched {
namespace {

constexpr char kCacheMagic[8] = {'H', 'D', 'V', 'T', '0', '0', '0', '1'};
constexpr double kSupportSlack = 1e-9;
constexpr double kGoldenTol = 1e-10;

// 8-point Gauss-Legendre rule on [-1, 1].
constexpr double kGl8X[4] = {0.1834346424956498, 0.5255324099163290,
                             0.7966664774136267, 0.9602898564975363};
constexpr double kGl8W[4] = {0.3626837833783620, 0.3137066458778873,
                             0.2223810344533745, 0.1012285362903763};

struct ChannelRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

void append_panel(const FadingDistribution& dist, double a, double b, bool log_space,
                  ChannelRule* rule) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  for (int j = 3; j >= 0; --j) rule->nodes.push_back(c - h * kGl8X[j]);
  for (int j = 0; j < 4; ++j) rule->nodes.push_back(c + h * kGl8X[j]);
  for (int j = 3; j >= 0; --j) rule->weights.push_back(h * kGl8W[j]);
  for (int j = 0; j < 4; ++j) rule->weights.push_back(h * kGl8W[j]);
  const std::size_t first = rule->nodes.size() - 8;
  for (std::size_t k = first; k < rule->nodes.size(); ++k) {
    if (log_space) {
      const double g = std::exp(rule->nodes[k]);
      rule->nodes[k] = g;
      rule->weights[k] *= dist.pdf(g) * g;
    } else {
      rule->weights[k] *= dist.pdf(rule->nodes[k]);
    }
  }
}

// Fixed expectation rule over the gain: composite Gauss-Legendre panels with
// density weights, renormalized to sum to one.  Log-spaced panels when the
// support covers many decades.
ChannelRule channel_rule(const FadingDistribution& dist, int n_g) {
  ChannelRule rule;
  if (dist.kind() == FadingKind::Deterministic) {
    rule.nodes.push_back(dist.g_min());
    rule.weights.push_back(1.0);
    return rule;
  }

  const int panels = std::max(1, (n_g + 7) / 8);
  const bool log_space = dist.g_max() / dist.g_min() > 1e3;
  const double lo = log_space ? std::log(dist.g_min()) : dist.g_min();
  const double hi = log_space ? std::log(dist.g_max()) : dist.g_max();
  const double step = (hi - lo) / panels;
  for (int p = 0; p < panels; ++p) {
    append_panel(dist, lo + p * step, lo + (p + 1) * step, log_space, &rule);
  }

  CompensatedSum total;
  for (double w : rule.weights) total.add(w);
  check_arg(total.value() > 0.0, "channel_rule: distribution mass not captured");
  const double scale = 1.0 / total.value();
  for (double& w : rule.weights) w *= scale;
  return rule;
}

}  // namespace

void GridConfig::validate() const {
  check_arg(std::isfinite(beta_max) && beta_max > 0.0, "GridConfig: beta_max must be > 0");
  check_arg(n_beta >= 64, "GridConfig: n_beta must be >= 64");
  check_arg(n_g >= 1, "GridConfig: n_g must be >= 1");
}

double ValueTable::interp(const std::vector<double>& ys, double x) const {
  const double h = grid_.spacing();
  const int n = grid_.n_beta;
  double pos = x / h;
  int j = std::min(static_cast<int>(pos), n - 2);
  if (j < 0) j = 0;
  const double frac = pos - j;
  return ys[j] + frac * (ys[j + 1] - ys[j]);
}

std::span<const double> ValueTable::row(int slots_left) const {
  check_arg(slots_left >= 1 && slots_left <= horizon_, "ValueTable: slots_left out of range");
  return rows_[static_cast<std::size_t>(slots_left) - 1];
}

const std::vector<double>& ValueTable::deriv_row(int slots_left) const {
  check_arg(slots_left >= 1 && slots_left <= horizon_, "ValueTable: slots_left out of range");
  return derivs_[static_cast<std::size_t>(slots_left) - 1];
}

double ValueTable::cost(int slots_left, double backlog) const {
  check_arg(slots_left >= 1 && slots_left <= horizon_, "ValueTable::cost: slots_left out of range");
  if (backlog < 0.0 || backlog > grid_.beta_max * (1.0 + 1e-12)) {
    throw std::out_of_range("ValueTable::cost: backlog outside the tabulated range");
  }
  return interp(rows_[static_cast<std::size_t>(slots_left) - 1],
                std::min(backlog, grid_.beta_max));
}

double ValueTable::cost_derivative(int slots_left, double backlog) const {
  check_arg(slots_left >= 1 && slots_left <= horizon_,
            "ValueTable::cost_derivative: slots_left out of range");
  if (backlog < 0.0 || backlog > grid_.beta_max * (1.0 + 1e-12)) {
    throw std::out_of_range("ValueTable::cost_derivative: backlog outside the tabulated range");
  }
  return interp(derivs_[static_cast<std::size_t>(slots_left) - 1],
                std::min(backlog, grid_.beta_max));
}

std::string ValueTable::cache_key() const {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "|T=%d|beta_max=%.17g|n_beta=%d|n_g=%d", horizon_,
                grid_.beta_max, grid_.n_beta, grid_.n_g);
  return dist_id_ + buf;
}

ValueTable solve_dp(const FadingDistribution& dist, int horizon, const GridConfig& grid) {
  grid.validate();
  check_arg(horizon >= 1, "solve_dp: horizon must be >= 1");

  ValueTable table;
  table.horizon_ = horizon;
  table.grid_ = grid;
  table.g_min_ = dist.g_min();
  table.g_max_ = dist.g_max();
  table.dist_id_ = dist.id();

  ChannelRule rule = channel_rule(dist, grid.n_g);
  table.nodes_ = std::move(rule.nodes);
  table.weights_ = std::move(rule.weights);

  const int n = grid.n_beta;
  const double h = grid.spacing();
  const double inv_h = 1.0 / h;
  const double mean_inv_gain = dist.fractional_moment(1);

  std::vector<double> beta(n);
  for (int i = 0; i < n; ++i) beta[i] = i * h;

  table.rows_.reserve(horizon);
  std::vector<double> row(n);
  for (int i = 0; i < n; ++i) row[i] = std::expm1(beta[i]) * mean_inv_gain;
  table.rows_.push_back(row);

  const std::size_t n_nodes = table.nodes_.size();
  std::vector<double> inv_gain(n_nodes);
  for (std::size_t k = 0; k < n_nodes; ++k) inv_gain[k] = 1.0 / table.nodes_[k];

  std::vector<double> slope(n - 1);
  for (int t = 2; t <= horizon; ++t) {
    const std::vector<double>& prev = table.rows_.back();
    for (int j = 0; j + 1 < n; ++j) slope[j] = (prev[j + 1] - prev[j]) * inv_h;
    const double slope0 = slope[0];

    auto prev_at = [&](double x) {
      double pos = x * inv_h;
      int j = std::min(static_cast<int>(pos), n - 2);
      if (j < 0) j = 0;
      const double frac = pos - j;
      return prev[j] + frac * (prev[j + 1] - prev[j]);
    };

    row[0] = prev[0];
    for (int i = 1; i < n; ++i) {
      const double b_max = beta[i];
      const double exp_bmax = std::exp(b_max);
      const double hold_cost = prev[i];
      const double slope_top = slope[i - 1];
      CompensatedSum acc;
      for (std::size_t k = 0; k < n_nodes; ++k) {
        const double ig = inv_gain[k];
        double val;
        if (ig >= slope_top) {
          // Zero service: marginal energy at b=0 already exceeds the value
          // slope, so holding the whole backlog is optimal.
          val = hold_cost;
        } else if (exp_bmax * ig <= slope0) {
          // Full service is optimal: even the last bit is cheaper now.
          val = std::expm1(b_max) * ig;
        } else {
          const double b = golden_min(
              [&](double x) { return std::expm1(x) * ig + prev_at(b_max - x); }, 0.0,
              b_max, kGoldenTol);
          val = std::expm1(b) * ig + prev_at(b_max - b);
        }
        acc.add(table.weights_[k] * val);
      }
      row[i] = acc.value();
    }
    table.rows_.push_back(row);
  }

  table.derivs_.reserve(horizon);
  for (int t = 0; t < horizon; ++t) {
    const std::vector<double>& r = table.rows_[t];
    std::vector<double> d(n);
    d[0] = (r[1] - r[0]) * inv_h;
    d[n - 1] = (r[n - 1] - r[n - 2]) * inv_h;
    for (int i = 1; i + 1 < n; ++i) d[i] = (r[i + 1] - r[i - 1]) * (0.5 * inv_h);
    table.derivs_.push_back(std::move(d));
  }
  return table;
}

double optimal_allocate(const ValueTable& table, int slots_left, double backlog, double gain) {
  check_arg(slots_left >= 1 && slots_left <= table.horizon(),
            "optimal_allocate: slots_left out of range");
  check_arg(std::isfinite(backlog) && backlog >= 0.0, "optimal_allocate: backlog must be >= 0");
  check_domain(gain >= table.g_min() * (1.0 - kSupportSlack) &&
                   gain <= table.g_max() * (1.0 + kSupportSlack),
               "optimal_allocate: gain outside the channel support");
  if (slots_left == 1) return backlog;
  if (backlog == 0.0) return 0.0;

  const double d_full = table.cost_derivative(slots_left - 1, backlog);
  if (1.0 / gain >= d_full) return 0.0;
  const double d_zero = table.cost_derivative(slots_left - 1, 0.0);
  if (std::exp(backlog) / gain <= d_zero) return backlog;

  // Stationarity: e^b / gain equals the value slope at the remaining backlog.
  auto excess = [&](double b) {
    return std::exp(b) / gain - table.cost_derivative(slots_left - 1, backlog - b);
  };
  return bisect_increasing(excess, 0.0, backlog, 1e-12);
}

namespace {

class OptimalPolicy final : public Policy {
 public:
  explicit OptimalPolicy(std::shared_ptr<const ValueTable> table) : table_(std::move(table)) {}

  double allocate(int slots_left, double backlog, double gain) const override {
    return optimal_allocate(*table_, slots_left, backlog, gain);
  }

  std::string name() const override { return "optimal"; }

 private:
  std::shared_ptr<const ValueTable> table_;
};

void write_bytes(std::ofstream& out, const void* p, std::size_t n) {
  out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void read_bytes(std::ifstream& in, void* p, std::size_t n) {
  in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
  if (!in) throw std::runtime_error("ValueTable::load: truncated file");
}

void write_vec(std::ofstream& out, const std::vector<double>& v) {
  const std::uint64_t n = v.size();
  write_bytes(out, &n, sizeof(n));
  write_bytes(out, v.data(), n * sizeof(double));
}

std::vector<double> read_vec(std::ifstream& in) {
  std::uint64_t n = 0;
  read_bytes(in, &n, sizeof(n));
  if (n > (1ULL << 32)) throw std::runtime_error("ValueTable::load: corrupt length");
  std::vector<double> v(n);
  read_bytes(in, v.data(), n * sizeof(double));
  return v;
}

}  // namespace

PolicyPtr optimal_policy(std::shared_ptr<const ValueTable> table) {
  check_arg(table != nullptr, "optimal_policy: table must not be null");
  return std::make_shared<OptimalPolicy>(std::move(table));
}

void ValueTable::save(const std::string& path) const {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    check_arg(out.good(), "ValueTable::save: cannot open " + tmp);
    write_bytes(out, kCacheMagic, sizeof(kCacheMagic));
    const std::string key = cache_key();
    const std::uint64_t key_len = key.size();
    write_bytes(out, &key_len, sizeof(key_len));
    write_bytes(out, key.data(), key.size());
    const std::int32_t t = horizon_, nb = grid_.n_beta, ng = grid_.n_g;
    write_bytes(out, &t, sizeof(t));
    write_bytes(out, &grid_.beta_max, sizeof(double));
    write_bytes(out, &nb, sizeof(nb));
    write_bytes(out, &ng, sizeof(ng));
    write_bytes(out, &g_min_, sizeof(double));
    write_bytes(out, &g_max_, sizeof(double));
    const std::uint64_t id_len = dist_id_.size();
    write_bytes(out, &id_len, sizeof(id_len));
    write_bytes(out, dist_id_.data(), dist_id_.size());
    write_vec(out, nodes_);
    write_vec(out, weights_);
    for (const auto& r : rows_) write_vec(out, r);
    for (const auto& d : derivs_) write_vec(out, d);
    if (!out.good()) throw std::runtime_error("ValueTable::save: write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw std::runtime_error("ValueTable::save: cannot rename into " + path);
  }
}

ValueTable ValueTable::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) throw std::runtime_error("ValueTable::load: cannot open " + path);
  char magic[8];
  read_bytes(in, magic, sizeof(magic));
  if (std::memcmp(magic, kCacheMagic, sizeof(magic)) != 0) {
    throw std::runtime_error("ValueTable::load: bad magic in " + path);
  }
  std::uint64_t key_len = 0;
  read_bytes(in, &key_len, sizeof(key_len));
  if (key_len > 4096) throw std::runtime_error("ValueTable::load: corrupt key");
  std::string key(key_len, '\0');
  read_bytes(in, key.data(), key_len);

  ValueTable table;
  std::int32_t t = 0, nb = 0, ng = 0;
  read_bytes(in, &t, sizeof(t));
  read_bytes(in, &table.grid_.beta_max, sizeof(double));
  read_bytes(in, &nb, sizeof(nb));
  read_bytes(in, &ng, sizeof(ng));
  read_bytes(in, &table.g_min_, sizeof(double));
  read_bytes(in, &table.g_max_, sizeof(double));
  table.horizon_ = t;
  table.grid_.n_beta = nb;
  table.grid_.n_g = ng;
  std::uint64_t id_len = 0;
  read_bytes(in, &id_len, sizeof(id_len));
  if (id_len > 4096) throw std::runtime_error("ValueTable::load: corrupt id");
  table.dist_id_.assign(id_len, '\0');
  read_bytes(in, table.dist_id_.data(), id_len);
  table.nodes_ = read_vec(in);
  table.weights_ = read_vec(in);
  for (int r = 0; r < t; ++r) table.rows_.push_back(read_vec(in));
  for (int r = 0; r < t; ++r) table.derivs_.push_back(read_vec(in));
  if (table.cache_key() != key) {
    throw std::runtime_error("ValueTable::load: key mismatch in " + path);
  }
  return table;
}

}  // namespace hdsched
