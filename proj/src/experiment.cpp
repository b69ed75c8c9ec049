#include "hdsched/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "hdsched/analysis.hpp"
#include "hdsched/errors.hpp"
#include "hdsched/numeric.hpp"
#include "hdsched/sim.hpp"
#include "hdsched/version.hpp"

namespace hdsched {
namespace {

using nlohmann::json;

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string fmt_u64(std::uint64_t x) { return std::to_string(x); }

// One output CSV: a comment line with run provenance, a header, then rows.
class CsvFile {
 public:
  CsvFile(std::string path, std::string comment, std::vector<std::string> columns)
      : path_(std::move(path)), comment_(std::move(comment)), columns_(std::move(columns)) {}

  void add_row(std::vector<std::string> cells) {
    check_arg(cells.size() == columns_.size(), "CsvFile: row width mismatch");
    rows_.push_back(std::move(cells));
  }

  std::string write() const {
    const std::string tmp = path_ + ".tmp";
    {
      std::ofstream out(tmp, std::ios::trunc);
      if (!out.good()) throw std::runtime_error("cannot open " + tmp + " for writing");
      out << comment_ << "\n";
      for (std::size_t c = 0; c < columns_.size(); ++c) {
        out << columns_[c] << (c + 1 < columns_.size() ? "," : "");
      }
      out << "\n";
      for (const auto& row : rows_) {
        for (std::size_t c = 0; c < row.size(); ++c) {
          out << row[c] << (c + 1 < row.size() ? "," : "");
        }
        out << "\n";
      }
      if (!out.good()) throw std::runtime_error("write failed for " + tmp);
    }
    if (std::rename(tmp.c_str(), path_.c_str()) != 0) {
      throw std::runtime_error("cannot rename " + tmp + " into place");
    }
    return path_;
  }

 private:
  std::string path_;
  std::string comment_;
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

const std::set<std::string>& known_reports() {
  static const std::set<std::string> kReports = {
      "moments", "thresholds", "dp", "costs", "gain", "snr", "table1"};
  return kReports;
}

std::vector<double> parse_bits_field(const json& j) {
  std::vector<double> out;
  if (j.is_number()) {
    out.push_back(j.get<double>());
  } else if (j.is_array()) {
    for (const auto& v : j) out.push_back(v.get<double>());
  } else if (j.is_object()) {
    const double from = j.at("from").get<double>();
    const double to = j.at("to").get<double>();
    const int points = j.at("points").get<int>();
    const std::string scale = j.value("scale", "log");
    check_arg(points >= 2, "bits.points must be >= 2");
    for (int i = 0; i < points; ++i) {
      const double w = static_cast<double>(i) / (points - 1);
      if (scale == "log") {
        check_arg(from > 0.0 && to > 0.0, "bits: log sweep needs positive endpoints");
        out.push_back(std::exp(std::log(from) + w * (std::log(to) - std::log(from))));
      } else if (scale == "linear") {
        out.push_back(from + w * (to - from));
      } else {
        throw std::invalid_argument("bits.scale must be 'log' or 'linear'");
      }
    }
  } else {
    throw std::invalid_argument("bits must be a number, array, or sweep object");
  }
  return out;
}

GridConfig effective_grid(const ExperimentConfig& config) {
  GridConfig g = config.grid;
  if (g.n_beta <= 0) g.n_beta = 2048;
  if (g.n_g <= 0) g.n_g = 512;
  if (g.beta_max <= 0.0 && !config.bits.empty()) {
    g.beta_max = 1.25 * *std::max_element(config.bits.begin(), config.bits.end());
  }
  return g;
}

int effective_max_moment(const ExperimentConfig& config) {
  if (config.max_moment > 0) return config.max_moment;
  return std::max(config.horizon, 64);
}

std::string csv_comment(const ExperimentConfig& config) {
  return "# config_hash=" + config.hash() + " seed=" + fmt_u64(config.seed.value_or(0)) +
         " version=" + kVersion;
}

bool has_report(const ExperimentConfig& config, const std::string& name) {
  return std::find(config.reports.begin(), config.reports.end(), name) !=
         config.reports.end();
}

}  // namespace

json parse_distribution_string(const std::string& spec) {
  const std::size_t colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  json j;
  j["kind"] = kind;
  if (colon == std::string::npos) return j;
  std::istringstream rest(spec.substr(colon + 1));
  std::string item;
  while (std::getline(rest, item, ',')) {
    const std::size_t eq = item.find('=');
    check_arg(eq != std::string::npos, "distribution spec: expected key=value in '" + item + "'");
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    if (key == "path") {
      j[key] = value;
    } else {
      try {
        std::size_t used = 0;
        j[key] = std::stod(value, &used);
        check_arg(used == value.size(), "trailing characters");
      } catch (const std::exception&) {
        throw std::invalid_argument("distribution spec: bad numeric value in '" + item + "'");
      }
    }
  }
  return j;
}

FadingDistribution parse_distribution(const json& spec) {
  check_arg(spec.is_object() && spec.contains("kind"),
            "distribution: expected an object with a 'kind' field");
  const std::string kind = spec.at("kind").get<std::string>();
  if (kind == "trunc_exp") {
    check_arg(spec.contains("g_min") && spec.contains("g_max"),
              "distribution: trunc_exp needs g_min and g_max");
    return FadingDistribution::truncated_exponential(spec.at("g_min").get<double>(),
                                                     spec.at("g_max").get<double>());
  }
  if (kind == "deterministic") {
    check_arg(spec.contains("g"), "distribution: deterministic needs g");
    return FadingDistribution::deterministic(spec.at("g").get<double>());
  }
  if (kind == "tabulated") {
    check_arg(spec.contains("path"), "distribution: tabulated needs path");
    return FadingDistribution::tabulated_from_csv(spec.at("path").get<std::string>());
  }
  throw std::invalid_argument("distribution: unknown kind '" + kind + "'");
}

PolicySpec parse_policy_spec(const std::string& spec) {
  PolicySpec out;
  const std::size_t colon = spec.find(':');
  out.kind = spec.substr(0, colon);
  if (colon != std::string::npos) {
    const std::string rest = spec.substr(colon + 1);
    const std::string prefix = "delta=";
    check_arg(out.kind == "cerg" && rest.rfind(prefix, 0) == 0,
              "policy spec: only cerg takes options, as cerg:delta=<x>; got '" + spec + "'");
    try {
      std::size_t used = 0;
      out.delta = std::stod(rest.substr(prefix.size()), &used);
      check_arg(used == rest.size() - prefix.size(), "trailing characters");
    } catch (const std::exception&) {
      throw std::invalid_argument("policy spec: bad delta in '" + spec + "'");
    }
  }
  static const std::set<std::string> kKinds = {"equal", "relaxed", "oneshot", "cerg",
                                               "optimal"};
  check_arg(kKinds.count(out.kind) == 1, "policy spec: unknown policy '" + out.kind + "'");
  return out;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  check_arg(j.is_object(), "config: expected a JSON object");
  ExperimentConfig c;
  static const std::set<std::string> kKnown = {
      "distribution", "bits", "horizon", "policies", "grid",     "n_trials",
      "seed",         "delta", "max_moment", "reports", "powers", "output_dir",
      "cache_dir"};
  for (const auto& [key, value] : j.items()) {
    if (kKnown.count(key) == 0) c.unknown_keys.push_back(key);
  }
  if (j.contains("distribution")) {
    c.distribution = j["distribution"].is_string()
                         ? parse_distribution_string(j["distribution"].get<std::string>())
                         : j["distribution"];
  }
  if (j.contains("bits")) c.bits = parse_bits_field(j["bits"]);
  if (j.contains("horizon")) c.horizon = j["horizon"].get<int>();
  if (j.contains("policies")) {
    if (j["policies"].is_string()) {
      c.policies.push_back(j["policies"].get<std::string>());
    } else {
      for (const auto& p : j["policies"]) c.policies.push_back(p.get<std::string>());
    }
  }
  if (j.contains("grid")) {
    c.grid_given = true;
    const json& g = j["grid"];
    c.grid.beta_max = g.value("beta_max", 0.0);
    c.grid.n_beta = g.value("n_beta", 2048);
    c.grid.n_g = g.value("n_g", 512);
  }
  if (j.contains("n_trials")) c.n_trials = j["n_trials"].get<std::size_t>();
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("delta")) c.delta = j["delta"].get<double>();
  if (j.contains("max_moment")) c.max_moment = j["max_moment"].get<int>();
  if (j.contains("reports")) {
    if (j["reports"].is_string()) {
      c.reports.push_back(j["reports"].get<std::string>());
    } else {
      for (const auto& r : j["reports"]) c.reports.push_back(r.get<std::string>());
    }
  }
  if (j.contains("powers")) {
    if (j["powers"].is_number()) {
      c.powers.push_back(j["powers"].get<double>());
    } else {
      for (const auto& p : j["powers"]) c.powers.push_back(p.get<double>());
    }
  }
  if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
  if (j.contains("cache_dir")) c.cache_dir = j["cache_dir"].get<std::string>();
  return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  check_arg(in.good(), "config: cannot open " + path);
  json j;
  try {
    j = json::parse(in, nullptr, true, true);  // allow comments
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config: " + path + ": " + e.what());
  }
  return from_json(j);
}

json ExperimentConfig::canonical() const {
  json j;
  j["distribution"] = distribution;
  j["bits"] = bits;
  j["horizon"] = horizon;
  j["policies"] = policies;
  const GridConfig g = effective_grid(*this);
  j["grid"] = {{"beta_max", g.beta_max}, {"n_beta", g.n_beta}, {"n_g", g.n_g}};
  j["n_trials"] = n_trials;
  if (seed) j["seed"] = *seed;
  if (delta) j["delta"] = *delta;
  j["max_moment"] = effective_max_moment(*this);
  j["reports"] = reports;
  j["powers"] = powers;
  return j;
}

std::string ExperimentConfig::hash() const {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical().dump())));
  return buf;
}

std::vector<std::string> validate(const ExperimentConfig& config) {
  std::vector<std::string> problems;
  auto add = [&problems](const std::string& msg) { problems.push_back(msg); };

  for (const auto& key : config.unknown_keys) {
    add("config: unknown field '" + key + "'");
  }
  if (config.reports.empty()) add("reports: none requested");
  for (const auto& r : config.reports) {
    if (known_reports().count(r) == 0) add("reports: unknown report '" + r + "'");
  }

  const bool needs_dist = std::any_of(config.reports.begin(), config.reports.end(),
                                      [](const std::string& r) { return r != "table1"; });
  if (needs_dist) {
    try {
      parse_distribution(config.distribution);
    } catch (const std::exception& e) {
      add(e.what());
    }
  }

  const bool needs_horizon = has_report(config, "thresholds") || has_report(config, "dp") ||
                             has_report(config, "costs") || has_report(config, "gain") ||
                             has_report(config, "snr");
  if (needs_horizon && config.horizon < 1) add("horizon: must be >= 1");

  const bool needs_bits = has_report(config, "costs") || has_report(config, "gain");
  if (needs_bits) {
    if (config.bits.empty()) add("bits: at least one value required");
    for (double b : config.bits) {
      if (!std::isfinite(b) || b < 0.0) add("bits: values must be finite and >= 0");
      if (has_report(config, "gain") && b <= 0.0) add("bits: gain needs values > 0");
    }
  }

  bool wants_cerg = false;
  bool wants_optimal = false;
  if (has_report(config, "costs")) {
    if (config.policies.empty()) add("policies: at least one required for costs");
    for (const auto& p : config.policies) {
      try {
        const PolicySpec spec = parse_policy_spec(p);
        if (spec.kind == "cerg") wants_cerg = true;
        if (spec.kind == "optimal") wants_optimal = true;
        if (spec.delta && *spec.delta <= 0.0) add("policies: cerg delta must be > 0");
      } catch (const std::exception& e) {
        add(e.what());
      }
    }
    if (!config.seed) add("seed: required for simulation (no wall-clock default)");
    if (config.n_trials < 1) add("n_trials: must be >= 1");
  }
  if (config.delta) {
    if (*config.delta <= 0.0) add("delta: must be > 0");
    if (!wants_cerg) add("delta: set but no cerg policy requested");
  }

  const bool needs_grid = has_report(config, "dp") || has_report(config, "gain") ||
                          wants_optimal ||
                          (has_report(config, "snr") && !config.powers.empty());
  if (needs_grid) {
    const GridConfig g = effective_grid(config);
    try {
      g.validate();
    } catch (const std::exception& e) {
      add(std::string("grid: ") + e.what());
    }
    if (g.beta_max > 0.0 && !config.bits.empty()) {
      const double top = *std::max_element(config.bits.begin(), config.bits.end());
      if (top > g.beta_max) add("grid: beta_max must cover the largest bits value");
    }
  }

  if (config.max_moment < 0) add("max_moment: must be >= 0");
  if (config.max_moment > 0 && needs_horizon && config.max_moment < config.horizon) {
    add("max_moment: must cover the horizon");
  }
  if (config.output_dir.empty()) add("output_dir: must be nonempty");

  return problems;
}

std::string effective_cache_dir(const ExperimentConfig& config) {
  if (const char* env = std::getenv("HDSCHED_CACHE_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  if (!config.cache_dir.empty()) return config.cache_dir;
  return config.output_dir + "/cache";
}

std::shared_ptr<const ValueTable> obtain_value_table(const FadingDistribution& dist,
                                                     int horizon, const GridConfig& grid,
                                                     const std::string& cache_dir,
                                                     bool persist_on_miss) {
  char buf[20];
  {
    // Key of the would-be table, without solving it.
    std::string key = dist.id();
    char tail[160];
    std::snprintf(tail, sizeof(tail), "|T=%d|beta_max=%.17g|n_beta=%d|n_g=%d", horizon,
                  grid.beta_max, grid.n_beta, grid.n_g);
    key += tail;
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(key)));
  }
  const std::string path = cache_dir + "/vt_" + buf + ".bin";
  if (std::filesystem::exists(path)) {
    try {
      return std::make_shared<ValueTable>(ValueTable::load(path));
    } catch (const std::exception&) {
      // Stale or corrupt cache entry; fall through and recompute.
    }
  }
  auto table = std::make_shared<ValueTable>(solve_dp(dist, horizon, grid));
  if (persist_on_miss) {
    std::filesystem::create_directories(cache_dir);
    table->save(path);
  }
  return table;
}

namespace {

struct RunState {
  const ExperimentConfig& config;
  std::string comment;
  std::optional<FadingDistribution> dist;
  std::optional<MomentTable> moments;
  std::optional<OneShotThresholds> thresholds;
  std::shared_ptr<const ValueTable> table;

  const FadingDistribution& distribution() {
    if (!dist) dist = parse_distribution(config.distribution);
    return *dist;
  }
  const MomentTable& moment_table() {
    if (!moments) moments = MomentTable(distribution(), effective_max_moment(config));
    return *moments;
  }
  const OneShotThresholds& threshold_table() {
    if (!thresholds) thresholds = OneShotThresholds(distribution(), config.horizon);
    return *thresholds;
  }
  std::shared_ptr<const ValueTable> value_table(bool persist) {
    if (!table) {
      table = obtain_value_table(distribution(), config.horizon, effective_grid(config),
                                 effective_cache_dir(config), persist);
    }
    return table;
  }
};

std::string emit_moments(RunState& state) {
  const MomentTable& mt = state.moment_table();
  CsvFile csv(state.config.output_dir + "/moments.csv", state.comment,
              {"order", "moment", "geo_mean", "limit"});
  for (int m = 1; m <= mt.max_order(); ++m) {
    csv.add_row({std::to_string(m), fmt_double(mt.moment(m)), fmt_double(mt.geo_mean(m)),
                 fmt_double(mt.limit())});
  }
  return csv.write();
}

std::string emit_thresholds(RunState& state) {
  const OneShotThresholds& th = state.threshold_table();
  CsvFile csv(state.config.output_dir + "/thresholds.csv", state.comment,
              {"slots_left", "level", "channel_threshold"});
  for (int t = 1; t <= th.horizon() + 1; ++t) {
    csv.add_row({std::to_string(t), fmt_double(th.level(t)),
                 fmt_double(th.channel_threshold(t))});
  }
  return csv.write();
}

std::string emit_dp(RunState& state) {
  const auto table = state.value_table(/*persist=*/true);
  CsvFile csv(state.config.output_dir + "/dp.csv", state.comment,
              {"slots_left", "backlog", "cost"});
  const double h = table->grid().spacing();
  for (int t = 1; t <= table->horizon(); ++t) {
    const auto row = table->row(t);
    for (std::size_t i = 0; i < row.size(); ++i) {
      csv.add_row({std::to_string(t), fmt_double(i * h), fmt_double(row[i])});
    }
  }
  return csv.write();
}

PolicyPtr build_policy(RunState& state, const PolicySpec& spec, double bits) {
  const ExperimentConfig& config = state.config;
  if (spec.kind == "equal") return equal_bit_policy(bits, config.horizon);
  if (spec.kind == "relaxed") return boundary_relaxed_policy(state.moment_table());
  if (spec.kind == "oneshot") return one_shot_policy(state.threshold_table(), bits);
  if (spec.kind == "cerg") {
    double delta;
    if (spec.delta) {
      delta = *spec.delta;
    } else if (config.delta) {
      delta = *config.delta;
    } else {
      delta = optimize_delta(state.distribution(), bits, config.horizon, config.n_trials,
                             config.seed.value_or(0))
                  .delta;
    }
    return constrained_ergodic_policy(state.distribution(), bits, config.horizon, delta);
  }
  return optimal_policy(state.value_table(/*persist=*/false));
}

std::string emit_costs(RunState& state) {
  const ExperimentConfig& config = state.config;
  CsvFile csv(config.output_dir + "/costs.csv", state.comment,
              {"policy", "distribution", "bits", "horizon", "n_trials", "seed",
               "mean_energy", "std_error", "per_slot_energy"});
  for (double bits : config.bits) {
    for (const auto& p : config.policies) {
      const PolicySpec spec = parse_policy_spec(p);
      const PolicyPtr policy = build_policy(state, spec, bits);
      const SimulationReport rep = simulate(state.distribution(), *policy, bits,
                                            config.horizon, config.n_trials, *config.seed);
      csv.add_row({rep.policy, rep.distribution_id, fmt_double(rep.total_bits),
                   std::to_string(rep.horizon), fmt_u64(rep.n_trials), fmt_u64(rep.seed),
                   fmt_double(rep.mean_energy), fmt_double(rep.std_error),
                   fmt_double(rep.per_slot_energy)});
    }
  }
  return csv.write();
}

std::string emit_gain(RunState& state) {
  const ExperimentConfig& config = state.config;
  const GainReport rep = gain_report(state.moment_table(), state.threshold_table(),
                                     *state.value_table(/*persist=*/false), config.bits);
  CsvFile csv(config.output_dir + "/gain.csv", state.comment,
              {"distribution", "horizon", "bits", "gain_db", "limit_small_b_db",
               "limit_large_b_db"});
  for (std::size_t i = 0; i < rep.total_bits.size(); ++i) {
    csv.add_row({rep.distribution_id, std::to_string(rep.horizon),
                 fmt_double(rep.total_bits[i]), fmt_double(rep.gain_db[i]),
                 fmt_double(rep.limit_small_b_db), fmt_double(rep.limit_large_b_db)});
  }
  return csv.write();
}

std::vector<std::string> emit_snr(RunState& state) {
  const ExperimentConfig& config = state.config;
  const SnrApproximation a = snr_approximation(state.moment_table(), state.threshold_table());
  std::vector<std::string> written;
  CsvFile csv(config.output_dir + "/snr.csv", state.comment,
              {"distribution", "horizon", "high_slope", "offset_equal", "offset_optimal",
               "offset_ergodic", "low_slope_equal", "low_slope_oneshot",
               "min_energy_per_bit_equal", "min_energy_per_bit_oneshot",
               "min_energy_per_bit_ergodic"});
  csv.add_row({state.distribution().id(), std::to_string(a.horizon), fmt_double(a.high_slope),
               fmt_double(a.offset_equal), fmt_double(a.offset_optimal),
               fmt_double(a.offset_ergodic), fmt_double(a.low_slope_equal),
               fmt_double(a.low_slope_oneshot), fmt_double(a.min_energy_per_bit_equal),
               fmt_double(a.min_energy_per_bit_oneshot),
               fmt_double(a.min_energy_per_bit_ergodic)});
  written.push_back(csv.write());

  if (!config.powers.empty()) {
    const auto curve =
        spectral_efficiency_curve(*state.value_table(/*persist=*/false), config.powers);
    CsvFile rates(config.output_dir + "/rate_curve.csv", state.comment,
                  {"power", "rate", "high_snr_rate_equal", "high_snr_rate_optimal"});
    for (const auto& pt : curve) {
      const double exact_equal =
          pt.power > 0.0 ? std::log1p(pt.power / state.moment_table().moment(1)) : 0.0;
      const double affine_opt =
          pt.power > 0.0 ? std::max(0.0, std::log(pt.power) - a.offset_optimal) : 0.0;
      rates.add_row({fmt_double(pt.power), fmt_double(pt.rate), fmt_double(exact_equal),
                     fmt_double(affine_opt)});
    }
    written.push_back(rates.write());
  }
  return written;
}

std::string emit_table1(RunState& state) {
  const ExperimentConfig& config = state.config;
  CsvFile csv(config.output_dir + "/table1.csv", state.comment,
              {"g_min", "g_max", "large_b_t5_db", "small_b_t5_db", "large_b_t10_db",
               "small_b_t10_db", "large_b_t50_db", "small_b_t50_db"});
  const double g_max = 1e6;
  for (double g_min : {0.1, 0.01, 0.001}) {
    const FadingDistribution dist = FadingDistribution::truncated_exponential(g_min, g_max);
    const MomentTable moments(dist, 50);
    const OneShotThresholds thresholds(dist, 50);
    std::vector<std::string> row = {fmt_double(g_min), fmt_double(g_max)};
    for (int t : {5, 10, 50}) {
      const double large = gain_limit_large_b_db(moments, t);
      const double small =
          10.0 * std::log10(moments.moment(1) / thresholds.level(t + 1));
      row.push_back(fmt_double(large));
      row.push_back(fmt_double(small));
    }
    csv.add_row(row);
  }
  return csv.write();
}

}  // namespace

std::vector<std::string> run(const ExperimentConfig& config) {
  const std::vector<std::string> problems = validate(config);
  if (!problems.empty()) {
    std::string msg = "config invalid:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw std::invalid_argument(msg);
  }
  std::filesystem::create_directories(config.output_dir);

  RunState state{config, csv_comment(config), {}, {}, {}, nullptr};
  std::vector<std::string> written;
  for (const auto& report : config.reports) {
    if (report == "moments") {
      written.push_back(emit_moments(state));
    } else if (report == "thresholds") {
      written.push_back(emit_thresholds(state));
    } else if (report == "dp") {
      written.push_back(emit_dp(state));
    } else if (report == "costs") {
      written.push_back(emit_costs(state));
    } else if (report == "gain") {
      written.push_back(emit_gain(state));
    } else if (report == "snr") {
      for (auto& p : emit_snr(state)) written.push_back(std::move(p));
    } else if (report == "table1") {
      written.push_back(emit_table1(state));
    }
  }
  return written;
}

}  // namespace hdsched
