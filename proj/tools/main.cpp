#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hdsched/experiment.hpp"
#include "hdsched/version.hpp"

namespace {

using hdsched::ExperimentConfig;

struct CliArgs {
  std::string config_path;
  std::string dist;
  std::vector<double> bits;
  int horizon = 0;
  std::vector<std::string> policies;
  double beta_max = 0.0;
  int n_beta = 0;
  int n_g = 0;
  std::uint64_t n_trials = 0;
  std::uint64_t seed = 0;
  double delta = 0.0;
  int max_moment = 0;
  std::vector<double> powers;
  std::vector<std::string> reports;
  std::string out_dir;
  std::string cache_dir;
};

void add_common_options(CLI::App* sub, CliArgs* args) {
  sub->add_option("-c,--config", args->config_path, "JSON config file; flags override it");
  sub->add_option("-d,--dist", args->dist,
                  "distribution spec, e.g. trunc_exp:g_min=0.001,g_max=1e6 or "
                  "deterministic:g=1 or tabulated:path=pdf.csv");
  sub->add_option("-B,--bits", args->bits, "bit targets to sweep");
  sub->add_option("-T,--horizon", args->horizon, "number of slots before the deadline");
  sub->add_option("-p,--policy", args->policies,
                  "policy: equal | relaxed | oneshot | optimal | cerg | cerg:delta=<x>");
  sub->add_option("--beta-max", args->beta_max, "backlog grid upper end");
  sub->add_option("--n-beta", args->n_beta, "backlog grid points");
  sub->add_option("--n-g", args->n_g, "channel expectation nodes");
  sub->add_option("-n,--n-trials", args->n_trials, "Monte Carlo trials");
  sub->add_option("-s,--seed", args->seed, "random seed (required for simulation)");
  sub->add_option("--delta", args->delta, "rate margin for the cerg policy");
  sub->add_option("--max-moment", args->max_moment, "highest cached fractional moment");
  sub->add_option("--power", args->powers, "average powers for the rate curve");
  sub->add_option("-o,--out-dir", args->out_dir, "output directory");
  sub->add_option("--cache-dir", args->cache_dir,
                  "value table cache directory (HDSCHED_CACHE_DIR overrides)");
}

ExperimentConfig merge(const CLI::App* sub, const CliArgs& args,
                       const std::vector<std::string>& reports) {
  ExperimentConfig cfg;
  if (sub->count("--config") > 0) cfg = ExperimentConfig::from_file(args.config_path);
  if (sub->count("--dist") > 0) {
    cfg.distribution = hdsched::parse_distribution_string(args.dist);
  }
  if (sub->count("--bits") > 0) cfg.bits = args.bits;
  if (sub->count("--horizon") > 0) cfg.horizon = args.horizon;
  if (sub->count("--policy") > 0) cfg.policies = args.policies;
  if (sub->count("--beta-max") > 0) {
    cfg.grid.beta_max = args.beta_max;
    cfg.grid_given = true;
  }
  if (sub->count("--n-beta") > 0) {
    cfg.grid.n_beta = args.n_beta;
    cfg.grid_given = true;
  }
  if (sub->count("--n-g") > 0) {
    cfg.grid.n_g = args.n_g;
    cfg.grid_given = true;
  }
  if (sub->count("--n-trials") > 0) cfg.n_trials = args.n_trials;
  if (sub->count("--seed") > 0) cfg.seed = args.seed;
  if (sub->count("--delta") > 0) cfg.delta = args.delta;
  if (sub->count("--max-moment") > 0) cfg.max_moment = args.max_moment;
  if (sub->count("--power") > 0) cfg.powers = args.powers;
  if (sub->count("--out-dir") > 0) cfg.output_dir = args.out_dir;
  if (sub->count("--cache-dir") > 0) cfg.cache_dir = args.cache_dir;
  if (!reports.empty()) cfg.reports = reports;
  return cfg;
}

int execute(const ExperimentConfig& cfg) {
  const std::vector<std::string> problems = hdsched::validate(cfg);
  if (!problems.empty()) {
    for (const auto& p : problems) std::fprintf(stderr, "error: %s\n", p.c_str());
    return 2;
  }
  for (const auto& path : hdsched::run(cfg)) {
    std::printf("wrote %s\n", path.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-minimal scheduling of bits over a fading channel with a hard deadline"};
  app.set_version_flag("--version", hdsched::kVersion);
  app.require_subcommand(1);

  CliArgs args;

  CLI::App* cmd_moments = app.add_subcommand("moments", "fractional inverse-gain moments");
  CLI::App* cmd_thresholds =
      app.add_subcommand("thresholds", "one-shot transmission thresholds");
  CLI::App* cmd_dp = app.add_subcommand("dp-solve", "solve and cache the value table");
  CLI::App* cmd_sim = app.add_subcommand("simulate", "Monte Carlo policy costs");
  CLI::App* cmd_gain = app.add_subcommand("gain", "equal-split over optimal cost, in dB");
  CLI::App* cmd_snr = app.add_subcommand("snr", "high- and low-SNR approximations");
  CLI::App* cmd_table1 = app.add_subcommand("table1", "gain limits for reference channels");
  CLI::App* cmd_validate = app.add_subcommand("validate", "check a config and report problems");
  CLI::App* cmd_run = app.add_subcommand("run", "run every report in a config");

  for (CLI::App* sub : {cmd_moments, cmd_thresholds, cmd_dp, cmd_sim, cmd_gain, cmd_snr,
                        cmd_table1, cmd_run}) {
    add_common_options(sub, &args);
  }
  std::string validate_path;
  cmd_validate->add_option("-c,--config", validate_path, "JSON config file")->required();
  std::vector<std::string> run_reports;
  cmd_run->add_option("-r,--report", run_reports,
                      "override the reports list (moments thresholds dp costs gain snr table1)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_validate->parsed()) {
      ExperimentConfig cfg = ExperimentConfig::from_file(validate_path);
      const std::vector<std::string> problems = hdsched::validate(cfg);
      if (problems.empty()) {
        std::printf("ok\n");
        return 0;
      }
      for (const auto& p : problems) std::fprintf(stderr, "error: %s\n", p.c_str());
      return 2;
    }
    if (cmd_moments->parsed()) return execute(merge(cmd_moments, args, {"moments"}));
    if (cmd_thresholds->parsed()) return execute(merge(cmd_thresholds, args, {"thresholds"}));
    if (cmd_dp->parsed()) return execute(merge(cmd_dp, args, {"dp"}));
    if (cmd_sim->parsed()) return execute(merge(cmd_sim, args, {"costs"}));
    if (cmd_gain->parsed()) return execute(merge(cmd_gain, args, {"gain"}));
    if (cmd_snr->parsed()) return execute(merge(cmd_snr, args, {"snr"}));
    if (cmd_table1->parsed()) return execute(merge(cmd_table1, args, {"table1"}));
    if (cmd_run->parsed()) return execute(merge(cmd_run, args, run_reports));
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
