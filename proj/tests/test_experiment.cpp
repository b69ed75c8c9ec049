#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "hdsched/experiment.hpp"

using hdsched::ExperimentConfig;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

bool any_contains(const std::vector<std::string>& problems, const std::string& needle) {
  for (const auto& p : problems) {
    if (p.find(needle) != std::string::npos) return true;
  }
  return false;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

json base_config() {
  return json{{"distribution", "deterministic:g=1"},
              {"bits", 2.0},
              {"horizon", 2},
              {"policies", {"equal"}},
              {"n_trials", 200},
              {"seed", 7},
              {"reports", {"costs"}}};
}

}  // namespace

TEST_CASE("distribution spec strings parse to canonical objects") {
  const json t = hdsched::parse_distribution_string("trunc_exp:g_min=0.001,g_max=1e6");
  CHECK(t["kind"] == "trunc_exp");
  CHECK(t["g_min"].get<double>() == 0.001);
  CHECK(t["g_max"].get<double>() == 1e6);
  const json d = hdsched::parse_distribution_string("deterministic:g=2.5");
  CHECK(hdsched::parse_distribution(d).g_min() == 2.5);
  const json tab = hdsched::parse_distribution_string("tabulated:path=pdf.csv");
  CHECK(tab["path"] == "pdf.csv");
  CHECK_THROWS_AS(hdsched::parse_distribution_string("trunc_exp:g_min"),
                  std::invalid_argument);
  CHECK_THROWS_AS(hdsched::parse_distribution_string("trunc_exp:g_min=abc"),
                  std::invalid_argument);
  CHECK_THROWS_AS(hdsched::parse_distribution(json{{"kind", "weird"}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(hdsched::parse_distribution(json::object()), std::invalid_argument);
}

TEST_CASE("policy specs parse and reject junk") {
  CHECK(hdsched::parse_policy_spec("equal").kind == "equal");
  CHECK(hdsched::parse_policy_spec("optimal").kind == "optimal");
  CHECK_FALSE(hdsched::parse_policy_spec("cerg").delta.has_value());
  const auto spec = hdsched::parse_policy_spec("cerg:delta=0.3");
  CHECK(spec.kind == "cerg");
  CHECK(spec.delta.value() == 0.3);
  CHECK_THROWS_AS(hdsched::parse_policy_spec("bogus"), std::invalid_argument);
  CHECK_THROWS_AS(hdsched::parse_policy_spec("equal:delta=1"), std::invalid_argument);
  CHECK_THROWS_AS(hdsched::parse_policy_spec("cerg:delta=x"), std::invalid_argument);
}

TEST_CASE("config parsing applies sweeps and defaults") {
  json j = base_config();
  j["bits"] = json{{"from", 0.1}, {"to", 10.0}, {"points", 3}, {"scale", "log"}};
  const ExperimentConfig cfg = ExperimentConfig::from_json(j);
  REQUIRE(cfg.bits.size() == 3);
  CHECK(cfg.bits[0] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(cfg.bits[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cfg.bits[2] == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(cfg.horizon == 2);
  CHECK(cfg.n_trials == 200);
  CHECK(cfg.seed.value() == 7);
  CHECK(cfg.grid_given == false);
  CHECK(hdsched::validate(cfg).empty());

  json lin = base_config();
  lin["bits"] = json{{"from", 1.0}, {"to", 5.0}, {"points", 5}, {"scale", "linear"}};
  CHECK(ExperimentConfig::from_json(lin).bits[1] == doctest::Approx(2.0));
}

TEST_CASE("validate reports every problem it can see") {
  json j = base_config();
  j.erase("seed");
  j["policies"] = {"equal", "bogus", "cerg:delta=-1"};
  j["reports"] = {"costs", "nonsense"};
  j["horizon"] = 0;
  j["surprise"] = 1;
  const auto problems = hdsched::validate(ExperimentConfig::from_json(j));
  CHECK(any_contains(problems, "seed"));
  CHECK(any_contains(problems, "bogus"));
  CHECK(any_contains(problems, "delta"));
  CHECK(any_contains(problems, "nonsense"));
  CHECK(any_contains(problems, "horizon"));
  CHECK(any_contains(problems, "surprise"));
}

TEST_CASE("validate flags a margin without a matching policy") {
  json j = base_config();
  j["delta"] = 0.5;
  const auto problems = hdsched::validate(ExperimentConfig::from_json(j));
  CHECK(any_contains(problems, "delta"));

  json ok = base_config();
  ok["delta"] = 0.5;
  ok["policies"] = {"cerg"};
  CHECK(hdsched::validate(ExperimentConfig::from_json(ok)).empty());
}

TEST_CASE("validate requires grid coverage for the optimal policy") {
  json j = base_config();
  j["policies"] = {"optimal"};
  j["bits"] = 4.0;
  j["grid"] = {{"beta_max", 2.0}, {"n_beta", 128}, {"n_g", 8}};
  const auto problems = hdsched::validate(ExperimentConfig::from_json(j));
  CHECK(any_contains(problems, "beta_max"));
}

TEST_CASE("validate needs a distribution except for the fixed-channel table") {
  json j;
  j["reports"] = {"table1"};
  CHECK(hdsched::validate(ExperimentConfig::from_json(j)).empty());
  j["reports"] = {"moments"};
  const auto problems = hdsched::validate(ExperimentConfig::from_json(j));
  CHECK(any_contains(problems, "distribution"));
}

TEST_CASE("config hash is stable and sensitive") {
  const ExperimentConfig a = ExperimentConfig::from_json(base_config());
  const ExperimentConfig b = ExperimentConfig::from_json(base_config());
  CHECK(a.hash() == b.hash());
  json changed = base_config();
  changed["seed"] = 8;
  CHECK(ExperimentConfig::from_json(changed).hash() != a.hash());
  // Output location does not change the scientific content.
  json moved = base_config();
  moved["output_dir"] = "elsewhere";
  CHECK(ExperimentConfig::from_json(moved).hash() == a.hash());
}

TEST_CASE("costs report on a fixed channel holds the exact value") {
  TempDir dir("hdsched_costs_test");
  json j = base_config();
  j["output_dir"] = (dir.path / "out").string();
  const auto written = hdsched::run(ExperimentConfig::from_json(j));
  REQUIRE(written.size() == 1);
  const std::string text = slurp(written[0]);
  CHECK(text.find("# config_hash=") == 0);
  CHECK(text.find(" seed=7 ") != std::string::npos);
  CHECK(text.find("version=") != std::string::npos);
  CHECK(text.find("policy,distribution,bits,horizon") != std::string::npos);
  // volatile stops the compiler from folding expm1 at compile time, where it
  // can round an ulp away from the runtime libm the simulator calls.
  volatile double one = 1.0;
  char expected[40];
  std::snprintf(expected, sizeof(expected), "%.17g", 2.0 * std::expm1(one));
  CHECK(text.find(expected) != std::string::npos);
}

TEST_CASE("identical runs produce byte-identical reports") {
  TempDir dir("hdsched_repro_test");
  json j = base_config();
  j["distribution"] = "trunc_exp:g_min=0.5,g_max=50";
  j["policies"] = {"equal", "oneshot", "relaxed"};
  j["reports"] = {"costs", "moments", "thresholds", "snr"};
  j["max_moment"] = 8;
  j["n_trials"] = 500;

  j["output_dir"] = (dir.path / "a").string();
  const auto first = hdsched::run(ExperimentConfig::from_json(j));
  j["output_dir"] = (dir.path / "b").string();
  const auto second = hdsched::run(ExperimentConfig::from_json(j));
  REQUIRE(first.size() == second.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    CHECK(slurp(first[i]) == slurp(second[i]));
  }
}

TEST_CASE("run rejects invalid configs wholesale") {
  json j = base_config();
  j.erase("seed");
  CHECK_THROWS_AS(hdsched::run(ExperimentConfig::from_json(j)), std::invalid_argument);
}

TEST_CASE("dp report persists the value table cache and reuses it") {
  TempDir dir("hdsched_cache_test");
  json j;
  j["distribution"] = "trunc_exp:g_min=0.5,g_max=50";
  j["horizon"] = 2;
  j["reports"] = {"dp"};
  j["grid"] = {{"beta_max", 2.0}, {"n_beta", 128}, {"n_g", 32}};
  j["output_dir"] = (dir.path / "out").string();
  const ExperimentConfig cfg = ExperimentConfig::from_json(j);
  hdsched::run(cfg);

  const fs::path cache_dir = hdsched::effective_cache_dir(cfg);
  int bins = 0;
  for (const auto& entry : fs::directory_iterator(cache_dir)) {
    if (entry.path().extension() == ".bin") ++bins;
  }
  CHECK(bins == 1);

  // A second run must load the cached table rather than recompute it.
  const auto dist = hdsched::parse_distribution(cfg.distribution);
  hdsched::GridConfig grid;
  grid.beta_max = 2.0;
  grid.n_beta = 128;
  grid.n_g = 32;
  const auto table =
      hdsched::obtain_value_table(dist, 2, grid, cache_dir.string(), false);
  CHECK(table->horizon() == 2);

  // Corrupt cache entries are ignored, not fatal.
  for (const auto& entry : fs::directory_iterator(cache_dir)) {
    std::ofstream scribble(entry.path(), std::ios::binary | std::ios::trunc);
    scribble << "garbage";
  }
  const auto again =
      hdsched::obtain_value_table(dist, 2, grid, cache_dir.string(), false);
  CHECK(again->cost(2, 1.0) == doctest::Approx(table->cost(2, 1.0)).epsilon(1e-12));
}

TEST_CASE("threshold report prints the open first level as inf") {
  TempDir dir("hdsched_thresh_test");
  json j;
  j["distribution"] = "trunc_exp:g_min=0.5,g_max=50";
  j["horizon"] = 3;
  j["reports"] = {"thresholds"};
  j["output_dir"] = (dir.path / "out").string();
  const auto written = hdsched::run(ExperimentConfig::from_json(j));
  const std::string text = slurp(written[0]);
  CHECK(text.find("1,inf,0") != std::string::npos);
}

TEST_CASE("unrepresentable config files fail with a located message") {
  TempDir dir("hdsched_badcfg_test");
  const fs::path bad = dir.path / "bad.json";
  {
    std::ofstream out(bad);
    out << "{ \"bits\": [1, }";
  }
  try {
    ExperimentConfig::from_file(bad.string());
    FAIL("expected invalid_argument");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("bad.json") != std::string::npos);
  }
  CHECK_THROWS_AS(ExperimentConfig::from_file((dir.path / "missing.json").string()),
                  std::invalid_argument);
}
