#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qam/runner.hpp"

using namespace qam;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("qam_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Json simple_qam() {
  return Json::parse(R"({
    "model": {"orthogonal": [{"state": [[1, 0]]}, {"rho": [[0.25, 0], [0, 0.75]], "decaying_dim": 2}],
              "kappa": 0.5},
    "experiment": "validate",
    "seed": 1
  })");
}

RunResult run_in(const Json& cfg, const std::string& name) {
  RunOptions o;
  o.output_dir = scratch(name);
  return run_config(cfg, o);
}

}  // namespace

TEST_CASE("validate writes a complete bundle") {
  const RunResult r = run_in(simple_qam(), "validate");
  REQUIRE(r.exit_code == 0);
  const Json out = Json::parse(slurp(r.output_dir / "results.json"));
  for (const char* key : {"config", "metrics", "tables", "matrices", "provenance"}) CHECK(out.contains(key));
  CHECK_FALSE(out.contains("csv"));
  CHECK(out["metrics"]["passes"].get<bool>());
  CHECK(out["metrics"]["cptp"]["passes"].get<bool>());
  CHECK(out["metrics"]["dim"].get<int>() == 6);
  CHECK(out["metrics"]["validation"]["C3_leakage"].get<double>() < 1e-10);
  CHECK(out["provenance"]["version"] == kVersion);
  CHECK(out["provenance"]["seed"].get<int>() == 1);
  CHECK(fs::exists(r.output_dir / "timing.json"));
}

TEST_CASE("strict configuration parsing") {
  SUBCASE("unknown top-level key") {
    Json cfg = simple_qam();
    cfg["sede"] = 3;
    CHECK(run_in(cfg, "strict1").exit_code == 3);
  }
  SUBCASE("unknown parameter") {
    Json cfg = simple_qam();
    cfg["parameters"] = Json{{"iteratons", 5}};
    CHECK(run_in(cfg, "strict2").exit_code == 3);
  }
  SUBCASE("unknown key inside the pattern set") {
    Json cfg = simple_qam();
    cfg["model"]["orthogonal"][0]["decay_dim"] = 1;
    CHECK(run_in(cfg, "strict3").exit_code == 3);
  }
  SUBCASE("wrong type") {
    Json cfg = simple_qam();
    cfg["seed"] = "one";
    CHECK(run_in(cfg, "strict4").exit_code == 3);
  }
  SUBCASE("unknown experiment") {
    Json cfg = simple_qam();
    cfg["experiment"] = "teleport";
    const RunResult r = run_in(cfg, "strict5");
    CHECK(r.exit_code == 3);
    CHECK(r.message.find("UnknownExperiment") != std::string::npos);
  }
  SUBCASE("experiment not offered by the model") {
    const Json cfg = Json::parse(R"({"model": "hopfield", "experiment": "validate"})");
    CHECK(run_in(cfg, "strict6").exit_code == 3);
  }
  SUBCASE("nothing is written on a config error") {
    Json cfg = simple_qam();
    cfg["bogus"] = true;
    const RunResult r = run_in(cfg, "strict7");
    CHECK_FALSE(fs::exists(scratch("strict7") / "results.json"));
    CHECK(r.exit_code == 3);
  }
}

TEST_CASE("library errors map to exit code 2") {
  Json cfg = simple_qam();
  cfg["model"]["kappa"] = 1.5;
  const RunResult r = run_in(cfg, "rate");
  CHECK(r.exit_code == 2);
  CHECK(r.message.find("RateOutOfRange") != std::string::npos);
}

TEST_CASE("unreadable config file") {
  const fs::path dir = scratch("badfile");
  fs::create_directories(dir);
  std::ofstream(dir / "cfg.json") << "{ not json";
  CHECK(run_source((dir / "cfg.json").string(), {}).exit_code == 3);
  CHECK(run_source("no-such-preset-or-file", {}).exit_code == 3);
}

TEST_CASE("reruns are byte-identical") {
  const Json cfg = Json::parse(R"({
    "model": "walk", "experiment": "trajectory",
    "parameters": {"patterns": ["011", "111"], "initial": "000", "t_final": 2.0, "dt": 0.01,
                   "trajectories": 20, "record_every": 20},
    "seed": 5
  })");
  RunOptions a;
  a.output_dir = scratch("det_a");
  RunOptions b;
  b.output_dir = scratch("det_b");
  b.threads = 3;
  const RunResult ra = run_config(cfg, a);
  const RunResult rb = run_config(cfg, b);
  REQUIRE(ra.exit_code == 0);
  REQUIRE(rb.exit_code == 0);
  CHECK(slurp(ra.output_dir / "trajectory_ensemble.csv") == slurp(rb.output_dir / "trajectory_ensemble.csv"));
  const RunResult rc = run_config(cfg, a);
  CHECK(slurp(rc.output_dir / "results.json") == slurp(ra.output_dir / "results.json"));
}

TEST_CASE("seed override changes the provenance") {
  RunOptions o;
  o.output_dir = scratch("override");
  o.seed_override = 99;
  const RunResult r = run_config(simple_qam(), o);
  CHECK(r.bundle["provenance"]["seed"].get<int>() == 99);
}

TEST_CASE("presets") {
  const auto& list = presets();
  REQUIRE(list.size() == 4);
  CHECK(list[0].name == "walk-fig4");
  CHECK(list[3].name == "gus-sec7c");
  CHECK(find_preset("gus-sec7c").has_value());
  CHECK_FALSE(find_preset("nope").has_value());
  const Json bundle = execute(*find_preset("gus-sec7c"), {});
  const auto& exact = bundle["metrics"]["capacity_at_optimal_success"]["alpha_qc_exact"];
  CHECK(exact["exact"] == "1/5");
  CHECK(bundle["metrics"]["capacity"]["alpha_q"]["exact"] == "3/10");
}

TEST_CASE("output directory from the environment") {
  const fs::path dir = scratch("env");
  ::setenv(kOutputDirEnv, dir.c_str(), 1);
  const RunResult r = run_config(simple_qam(), {});
  ::unsetenv(kOutputDirEnv);
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(dir / "results.json"));
}

TEST_CASE("shipped preset files match the built-in presets") {
  for (const auto& p : presets()) {
    const fs::path file = fs::path(QAM_SOURCE_DIR) / "presets" / (p.name + ".json");
    REQUIRE(fs::exists(file));
    CHECK(Json::parse(slurp(file)) == p.config);
  }
}
