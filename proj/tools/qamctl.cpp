#include <cstdint>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "qam/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"qamctl: quantum associative memory experiments"};
  app.require_subcommand(1);

  std::string output_dir;
  std::uint64_t seed_override = 0;
  std::size_t threads = 1;
  double tolerance = 0.0;
  app.add_option("--output-dir", output_dir, "directory for results (default: $QAM_OUTPUT_DIR)");
  auto* seed_opt = app.add_option("--seed-override", seed_override, "replace the config seed");
  app.add_option("--threads", threads, "worker threads for ensembles")->check(CLI::PositiveNumber);
  auto* tol_opt = app.add_option("--tolerance", tolerance, "validation tolerance")->check(CLI::PositiveNumber);

  std::string source;
  auto* run = app.add_subcommand("run", "run an experiment from a config file or preset name");
  run->fallthrough();
  run->add_option("config", source, "config path or preset name")->required();
  auto* list = app.add_subcommand("list-presets", "list shipped presets");

  CLI11_PARSE(app, argc, argv);

  if (list->parsed()) {
    for (const auto& p : qam::presets())
      std::cout << std::left << std::setw(24) << p.name << p.description << '\n';
    return 0;
  }

  qam::RunOptions options;
  if (!output_dir.empty()) options.output_dir = output_dir;
  if (*seed_opt) options.seed_override = seed_override;
  if (*tol_opt) options.tolerance = tolerance;
  options.threads = threads;
  try {
    const qam::RunResult r = qam::run_source(source, options);
    if (r.exit_code == 0 || r.exit_code == 2) {
      if (r.bundle.contains("metrics")) std::cout << r.bundle["metrics"].dump(2) << '\n';
      if (!r.output_dir.empty()) std::cerr << "results written to " << r.output_dir.string() << '\n';
    }
    if (!r.message.empty()) std::cerr << r.message << '\n';
    return r.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
