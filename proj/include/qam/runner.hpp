#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qam/serialize.hpp"

namespace qam {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kOutputDirEnv = "QAM_OUTPUT_DIR";

struct Preset {
  std::string name;
  std::string description;
  Json config;
};

const std::vector<Preset>& presets();
std::optional<Json> find_preset(const std::string& name);

struct RunOptions {
  std::optional<std::filesystem::path> output_dir;
  std::optional<std::uint64_t> seed_override;
  std::size_t threads = 1;
  std::optional<double> tolerance;
};

struct RunResult {
  int exit_code = 0;  // 0 success, 2 validation failure, 3 config error, 1 other
  Json bundle;        // config echo, metrics, tables, matrices, provenance
  std::filesystem::path output_dir;
  std::string message;
};

// Runs one experiment and writes results.json, one CSV per table and timing.json.
RunResult run_config(const Json& config, const RunOptions& options);
// `source` is a config file path or a preset name.
RunResult run_source(const std::string& source, const RunOptions& options);

// Executes the experiment without touching the filesystem.
Json execute(const Json& config, const RunOptions& options);

}  // namespace qam
