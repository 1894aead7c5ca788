#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace fujita::runner {

inline constexpr const char* kToolVersion = "0.1.0";

/// Flat key-value experiment description. Every key is optional except
/// `pipeline`; unknown keys are rejected.
struct ExperimentConfig {
  nlohmann::json raw;  // the document as given, echoed into the manifest
  std::string pipeline;

  // graph
  std::string graph = "lattice";  // lattice | edge-list
  std::string path;               // edge-list file
  int dimension = 1;
  int half_width = 100;
  std::string measure = "degree";  // degree | counting
  std::optional<std::string> center;
  std::optional<int> radius;  // truncation ball; default: largest valid

  // initial data
  std::string data = "constant";  // constant | bump | kernel
  double a0 = 0.5;
  double delta = 1e-3;
  double gamma = 4.0;
  std::optional<int> data_radius;

  // dynamics
  double alpha = 2.0;
  std::vector<double> alphas;
  double horizon = 1000.0;
  double rtol = 1e-10;
  double atol = 1e-12;
  double blowup_rtol = 1e-6;
  int output_points = 40;

  // kernels and fits
  std::vector<double> times{0.5, 1.0, 2.0};
  double tol = 1e-10;
  std::vector<double> t_grid;
  double t_min = 1.0;
  double t_max = 1e4;
  double t_ratio = 1.189207115002721;  // 2^{1/4}
  double t0 = 1.0;
  int r_min = 8;
  int r_max = 64;
  std::string regime = "c1";  // c1 | c2
  std::optional<double> fixed_m;
  std::optional<int> r;
  std::vector<int> r_list;
  std::vector<double> fit_times{4.0, 8.0, 16.0, 32.0};

  // curvature search
  double n = 2.0;
  double curvature = 0.0;
  int trials = 16;
  double search_tolerance = 1e-9;

  std::uint64_t seed = 0;
  std::string output_dir = "out";
};

inline const std::vector<std::string>& pipelines() {
  static const std::vector<std::string> names{"kernel-validate", "curvature-search", "fujita-dichotomy", "blowup",
                                              "certificate",     "volume-fit",       "gaussian-fit",     "squeeze-report"};
  return names;
}

/// Throws Error(ConfigParse).
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

struct StageTiming {
  std::string name;
  double seconds = 0.0;
};

struct FileRecord {
  std::string path;  // relative to the output directory
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct RunManifest {
  nlohmann::json config;
  std::string pipeline;
  std::string tool_version = kToolVersion;
  std::uint64_t seed = 0;
  std::vector<StageTiming> stages;
  std::vector<FileRecord> files;
  std::vector<std::string> caveats;
};

nlohmann::json to_json(const RunManifest& m);

/// Runs the configured pipeline into `out_dir` and writes manifest.json
/// there. Module errors are rethrown as Error(StageFailure) naming the stage.
RunManifest run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir);

std::string sha256_hex(const std::filesystem::path& file);

/// Entry point for the `fujita` executable; returns the process exit code
/// (0 ok, 1 config error, 2 stage failure).
int cli_main(int argc, char** argv);

}  // namespace fujita::runner
