#include <iostream>

#include <CLI11.hpp>

#include "fujita/errors.hpp"
#include "fujita/runner.hpp"

namespace fujita::runner {

int cli_main(int argc, char** argv) {
  CLI::App app{"fujita: heat kernels and semilinear blow-up on weighted graphs"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  std::uint64_t seed = 0;

  auto* run = app.add_subcommand("run", "run the configured pipeline");
  run->add_option("--config", config_path, "JSON config file")->required();
  auto* out_opt = run->add_option("--out", out_dir, "output directory (overrides output_dir)");
  auto* seed_opt = run->add_option("--seed", seed, "seed (overrides the config seed)");

  auto* validate = app.add_subcommand("validate", "parse and validate a config");
  validate->add_option("--config", config_path, "JSON config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    ExperimentConfig config = load_config(config_path);
    if (validate->parsed()) {
      std::cout << "ok: pipeline " << config.pipeline << '\n';
      return 0;
    }
    if (*seed_opt) config.seed = seed;
    if (*out_opt) config.output_dir = out_dir;
    const RunManifest m = run_experiment(config, config.output_dir);
    std::cout << "wrote " << m.files.size() << " files and manifest.json to " << config.output_dir << '\n';
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::ConfigParse ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace fujita::runner
