// clcoherence: run a named scenario from a JSON config.
//
//   clcoherence <scenario> --config path [--out dir] [--seed N] [--threads K] [--gnuplot-stub]
//
// Exit codes: 0 success, 2 config error, 3 physics guard, 4 oracle-check failure.

#include <clcoherence/clcoherence.hpp>

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

namespace {

constexpr int exit_config = 2;
constexpr int exit_guard = 3;

int run(int argc, char** argv) {
  CLI::App app{"Coherent cathodoluminescence from PINEM-shaped electrons"};
  app.set_version_flag("--version", std::string(clc::version));

  std::string scenario;
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  bool gnuplot = false;
  bool quiet = false;

  app.add_option("scenario", scenario, "Scenario to run")
      ->required()
      ->check(CLI::IsMember(clc::scenario_names()));
  app.add_option("--config,-c", config_path, "Scenario config (JSON, or a previous run's manifest.json)")
      ->required();
  app.add_option("--out,-o", out_dir, "Output directory (default: config output.directory)");
  app.add_option("--seed", seed, "Override detection.seed");
  app.add_option("--threads,-j", threads, "Worker threads (default: $CLCOHERENCE_THREADS, then all cores)")
      ->check(CLI::PositiveNumber);
  app.add_flag("--gnuplot-stub", gnuplot, "Also write a gnuplot script per CSV");
  app.add_flag("--quiet,-q", quiet, "Suppress progress output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_config;
  }

  try {
    auto config = clc::load_config(config_path);
    if (seed) config.detection.seed = *seed;
    clc::RunOptions opts;
    if (!out_dir.empty()) opts.out_dir = out_dir;
    opts.threads = clc::resolve_threads(threads);
    opts.gnuplot_stub = gnuplot;
    opts.config_dir = std::filesystem::path(config_path).parent_path();
    if (!quiet) opts.log = &std::cout;

    const auto result = clc::run_scenario(config, scenario, opts);
    if (!quiet) {
      std::cout << "wrote " << result.outputs.size() << " files to "
                << (out_dir.empty() ? config.output.directory : out_dir) << "\n";
    }
    if (result.exit_code != 0) std::cerr << "oracle-check: mismatch above tolerance\n";
    return result.exit_code;
  } catch (const clc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const clc::PhysicsGuardError& e) {
    std::cerr << "physics guard: " << e.what() << "\n";
    return exit_guard;
  } catch (const clc::GridCoverageError& e) {
    std::cerr << "physics guard: " << e.what() << "\n";
    return exit_guard;
  }
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
