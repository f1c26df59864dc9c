#include "thetafv/app/runner.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using namespace thetafv::app;

int run_command(const std::string& config_path, const std::string& out_dir) {
  RunConfig config = load_config(config_path);
  if (!out_dir.empty()) config.out_dir = out_dir;
  const RunReport report = run(config, config.out_dir);
  std::cout << format_report(report) << std::flush;
  return report.exit_code();
}

int sweep_command(const std::string& config_path, const std::string& param, const std::string& values,
                  const std::string& out_dir) {
  RunConfig config = load_config(config_path);
  if (!out_dir.empty()) config.out_dir = out_dir;
  const auto rows = sweep(config, param, split_values(values), config.out_dir);
  for (const auto& r : rows) {
    std::cout << param << '=' << r.value << ": " << thetafv::to_string(r.report.outcome) << " after "
              << r.report.iterations << " iterations, residual " << format_double(r.report.final_residual) << '\n';
  }
  std::cout << "summary: " << (config.out_dir / "sweep_summary.csv").string() << '\n' << std::flush;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Theta-scheme finite-volume solver: batch runs and parameter sweeps"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  auto* run = app.add_subcommand("run", "Run one configuration and write history/profile CSVs");
  run->add_option("--config", config_path, "JSON run configuration")->required();
  run->add_option("--out-dir", out_dir, "Output directory (overrides output.dir)");

  std::string param;
  std::string values;
  auto* sw = app.add_subcommand("sweep", "Run one configuration per value of a parameter");
  sw->add_option("--config", config_path, "JSON run configuration")->required();
  sw->add_option("--param", param, "Dotted config key to vary, e.g. controller.cfl")->required();
  sw->add_option("--values", values, "Comma-separated values")->required();
  sw->add_option("--out-dir", out_dir, "Output directory (overrides output.dir)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (run->parsed()) return run_command(config_path, out_dir);
    return sweep_command(config_path, param, values, out_dir);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
  } catch (const OutputError& e) {
    std::cerr << "output error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return 1;
}
