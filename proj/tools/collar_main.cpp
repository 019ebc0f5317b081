// Command-line front end: collar {pca|scalar|psm|ym|verify} [options]

#include "collar/runner.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace {

int report_and_exit(const collar::RunOutcome& out) {
  for (const auto& c : out.report.checks)
    std::printf("%s %s value=%.6g tolerance=%.6g\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.value, c.tolerance);
  for (const auto& w : out.report.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  std::printf("%s: %s (report: %s)\n", out.report.command.c_str(), out.report.pass() ? "pass" : "FAIL",
              out.report_path.c_str());
  return out.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Collar boundary-field simulator and verification suite"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir, check;
  std::int64_t seed = -1;
  bool print_config = false;
  app.add_option("--config", config_path, "TOML run configuration");
  app.add_option("--out", out_dir, "Output directory (overrides output_dir)");
  app.add_option("--seed", seed, "Random seed (overrides seed)")->check(CLI::NonNegativeNumber);
  app.add_option("--check", check, "Only report checks whose name contains this string");
  app.add_flag("--print-config", print_config, "Print the canonical configuration and exit");

  const std::pair<const char*, collar::Theory> commands[] = {
      {"pca", collar::Theory::pca_demo},
      {"scalar", collar::Theory::scalar},
      {"psm", collar::Theory::psigma},
      {"ym", collar::Theory::yangmills},
      {"verify", collar::Theory::verify_all},
  };
  for (const auto& [name, theory] : commands) {
    (void)theory;
    app.add_subcommand(name, std::string("Run the ") + name + " experiment");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    collar::RunConfig cfg = config_path.empty() ? collar::RunConfig{} : collar::load_config(config_path);
    if (config_path.empty()) cfg.tolerances = collar::default_tolerances();
    for (const auto& [name, theory] : commands)
      if (app.got_subcommand(name)) cfg.theory = theory;
    if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    collar::validate_config(cfg);
    if (print_config) {
      std::cout << collar::echo_config(cfg);
      return 0;
    }
    return report_and_exit(collar::run_experiment(cfg, cfg.output_dir, check));
  } catch (const collar::ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const collar::IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return 3;
  } catch (const std::ios_base::failure& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "run failed: %s\n", e.what());
    return 1;
  }
}
