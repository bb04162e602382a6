// graymol: gray-molasses trajectory simulator and analysis toolkit.
//
// Subcommands: cool, sweep, validate, eit, tof. Each takes a JSON config
// (see configs/) whose "mode" must match the subcommand; --out overrides the
// output directory, --threads the worker count (GRAYMOL_THREADS as fallback).

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "graymol/harness.hpp"
#include "graymol/validate.hpp"

using namespace graymol;

int main(int argc, char** argv) {
  CLI::App app{"gray molasses wave-function Monte Carlo toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_override;
  int threads = 0;
  bool quick = false;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("--config", config_path, "JSON run config");
    if (needs_config) opt->required();
    sub->add_option("--out", out_override, "output directory override");
    sub->add_option("--threads", threads, "worker threads");
    return sub;
  };
  auto* cool = add_common(app.add_subcommand("cool", "run one ensemble"), true);
  auto* sweep =
      add_common(app.add_subcommand("sweep", "run a parameter sweep"), true);
  auto* validate = add_common(
      app.add_subcommand("validate", "run the built-in physics checks"),
      false);
  validate->add_flag("--quick", quick, "fast subset (< 1 min)");
  auto* eit = add_common(
      app.add_subcommand("eit", "synthesize/fit an EIT lock spectrum"), true);
  auto* tof = add_common(
      app.add_subcommand("tof", "time-of-flight thermometry from frames"),
      true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) {
      const auto verdict = run_validation(quick);
      if (!out_override.empty()) {
        std::filesystem::create_directories(out_override);
        std::ofstream(std::filesystem::path(out_override) / "validate.json",
                      std::ios::binary)
            << verdict.dump(2) << "\n";
      }
      std::cout << verdict.dump(2) << "\n";
      return verdict["pass"].get<bool>() ? 0 : 1;
    }

    RunConfig cfg = load_config(config_path);
    const RunMode want = cool->parsed()    ? RunMode::cool
                         : sweep->parsed() ? RunMode::sweep
                         : eit->parsed()   ? RunMode::eit
                                           : RunMode::tof;
    if (cfg.mode != want)
      throw ConfigError("config mode '" + to_string(cfg.mode) +
                        "' does not match subcommand '" + to_string(want) +
                        "'");
    if (!out_override.empty()) cfg.output_dir = out_override;

    switch (cfg.mode) {
      case RunMode::cool: return cmd_cool(cfg, threads);
      case RunMode::sweep: return cmd_sweep(cfg, threads);
      case RunMode::eit: return cmd_eit(cfg, threads);
      case RunMode::tof: return cmd_tof(cfg, threads);
      default: break;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
