// cfsim: batch front-end for the cell-free uplink simulator.
//
//   cfsim run     run a configured experiment and export plot-ready data
//   cfsim figure  run a named figure preset and check its claims
//
// Configs are JSON; any field can be overridden from the command line
// with repeated --set key=value flags.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cfsim/config.hpp"
#include "cfsim/engine.hpp"
#include "cfsim/presets.hpp"
#include "cfsim/report.hpp"
#include "cfsim/version.hpp"

namespace {

int run_command(const std::string& config_path, const std::vector<std::string>& overrides) {
  cfsim::RunConfig config = config_path.empty()
                                ? cfsim::parse_config("", overrides)
                                : cfsim::load_config(config_path, overrides);

  cfsim::preflight_output_dir(config.output_dir);
  const cfsim::SweepResult sweep =
      cfsim::run_sweep(config.params, config.sweep_axis, config.sweep_values,
                       config.combos(), config.threads);
  const std::vector<std::string> files =
      cfsim::emit_results(sweep, config, config.output_dir);

  for (const cfsim::PointRecord& rec : sweep.points) {
    std::cout << cfsim::sweep_axis_name(sweep.axis) << "="
              << cfsim::format_number(rec.axis_value) << " "
              << cfsim::scheme_name(rec.scheme) << "/" << cfsim::csi_mode_name(rec.csi)
              << ": mean sum SE " << cfsim::format_number(rec.mean_sum_se)
              << " bit/s/Hz (" << rec.ue_se.size() << " samples, " << rec.outage_total
              << " outage)\n";
  }
  for (const std::string& f : files) {
    std::cout << "wrote " << f << "\n";
  }
  return 0;
}

int figure_command(const std::string& name, const std::string& scale,
                   const cfsim::FigureOptions& options) {
  const cfsim::FigureOutcome outcome = cfsim::reproduce_figure(name, scale, options);
  int passed = 0;
  for (const cfsim::ClaimResult& c : outcome.claims) {
    std::cout << (c.passed ? "[pass] " : "[FAIL] ") << c.name << " — " << c.detail << "\n";
    passed += c.passed ? 1 : 0;
  }
  std::cout << outcome.figure << " (" << outcome.scale << "): " << passed << "/"
            << outcome.claims.size() << " claims passed\n";
  for (const std::string& f : outcome.files) {
    std::cout << "wrote " << f << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cell-free massive MIMO uplink Monte Carlo simulator"};
  app.set_version_flag("--version", std::string(cfsim::kVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;

  CLI::App* run = app.add_subcommand("run", "run a configured experiment");
  run->add_option("-c,--config", config_path, "JSON config file (defaults when omitted)");
  run->add_option("-s,--set", overrides, "override: key=value (repeatable)");
  run->add_option("-o,--out", out_dir, "output directory (overrides config)");
  run->add_option("--seed", seed, "master seed (overrides config)");
  run->add_option("-t,--threads", threads, "worker threads, 0 = hardware count");

  std::string fig_name;
  std::string scale = "desk";
  cfsim::FigureOptions fig_options;
  bool force = false;

  CLI::App* figure = app.add_subcommand("figure", "reproduce a figure preset");
  figure->add_option("name", fig_name, "fig2 | fig3 | fig4 | fig5")->required();
  figure->add_option("--scale", scale, "desk (default) or full");
  figure->add_option("-o,--out", fig_options.out_dir, "output directory");
  figure->add_option("--seed", fig_options.seed, "master seed override");
  figure->add_flag("--force", force, "run full scale even over the runtime budget");
  figure->add_option("--budget-seconds", fig_options.budget_seconds,
                     "estimated-runtime refusal threshold for full scale");
  figure->add_option("-t,--threads", fig_options.threads, "worker threads, 0 = hardware count");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      // Flag-level settings ride the override mechanism so precedence
      // (file < --set < flags) and validation live in one place.
      std::vector<std::string> all = overrides;
      if (!out_dir.empty()) all.push_back("output_dir=" + out_dir);
      if (seed) all.push_back("master_seed=" + std::to_string(*seed));
      if (threads) all.push_back("threads=" + std::to_string(*threads));
      return run_command(config_path, all);
    }
    fig_options.force = force;
    return figure_command(fig_name, scale, fig_options);
  } catch (const cfsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const cfsim::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 3;
  } catch (const cfsim::BudgetError& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
