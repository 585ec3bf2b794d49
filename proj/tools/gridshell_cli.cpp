// Command-line front end for the gridshell design pipeline.

#include <fmt/format.h>

#include <chrono>
#include <cstdio>
#include <string>

#include "CLI11.hpp"

#include "gridshell/export.hpp"
#include "gridshell/pipeline.hpp"

namespace {

using gridshell::Stage;

int run(const std::string& command, Stage until, const std::string& config_path, const std::string& out_dir,
        bool seed_check) {
  const auto t0 = std::chrono::steady_clock::now();
  const gridshell::PipelineConfig config = [&] {
    try {
      return gridshell::PipelineConfig::load(config_path);
    } catch (const std::exception& e) {
      throw gridshell::StageError("config", e.what());
    }
  }();

  if (seed_check) {
    bool ok = true;
    for (const auto& c : gridshell::seed_check(config)) {
      fmt::print("{} {:<40} {:.3e} (tol {:.1e})\n", c.passed ? "PASS" : "FAIL", c.name, c.value, c.tolerance);
      ok = ok && c.passed;
    }
    if (!ok) {
      fmt::print(stderr, "[seed-check] invariant suite failed\n");
      return 3;
    }
  }

  const gridshell::PipelineResult result = gridshell::run_pipeline(config, until);
  const std::string dir = out_dir.empty() ? config.output_dir : out_dir;
  try {
    gridshell::write_outputs(result, dir, command);
  } catch (const std::exception& e) {
    throw gridshell::StageError("export", e.what());
  }
  if (until >= Stage::Report) fmt::print("{}", gridshell::report_tables(result));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  fmt::print("{}: wrote outputs to {} in {:.1f} s\n", command, dir, secs);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gridshell design on Laguerre-transformed cyclide patches"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir;
  bool seed_check = false;

  struct Command {
    const char* name;
    const char* help;
    Stage until;
  };
  const Command commands[] = {
      {"surface", "Sample the patch; emit field CSV and OBJ", Stage::Surface},
      {"transform", "Apply the generator list; emit the transformed field", Stage::Transform},
      {"target", "Build the grid; emit model JSON with targets and loads", Stage::Target},
      {"optimize", "Size group radii; emit traces and results", Stage::Optimize},
      {"adjust", "Stress-ratio adjustment of the pre-transformation optimum", Stage::Adjust},
      {"report", "Tables and corner geometry checks", Stage::Report},
      {"pipeline", "Run every stage", Stage::Report},
  };
  for (const Command& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", config_path, "Pipeline config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "Output directory (overrides the config)");
    sub->add_flag("--seed-check", seed_check, "Run the invariant suite first");
  }
  CLI11_PARSE(app, argc, argv);

  for (const Command& c : commands) {
    if (!app.got_subcommand(c.name)) continue;
    try {
      return run(c.name, c.until, config_path, out_dir, seed_check);
    } catch (const gridshell::StageError& e) {
      fmt::print(stderr, "error: {}\n", e.what());
      return 2;
    } catch (const std::exception& e) {
      fmt::print(stderr, "error: [{}] {}\n", c.name, e.what());
      return 2;
    }
  }
  return 1;
}
