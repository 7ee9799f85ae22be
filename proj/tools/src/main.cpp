#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "mepsim_cli/commands.hpp"
#include "mepsim_cli/pipeline.hpp"

namespace {

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("mepsim");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("MEPSIM_LOG")) {
    spdlog::set_level(spdlog::level::from_str(env));
  }
}

}  // namespace

int main(int argc, char** argv) {
  using namespace mepsim::cli;
  setup_logging();

  CLI::App app{"Mutual-exclusive propagation simulator and trace analyzer"};
  app.require_subcommand(1);

  auto add_common = [](CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--config", o.config, "JSON experiment config")->check(CLI::ExistingFile);
    cmd->add_option("--override", o.overrides, "KEY=VALUE config override (repeatable)");
    cmd->add_option("--out", o.out, "output directory");
  };

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "simulate, analyze and write all artifacts");
  add_common(run_cmd, run);
  run_cmd->add_option("--seed", run.seed, "root seed");
  run_cmd->add_option("--horizon-ns", run.horizon_ns, "simulated horizon in ns");

  AnalyzeOptions analyze;
  auto* analyze_cmd = app.add_subcommand("analyze", "re-analyze a persisted trace");
  add_common(analyze_cmd, analyze);
  analyze_cmd->add_option("trace", analyze.trace, "trace.csv")->required();

  SweepOptions sweep;
  std::string seed_range;
  auto* sweep_cmd = app.add_subcommand("sweep", "run a parameter sweep");
  add_common(sweep_cmd, sweep);
  sweep_cmd->add_option("--seeds", seed_range, "inclusive seed range A..B");
  sweep_cmd->add_option("--horizon-ns", sweep.horizon_ns, "simulated horizon in ns");
  sweep_cmd->add_option("--jobs", sweep.jobs, "parallel runs (default: all processors)");

  TopologyOptions topo;
  auto* topo_cmd = app.add_subcommand("topology", "print graph statistics and derived timing");
  topo_cmd->add_option("spec", topo.spec, "ring:N, grid:RxC or hypercube:D")->required();
  topo_cmd->add_option("--d-ns", topo.d_ns, "maximum signal delay in ns");
  topo_cmd->add_option("--rho", topo.rho, "clock drift bound");
  topo_cmd->add_option("--param-mode", topo.param_mode, "paper-sim or strict-constraint");
  topo_cmd->add_option("--lg-override", topo.lg_override, "longest simple path override");
  topo_cmd->add_option("--lg-exact-cap", topo.lg_exact_cap, "max n for exact path search");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  return guarded(
      [&]() -> int {
        if (*run_cmd) return cmd_run(run);
        if (*analyze_cmd) return cmd_analyze(analyze);
        if (*sweep_cmd) {
          if (!seed_range.empty()) sweep.seeds = parse_seed_range(seed_range);
          return cmd_sweep(sweep);
        }
        return cmd_topology(topo, std::cout);
      },
      std::cerr);
}
