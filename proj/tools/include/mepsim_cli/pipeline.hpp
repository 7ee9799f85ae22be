#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mepsim/analysis.hpp"
#include "mepsim/error.hpp"
#include "mepsim/trace.hpp"
#include "mepsim_cli/config.hpp"

namespace mepsim::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUnexpected = 1,
  kExitNotStabilized = 2,
  kExitCheckFailed = 3,
  kExitInvalid = 4,
  kExitIo = 5,
};

/// Exit code for an error raised by the library.
int exit_code_for(ErrorKind kind);

struct CheckResult {
  std::string name;
  /// Asserted checks decide the exit code; the rest are informational.
  bool asserted = false;
  bool pass = true;
  std::string detail;
};

struct Analysis {
  StabilizationReport stabilization;
  SeriesMetrics series;
  std::optional<AssociationCheck> association;
  std::vector<CheckResult> checks;

  int exit_code() const;
};

/// Options that affect analysis output, taken from the config.
struct AnalysisOptions {
  bool association_checks = true;
  std::vector<std::int64_t> pattern_ks;
};

AnalysisOptions analysis_options(const ExperimentConfig& cfg);

Trace run_simulation(const ExperimentConfig& cfg, const Experiment& exp, std::uint64_t seed);
Analysis analyze(const Trace& trace, const AnalysisOptions& options);

/// Metrics document; depends only on the trace and the analysis.
nlohmann::json metrics_json(const Trace& trace, const Analysis& analysis);

/// Writes metrics.json, plotdata/ and patterns/ into `dir`.
void write_analysis_artifacts(const std::filesystem::path& dir, const Trace& trace,
                              const Analysis& analysis, const AnalysisOptions& options);

/// Writes config.json and manifest.json.
void write_manifest(const std::filesystem::path& dir, const ExperimentConfig& cfg,
                    std::uint64_t seed, const std::string& command);

/// Stable JSON text: two-space indent and a trailing newline.
std::string dump_json(const nlohmann::json& j);
void write_text(const std::filesystem::path& path, const std::string& text);

/// Text pattern map: one row per grid row ('#' source, '.' other); non-grid
/// topologies render as a single row.
std::string pattern_map_text(const Graph& g, const RoundSummary& round);
/// SVG heatmap of the same map.
std::string pattern_map_svg(const Graph& g, const RoundSummary& round);
/// SVG scatter of per-cell offsets against each round's first trigger.
std::string offsets_svg(const StabilizationReport& report);

}  // namespace mepsim::cli
