#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mepsim/timing.hpp"
#include "mepsim_cli/config.hpp"

namespace mepsim::cli {

struct CommonOptions {
  std::optional<std::filesystem::path> config;
  std::vector<std::string> overrides;
  std::filesystem::path out = "out";
};

struct RunOptions : CommonOptions {
  std::optional<std::uint64_t> seed;
  std::optional<TimeNs> horizon_ns;
};

struct AnalyzeOptions : CommonOptions {
  std::filesystem::path trace;
};

struct SweepOptions : CommonOptions {
  /// Inclusive seed range; replaces the per-point replica seeds.
  std::optional<std::pair<std::uint64_t, std::uint64_t>> seeds;
  std::optional<TimeNs> horizon_ns;
  /// 0: one worker per available processor.
  std::size_t jobs = 0;
};

struct TopologyOptions {
  std::string spec;
  TimeNs d_ns = 1'000'000;
  double rho = 0.0;
  std::string param_mode = "paper-sim";
  std::optional<std::size_t> lg_override;
  std::size_t lg_exact_cap = kDefaultExactSearchCap;
};

/// Config file (if any) with the overrides applied on top.
ExperimentConfig build_config(const CommonOptions& options);

/// Each command returns the process exit status and throws mepsim::Error on
/// configuration, validation and IO failures.
int cmd_run(const RunOptions& options);
int cmd_analyze(const AnalyzeOptions& options);
int cmd_sweep(const SweepOptions& options);
int cmd_topology(const TopologyOptions& options, std::ostream& out);

/// "A..B" -> (A, B).
std::pair<std::uint64_t, std::uint64_t> parse_seed_range(const std::string& text);

/// Topology spec for a sweep point on the "n" axis, keeping the family of
/// `base`.
std::string resize_topology(const std::string& base, std::int64_t n);

/// Runs `body`, turning exceptions into a one-line "error: <kind>: <message>"
/// on `err` and the matching exit status.
int guarded(const std::function<int()>& body, std::ostream& err);

}  // namespace mepsim::cli
