#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mepsim/engine.hpp"
#include "mepsim/timing.hpp"
#include "mepsim/topology.hpp"

namespace mepsim::cli {

struct SweepSpec {
  /// One of: n, p, rho, topology.
  std::string axis;
  nlohmann::json values = nlohmann::json::array();
  std::size_t replicas = 1;
};

/// Everything needed to reproduce one experiment. Serialized as a flat JSON
/// object; unknown keys are rejected.
struct ExperimentConfig {
  /// ring:N, grid:RxC, hypercube:D, or file:PATH (edge list).
  std::string topology = "ring:16";
  TimeNs d_min_ns = 0;
  TimeNs d_max_ns = 1'000'000;
  double rho = 0.0;
  std::string delay_model = "uniform";
  std::string schedule_file;
  double omission_p = 0.0;
  std::string param_mode = "paper-sim";
  TimeNs tau0_ns = 0;
  TimeNs tau1_ns = 0;
  TimeNs tau2_ns = 0;
  /// 0 selects lemma5_bound + horizon_periods * tau2.
  TimeNs horizon_ns = 0;
  std::int64_t horizon_periods = 200;
  std::uint64_t seed = 1;
  std::size_t replicas = 1;
  bool dmin_compensation = false;
  /// random-uniform or adversarial.
  std::string init_mode = "random-uniform";
  /// uniform, adversarial or zero.
  std::string drift_mode = "uniform";
  bool association_checks = true;
  std::optional<std::size_t> lg_override;
  std::size_t lg_exact_cap = kDefaultExactSearchCap;
  /// Rounds (k as in the metrics series) rendered as pattern maps; empty
  /// renders the first and last stable rounds.
  std::vector<std::int64_t> pattern_ks;
  std::optional<SweepSpec> sweep;

  /// Directory relative file paths are resolved against.
  std::filesystem::path base_dir;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::filesystem::path& path);

/// KEY=VALUE; VALUE is read as JSON when it parses, as a string otherwise.
/// Dotted keys address nested objects (sweep.axis=n).
void apply_override(ExperimentConfig& cfg, std::string_view assignment);

/// Graph, statistics, parameters and horizon implied by a config.
struct Experiment {
  Graph graph;
  TopologyStats stats;
  SimParams params;
  TimeNs horizon = 0;
  DelaySchedule schedule;
};

Experiment resolve(const ExperimentConfig& cfg);
Models make_models(const ExperimentConfig& cfg, const Experiment& exp, std::uint64_t seed);
InitState make_init(const ExperimentConfig& cfg, const Experiment& exp, std::uint64_t seed);

}  // namespace mepsim::cli
