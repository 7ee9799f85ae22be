#pragma once

#include <cstdint>
#include <vector>

#include "mepsim/engine.hpp"
#include "mepsim/timing.hpp"
#include "mepsim/topology.hpp"
#include "mepsim/trace.hpp"

namespace mepsim {

/// Input of the brute-force reference simulator. Delays come only from the
/// explicit per-edge schedule; there are no omissions.
struct OracleConfig {
  static constexpr std::size_t kMaxCells = 4;
  static constexpr std::int64_t kMaxSteps = 100'000'000;

  Graph graph;
  SimParams params;
  DelaySchedule schedule;
  /// Per cell; empty means zero drift.
  std::vector<Drift> drifts;
  std::vector<TimeNs> elapsed;
  std::vector<PendingSignal> injected;
  TimeNs step = 1;
  TimeNs horizon = 0;
};

/// Advances real time in fixed steps, re-evaluating every cell's excitation
/// and timers at each step. Within one step, ready items are handled one at a
/// time in the order arrivals (by receiver, then sender), restorations, then
/// liveness triggers, so signals with zero delay are delivered in the same
/// step. Throws Error(kConfiguration) when the guards are violated.
Trace brute_force_simulate(const OracleConfig& cfg);

}  // namespace mepsim
