#pragma once

#include <cstdint>
#include <vector>

#include "mepsim/analysis.hpp"
#include "mepsim/engine.hpp"
#include "mepsim/timing.hpp"
#include "mepsim/topology.hpp"
#include "mepsim/trace.hpp"

namespace mepsim::testing {

inline constexpr TimeNs kMs = 1'000'000;

/// Paper-sim parameters for `g` with delay bound d and drift bound rho.
SimParams params_for(const Graph& g, TimeNs d, double rho = 0.0,
                     ParamMode mode = ParamMode::kPaperSim);

struct RunSetup {
  double rho = 0.0;
  double omission_p = 0.0;
  TimeNs d = kMs;
  TimeNs d_min = 0;
  bool adversarial_init = false;
  bool adversarial_delays = false;
  bool adversarial_drifts = false;
  ParamMode mode = ParamMode::kPaperSim;
  /// Horizon = lemma5_bound + periods * tau2.
  std::int64_t periods = 40;
};

/// Seeded engine run with the usual stream layout (drifts and init drawn
/// from their own named streams). stats are filled in.
Trace seeded_run(const Graph& g, const RunSetup& setup, std::uint64_t seed);

/// Propagation built from (cell, time, pioneer) triples.
struct Trig {
  CellId cell;
  TimeNs time;
  CellId pioneer;
};
Propagation propagation_of(std::size_t n, const std::vector<Trig>& triggers);

/// Graph with edges given inline.
Graph graph_of(std::size_t n, std::vector<Edge> edges);

}  // namespace mepsim::testing
