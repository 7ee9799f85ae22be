#include "mepsim/oracle.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <tuple>

#include "mepsim/error.hpp"

namespace mepsim {

namespace {

struct OracleCell {
  bool excited = false;
  bool receptive = true;  // tracked separately, must always equal !excited
  TimeNs origin = 0;
  TimeNs restore_offset = 0;
  TimeNs liveness_offset = 0;
  Drift drift;
  std::optional<Seq> latest;
};

struct InFlight {
  TimeNs arrival;
  CellId from;
  CellId to;
  std::optional<Seq> emit;
};

void check_config(const OracleConfig& cfg) {
  const std::size_t n = cfg.graph.node_count();
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::kConfiguration, msg); };
  if (n == 0 || n > OracleConfig::kMaxCells) fail("oracle handles 1 to 4 cells");
  if (cfg.step <= 0) fail("oracle step must be positive");
  if (cfg.horizon < 0 || cfg.horizon / cfg.step > OracleConfig::kMaxSteps) {
    fail("oracle horizon exceeds the step budget");
  }
  if (cfg.elapsed.size() != n) fail("oracle needs one elapsed reading per cell");
  if (!cfg.drifts.empty() && cfg.drifts.size() != n) fail("oracle needs one drift per cell");
  for (const auto& [edge, delays] : cfg.schedule) {
    for (TimeNs d : delays) {
      if (d < cfg.params.d_min || d > cfg.params.d_max) fail("scheduled delay out of bounds");
      if (d % cfg.step != 0) fail("scheduled delays must be multiples of the step");
    }
  }
  for (const PendingSignal& s : cfg.injected) {
    if (s.from >= n || s.to >= n || !cfg.graph.adjacent(s.from, s.to)) {
      fail("injected signal on a non-edge");
    }
    if (s.arrival % cfg.step != 0) fail("injected arrivals must be multiples of the step");
  }
}

}  // namespace

Trace brute_force_simulate(const OracleConfig& cfg) {
  check_config(cfg);
  const Graph& g = cfg.graph;
  const SimParams& prm = cfg.params;
  const std::size_t n = g.node_count();

  std::vector<OracleCell> cells(n);
  for (CellId i = 0; i < n; ++i) {
    cells[i].drift = cfg.drifts.empty() ? Drift{} : cfg.drifts[i];
    cells[i].restore_offset = cfg.elapsed[i];
    cells[i].liveness_offset = cfg.elapsed[i];
    cells[i].excited = cfg.elapsed[i] < prm.tau0;
    cells[i].receptive = !cells[i].excited;
  }
  std::vector<InFlight> flight;
  for (const PendingSignal& s : cfg.injected) flight.push_back({s.arrival, s.from, s.to, {}});
  std::map<std::pair<CellId, CellId>, std::size_t> cursor;

  Trace trace;
  trace.graph = g;
  trace.params = prm;
  trace.horizon = cfg.horizon;

  // Reading of a cell's timer has reached `threshold` local ticks.
  auto reached = [](const OracleCell& c, TimeNs threshold, TimeNs offset, TimeNs now) {
    const TimeNs remaining = threshold > offset ? threshold - offset : 0;
    return now - c.origin >= local_to_real(remaining, c.drift);
  };

  auto fire = [&](CellId i, TimeNs now, TriggerKind kind, CellId pioneer) {
    OracleCell& c = cells[i];
    const Seq seq = trace.triggers.size();
    trace.triggers.push_back({seq, now, i, kind, pioneer});
    c.excited = true;
    c.receptive = false;
    c.latest = seq;
    c.origin = now;
    c.restore_offset = 0;
    c.liveness_offset = kind == TriggerKind::kInternal && prm.dmin_compensation ? prm.d_min : 0;
    for (CellId j : g.neighbors(i)) {
      auto it = cfg.schedule.find({i, j});
      std::size_t& k = cursor[{i, j}];
      if (it == cfg.schedule.end() || k >= it->second.size()) {
        throw Error(ErrorKind::kScheduleUnderrun, "delay schedule exhausted on edge " +
                                                      std::to_string(i) + "->" +
                                                      std::to_string(j));
      }
      flight.push_back({now + it->second[k++], i, j, seq});
    }
  };

  for (TimeNs now = 0; now <= cfg.horizon; now += cfg.step) {
    for (;;) {
      // Smallest ready item by (class, cell, sender).
      std::optional<std::tuple<int, CellId, CellId>> best;
      auto offer = [&](int cls, CellId cell, CellId sender) {
        const auto key = std::tuple{cls, cell, sender};
        if (!best || key < *best) best = key;
      };
      for (const InFlight& f : flight) {
        if (f.arrival == now) offer(0, f.to, f.from);
      }
      for (CellId i = 0; i < n; ++i) {
        const OracleCell& c = cells[i];
        if (c.excited && reached(c, prm.tau0, c.restore_offset, now)) offer(1, i, i);
        if (reached(c, prm.tau2, c.liveness_offset, now)) offer(2, i, i);
      }
      if (!best) break;

      const auto [cls, cell, sender] = *best;
      if (cls == 0) {
        std::vector<InFlight> group;
        std::vector<InFlight> rest;
        for (const InFlight& f : flight) {
          (f.arrival == now && f.to == cell ? group : rest).push_back(f);
        }
        flight = std::move(rest);
        std::sort(group.begin(), group.end(),
                  [](const InFlight& a, const InFlight& b) { return a.from < b.from; });
        OracleCell& c = cells[cell];
        // Read the state just before this instant's updates.
        const bool accept = !c.excited;
        const std::optional<Seq> rejecting = c.latest;
        if (accept) fire(cell, now, TriggerKind::kInternal, group.front().from);
        for (const InFlight& f : group) {
          ArrivalRecord rec{now, f.from, cell,
                            accept ? ArrivalOutcome::kAccepted : ArrivalOutcome::kRejected,
                            std::nullopt, f.emit};
          if (!accept) rec.rejecting_seq = rejecting;
          trace.arrivals.push_back(rec);
        }
      } else if (cls == 1) {
        cells[cell].excited = false;
        cells[cell].receptive = true;
      } else {
        fire(cell, now, TriggerKind::kExternal, cell);
      }
    }
    for (const OracleCell& c : cells) {
      if (c.receptive == c.excited) throw std::logic_error("oracle state lost v = 1 - x");
    }
  }
  canonicalize(trace);
  return trace;
}

}  // namespace mepsim
