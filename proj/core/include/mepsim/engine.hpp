#pragma once

#include <cstdint>
#include <optional>
#include <queue>
#include <span>
#include <vector>

#include "mepsim/rng.hpp"
#include "mepsim/timing.hpp"
#include "mepsim/topology.hpp"
#include "mepsim/trace.hpp"

namespace mepsim {

/// A trigger signal in flight.
struct PendingSignal {
  CellId from = 0;
  CellId to = 0;
  TimeNs arrival = 0;

  friend bool operator==(const PendingSignal&, const PendingSignal&) = default;
};

enum class InitMode { kRandomUniform, kAdversarialExplicit };

/// Arbitrary initial state: per-cell elapsed local time on the liveness timer
/// plus optional signals already in flight at t = 0.
struct InitState {
  InitMode mode = InitMode::kRandomUniform;
  std::vector<TimeNs> elapsed;
  std::vector<PendingSignal> injected;

  /// Elapsed readings drawn from U[0, tau2], no injected signals.
  static InitState random_uniform(std::size_t n, const SimParams& params, RngStream& rng);
  /// Elapsed readings drawn from U[0, 2 tau2] (so some start past the
  /// threshold) with up to one spurious signal per directed edge arriving in
  /// [0, d_max].
  static InitState random_adversarial(const Graph& g, const SimParams& params, RngStream& rng);
  static InitState explicit_state(std::vector<TimeNs> elapsed,
                                  std::vector<PendingSignal> injected = {});
};

struct Models {
  DelayModel delay;
  FaultModel fault;
  /// Constant drift per cell; empty means zero drift everywhere.
  std::vector<Drift> drifts;
};

struct CellState {
  bool excited = false;
  /// Real instant the timer was last reset (trigger instant, or 0 initially).
  TimeNs origin = 0;
  /// Local ticks already on the restoration / liveness reading at `origin`.
  TimeNs restore_offset = 0;
  TimeNs liveness_offset = 0;
  Drift drift;
  std::optional<Seq> latest_trigger;
  TimeNs restoration_due = 0;
  TimeNs external_due = 0;
  std::uint32_t restore_epoch = 0;
  std::uint32_t external_epoch = 0;
};

enum class ArrivalResult { kAccepted, kRejected, kOmitted };

/// Discrete-event MEP simulator.
///
/// Events at equal timestamps are processed as arrivals, then restorations,
/// then external triggers; within a class by cell id, then sender id. An
/// arrival therefore observes the state just before any coinciding
/// restoration. Simultaneous arrivals at one cell are handled as one
/// acceptance opportunity whose pioneer is the smallest sender id.
class Simulator {
 public:
  Simulator(const Graph& g, const SimParams& params, Models models, const InitState& init,
            std::uint64_t seed);

  /// Processes every event with time <= horizon.
  void run_until(TimeNs horizon);
  /// Canonicalized trace of everything processed so far.
  Trace finish() &&;

  const CellState& cell(CellId i) const { return cells_.at(i); }
  TimeNs now() const noexcept { return now_; }
  std::span<const TriggerRecord> triggers() const { return triggers_; }
  std::span<const ArrivalRecord> arrivals() const { return arrivals_; }

  /// All signals in `group` reach the same cell at `now`, sorted by sender.
  ArrivalResult handle_arrival(std::span<const PendingSignal> group,
                               std::span<const std::optional<Seq>> emitters, TimeNs now);
  void handle_restoration(CellId cell, TimeNs now);
  TriggerRecord handle_external_trigger(CellId cell, TimeNs now);
  /// Advances the liveness reading of `cell` by d_min local ticks.
  void apply_dmin_compensation(CellId cell);

 private:
  enum class EventClass : std::uint8_t { kArrival = 0, kRestoration = 1, kExternal = 2 };

  struct Event {
    TimeNs time;
    EventClass cls;
    CellId cell;
    CellId sender;
    std::uint64_t order;
    std::uint32_t epoch;
    std::int64_t emit;  // -1: injected signal
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const;
  };

  TriggerRecord trigger(CellId cell, TimeNs now, TriggerKind kind, CellId pioneer);
  void schedule_restoration(CellId cell);
  void schedule_external(CellId cell);
  void push(Event e);

  const Graph& graph_;
  SimParams params_;
  Models models_;
  RngStream delay_rng_;
  RngStream omission_rng_;
  std::vector<CellState> cells_;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::uint64_t next_order_ = 0;
  TimeNs now_ = 0;
  TimeNs processed_until_ = -1;
  std::vector<TriggerRecord> triggers_;
  std::vector<ArrivalRecord> arrivals_;
  std::vector<std::string> warnings_;

  std::vector<PendingSignal> group_;
  std::vector<std::optional<Seq>> group_emitters_;
};

/// Runs one simulation to `horizon` and returns its canonical trace.
Trace simulate(const Graph& g, const SimParams& params, Models models, const InitState& init,
               TimeNs horizon, std::uint64_t seed);

}  // namespace mepsim
