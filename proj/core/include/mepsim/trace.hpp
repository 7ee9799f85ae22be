#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mepsim/timing.hpp"
#include "mepsim/topology.hpp"

namespace mepsim {

using Seq = std::uint64_t;

enum class TriggerKind : std::uint8_t { kExternal, kInternal };
enum class ArrivalOutcome : std::uint8_t { kAccepted, kRejected, kOmitted };

std::string to_string(TriggerKind kind);
std::string to_string(ArrivalOutcome outcome);

struct TriggerRecord {
  Seq seq = 0;
  TimeNs time = 0;
  CellId cell = 0;
  TriggerKind kind = TriggerKind::kExternal;
  /// The cell itself for external triggers, the accepted sender otherwise.
  CellId pioneer = 0;

  friend bool operator==(const TriggerRecord&, const TriggerRecord&) = default;
};

struct ArrivalRecord {
  TimeNs time = 0;
  CellId from = 0;
  CellId to = 0;
  ArrivalOutcome outcome = ArrivalOutcome::kAccepted;
  /// For rejections: the receiver's latest trigger (absent if the receiver
  /// was excited by its initial state and has not triggered yet).
  std::optional<Seq> rejecting_seq;
  /// Trigger of `from` that emitted the signal; absent for signals injected
  /// as part of an arbitrary initial state.
  std::optional<Seq> emit_seq;

  friend bool operator==(const ArrivalRecord&, const ArrivalRecord&) = default;
};

/// Time-ordered log of one simulation run; the only input of the analysis.
///
/// Canonical order: triggers by (time, cell) with seq equal to the index;
/// arrivals by (time, to, from), ties kept in processing order.
struct Trace {
  static constexpr int kSchemaVersion = 1;

  Graph graph;
  TopologyStats stats;
  SimParams params;
  std::vector<TriggerRecord> triggers;
  std::vector<ArrivalRecord> arrivals;
  TimeNs horizon = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> warnings;
};

/// Same trigger and arrival records (metadata ignored).
bool same_events(const Trace& a, const Trace& b);

/// Sorts into canonical order, renumbering seqs and remapping references.
/// Both the engine and the oracle finish with this step.
void canonicalize(Trace& trace);

}  // namespace mepsim
