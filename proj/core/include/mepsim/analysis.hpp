#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mepsim/timing.hpp"
#include "mepsim/topology.hpp"
#include "mepsim/trace.hpp"

namespace mepsim {

// ---------------------------------------------------------------------------
// Well-separation

/// A closed interval [start, end] of trigger instants and the triggers in it.
struct Segment {
  TimeNs start = 0;
  TimeNs end = 0;
  std::vector<Seq> members;
};

struct SegmentationResult {
  std::vector<Segment> segments;
  /// First pair of trigger instants closer than tau_delta yet farther apart
  /// than tau_pi, if any.
  std::optional<std::pair<TimeNs, TimeNs>> violation;

  bool separated() const { return !violation.has_value(); }
};

/// Greedy clustering of triggers (in trace order) by gaps > tau_delta.
std::vector<Segment> cluster_by_gap(std::span<const TriggerRecord> triggers, TimeNs tau_delta);

/// Splits trigger instants into segments and verifies the separation
/// disjunction |t1 - t2| <= tau_pi or |t1 - t2| > tau_delta for every pair.
/// Requires tau_delta > 3 tau_pi (Error kParameter otherwise).
SegmentationResult segment(std::span<const TriggerRecord> triggers, TimeNs tau_pi,
                           TimeNs tau_delta);
SegmentationResult segment(const Trace& trace, TimeNs tau_pi, TimeNs tau_delta);

// ---------------------------------------------------------------------------
// One-shot propagations

struct PropagationEntry {
  Seq seq = 0;
  CellId cell = 0;
  TimeNs time = 0;
  CellId pioneer = 0;
  /// Index of the pioneer's entry; resolved by make_propagation when unset.
  std::optional<std::size_t> pioneer_entry;
};

/// Triggers of one segment with their pioneer chains.
struct Propagation {
  std::size_t cell_count = 0;
  std::vector<PropagationEntry> entries;
  /// Per entry: the pioneer chain as cells, source first.
  std::vector<std::vector<CellId>> paths;
  /// Per entry: the source cell, or nullopt when the chain never reaches a
  /// self-pioneered trigger (loop or missing link).
  std::vector<std::optional<CellId>> sources;
  /// Entries whose pioneer has no trigger in the segment.
  std::vector<std::size_t> broken_links;
  /// Entries whose chain revisits an entry.
  std::vector<std::size_t> loops;
};

/// Resolves missing pioneer links (the pioneer's latest entry not after the
/// entry itself) and walks every chain.
Propagation make_propagation(std::size_t cell_count, std::vector<PropagationEntry> entries);
Propagation extract_propagation(const Trace& trace, const Segment& segment);

enum class OmepProperty { kValid, kSimple, kComplete, kExclusive, kPropagative };
std::string to_string(OmepProperty property);

struct OmepWitness {
  OmepProperty property;
  std::vector<CellId> cells;
  std::string detail;
};

struct OmepReport {
  bool valid = true;
  bool simple = true;
  bool complete = true;
  bool exclusive = true;
  bool propagative = true;
  std::vector<OmepWitness> witnesses;

  bool all() const { return valid && simple && complete && exclusive && propagative; }
};

/// Checks the five one-shot MEP properties. `allowed_sources` is N_s; empty
/// means every cell may be externally triggered. Complete is checked in the
/// operational form: every cell triggers exactly once in the segment.
OmepReport validate_omep(const Propagation& p, const Graph& g,
                         std::span<const CellId> allowed_sources = {});

// ---------------------------------------------------------------------------
// Propagation patterns

enum class NeighborLabel : std::uint8_t { kParent, kChild, kAlien, kFamily };
enum class CellRole : std::uint8_t { kSource, kSink, kFlow, kUnited };
enum class CellTerrain : std::uint8_t { kBank, kRidge, kFlat };

std::string to_string(NeighborLabel label);
std::string to_string(CellRole role);
std::string to_string(CellTerrain terrain);

struct PatternCounts {
  std::size_t source = 0;  // no parent (includes united)
  std::size_t sink = 0;    // no child (includes united)
  std::size_t flow = 0;
  std::size_t united = 0;
  std::size_t bank = 0;
  std::size_t ridge = 0;
  std::size_t flat = 0;

  friend bool operator==(const PatternCounts&, const PatternCounts&) = default;
};

struct PatternReport {
  /// Exactly one role and one terrain per cell.
  std::vector<CellRole> role;
  std::vector<CellTerrain> terrain;
  /// Per cell, one label per neighbor in adjacency order.
  std::vector<std::vector<NeighborLabel>> neighbor;
  /// Per cell: source of its path, if any.
  std::vector<std::optional<CellId>> region;
  /// False when the propagation failed validation; labels are still filled.
  bool from_valid_omep = true;
  PatternCounts counts;

  bool is_source(CellId i) const {
    return role[i] == CellRole::kSource || role[i] == CellRole::kUnited;
  }
  bool is_sink(CellId i) const {
    return role[i] == CellRole::kSink || role[i] == CellRole::kUnited;
  }
  std::size_t child_count(CellId i) const;
};

/// Labels neighbors (parent, child, alien, family; first match wins) and
/// cells (source/sink/flow/united and bank/ridge/flat). Uses the first entry
/// of each cell; cells without an entry are their own region.
PatternReport classify_patterns(const Propagation& p, const Graph& g);

/// Recomputes counts from the per-cell labels.
PatternCounts count_patterns(const PatternReport& report);

struct BpResult {
  int id = 0;  // 1..7
  bool pass = true;
  std::string detail;
  std::vector<CellId> witness;
};

/// The seven basic pattern properties of a one-shot MEP. Regions come from
/// report.region; p is used for degrees of the underlying entries only.
std::vector<BpResult> check_pattern_properties(const PatternReport& report, const Propagation& p,
                                               const Graph& g);

/// e1: sum over triggers of (trigger time - earliest trigger time).
TimeNs propagation_error(const Propagation& p);

// ---------------------------------------------------------------------------
// Association relations

struct AssociationClasses {
  /// Trigger seqs in the window, in trace order.
  std::vector<Seq> events;
  /// Class id per event under association (~) and strong association.
  std::vector<std::size_t> weak_class;
  std::vector<std::size_t> strong_class;
  std::size_t weak_count = 0;
  std::size_t strong_count = 0;
  /// Time span (max - min) of each weak class.
  std::vector<TimeNs> weak_span;
};

struct AssociationCheck {
  AssociationClasses classes;
  bool partitions_coincide = true;
  std::optional<std::pair<Seq, Seq>> coincide_witness;
  bool span_within_bound = true;
  TimeNs span_bound = 0;
  TimeNs max_span = 0;
  std::optional<std::pair<Seq, Seq>> span_witness;
};

/// Builds both closures over the triggers in [window_start, window_end] and
/// checks that they coincide and that every class spans at most L_G d_max.
/// Accept and reject links come from the arrival records; links with an
/// endpoint outside the window are ignored.
AssociationCheck association_classes(const Trace& trace, TimeNs window_start,
                                     TimeNs window_end);

// ---------------------------------------------------------------------------
// Stabilization and per-round series

struct SegmentationPlan {
  TimeNs tau_pi = 0;
  TimeNs tau_delta = 0;
  /// True when D_G d_max could not be used as the precision bound.
  bool fallback = false;
};

/// Precision bound D_G d_max and a separation threshold just below the
/// smallest possible gap between consecutive rounds.
SegmentationPlan plan_segmentation(const SimParams& params, const TopologyStats& stats);

struct RoundSummary {
  Segment segment;
  TimeNs t_min = 0;
  TimeNs span = 0;
  TimeNs e1 = 0;
  OmepReport omep;
  bool within_precision = true;
  bool valid = false;
  PatternCounts counts;
  bool ideal = false;
  /// Per cell offset from t_min, or -1 when the cell did not trigger.
  std::vector<TimeNs> t_tilde;
  std::vector<std::uint8_t> is_source;
  bool bp_pass = true;
  std::optional<BpResult> bp_failure;
};

struct StabilizationOptions {
  /// Minimum number of consecutive valid rounds that count as stabilized.
  std::size_t min_stable_rounds = 3;
  std::vector<CellId> allowed_sources;
};

struct StabilizationReport {
  bool stabilized = false;
  /// Start of the first round of the stable suffix.
  TimeNs t_stab = 0;
  /// Earliest instant from which the trace is a periodic MEP process: one
  /// past the last trigger preceding the suffix (0 when none does).
  TimeNs stable_since = 0;
  TimeNs lemma5_bound = 0;
  TimeNs lemma5_deadline = 0;  // lemma5_bound + tau2
  SegmentationPlan plan;
  TimeNs tau_nabla_bound = 0;
  TimeNs measured_tau_pi = 0;
  TimeNs measured_tau_nabla = 0;
  /// Rounds fully observed before the horizon; the suffix starts at
  /// first_stable_round.
  std::vector<RoundSummary> rounds;
  std::size_t first_stable_round = 0;
  std::size_t pending_triggers = 0;
  std::optional<std::size_t> last_violation_round;
  std::string last_violation_reason;
};

/// Throws Error(kInsufficientHorizon) when the trace ends before the
/// compliance instant.
StabilizationReport detect_stabilization(const Trace& trace,
                                         const StabilizationOptions& options = {});

struct SeriesPoint {
  /// 1-based within the stable suffix; <= 0 for rounds before it (or, if not
  /// stabilized, 1-based over all rounds).
  std::int64_t k = 0;
  TimeNs t_min = 0;
  TimeNs e1 = 0;
  double source_fraction = 0.0;
  bool valid = false;
  bool ideal = false;
  PatternCounts counts;
};

struct SeriesMetrics {
  std::vector<SeriesPoint> points;
  /// e1 nonincreasing over the stable suffix.
  bool e1_monotone = true;
  std::optional<std::int64_t> e1_first_increase_k;
};

SeriesMetrics series_metrics(const StabilizationReport& report, std::size_t cell_count);

}  // namespace mepsim
