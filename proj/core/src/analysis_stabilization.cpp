#include <algorithm>

#include "mepsim/analysis.hpp"
#include "mepsim/error.hpp"

namespace mepsim {

SegmentationPlan plan_segmentation(const SimParams& params, const TopologyStats& stats) {
  // After stabilization a round starts with an external trigger at least
  // tau2 local ticks (>= tau1 - 1 ns real) after that cell's previous
  // trigger, which is at most tau_pi after the previous round began. The
  // compensation shortens internal cells' liveness by d_min.
  const TimeNs slack = 2 + (params.dmin_compensation ? params.d_min : 0);
  SegmentationPlan plan;
  plan.tau_pi = static_cast<TimeNs>(stats.diameter) * params.d_max;
  plan.tau_delta = params.tau1 - plan.tau_pi - slack;
  if (plan.tau_delta <= 3 * plan.tau_pi) {
    plan.fallback = true;
    const TimeNs room = params.tau1 - slack;
    plan.tau_pi = std::max<TimeNs>(0, (room - 1) / 4);
    plan.tau_delta = room - plan.tau_pi;
  }
  return plan;
}

namespace {

RoundSummary summarize(const Trace& trace, Segment seg, const SegmentationPlan& plan,
                       std::span<const CellId> allowed) {
  const Graph& g = trace.graph;
  const std::size_t n = g.node_count();
  RoundSummary r;
  const Propagation p = extract_propagation(trace, seg);
  r.segment = std::move(seg);
  r.t_min = r.segment.start;
  r.span = r.segment.end - r.segment.start;
  r.e1 = p.entries.empty() ? 0 : propagation_error(p);
  r.omep = validate_omep(p, g, allowed);
  r.within_precision = r.span <= plan.tau_pi;
  r.valid = r.omep.all() && r.within_precision;

  const PatternReport patterns = classify_patterns(p, g);
  r.counts = patterns.counts;
  r.ideal = r.valid && r.counts.source == n;
  r.t_tilde.assign(n, -1);
  r.is_source.assign(n, 0);
  for (const auto& e : p.entries) {
    if (r.t_tilde[e.cell] < 0) r.t_tilde[e.cell] = e.time - r.t_min;
  }
  for (CellId i = 0; i < n; ++i) r.is_source[i] = patterns.is_source(i) ? 1 : 0;
  if (r.omep.all()) {
    for (BpResult& bp : check_pattern_properties(patterns, p, g)) {
      if (!bp.pass) {
        r.bp_pass = false;
        r.bp_failure = std::move(bp);
        break;
      }
    }
  }
  return r;
}

/// Largest per-cell gap between two complete rounds.
TimeNs max_cell_gap(const RoundSummary& a, const RoundSummary& b) {
  TimeNs worst = 0;
  for (std::size_t i = 0; i < a.t_tilde.size(); ++i) {
    worst = std::max(worst, (b.t_min + b.t_tilde[i]) - (a.t_min + a.t_tilde[i]));
  }
  return worst;
}

std::string describe_failure(const RoundSummary& r, bool liveness_failed) {
  std::string out;
  auto add = [&](const std::string& s) {
    if (!out.empty()) out += "; ";
    out += s;
  };
  for (const auto& w : r.omep.witnesses) add(to_string(w.property) + ": " + w.detail);
  if (!r.within_precision) add("span " + std::to_string(r.span) + " ns exceeds precision bound");
  if (liveness_failed) add("a cell's next trigger is later than the liveness bound");
  return out;
}

}  // namespace

StabilizationReport detect_stabilization(const Trace& trace, const StabilizationOptions& options) {
  const SimParams& params = trace.params;
  const std::size_t n = trace.graph.node_count();
  StabilizationReport report;
  report.lemma5_bound = lemma5_bound(params);
  report.lemma5_deadline = report.lemma5_bound + params.tau2;
  report.tau_nabla_bound = liveness_bound(params);
  if (trace.horizon < report.lemma5_bound) {
    throw Error(ErrorKind::kInsufficientHorizon,
                "trace ends at " + std::to_string(trace.horizon) +
                    " ns, before the compliance instant " + std::to_string(report.lemma5_bound) +
                    " ns");
  }
  report.plan = plan_segmentation(params, trace.stats);
  const SegmentationPlan& plan = report.plan;

  std::vector<Segment> clusters = cluster_by_gap(trace.triggers, plan.tau_delta);
  // A cluster may still grow while the horizon is within tau_delta of it.
  while (!clusters.empty() && clusters.back().end + plan.tau_delta > trace.horizon) {
    report.pending_triggers += clusters.back().members.size();
    clusters.pop_back();
  }

  std::vector<RoundSummary>& rounds = report.rounds;
  rounds.reserve(clusters.size());
  for (Segment& s : clusters) rounds.push_back(summarize(trace, std::move(s), plan, options.allowed_sources));

  auto live = [&](std::size_t a, std::size_t b) {
    return max_cell_gap(rounds[a], rounds[b]) <= report.tau_nabla_bound;
  };

  // Maximal suffix of valid rounds with bounded per-cell gaps.
  std::size_t first = rounds.size();
  bool liveness_failed = false;
  while (first > 0) {
    const std::size_t k = first - 1;
    if (!rounds[k].valid) break;
    if (k + 1 < rounds.size() && !live(k, k + 1)) {
      liveness_failed = true;
      break;
    }
    first = k;
  }

  // The round before the suffix may be a valid round merged with stray
  // earlier triggers; try its last n triggers on their own.
  if (first > 0 && first < rounds.size()) {
    const RoundSummary& merged = rounds[first - 1];
    const auto& members = merged.segment.members;
    if (members.size() > n) {
      const std::size_t cut = members.size() - n;
      const TimeNs head_end = trace.triggers[members[cut - 1]].time;
      const TimeNs tail_start = trace.triggers[members[cut]].time;
      if (head_end < tail_start) {
        Segment tail{tail_start, merged.segment.end,
                     std::vector<Seq>(members.begin() + static_cast<std::ptrdiff_t>(cut),
                                      members.end())};
        RoundSummary tail_summary = summarize(trace, std::move(tail), plan, options.allowed_sources);
        if (tail_summary.valid &&
            max_cell_gap(tail_summary, rounds[first]) <= report.tau_nabla_bound) {
          Segment head{merged.segment.start, head_end,
                       std::vector<Seq>(members.begin(),
                                        members.begin() + static_cast<std::ptrdiff_t>(cut))};
          RoundSummary head_summary = summarize(trace, std::move(head), plan, options.allowed_sources);
          rounds[first - 1] = std::move(tail_summary);
          rounds.insert(rounds.begin() + static_cast<std::ptrdiff_t>(first - 1),
                        std::move(head_summary));
          liveness_failed = false;
        }
      }
    }
  }
  report.first_stable_round = first;

  const std::size_t suffix = rounds.size() - first;
  report.stabilized = suffix >= std::max<std::size_t>(1, options.min_stable_rounds);
  if (first > 0) {
    report.last_violation_round = first - 1;
    report.last_violation_reason = describe_failure(rounds[first - 1], liveness_failed);
  }
  if (suffix > 0) {
    report.t_stab = rounds[first].t_min;
    report.stable_since = first > 0 ? rounds[first - 1].segment.end + 1 : 0;
    for (std::size_t k = first; k < rounds.size(); ++k) {
      report.measured_tau_pi = std::max(report.measured_tau_pi, rounds[k].span);
      if (k + 1 < rounds.size()) {
        report.measured_tau_nabla =
            std::max(report.measured_tau_nabla, max_cell_gap(rounds[k], rounds[k + 1]));
      }
    }
  }
  return report;
}

SeriesMetrics series_metrics(const StabilizationReport& report, std::size_t cell_count) {
  SeriesMetrics out;
  const auto first = static_cast<std::int64_t>(report.stabilized ? report.first_stable_round : 0);
  for (std::size_t k = 0; k < report.rounds.size(); ++k) {
    const RoundSummary& r = report.rounds[k];
    SeriesPoint pt;
    pt.k = static_cast<std::int64_t>(k) - first + 1;
    pt.t_min = r.t_min;
    pt.e1 = r.e1;
    pt.source_fraction =
        cell_count ? static_cast<double>(r.counts.source) / static_cast<double>(cell_count) : 0.0;
    pt.valid = r.valid;
    pt.ideal = r.ideal;
    pt.counts = r.counts;
    out.points.push_back(pt);
  }
  if (report.stabilized) {
    for (std::size_t k = report.first_stable_round + 1; k < report.rounds.size(); ++k) {
      if (report.rounds[k].e1 > report.rounds[k - 1].e1) {
        out.e1_monotone = false;
        out.e1_first_increase_k = static_cast<std::int64_t>(k) - first + 1;
        break;
      }
    }
  }
  return out;
}

}  // namespace mepsim
