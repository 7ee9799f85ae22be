#include <algorithm>

#include "mepsim/analysis.hpp"
#include "mepsim/error.hpp"

namespace mepsim {

std::vector<Segment> cluster_by_gap(std::span<const TriggerRecord> triggers, TimeNs tau_delta) {
  std::vector<Segment> out;
  for (std::size_t k = 0; k < triggers.size(); ++k) {
    const TriggerRecord& t = triggers[k];
    if (k > 0 && t.time < triggers[k - 1].time) {
      throw Error(ErrorKind::kValidation, "triggers are not in time order");
    }
    if (out.empty() || t.time - out.back().end > tau_delta) {
      out.push_back({t.time, t.time, {}});
    }
    out.back().end = t.time;
    out.back().members.push_back(t.seq);
  }
  return out;
}

SegmentationResult segment(std::span<const TriggerRecord> triggers, TimeNs tau_pi,
                           TimeNs tau_delta) {
  if (tau_pi < 0 || tau_delta <= 3 * tau_pi) {
    throw Error(ErrorKind::kParameter, "separation threshold must exceed three times the precision");
  }
  SegmentationResult result;
  result.segments = cluster_by_gap(triggers, tau_delta);

  // Clusters are more than tau_delta apart by construction, so any violation
  // lies inside a cluster wider than tau_pi. Such a cluster always contains a
  // pair in (tau_pi, tau_delta]: either a consecutive gap above tau_pi, or
  // (all gaps <= tau_pi) the first instant past start + tau_pi, which is
  // within 2 tau_pi < tau_delta of the start.
  std::size_t offset = 0;
  for (const Segment& s : result.segments) {
    const std::size_t count = s.members.size();
    if (s.end - s.start > tau_pi) {
      std::optional<std::pair<TimeNs, TimeNs>> witness;
      for (std::size_t k = 1; k < count && !witness; ++k) {
        const TimeNs a = triggers[offset + k - 1].time;
        const TimeNs b = triggers[offset + k].time;
        if (b - a > tau_pi) witness = std::pair{a, b};
      }
      for (std::size_t k = 1; k < count && !witness; ++k) {
        const TimeNs b = triggers[offset + k].time;
        if (b - s.start > tau_pi) witness = std::pair{s.start, b};
      }
      result.violation = witness;
      break;
    }
    offset += count;
  }
  return result;
}

SegmentationResult segment(const Trace& trace, TimeNs tau_pi, TimeNs tau_delta) {
  return segment(std::span<const TriggerRecord>(trace.triggers), tau_pi, tau_delta);
}

}  // namespace mepsim
