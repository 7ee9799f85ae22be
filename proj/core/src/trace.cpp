#include "mepsim/trace.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>

namespace mepsim {

std::string to_string(TriggerKind kind) {
  return kind == TriggerKind::kExternal ? "external" : "internal";
}

std::string to_string(ArrivalOutcome outcome) {
  switch (outcome) {
    case ArrivalOutcome::kAccepted: return "accepted";
    case ArrivalOutcome::kRejected: return "rejected";
    case ArrivalOutcome::kOmitted: return "omitted";
  }
  return "unknown";
}

bool same_events(const Trace& a, const Trace& b) {
  return a.triggers == b.triggers && a.arrivals == b.arrivals;
}

void canonicalize(Trace& trace) {
  auto& triggers = trace.triggers;
  std::vector<std::size_t> order(triggers.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(triggers[a].time, triggers[a].cell) <
           std::tie(triggers[b].time, triggers[b].cell);
  });

  // Records may arrive with arbitrary seqs; map old seq -> new index.
  std::vector<TriggerRecord> sorted;
  sorted.reserve(triggers.size());
  std::vector<Seq> remap;
  Seq max_seq = 0;
  for (const auto& t : triggers) max_seq = std::max(max_seq, t.seq);
  remap.assign(triggers.empty() ? 0 : max_seq + 1, 0);
  for (std::size_t k = 0; k < order.size(); ++k) {
    TriggerRecord rec = triggers[order[k]];
    remap[rec.seq] = k;
    rec.seq = k;
    sorted.push_back(rec);
  }
  triggers = std::move(sorted);

  for (auto& a : trace.arrivals) {
    if (a.rejecting_seq) a.rejecting_seq = remap.at(*a.rejecting_seq);
    if (a.emit_seq) a.emit_seq = remap.at(*a.emit_seq);
  }
  std::stable_sort(trace.arrivals.begin(), trace.arrivals.end(),
                   [](const ArrivalRecord& a, const ArrivalRecord& b) {
                     return std::tie(a.time, a.to, a.from) < std::tie(b.time, b.to, b.from);
                   });
}

}  // namespace mepsim
