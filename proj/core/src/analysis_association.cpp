#include <algorithm>
#include <map>
#include <numeric>

#include "mepsim/analysis.hpp"

namespace mepsim {

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::uint8_t> rank_;
};

/// Dense class ids in order of first appearance.
std::size_t label_classes(DisjointSets& sets, std::size_t count, std::vector<std::size_t>& out) {
  std::vector<std::size_t> id(count, SIZE_MAX);
  out.assign(count, 0);
  std::size_t next = 0;
  for (std::size_t e = 0; e < count; ++e) {
    const std::size_t root = sets.find(e);
    if (id[root] == SIZE_MAX) id[root] = next++;
    out[e] = id[root];
  }
  return next;
}

}  // namespace

AssociationCheck association_classes(const Trace& trace, TimeNs window_start,
                                     TimeNs window_end) {
  AssociationCheck check;
  AssociationClasses& cls = check.classes;
  const auto& triggers = trace.triggers;
  const std::size_t n = trace.graph.node_count();

  // Local index of every trigger inside the window.
  std::vector<std::size_t> local(triggers.size(), SIZE_MAX);
  for (const TriggerRecord& t : triggers) {
    if (t.time < window_start || t.time > window_end) continue;
    local[t.seq] = cls.events.size();
    cls.events.push_back(t.seq);
  }
  const std::size_t count = cls.events.size();

  // Internal trigger produced by an accepted arrival: same cell and instant.
  std::map<std::pair<CellId, TimeNs>, Seq> trigger_at;
  for (const TriggerRecord& t : triggers) {
    if (t.kind == TriggerKind::kInternal) trigger_at.emplace(std::pair{t.cell, t.time}, t.seq);
  }

  DisjointSets weak(count);
  for (const ArrivalRecord& a : trace.arrivals) {
    if (!a.emit_seq) continue;
    std::optional<Seq> other;
    if (a.outcome == ArrivalOutcome::kAccepted) {
      auto it = trigger_at.find({a.to, a.time});
      if (it != trigger_at.end()) other = it->second;
    } else if (a.outcome == ArrivalOutcome::kRejected) {
      other = a.rejecting_seq;
    }
    if (!other || *a.emit_seq >= local.size() || *other >= local.size()) continue;
    const std::size_t x = local[*a.emit_seq];
    const std::size_t y = local[*other];
    if (x != SIZE_MAX && y != SIZE_MAX) weak.unite(x, y);
  }
  cls.weak_count = label_classes(weak, count, cls.weak_class);

  // Strong association: adjacent cells within d_max, inside one weak class.
  std::vector<std::vector<std::size_t>> by_cell(n);
  for (std::size_t e = 0; e < count; ++e) by_cell[triggers[cls.events[e]].cell].push_back(e);
  DisjointSets strong(count);
  const TimeNs d = trace.params.d_max;
  for (const auto& [i, j] : trace.graph.edges()) {
    const auto& a = by_cell[i];
    const auto& b = by_cell[j];
    std::size_t lo = 0;
    for (std::size_t x : a) {
      const TimeNs t = triggers[cls.events[x]].time;
      while (lo < b.size() && triggers[cls.events[b[lo]]].time < t - d) ++lo;
      for (std::size_t k = lo; k < b.size(); ++k) {
        const std::size_t y = b[k];
        if (triggers[cls.events[y]].time > t + d) break;
        if (cls.weak_class[x] == cls.weak_class[y]) strong.unite(x, y);
      }
    }
  }
  cls.strong_count = label_classes(strong, count, cls.strong_class);

  // Strong classes refine weak ones, so the partitions coincide iff the
  // counts match. A witness is two events of one weak class split apart.
  check.partitions_coincide = cls.strong_count == cls.weak_count;
  if (!check.partitions_coincide) {
    std::vector<std::size_t> first_in_weak(cls.weak_count, SIZE_MAX);
    for (std::size_t e = 0; e < count && !check.coincide_witness; ++e) {
      std::size_t& f = first_in_weak[cls.weak_class[e]];
      if (f == SIZE_MAX) {
        f = e;
      } else if (cls.strong_class[f] != cls.strong_class[e]) {
        check.coincide_witness = std::pair{cls.events[f], cls.events[e]};
      }
    }
  }

  // Time span of each weak class against L_G d_max.
  std::vector<std::size_t> lo_event(cls.weak_count, SIZE_MAX);
  std::vector<std::size_t> hi_event(cls.weak_count, SIZE_MAX);
  for (std::size_t e = 0; e < count; ++e) {
    const std::size_t c = cls.weak_class[e];
    const TimeNs t = triggers[cls.events[e]].time;
    if (lo_event[c] == SIZE_MAX || t < triggers[cls.events[lo_event[c]]].time) lo_event[c] = e;
    if (hi_event[c] == SIZE_MAX || t > triggers[cls.events[hi_event[c]]].time) hi_event[c] = e;
  }
  cls.weak_span.assign(cls.weak_count, 0);
  const std::size_t lg = trace.stats.longest_simple_path ? trace.stats.longest_simple_path
                                                         : trace.params.lg;
  check.span_bound = static_cast<TimeNs>(lg) * d;
  for (std::size_t c = 0; c < cls.weak_count; ++c) {
    const Seq lo = cls.events[lo_event[c]];
    const Seq hi = cls.events[hi_event[c]];
    cls.weak_span[c] = triggers[hi].time - triggers[lo].time;
    check.max_span = std::max(check.max_span, cls.weak_span[c]);
    if (cls.weak_span[c] > check.span_bound && check.span_within_bound) {
      check.span_within_bound = false;
      check.span_witness = std::pair{lo, hi};
    }
  }
  return check;
}

}  // namespace mepsim
