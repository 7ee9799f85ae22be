#include <algorithm>
#include <map>
#include <unordered_map>

#include "mepsim/analysis.hpp"
#include "mepsim/error.hpp"

namespace mepsim {

std::string to_string(OmepProperty property) {
  switch (property) {
    case OmepProperty::kValid: return "valid";
    case OmepProperty::kSimple: return "simple";
    case OmepProperty::kComplete: return "complete";
    case OmepProperty::kExclusive: return "exclusive";
    case OmepProperty::kPropagative: return "propagative";
  }
  return "unknown";
}

Propagation make_propagation(std::size_t cell_count, std::vector<PropagationEntry> entries) {
  Propagation p;
  p.cell_count = cell_count;
  p.entries = std::move(entries);
  const std::size_t m = p.entries.size();

  // Entries of each cell, in time order, for pioneer lookup.
  std::vector<std::vector<std::size_t>> by_cell(cell_count);
  for (std::size_t e = 0; e < m; ++e) {
    if (p.entries[e].cell >= cell_count || p.entries[e].pioneer >= cell_count) {
      throw Error(ErrorKind::kValidation, "propagation entry refers to an unknown cell");
    }
    by_cell[p.entries[e].cell].push_back(e);
  }
  for (auto& list : by_cell) {
    std::stable_sort(list.begin(), list.end(), [&](std::size_t a, std::size_t b) {
      return p.entries[a].time < p.entries[b].time;
    });
  }

  for (std::size_t e = 0; e < m; ++e) {
    PropagationEntry& entry = p.entries[e];
    if (entry.pioneer_entry || entry.pioneer == entry.cell) continue;
    std::optional<std::size_t> best;
    for (std::size_t cand : by_cell[entry.pioneer]) {
      if (p.entries[cand].time > entry.time) break;
      best = cand;
    }
    entry.pioneer_entry = best;
  }

  p.paths.resize(m);
  p.sources.resize(m);
  std::vector<std::size_t> stamp(m, 0);
  std::vector<std::size_t> chain;
  for (std::size_t e = 0; e < m; ++e) {
    chain.clear();
    std::size_t cur = e;
    bool loop = false;
    bool broken = false;
    for (;;) {
      if (stamp[cur] == e + 1) {
        loop = true;
        break;
      }
      stamp[cur] = e + 1;
      chain.push_back(cur);
      const PropagationEntry& ce = p.entries[cur];
      if (ce.pioneer == ce.cell && !ce.pioneer_entry) break;
      if (!ce.pioneer_entry || *ce.pioneer_entry >= m) {
        broken = true;
        break;
      }
      cur = *ce.pioneer_entry;
    }
    std::vector<CellId>& path = p.paths[e];
    path.reserve(chain.size());
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) path.push_back(p.entries[*it].cell);
    if (loop) {
      p.loops.push_back(e);
    } else if (broken) {
      p.broken_links.push_back(e);
    } else {
      p.sources[e] = path.front();
    }
  }
  return p;
}

Propagation extract_propagation(const Trace& trace, const Segment& segment) {
  std::vector<PropagationEntry> entries;
  entries.reserve(segment.members.size());
  for (Seq seq : segment.members) {
    const TriggerRecord& t = trace.triggers.at(seq);
    entries.push_back({t.seq, t.cell, t.time, t.pioneer, std::nullopt});
  }
  return make_propagation(trace.graph.node_count(), std::move(entries));
}

namespace {

constexpr std::size_t kMaxWitnessCells = 16;

void add_cell(std::vector<CellId>& cells, CellId c) {
  if (cells.size() < kMaxWitnessCells) cells.push_back(c);
}

}  // namespace

OmepReport validate_omep(const Propagation& p, const Graph& g,
                         std::span<const CellId> allowed_sources) {
  OmepReport report;
  const std::size_t n = g.node_count();
  const std::size_t m = p.entries.size();

  std::vector<std::uint8_t> allowed(n, allowed_sources.empty() ? 1 : 0);
  for (CellId c : allowed_sources) {
    if (c < n) allowed[c] = 1;
  }

  // Valid: every chain ends at a self-pioneered trigger of an allowed cell.
  {
    OmepWitness w{OmepProperty::kValid, {}, {}};
    for (std::size_t e = 0; e < m; ++e) {
      const auto& src = p.sources[e];
      if (!src) {
        report.valid = false;
        add_cell(w.cells, p.entries[e].cell);
        if (w.detail.empty()) {
          w.detail = "path of cell " + std::to_string(p.entries[e].cell) + " has no source";
        }
      } else if (!allowed[*src]) {
        report.valid = false;
        add_cell(w.cells, p.entries[e].cell);
        if (w.detail.empty()) {
          w.detail = "source " + std::to_string(*src) + " may not be externally triggered";
        }
      }
    }
    if (!report.valid) report.witnesses.push_back(std::move(w));
  }

  // Simple: no chain loops back and no path repeats a cell.
  {
    OmepWitness w{OmepProperty::kSimple, {}, {}};
    std::vector<std::size_t> seen(n, 0);
    for (std::size_t e = 0; e < m && report.simple; ++e) {
      for (CellId c : p.paths[e]) {
        if (seen[c] == e + 1) {
          report.simple = false;
          w.cells = p.paths[e];
          if (w.cells.size() > kMaxWitnessCells) w.cells.resize(kMaxWitnessCells);
          w.detail = "path of cell " + std::to_string(p.entries[e].cell) + " visits cell " +
                     std::to_string(c) + " twice";
          break;
        }
        seen[c] = e + 1;
      }
    }
    if (report.simple && !p.loops.empty()) {
      report.simple = false;
      w.cells = p.paths[p.loops.front()];
      if (w.cells.size() > kMaxWitnessCells) w.cells.resize(kMaxWitnessCells);
      w.detail = "pioneer chain of cell " + std::to_string(p.entries[p.loops.front()].cell) +
                 " loops";
    }
    if (!report.simple) report.witnesses.push_back(std::move(w));
  }

  // Complete (operational form): each cell triggers exactly once.
  {
    OmepWitness w{OmepProperty::kComplete, {}, {}};
    std::vector<std::size_t> count(n, 0);
    for (const auto& entry : p.entries) {
      if (entry.cell < n) ++count[entry.cell];
    }
    std::size_t missing = 0;
    std::size_t repeated = 0;
    for (CellId c = 0; c < n; ++c) {
      if (count[c] != 1) {
        report.complete = false;
        add_cell(w.cells, c);
        (count[c] == 0 ? missing : repeated) += 1;
      }
    }
    if (!report.complete) {
      w.detail = std::to_string(missing) + " cells missing, " + std::to_string(repeated) +
                 " cells triggered more than once";
      report.witnesses.push_back(std::move(w));
    }
  }

  // Exclusive: no cell lies on paths with different sources.
  {
    OmepWitness w{OmepProperty::kExclusive, {}, {}};
    std::vector<std::optional<CellId>> owner(n);
    for (std::size_t e = 0; e < m && report.exclusive; ++e) {
      if (!p.sources[e]) continue;
      const CellId s = *p.sources[e];
      for (CellId c : p.paths[e]) {
        if (!owner[c]) {
          owner[c] = s;
        } else if (*owner[c] != s) {
          report.exclusive = false;
          w.cells = {c, *owner[c], s};
          w.detail = "cell " + std::to_string(c) + " lies on paths from sources " +
                     std::to_string(*owner[c]) + " and " + std::to_string(s);
          break;
        }
      }
    }
    if (!report.exclusive) report.witnesses.push_back(std::move(w));
  }

  // Propagative: two intersecting paths agree on a prefix and are disjoint
  // after it. Equivalently, every occurrence of a cell (across all paths)
  // ends the same path prefix; prefixes are identified through a trie.
  {
    OmepWitness w{OmepProperty::kPropagative, {}, {}};
    std::map<std::pair<std::size_t, CellId>, std::size_t> trie;
    std::vector<std::optional<std::size_t>> node_of(n);
    std::vector<std::size_t> path_of(n, 0);
    for (std::size_t e = 0; e < m && report.propagative; ++e) {
      std::size_t node = 0;  // root
      for (CellId c : p.paths[e]) {
        auto [it, inserted] = trie.try_emplace({node, c}, trie.size() + 1);
        node = it->second;
        if (!node_of[c]) {
          node_of[c] = node;
          path_of[c] = e;
        } else if (*node_of[c] != node && path_of[c] != e) {
          report.propagative = false;
          w.cells = {c, p.entries[path_of[c]].cell, p.entries[e].cell};
          w.detail = "paths of cells " + std::to_string(p.entries[path_of[c]].cell) + " and " +
                     std::to_string(p.entries[e].cell) + " meet at cell " + std::to_string(c) +
                     " after diverging";
          break;
        }
      }
    }
    if (!report.propagative) report.witnesses.push_back(std::move(w));
  }
  return report;
}

TimeNs propagation_error(const Propagation& p) {
  if (p.entries.empty()) throw Error(ErrorKind::kValidation, "empty propagation");
  TimeNs t_min = p.entries.front().time;
  for (const auto& e : p.entries) t_min = std::min(t_min, e.time);
  TimeNs sum = 0;
  for (const auto& e : p.entries) sum += e.time - t_min;
  return sum;
}

}  // namespace mepsim
