#include <algorithm>
#include <map>

#include "mepsim/analysis.hpp"

namespace mepsim {

std::string to_string(NeighborLabel label) {
  switch (label) {
    case NeighborLabel::kParent: return "parent";
    case NeighborLabel::kChild: return "child";
    case NeighborLabel::kAlien: return "alien";
    case NeighborLabel::kFamily: return "family";
  }
  return "unknown";
}

std::string to_string(CellRole role) {
  switch (role) {
    case CellRole::kSource: return "source";
    case CellRole::kSink: return "sink";
    case CellRole::kFlow: return "flow";
    case CellRole::kUnited: return "united";
  }
  return "unknown";
}

std::string to_string(CellTerrain terrain) {
  switch (terrain) {
    case CellTerrain::kBank: return "bank";
    case CellTerrain::kRidge: return "ridge";
    case CellTerrain::kFlat: return "flat";
  }
  return "unknown";
}

std::size_t PatternReport::child_count(CellId i) const {
  return static_cast<std::size_t>(
      std::count(neighbor[i].begin(), neighbor[i].end(), NeighborLabel::kChild));
}

PatternCounts count_patterns(const PatternReport& report) {
  PatternCounts c;
  for (CellId i = 0; i < report.role.size(); ++i) {
    if (report.is_source(i)) ++c.source;
    if (report.is_sink(i)) ++c.sink;
    if (report.role[i] == CellRole::kFlow) ++c.flow;
    if (report.role[i] == CellRole::kUnited) ++c.united;
  }
  for (CellTerrain t : report.terrain) {
    if (t == CellTerrain::kBank) ++c.bank;
    if (t == CellTerrain::kRidge) ++c.ridge;
    if (t == CellTerrain::kFlat) ++c.flat;
  }
  return c;
}

PatternReport classify_patterns(const Propagation& p, const Graph& g) {
  const std::size_t n = g.node_count();
  PatternReport report;

  // First entry of each cell; a cell without one acts as its own region.
  std::vector<CellId> pioneer(n);
  report.region.assign(n, std::nullopt);
  std::vector<std::uint8_t> seen(n, 0);
  std::vector<std::size_t> entry_count(n, 0);
  for (CellId i = 0; i < n; ++i) pioneer[i] = i;
  for (std::size_t e = 0; e < p.entries.size(); ++e) {
    const CellId c = p.entries[e].cell;
    if (c >= n) continue;
    ++entry_count[c];
    if (seen[c]) continue;
    seen[c] = 1;
    pioneer[c] = p.entries[e].pioneer;
    report.region[c] = e < p.sources.size() ? p.sources[e] : std::nullopt;
  }
  for (CellId i = 0; i < n; ++i) {
    if (!seen[i]) report.region[i] = i;
  }

  report.role.resize(n);
  report.terrain.resize(n);
  report.neighbor.resize(n);
  bool flagged = !p.broken_links.empty() || !p.loops.empty();
  for (CellId i = 0; i < n; ++i) {
    if (entry_count[i] != 1) flagged = true;
    bool has_parent = false;
    bool has_child = false;
    bool has_alien = false;
    bool has_family = false;
    auto& labels = report.neighbor[i];
    labels.reserve(g.degree(i));
    for (CellId j : g.neighbors(i)) {
      NeighborLabel label;
      if (pioneer[i] == j) {
        label = NeighborLabel::kParent;
        has_parent = true;
      } else if (pioneer[j] == i) {
        label = NeighborLabel::kChild;
        has_child = true;
      } else if (report.region[i] != report.region[j]) {
        label = NeighborLabel::kAlien;
        has_alien = true;
      } else {
        label = NeighborLabel::kFamily;
        has_family = true;
      }
      labels.push_back(label);
    }
    if (!has_parent && !has_child) {
      report.role[i] = CellRole::kUnited;
    } else if (!has_parent) {
      report.role[i] = CellRole::kSource;
    } else if (!has_child) {
      report.role[i] = CellRole::kSink;
    } else {
      report.role[i] = CellRole::kFlow;
    }
    report.terrain[i] = has_alien    ? CellTerrain::kBank
                        : has_family ? CellTerrain::kRidge
                                     : CellTerrain::kFlat;
  }
  report.from_valid_omep = !flagged;
  report.counts = count_patterns(report);
  return report;
}

namespace {

std::string cells_text(const std::vector<CellId>& cells) {
  std::string out;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (k) out += ' ';
    out += std::to_string(cells[k]);
  }
  return out;
}

}  // namespace

std::vector<BpResult> check_pattern_properties(const PatternReport& report, const Propagation&,
                                               const Graph& g) {
  const std::size_t n = g.node_count();
  std::map<CellId, std::vector<CellId>> regions;
  for (CellId i = 0; i < n; ++i) {
    if (report.region[i]) regions[*report.region[i]].push_back(i);
  }

  std::vector<BpResult> out(7);
  for (int k = 0; k < 7; ++k) out[k].id = k + 1;

  // BP1: every region holds a sink. BP3: a region with a non-sink cell has a
  // non-sink source. BP6: a source with m children has >= m sinks in its
  // region. BP7 (per region, which implies the global form): m flat cells of
  // degree d >= 2 come with >= (d-2)m + 1 sinks.
  for (const auto& [src, members] : regions) {
    std::size_t sinks = 0;
    bool has_non_sink = false;
    bool has_non_sink_source = false;
    std::map<std::size_t, std::size_t> flat_by_degree;
    for (CellId i : members) {
      if (report.is_sink(i)) {
        ++sinks;
      } else {
        has_non_sink = true;
        if (report.is_source(i)) has_non_sink_source = true;
      }
      if (report.terrain[i] == CellTerrain::kFlat && g.degree(i) >= 2) {
        ++flat_by_degree[g.degree(i)];
      }
    }
    if (sinks == 0 && out[0].pass) {
      out[0].pass = false;
      out[0].witness = members;
      out[0].detail = "region of source " + std::to_string(src) + " has no sink";
    }
    if (has_non_sink && !has_non_sink_source && out[2].pass) {
      out[2].pass = false;
      out[2].witness = members;
      out[2].detail = "region of source " + std::to_string(src) + " has no non-sink source";
    }
    for (CellId i : members) {
      if (!report.is_source(i)) continue;
      const std::size_t m = report.child_count(i);
      if (sinks < m && out[5].pass) {
        out[5].pass = false;
        out[5].witness = {i};
        out[5].detail = "source " + std::to_string(i) + " has " + std::to_string(m) +
                        " children but its region has " + std::to_string(sinks) + " sinks";
      }
    }
    for (const auto& [d, m] : flat_by_degree) {
      const std::size_t need = (d - 2) * m + 1;
      if (sinks < need && out[6].pass) {
        out[6].pass = false;
        out[6].witness = members;
        out[6].detail = std::to_string(m) + " flat cells of degree " + std::to_string(d) +
                        " but only " + std::to_string(sinks) + " sinks in the region of " +
                        std::to_string(src);
      }
    }
  }

  // BP2: at least as many sinks as sources.
  if (report.counts.sink < report.counts.source) {
    out[1].pass = false;
    out[1].detail = std::to_string(report.counts.sink) + " sinks for " +
                    std::to_string(report.counts.source) + " sources";
  }

  // BP4: a tree has no ridge. BP5: a flat cell of degree >= 2 is no sink.
  const bool tree = g.is_tree();
  for (CellId i = 0; i < n; ++i) {
    if (tree && report.terrain[i] == CellTerrain::kRidge) {
      out[3].pass = false;
      out[3].witness.push_back(i);
    }
    if (report.terrain[i] == CellTerrain::kFlat && g.degree(i) >= 2 && report.is_sink(i)) {
      out[4].pass = false;
      out[4].witness.push_back(i);
    }
  }
  if (!out[3].pass) out[3].detail = "ridge cells on a tree: " + cells_text(out[3].witness);
  if (!out[4].pass) out[4].detail = "flat sink cells: " + cells_text(out[4].witness);
  return out;
}

}  // namespace mepsim
