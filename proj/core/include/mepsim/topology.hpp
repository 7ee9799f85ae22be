#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mepsim {

using CellId = std::uint32_t;
using Edge = std::pair<CellId, CellId>;

enum class TopologyFamily { kCustom, kRing, kGrid, kHypercube };

/// Connected undirected propagation network with dense node ids 0..n-1.
///
/// Immutable after construction. Adjacency lists are sorted ascending, which
/// fixes the iteration order (and therefore the rng consumption order) of the
/// simulator.
class Graph {
 public:
  std::size_t node_count() const noexcept { return adjacency_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  /// Edges as (i, j) with i < j, sorted lexicographically.
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::span<const CellId> neighbors(CellId i) const { return adjacency_.at(i); }
  std::size_t degree(CellId i) const { return adjacency_.at(i).size(); }
  bool adjacent(CellId i, CellId j) const;
  bool is_tree() const noexcept { return edges_.size() + 1 == adjacency_.size(); }

  TopologyFamily family() const noexcept { return family_; }
  /// Grid shape (rows, cols); (0, 0) for other families.
  std::pair<std::size_t, std::size_t> grid_shape() const noexcept { return {rows_, cols_}; }
  /// Name usable as a topology spec, e.g. "ring:16"; "custom" for edge lists.
  std::string spec() const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.adjacency_ == b.adjacency_;
  }

 private:
  friend Graph make_graph(std::size_t, std::vector<Edge>, TopologyFamily, std::size_t,
                          std::size_t);

  std::vector<Edge> edges_;
  std::vector<std::vector<CellId>> adjacency_;
  TopologyFamily family_ = TopologyFamily::kCustom;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t dim_ = 0;
};

struct TopologyStats {
  std::size_t diameter = 0;             // D_G, edge count
  std::size_t longest_simple_path = 0;  // L_G, edge count
  bool lg_is_exact = false;

  friend bool operator==(const TopologyStats&, const TopologyStats&) = default;
};

inline constexpr std::size_t kDefaultExactSearchCap = 64;

Graph build_ring(std::size_t n);
Graph build_grid(std::size_t rows, std::size_t cols);
Graph build_hypercube(std::size_t dim);

/// Normalizes (deduplicates, symmetrizes) an edge list. A single node with no
/// edges is accepted as the trivial connected graph.
Graph from_edge_list(std::size_t n, std::span<const Edge> edges);

/// Parses "ring:N", "grid:RxC", "hypercube:D".
Graph parse_topology_spec(const std::string& spec);

/// Edge-list text format: first line "n m", then m lines "i j".
Graph read_edge_list(std::istream& in);
void write_edge_list(std::ostream& out, const Graph& g);

/// Exact eccentricity maximum by BFS from every node.
std::size_t diameter(const Graph& g);

/// Exhaustive depth-first search over simple paths. Exponential in general;
/// callers bound n. Returns the longest path length in edges.
std::size_t longest_simple_path_dfs(const Graph& g);

TopologyStats topology_stats(const Graph& g, std::optional<std::size_t> lg_override = {},
                             std::size_t exact_search_cap = kDefaultExactSearchCap);

}  // namespace mepsim
