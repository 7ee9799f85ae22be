#include "mepsim/topology.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <istream>
#include <ostream>
#include <queue>
#include <sstream>

#include "mepsim/error.hpp"

namespace mepsim {

Graph make_graph(std::size_t n, std::vector<Edge> edges, TopologyFamily family,
                 std::size_t a, std::size_t b);

namespace {

constexpr std::size_t kUnreached = static_cast<std::size_t>(-1);

std::vector<std::size_t> bfs_distances(const Graph& g, CellId source) {
  std::vector<std::size_t> dist(g.node_count(), kUnreached);
  std::queue<CellId> frontier;
  dist[source] = 0;
  frontier.push(source);
  while (!frontier.empty()) {
    const CellId u = frontier.front();
    frontier.pop();
    for (CellId v : g.neighbors(u)) {
      if (dist[v] == kUnreached) {
        dist[v] = dist[u] + 1;
        frontier.push(v);
      }
    }
  }
  return dist;
}

std::size_t parse_size(std::string_view text, const std::string& context) {
  std::size_t value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    throw Error(ErrorKind::kInvalidTopology, "bad number '" + std::string(text) + "' in " + context);
  }
  return value;
}

// Depth-first search over simple paths using a visited bitmask (n <= 64).
class LongestPathSearch {
 public:
  explicit LongestPathSearch(const Graph& g) : g_(g), n_(g.node_count()) {}

  std::size_t run() {
    if (n_ <= 1) return 0;
    for (CellId s = 0; s < n_ && best_ + 1 < n_; ++s) {
      extend(s, std::uint64_t{1} << s, 0);
    }
    return best_;
  }

 private:
  // Nodes reachable from `at` through unvisited nodes; bounds how far the
  // current path can still grow.
  std::size_t reachable_unvisited(CellId at, std::uint64_t visited) const {
    std::uint64_t seen = visited;
    std::size_t count = 0;
    stack_.clear();
    stack_.push_back(at);
    while (!stack_.empty()) {
      const CellId u = stack_.back();
      stack_.pop_back();
      for (CellId v : g_.neighbors(u)) {
        const std::uint64_t bit = std::uint64_t{1} << v;
        if ((seen & bit) == 0) {
          seen |= bit;
          ++count;
          stack_.push_back(v);
        }
      }
    }
    return count;
  }

  void extend(CellId at, std::uint64_t visited, std::size_t length) {
    best_ = std::max(best_, length);
    if (best_ + 1 == n_) return;
    if (length + reachable_unvisited(at, visited) <= best_) return;
    for (CellId v : g_.neighbors(at)) {
      const std::uint64_t bit = std::uint64_t{1} << v;
      if ((visited & bit) == 0) {
        extend(v, visited | bit, length + 1);
        if (best_ + 1 == n_) return;
      }
    }
  }

  const Graph& g_;
  std::size_t n_;
  std::size_t best_ = 0;
  mutable std::vector<CellId> stack_;
};

}  // namespace

Graph make_graph(std::size_t n, std::vector<Edge> edges, TopologyFamily family,
                 std::size_t a, std::size_t b) {
  if (n == 0) throw Error(ErrorKind::kValidation, "graph must have at least one node");
  for (auto& [i, j] : edges) {
    if (i >= n || j >= n) {
      throw Error(ErrorKind::kValidation,
                  "edge (" + std::to_string(i) + "," + std::to_string(j) + ") out of range for n=" +
                      std::to_string(n));
    }
    if (i == j) throw Error(ErrorKind::kValidation, "self-loop at node " + std::to_string(i));
    if (i > j) std::swap(i, j);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  Graph g;
  g.adjacency_.assign(n, {});
  for (const auto& [i, j] : edges) {
    g.adjacency_[i].push_back(j);
    g.adjacency_[j].push_back(i);
  }
  for (auto& list : g.adjacency_) std::sort(list.begin(), list.end());
  g.edges_ = std::move(edges);
  g.family_ = family;
  if (family == TopologyFamily::kGrid) {
    g.rows_ = a;
    g.cols_ = b;
  } else if (family == TopologyFamily::kHypercube) {
    g.dim_ = a;
  }

  const auto dist = bfs_distances(g, 0);
  const auto isolated = std::find(dist.begin(), dist.end(), kUnreached);
  if (isolated != dist.end()) {
    throw Error(ErrorKind::kConnectivity,
                "graph is disconnected: node " + std::to_string(isolated - dist.begin()) +
                    " unreachable from node 0");
  }
  return g;
}

bool Graph::adjacent(CellId i, CellId j) const {
  const auto& list = adjacency_.at(i);
  return std::binary_search(list.begin(), list.end(), j);
}

std::string Graph::spec() const {
  switch (family_) {
    case TopologyFamily::kRing: return "ring:" + std::to_string(node_count());
    case TopologyFamily::kGrid: return "grid:" + std::to_string(rows_) + "x" + std::to_string(cols_);
    case TopologyFamily::kHypercube: return "hypercube:" + std::to_string(dim_);
    case TopologyFamily::kCustom: break;
  }
  return "custom";
}

Graph build_ring(std::size_t n) {
  if (n < 3) throw Error(ErrorKind::kInvalidTopology, "ring needs n >= 3, got " + std::to_string(n));
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    edges.emplace_back(static_cast<CellId>(i), static_cast<CellId>((i + 1) % n));
  }
  return make_graph(n, std::move(edges), TopologyFamily::kRing, 0, 0);
}

Graph build_grid(std::size_t rows, std::size_t cols) {
  if (rows < 2 || cols < 2) {
    throw Error(ErrorKind::kInvalidTopology, "grid needs rows, cols >= 2, got " +
                                                 std::to_string(rows) + "x" + std::to_string(cols));
  }
  std::vector<Edge> edges;
  auto id = [cols](std::size_t r, std::size_t c) { return static_cast<CellId>(r * cols + c); };
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (c + 1 < cols) edges.emplace_back(id(r, c), id(r, c + 1));
      if (r + 1 < rows) edges.emplace_back(id(r, c), id(r + 1, c));
    }
  }
  return make_graph(rows * cols, std::move(edges), TopologyFamily::kGrid, rows, cols);
}

Graph build_hypercube(std::size_t dim) {
  if (dim < 2 || dim > 24) {
    throw Error(ErrorKind::kInvalidTopology,
                "hypercube dimension must be in [2, 24], got " + std::to_string(dim));
  }
  const std::size_t n = std::size_t{1} << dim;
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t bit = 0; bit < dim; ++bit) {
      const std::size_t j = i ^ (std::size_t{1} << bit);
      if (i < j) edges.emplace_back(static_cast<CellId>(i), static_cast<CellId>(j));
    }
  }
  return make_graph(n, std::move(edges), TopologyFamily::kHypercube, dim, 0);
}

Graph from_edge_list(std::size_t n, std::span<const Edge> edges) {
  if (edges.empty() && n != 1) {
    throw Error(ErrorKind::kValidation, "edge list is empty");
  }
  return make_graph(n, std::vector<Edge>(edges.begin(), edges.end()), TopologyFamily::kCustom, 0,
                    0);
}

Graph parse_topology_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) {
    throw Error(ErrorKind::kInvalidTopology, "topology spec '" + spec + "' lacks ':'");
  }
  const std::string family = spec.substr(0, colon);
  const std::string_view arg = std::string_view(spec).substr(colon + 1);
  if (family == "ring") return build_ring(parse_size(arg, spec));
  if (family == "hypercube") return build_hypercube(parse_size(arg, spec));
  if (family == "grid") {
    const auto x = arg.find('x');
    if (x == std::string_view::npos) {
      throw Error(ErrorKind::kInvalidTopology, "grid spec must be grid:RxC, got '" + spec + "'");
    }
    return build_grid(parse_size(arg.substr(0, x), spec), parse_size(arg.substr(x + 1), spec));
  }
  throw Error(ErrorKind::kInvalidTopology, "unknown topology family '" + family + "'");
}

Graph read_edge_list(std::istream& in) {
  std::size_t n = 0;
  std::size_t m = 0;
  if (!(in >> n >> m)) throw Error(ErrorKind::kParse, "edge list: missing 'n m' header");
  std::vector<Edge> edges;
  edges.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    std::int64_t i = 0;
    std::int64_t j = 0;
    if (!(in >> i >> j)) {
      throw Error(ErrorKind::kParse, "edge list: expected " + std::to_string(m) + " edges, got " +
                                         std::to_string(k));
    }
    if (i < 0 || j < 0) throw Error(ErrorKind::kValidation, "edge list: negative node id");
    edges.emplace_back(static_cast<CellId>(i), static_cast<CellId>(j));
  }
  return from_edge_list(n, edges);
}

void write_edge_list(std::ostream& out, const Graph& g) {
  out << g.node_count() << ' ' << g.edge_count() << '\n';
  for (const auto& [i, j] : g.edges()) out << i << ' ' << j << '\n';
}

std::size_t diameter(const Graph& g) {
  std::size_t best = 0;
  for (CellId s = 0; s < g.node_count(); ++s) {
    const auto dist = bfs_distances(g, s);
    best = std::max(best, *std::max_element(dist.begin(), dist.end()));
  }
  return best;
}

std::size_t longest_simple_path_dfs(const Graph& g) {
  if (g.node_count() > 64) {
    throw Error(ErrorKind::kValidation, "exhaustive longest-path search supports n <= 64");
  }
  return LongestPathSearch(g).run();
}

TopologyStats topology_stats(const Graph& g, std::optional<std::size_t> lg_override,
                             std::size_t exact_search_cap) {
  TopologyStats stats;
  stats.diameter = diameter(g);
  const std::size_t n = g.node_count();

  if (lg_override) {
    if (*lg_override < stats.diameter) {
      throw Error(ErrorKind::kInconsistentOverride,
                  "L_G override " + std::to_string(*lg_override) + " is below the diameter " +
                      std::to_string(stats.diameter));
    }
    if (*lg_override > n - 1) {
      throw Error(ErrorKind::kInconsistentOverride,
                  "L_G override " + std::to_string(*lg_override) + " exceeds n-1 = " +
                      std::to_string(n - 1));
    }
  }

  // Rings, grids (boustrophedon) and hypercubes (Gray code) all have
  // Hamiltonian paths.
  if (g.family() != TopologyFamily::kCustom) {
    stats.longest_simple_path = n - 1;
    stats.lg_is_exact = true;
  } else if (n <= exact_search_cap && n <= 64) {
    stats.longest_simple_path = longest_simple_path_dfs(g);
    stats.lg_is_exact = true;
  } else {
    stats.longest_simple_path = lg_override.value_or(n - 1);
    stats.lg_is_exact = false;
  }
  return stats;
}

}  // namespace mepsim
