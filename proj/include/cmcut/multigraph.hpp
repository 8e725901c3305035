#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cmcut/errors.hpp"

namespace cmcut {

using Vertex = std::uint32_t;
using EdgeId = std::uint32_t;

struct Edge {
  Vertex u = 0;
  Vertex v = 0;
  bool is_loop() const { return u == v; }
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Degrees indexed by vertex (0-based in memory, 1-based in files).
struct DegreeSequence {
  std::vector<std::uint32_t> degrees;
  /// Vertex whose degree was incremented to make the total even, if any.
  std::optional<Vertex> parity_adjusted;

  std::size_t size() const { return degrees.size(); }

  std::uint64_t total() const {
    return std::accumulate(degrees.begin(), degrees.end(), std::uint64_t{0});
  }
  std::uint32_t max_degree() const {
    return degrees.empty() ? 0 : *std::max_element(degrees.begin(), degrees.end());
  }
};

/// Undirected multigraph on vertices 0..n-1. Loops and parallel edges are
/// ordinary edges; a loop contributes 2 to its vertex's degree. Immutable
/// after construction.
class MultiGraph {
 public:
  /// One incidence: the neighbor across an edge plus the edge id. A loop at v
  /// appears twice in v's incidence list.
  struct Incidence {
    Vertex neighbor;
    EdgeId edge;
  };

  MultiGraph() = default;

  MultiGraph(std::size_t n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
    degree_.assign(n_, 0);
    for (const Edge& e : edges_) {
      if (e.u >= n_ || e.v >= n_)
        throw ArgumentError("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                            ") out of range for n=" + std::to_string(n_));
      ++degree_[e.u];
      ++degree_[e.v];
    }
    offset_.assign(n_ + 1, 0);
    for (std::size_t v = 0; v < n_; ++v) offset_[v + 1] = offset_[v] + degree_[v];
    incidence_.resize(offset_[n_]);
    std::vector<std::size_t> fill(offset_.begin(), offset_.end() - 1);
    for (EdgeId id = 0; id < edges_.size(); ++id) {
      const Edge& e = edges_[id];
      incidence_[fill[e.u]++] = {e.v, id};
      incidence_[fill[e.v]++] = {e.u, id};
    }
  }

  std::size_t num_vertices() const { return n_; }
  std::size_t num_edges() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  std::uint32_t degree(Vertex v) const { return degree_[v]; }
  const std::vector<std::uint32_t>& degrees() const { return degree_; }

  std::span<const Incidence> incident(Vertex v) const {
    return {incidence_.data() + offset_[v], incidence_.data() + offset_[v + 1]};
  }

  std::size_t num_loops() const {
    return static_cast<std::size_t>(std::count_if(edges_.begin(), edges_.end(), [](const Edge& e) { return e.is_loop(); }));
  }

  /// True when there are no loops and no parallel edges.
  bool is_simple() const {
    std::vector<std::pair<Vertex, Vertex>> keys;
    keys.reserve(edges_.size());
    for (const Edge& e : edges_) {
      if (e.is_loop()) return false;
      keys.emplace_back(std::min(e.u, e.v), std::max(e.u, e.v));
    }
    std::sort(keys.begin(), keys.end());
    return std::adjacent_find(keys.begin(), keys.end()) == keys.end();
  }

  /// Edges normalized to u <= v and sorted; equal for isomorphic-by-label
  /// multigraphs regardless of edge order.
  std::vector<Edge> canonical_edges() const {
    std::vector<Edge> out;
    out.reserve(edges_.size());
    for (const Edge& e : edges_) out.push_back({std::min(e.u, e.v), std::max(e.u, e.v)});
    std::sort(out.begin(), out.end(), [](const Edge& a, const Edge& b) {
      return std::pair(a.u, a.v) < std::pair(b.u, b.v);
    });
    return out;
  }

  DegreeSequence degree_sequence() const { return {degree_, std::nullopt}; }

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::uint32_t> degree_;
  std::vector<std::size_t> offset_;
  std::vector<Incidence> incidence_;
};

/// Subgraph induced by `vertices` (distinct), relabeled 0..|vertices|-1 in
/// the given order. Edges keep their relative order.
inline MultiGraph induced_subgraph(const MultiGraph& g, std::span<const Vertex> vertices) {
  constexpr auto kAbsent = static_cast<Vertex>(-1);
  std::vector<Vertex> local(g.num_vertices(), kAbsent);
  for (std::size_t i = 0; i < vertices.size(); ++i) local[vertices[i]] = static_cast<Vertex>(i);
  std::vector<EdgeId> ids;
  for (Vertex v : vertices)
    for (const auto& inc : g.incident(v))
      if (g.edges()[inc.edge].u == v && local[inc.neighbor] != kAbsent) ids.push_back(inc.edge);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  std::vector<Edge> edges;
  edges.reserve(ids.size());
  for (EdgeId id : ids) edges.push_back({local[g.edges()[id].u], local[g.edges()[id].v]});
  return MultiGraph(vertices.size(), std::move(edges));
}

/// Writes the edge-list format: "n m" header, then one 1-based "u v" line per
/// edge in stored order.
inline void write_edge_list(std::ostream& os, const MultiGraph& g) {
  os << g.num_vertices() << ' ' << g.num_edges() << '\n';
  for (const Edge& e : g.edges()) os << (e.u + 1) << ' ' << (e.v + 1) << '\n';
}

inline std::string to_edge_list(const MultiGraph& g) {
  std::ostringstream os;
  write_edge_list(os, g);
  return os.str();
}

inline MultiGraph read_edge_list(std::istream& is) {
  std::string line;
  int lineno = 0;
  auto next_line = [&](std::string& out) {
    while (std::getline(is, out)) {
      ++lineno;
      if (out.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };
  if (!next_line(line)) throw ParseError("edge list: missing 'n m' header");
  long long n = -1, m = -1;
  {
    std::istringstream hs(line);
    std::string extra;
    if (!(hs >> n >> m) || (hs >> extra) || n < 0 || m < 0)
      throw ParseError("edge list line " + std::to_string(lineno) + ": malformed header");
  }
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(m));
  for (long long i = 0; i < m; ++i) {
    if (!next_line(line))
      throw ParseError("edge list: expected " + std::to_string(m) + " edges, found " + std::to_string(i));
    std::istringstream es(line);
    long long u = 0, v = 0;
    std::string extra;
    if (!(es >> u >> v) || (es >> extra))
      throw ParseError("edge list line " + std::to_string(lineno) + ": expected 'u v'");
    if (u < 1 || v < 1 || u > n || v > n)
      throw ParseError("edge list line " + std::to_string(lineno) + ": vertex out of range 1.." + std::to_string(n));
    edges.push_back({static_cast<Vertex>(u - 1), static_cast<Vertex>(v - 1)});
  }
  if (next_line(line)) throw ParseError("edge list line " + std::to_string(lineno) + ": trailing content");
  return MultiGraph(static_cast<std::size_t>(n), std::move(edges));
}

inline MultiGraph parse_edge_list(const std::string& text) {
  std::istringstream is(text);
  return read_edge_list(is);
}

inline MultiGraph read_edge_list_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open edge list '" + path + "'");
  return read_edge_list(f);
}

inline void write_edge_list_file(const std::string& path, const MultiGraph& g) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write edge list '" + path + "'");
  write_edge_list(f, g);
  if (!f) throw IoError("write failed for '" + path + "'");
}

}  // namespace cmcut
