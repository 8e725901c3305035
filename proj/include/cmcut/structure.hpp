#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <utility>
#include <vector>

#include "cmcut/errors.hpp"
#include "cmcut/multigraph.hpp"

namespace cmcut {

/// Vertex sets are sorted vectors throughout this module.
using VertexSet = std::vector<Vertex>;

/// Connected components, largest first; equal sizes ordered by smallest vertex.
struct ComponentDecomposition {
  std::vector<VertexSet> components;
  std::vector<std::uint32_t> component_id;  ///< vertex -> index into components

  std::size_t num_vertices() const { return component_id.size(); }
  std::size_t largest_size() const { return components.empty() ? 0 : components.front().size(); }
  double giant_fraction() const {
    return component_id.empty() ? 0.0 : static_cast<double>(largest_size()) / static_cast<double>(component_id.size());
  }
  std::vector<std::size_t> sizes() const {
    std::vector<std::size_t> s;
    s.reserve(components.size());
    for (const auto& c : components) s.push_back(c.size());
    return s;
  }
};

/// A tree hanging off the 2-core: rooted at `root` (depth 1), which is joined
/// to the core vertex `attachment` by a single edge.
struct HangingTree {
  Vertex root = 0;
  Vertex attachment = 0;
  VertexSet vertices;
  std::uint32_t depth = 0;
};

struct CoreDecomposition {
  VertexSet core_vertices;
  std::vector<HangingTree> hanging_trees;
};

/// Cycle counts; counts[k-1] is the number of cycles of length k.
struct CycleCensus {
  std::vector<std::uint64_t> counts;
  std::uint64_t operator[](std::size_t length) const { return counts.at(length - 1); }
};

struct OddCycleCensus {
  bool bipartite = true;
  std::int64_t excess = 0;  ///< edges - vertices + 1
  bool unicyclic = false;
  bool odd_unicycle = false;
  friend bool operator==(const OddCycleCensus&, const OddCycleCensus&) = default;
};

struct MaxDegreeCheck {
  std::uint32_t d_max = 0;
  bool ok = true;
};

inline ComponentDecomposition components(const MultiGraph& g) {
  const std::size_t n = g.num_vertices();
  constexpr auto kUnset = std::numeric_limits<std::uint32_t>::max();
  ComponentDecomposition cd;
  cd.component_id.assign(n, kUnset);
  std::vector<VertexSet> found;
  std::vector<Vertex> stack;
  for (Vertex s = 0; s < n; ++s) {
    if (cd.component_id[s] != kUnset) continue;
    const auto id = static_cast<std::uint32_t>(found.size());
    VertexSet comp;
    cd.component_id[s] = id;
    stack.push_back(s);
    while (!stack.empty()) {
      const Vertex v = stack.back();
      stack.pop_back();
      comp.push_back(v);
      for (const auto& inc : g.incident(v)) {
        if (cd.component_id[inc.neighbor] == kUnset) {
          cd.component_id[inc.neighbor] = id;
          stack.push_back(inc.neighbor);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    found.push_back(std::move(comp));
  }
  // Discovery order already sorts by smallest vertex, so a stable sort on
  // size alone gives the required tie-break.
  std::vector<std::uint32_t> order(found.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return found[a].size() > found[b].size(); });
  std::vector<std::uint32_t> rank(found.size());
  cd.components.reserve(found.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) {
    rank[order[i]] = i;
    cd.components.push_back(std::move(found[order[i]]));
  }
  for (auto& id : cd.component_id) id = rank[id];
  return cd;
}

namespace detail {

/// Peels vertices of degree < k inside `members` (a mask). Returns the mask
/// of survivors. Loops count 2 towards their vertex's degree.
inline std::vector<char> peel(const MultiGraph& g, std::uint32_t k, std::vector<char> alive) {
  const std::size_t n = g.num_vertices();
  std::vector<std::uint32_t> deg(n, 0);
  std::vector<Vertex> queue;
  // Degrees are taken before any removal so each dead neighbor is subtracted once.
  for (Vertex v = 0; v < n; ++v) {
    if (!alive[v]) continue;
    for (const auto& inc : g.incident(v))
      if (alive[inc.neighbor]) ++deg[v];
  }
  for (Vertex v = 0; v < n; ++v) {
    if (alive[v] && deg[v] < k) {
      queue.push_back(v);
      alive[v] = 0;
    }
  }
  while (!queue.empty()) {
    const Vertex v = queue.back();
    queue.pop_back();
    for (const auto& inc : g.incident(v)) {
      const Vertex u = inc.neighbor;
      if (u == v || !alive[u]) continue;
      if (--deg[u] < k) {
        alive[u] = 0;
        queue.push_back(u);
      }
    }
  }
  return alive;
}

inline VertexSet mask_to_set(const std::vector<char>& mask) {
  VertexSet out;
  for (Vertex v = 0; v < mask.size(); ++v)
    if (mask[v]) out.push_back(v);
  return out;
}

inline std::vector<char> set_to_mask(std::size_t n, const VertexSet& set) {
  std::vector<char> mask(n, 0);
  for (Vertex v : set) {
    if (v >= n) throw ArgumentError("vertex " + std::to_string(v) + " out of range");
    mask[v] = 1;
  }
  return mask;
}

/// BFS distances from a source set, truncated at max_r. Unreached vertices
/// get UINT32_MAX.
inline std::vector<std::uint32_t> distances_from(const MultiGraph& g, const VertexSet& sources,
                                                 std::uint32_t max_r) {
  constexpr auto kInf = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> dist(g.num_vertices(), kInf);
  std::deque<Vertex> queue;
  for (Vertex s : sources) {
    if (s >= g.num_vertices()) throw ArgumentError("vertex " + std::to_string(s) + " out of range");
    if (dist[s] == kInf) {
      dist[s] = 0;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    const Vertex v = queue.front();
    queue.pop_front();
    if (dist[v] >= max_r) continue;
    for (const auto& inc : g.incident(v)) {
      if (dist[inc.neighbor] == kInf) {
        dist[inc.neighbor] = dist[v] + 1;
        queue.push_back(inc.neighbor);
      }
    }
  }
  return dist;
}

}  // namespace detail

/// k-core by iterated removal of vertices whose multigraph degree is below k.
inline VertexSet k_core(const MultiGraph& g, std::uint32_t k) {
  if (k < 1) throw ArgumentError("k_core: k must be >= 1");
  return detail::mask_to_set(detail::peel(g, k, std::vector<char>(g.num_vertices(), 1)));
}

/// 2-core of one component together with the trees hanging from it.
inline CoreDecomposition two_core_decomposition(const MultiGraph& g, const VertexSet& component) {
  const std::size_t n = g.num_vertices();
  const auto in_component = detail::set_to_mask(n, component);
  const auto core_mask = detail::peel(g, 2, in_component);
  CoreDecomposition cd;
  cd.core_vertices = detail::mask_to_set(core_mask);
  if (cd.core_vertices.empty()) throw NoCoreError("two_core_decomposition: component is acyclic");

  std::vector<char> seen = core_mask;
  std::vector<std::pair<Vertex, std::uint32_t>> frontier;
  for (Vertex c : cd.core_vertices) {
    for (const auto& attach : g.incident(c)) {
      const Vertex w = attach.neighbor;
      if (seen[w]) continue;
      HangingTree tree;
      tree.root = w;
      tree.attachment = c;
      seen[w] = 1;
      frontier.assign(1, {w, 1});
      for (std::size_t head = 0; head < frontier.size(); ++head) {
        const auto [v, depth] = frontier[head];
        tree.vertices.push_back(v);
        tree.depth = std::max(tree.depth, depth);
        for (const auto& inc : g.incident(v)) {
          if (!seen[inc.neighbor]) {
            seen[inc.neighbor] = 1;
            frontier.emplace_back(inc.neighbor, depth + 1);
          }
        }
      }
      std::sort(tree.vertices.begin(), tree.vertices.end());
      cd.hanging_trees.push_back(std::move(tree));
    }
  }
  return cd;
}

/// Closed r-neighborhood N[U, r]; N[U, 0] = U.
inline VertexSet neighborhood(const MultiGraph& g, const VertexSet& sources, std::uint32_t r) {
  const auto dist = detail::distances_from(g, sources, r);
  VertexSet out;
  for (Vertex v = 0; v < dist.size(); ++v)
    if (dist[v] <= r) out.push_back(v);
  return out;
}

/// Number of components made of two degree-one vertices joined by an edge.
inline std::uint64_t count_pairs(const MultiGraph& g) {
  std::uint64_t pairs = 0;
  for (const Edge& e : g.edges())
    if (!e.is_loop() && g.degree(e.u) == 1 && g.degree(e.v) == 1) ++pairs;
  return pairs;
}

inline constexpr std::uint32_t kDefaultCycleCap = 12;

/// Exact counts of cycles of length 1..max_length. Cycles are edge sets: a
/// loop is a 1-cycle, each pair of parallel edges a 2-cycle, and a vertex
/// cycle through parallel edges is counted once per choice of edges.
inline CycleCensus count_cycles(const MultiGraph& g, std::uint32_t max_length,
                                std::uint32_t cap = kDefaultCycleCap) {
  if (max_length < 1) throw ArgumentError("count_cycles: length must be >= 1");
  if (max_length > cap)
    throw LimitError("count_cycles: length " + std::to_string(max_length) + " exceeds cap " + std::to_string(cap));
  const std::size_t n = g.num_vertices();
  CycleCensus census;
  census.counts.assign(max_length, 0);

  // Collapsed adjacency (neighbor, multiplicity) without loops, sorted.
  std::vector<std::vector<std::pair<Vertex, std::uint64_t>>> adj(n);
  for (Vertex v = 0; v < n; ++v) {
    std::vector<Vertex> nb;
    for (const auto& inc : g.incident(v))
      if (inc.neighbor != v) nb.push_back(inc.neighbor);
    std::sort(nb.begin(), nb.end());
    for (std::size_t i = 0; i < nb.size();) {
      std::size_t j = i;
      while (j < nb.size() && nb[j] == nb[i]) ++j;
      adj[v].emplace_back(nb[i], j - i);
      i = j;
    }
  }

  census.counts[0] = g.num_loops();
  if (max_length >= 2) {
    std::uint64_t twos = 0;
    for (Vertex v = 0; v < n; ++v)
      for (const auto& [u, mult] : adj[v])
        if (u > v) twos += mult * (mult - 1) / 2;
    census.counts[1] = twos;
  }
  if (max_length < 3) return census;

  // Paths start at their minimum vertex s; every cycle of length >= 3 is then
  // found once per orientation.
  std::vector<std::uint64_t> doubled(max_length + 1, 0);
  std::vector<char> on_path(n, 0);
  struct Frame {
    Vertex v;
    std::size_t next;
    std::uint64_t weight;
  };
  std::vector<Frame> stack;
  for (Vertex s = 0; s < n; ++s) {
    auto closing = [&](Vertex v) -> std::uint64_t {
      const auto& a = adj[v];
      auto it = std::lower_bound(a.begin(), a.end(), std::pair<Vertex, std::uint64_t>{s, 0});
      return (it != a.end() && it->first == s) ? it->second : 0;
    };
    stack.assign(1, {s, 0, 1});
    on_path[s] = 1;
    while (!stack.empty()) {
      Frame& top = stack.back();
      const auto& a = adj[top.v];
      if (top.next >= a.size() || stack.size() >= max_length) {
        on_path[top.v] = 0;
        stack.pop_back();
        continue;
      }
      const auto [u, mult] = a[top.next++];
      if (u <= s || on_path[u]) continue;
      const std::uint64_t w = top.weight * mult;
      const std::size_t len = stack.size() + 1;
      if (len >= 3) {
        if (const std::uint64_t c = closing(u)) doubled[len] += w * c;
      }
      if (len < max_length) {
        on_path[u] = 1;
        stack.push_back({u, 0, w});
      }
    }
  }
  for (std::uint32_t k = 3; k <= max_length; ++k) census.counts[k - 1] = doubled[k] / 2;
  return census;
}

/// Bipartiteness, cycle excess and unicyclicity of one connected component.
inline OddCycleCensus odd_cycle_census(const MultiGraph& g, const VertexSet& component) {
  OddCycleCensus r;
  if (component.empty()) return r;
  const std::size_t n = g.num_vertices();
  std::vector<signed char> color(n, -1);
  const auto member = detail::set_to_mask(n, component);
  std::uint64_t degree_sum = 0;
  for (Vertex v : component) degree_sum += g.degree(v);
  std::vector<Vertex> stack{component.front()};
  color[component.front()] = 0;
  std::size_t reached = 0;
  while (!stack.empty()) {
    const Vertex v = stack.back();
    stack.pop_back();
    ++reached;
    for (const auto& inc : g.incident(v)) {
      const Vertex u = inc.neighbor;
      if (!member[u]) throw ArgumentError("odd_cycle_census: vertex set is not a union of components");
      if (color[u] < 0) {
        color[u] = static_cast<signed char>(1 - color[v]);
        stack.push_back(u);
      } else if (color[u] == color[v]) {
        r.bipartite = false;
      }
    }
  }
  if (reached != component.size()) throw ArgumentError("odd_cycle_census: vertex set is not connected");
  r.excess = static_cast<std::int64_t>(degree_sum / 2) - static_cast<std::int64_t>(component.size()) + 1;
  r.unicyclic = r.excess == 1;
  r.odd_unicycle = r.unicyclic && !r.bipartite;
  return r;
}

/// Total size of the non-largest components with at least L vertices.
inline std::uint64_t intermediate_mass(const ComponentDecomposition& cd, std::uint64_t L) {
  if (L < 1) throw ArgumentError("intermediate_mass: L must be >= 1");
  std::uint64_t q = 0;
  for (std::size_t i = 1; i < cd.components.size(); ++i)
    if (cd.components[i].size() >= L) q += cd.components[i].size();
  return q;
}

/// |N[core, r]| / n for r = 0..max_r, where core is the 2-core of the
/// largest component.
inline std::vector<double> tc_curve(const MultiGraph& g, std::uint32_t max_r) {
  const auto cd = components(g);
  if (cd.components.empty()) throw NoCoreError("tc_curve: empty graph");
  const auto core = two_core_decomposition(g, cd.components.front());
  const auto dist = detail::distances_from(g, core.core_vertices, max_r);
  std::vector<std::uint64_t> at(max_r + 1, 0);
  for (auto d : dist)
    if (d <= max_r) ++at[d];
  std::vector<double> curve(max_r + 1);
  std::uint64_t cum = 0;
  for (std::uint32_t r = 0; r <= max_r; ++r) {
    cum += at[r];
    curve[r] = static_cast<double>(cum) / static_cast<double>(g.num_vertices());
  }
  return curve;
}

inline double measure_tc_r(const MultiGraph& g, std::uint32_t r) { return tc_curve(g, r).back(); }

/// Number of core vertices by degree inside the core (loops count 2).
inline std::map<std::uint32_t, std::uint64_t> core_degree_histogram(const CoreDecomposition& cd, const MultiGraph& g) {
  const auto in_core = detail::set_to_mask(g.num_vertices(), cd.core_vertices);
  std::map<std::uint32_t, std::uint64_t> hist;
  for (Vertex v : cd.core_vertices) {
    std::uint32_t d = 0;
    for (const auto& inc : g.incident(v))
      if (in_core[inc.neighbor]) ++d;
    ++hist[d];
  }
  return hist;
}

/// Sanity check d_max^2 <= n.
inline MaxDegreeCheck max_degree_check(const DegreeSequence& seq) {
  MaxDegreeCheck r;
  r.d_max = seq.max_degree();
  r.ok = static_cast<std::uint64_t>(r.d_max) * r.d_max <= seq.size();
  return r;
}

}  // namespace cmcut
