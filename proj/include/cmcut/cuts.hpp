#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cmcut/errors.hpp"
#include "cmcut/multigraph.hpp"
#include "cmcut/rng.hpp"
#include "cmcut/structure.hpp"

namespace cmcut {

/// Assignment of every vertex to one of k blocks.
struct Partition {
  std::uint32_t k = 2;
  std::vector<std::uint32_t> assignment;

  std::vector<std::size_t> block_sizes() const {
    std::vector<std::size_t> sizes(k, 0);
    for (auto b : assignment) ++sizes.at(b);
    return sizes;
  }
};

struct CutResult {
  std::uint64_t width = 0;  ///< cross edges, parallel edges counted separately
  std::vector<std::size_t> block_sizes;
  bool balanced = false;  ///< max - min block size <= 1
  std::string method;
  bool conditions_met = false;
};

struct MaxCutResult {
  Partition partition;
  std::uint64_t value = 0;
};

struct ComponentContribution {
  std::uint32_t component = 0;  ///< index into components(g)
  std::uint64_t contribution = 0;
  std::string method;  ///< "bipartite", "odd_unicyclic", "exhaustive" or "local_search"
};

struct DistBipResult {
  std::uint64_t value = 0;
  bool exact = true;
  /// Components containing at least one cycle; acyclic ones contribute 0.
  std::vector<ComponentContribution> per_component;
};

inline constexpr std::uint32_t kDefaultRestarts = 8;
inline constexpr std::uint32_t kDefaultExactLimit = 22;
inline constexpr std::uint32_t kPerturbRounds = 16;

inline void validate_partition(const MultiGraph& g, const Partition& p) {
  if (p.k < 1) throw ArgumentError("partition: k must be >= 1");
  if (p.assignment.size() != g.num_vertices())
    throw ArgumentError("partition: assignment covers " + std::to_string(p.assignment.size()) + " of " +
                        std::to_string(g.num_vertices()) + " vertices");
  for (auto b : p.assignment)
    if (b >= p.k) throw ArgumentError("partition: block index " + std::to_string(b) + " >= k");
}

/// Edges whose endpoints lie in different blocks. Loops never cross.
inline std::uint64_t cut_width(const MultiGraph& g, const Partition& p) {
  validate_partition(g, p);
  std::uint64_t w = 0;
  for (const Edge& e : g.edges())
    if (p.assignment[e.u] != p.assignment[e.v]) ++w;
  return w;
}

inline bool is_balanced(const std::vector<std::size_t>& sizes) {
  if (sizes.empty()) return true;
  auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
  return *hi - *lo <= 1;
}

inline CutResult evaluate_partition(const MultiGraph& g, const Partition& p, std::string method,
                                    bool conditions_met = false) {
  CutResult r;
  r.width = cut_width(g, p);
  r.block_sizes = p.block_sizes();
  r.balanced = is_balanced(r.block_sizes);
  r.method = std::move(method);
  r.conditions_met = conditions_met;
  return r;
}

/// Whether the component sizes satisfy the three hypotheses under which the
/// greedy k-section has width <= k/2: the largest component has at most n/k
/// vertices, components of size <= 2 exist (their count s = r n defines r),
/// and every component beyond the k largest has at most s/k vertices.
inline bool ksection_conditions(const ComponentDecomposition& cd, std::uint32_t k) {
  const std::uint64_t n = cd.num_vertices();
  if (cd.components.empty()) return false;
  std::uint64_t small = 0;
  for (const auto& c : cd.components) small += c.size() <= 2 ? 1 : 0;
  if (cd.components.front().size() * k > n) return false;
  if (small == 0) return false;
  for (std::size_t i = k; i < cd.components.size(); ++i)
    if (cd.components[i].size() * k > small) return false;
  return true;
}

/// Greedy balanced k-partition built from whole components.
///
/// Components of size > 2, largest first, go to the lowest-index block that
/// stays within n/k (falling back to ceil(n/k), and splitting the component
/// in BFS order when neither fits). Components of size 2 and then isolated
/// vertices top blocks up to sizes floor(n/k) or floor(n/k)+1; whatever is
/// left over fills the remaining slots, splitting pairs if needed.
inline std::pair<Partition, CutResult> ksection_greedy(const MultiGraph& g, std::uint32_t k) {
  const std::size_t n = g.num_vertices();
  if (k < 2) throw ArgumentError("ksection_greedy: k must be >= 2");
  if (k > n) throw ArgumentError("ksection_greedy: k exceeds the number of vertices");
  constexpr auto kUnset = std::numeric_limits<std::uint32_t>::max();

  const auto cd = components(g);
  const bool conditions = ksection_conditions(cd, k);
  const std::size_t floor_cap = n / k;
  const std::size_t ceil_cap = (n + k - 1) / k;

  Partition part{k, std::vector<std::uint32_t>(n, kUnset)};
  std::vector<std::vector<Vertex>> members(k);
  auto put = [&](Vertex v, std::uint32_t b) {
    part.assignment[v] = b;
    members[b].push_back(v);
  };
  auto lowest_fitting = [&](std::size_t need, auto cap_of) -> std::uint32_t {
    for (std::uint32_t b = 0; b < k; ++b)
      if (members[b].size() + need <= cap_of(b)) return b;
    return kUnset;
  };

  std::vector<Vertex> loose;
  for (const auto& comp : cd.components) {
    if (comp.size() <= 2) break;
    std::uint32_t b = lowest_fitting(comp.size(), [&](std::uint32_t) { return floor_cap; });
    if (b == kUnset) b = lowest_fitting(comp.size(), [&](std::uint32_t) { return ceil_cap; });
    if (b != kUnset) {
      for (Vertex v : comp) put(v, b);
      continue;
    }
    // Too large for any block: BFS order so each block gets a connected run.
    const auto bfs = detail::distances_from(g, {comp.front()}, std::numeric_limits<std::uint32_t>::max());
    std::vector<Vertex> order(comp.begin(), comp.end());
    std::stable_sort(order.begin(), order.end(), [&](Vertex a, Vertex c) { return bfs[a] < bfs[c]; });
    std::size_t i = 0;
    for (std::uint32_t blk = 0; blk < k && i < order.size(); ++blk)
      while (members[blk].size() < ceil_cap && i < order.size()) put(order[i++], blk);
    for (; i < order.size(); ++i) loose.push_back(order[i]);
  }

  // Size targets: the n mod k fullest blocks get floor+1.
  std::vector<std::size_t> target(k, floor_cap);
  {
    std::vector<std::uint32_t> by_size(k);
    std::iota(by_size.begin(), by_size.end(), 0u);
    std::stable_sort(by_size.begin(), by_size.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return members[a].size() > members[b].size(); });
    for (std::size_t i = 0; i < n % k; ++i) ++target[by_size[i]];
  }
  for (std::uint32_t b = 0; b < k; ++b) {
    while (members[b].size() > target[b]) {
      const Vertex v = members[b].back();
      members[b].pop_back();
      part.assignment[v] = kUnset;
      loose.push_back(v);
    }
  }

  std::vector<const VertexSet*> pairs;
  for (const auto& comp : cd.components)
    if (comp.size() == 2) pairs.push_back(&comp);
  // Pairs joined by several edges are placed first so that any pair that has
  // to be split is a single-edge one.
  auto internal_edges = [&](const VertexSet& c) {
    std::size_t m = 0;
    for (const auto& inc : g.incident(c[0]))
      if (inc.neighbor == c[1]) ++m;
    return m;
  };
  std::stable_sort(pairs.begin(), pairs.end(),
                   [&](const VertexSet* a, const VertexSet* b) { return internal_edges(*a) > internal_edges(*b); });
  auto cap_target = [&](std::uint32_t b) { return target[b]; };
  for (const VertexSet* c : pairs) {
    const std::uint32_t b = lowest_fitting(2, cap_target);
    if (b != kUnset) {
      put((*c)[0], b);
      put((*c)[1], b);
    } else {
      loose.push_back((*c)[0]);
      loose.push_back((*c)[1]);
    }
  }
  for (const auto& comp : cd.components) {
    if (comp.size() != 1) continue;
    const std::uint32_t b = lowest_fitting(1, cap_target);
    if (b != kUnset)
      put(comp[0], b);
    else
      loose.push_back(comp[0]);
  }
  for (Vertex v : loose) {
    const std::uint32_t b = lowest_fitting(1, cap_target);
    put(v, b == kUnset ? 0 : b);
  }

  CutResult result = evaluate_partition(g, part, "greedy", conditions);
  return {std::move(part), std::move(result)};
}

namespace detail {

/// Balanced swap local search state for one restart.
///
/// For every ordered block pair (a, b) the vertices of a are kept in a set
/// ordered by the gain of moving them to b, ties broken by a per-restart
/// random rank. Swapping u in a with v in b reduces the width by
/// gain(u -> b) + gain(v -> a) - 2 mult(u, v).
class SwapSearch {
 public:
  SwapSearch(const MultiGraph& g, std::uint32_t k, std::vector<std::uint32_t> block, std::vector<std::uint32_t> rank)
      : g_(g), k_(k), block_(std::move(block)), rank_(std::move(rank)), conn_(g.num_vertices() * k, 0),
        locked_(g.num_vertices(), 0), sets_(static_cast<std::size_t>(k) * k) {
    for (const Edge& e : g_.edges()) {
      if (e.is_loop()) continue;
      ++conn_[e.u * k_ + block_[e.v]];
      ++conn_[e.v * k_ + block_[e.u]];
      if (block_[e.u] != block_[e.v]) ++width_;
    }
    for (Vertex v = 0; v < g_.num_vertices(); ++v) insert(v);
  }

  std::int64_t width() const { return width_; }
  const std::vector<std::uint32_t>& blocks() const { return block_; }

  /// Applies improving swaps (first found in gain order) until none is left,
  /// then improving single moves from a larger block to a smaller one, which
  /// keep the partition balanced when k does not divide n.
  void descend() {
    while (true) {
      auto best = find_swap(/*first_improving=*/true);
      if (best && best->delta > 0) {
        apply(best->u, best->v);
        continue;
      }
      if (!improving_move()) return;
    }
  }

  /// One Kernighan-Lin pass: repeatedly applies the best swap among unlocked
  /// vertices (even if it worsens the cut), locks both, and finally rolls
  /// back to the best prefix. Returns true if the width decreased.
  bool kl_pass() {
    struct Move {
      Vertex u, v;
    };
    std::vector<Move> moves;
    const std::int64_t start = width_;
    std::int64_t best = start;
    std::size_t best_len = 0;
    while (true) {
      auto s = find_swap(/*first_improving=*/false);
      if (!s) break;
      apply(s->u, s->v);
      lock(s->u);
      lock(s->v);
      moves.push_back({s->u, s->v});
      if (width_ < best) {
        best = width_;
        best_len = moves.size();
      }
    }
    for (std::size_t i = moves.size(); i > best_len; --i) apply(moves[i - 1].u, moves[i - 1].v);
    for (Vertex v = 0; v < g_.num_vertices(); ++v)
      if (locked_[v]) {
        locked_[v] = 0;
        insert(v);
      }
    return best < start;
  }

  /// Swaps `count` random pairs of vertices lying in different blocks.
  void kick(Rng& rng, std::uint32_t count) {
    const std::size_t n = g_.num_vertices();
    for (std::uint32_t i = 0; i < count; ++i) {
      const auto u = static_cast<Vertex>(rng.below(n));
      const auto v = static_cast<Vertex>(rng.below(n));
      if (block_[u] != block_[v]) apply(u, v);
    }
  }

  /// One Fiduccia-Mattheyses pass: single-vertex moves of the best unlocked
  /// vertex while block sizes stay within 2 of each other, then rollback to
  /// the best balanced prefix. Returns true if the width decreased.
  bool fm_pass() {
    std::vector<std::size_t> size(k_, 0);
    for (std::uint32_t b : block_) ++size[b];
    auto spread_after = [&](std::uint32_t a, std::uint32_t b) {
      --size[a];
      ++size[b];
      const auto [lo, hi] = std::minmax_element(size.begin(), size.end());
      const std::size_t d = *hi - *lo;
      ++size[a];
      --size[b];
      return d;
    };
    struct Move {
      Vertex v;
      std::uint32_t from;
    };
    std::vector<Move> moves;
    const std::int64_t start = width_;
    std::int64_t best = start;
    std::size_t best_len = 0;
    while (true) {
      std::optional<Key> pick;
      std::uint32_t to = 0;
      for (std::uint32_t a = 0; a < k_; ++a)
        for (std::uint32_t b = 0; b < k_; ++b) {
          if (a == b || set(a, b).empty() || spread_after(a, b) > 2) continue;
          const Key& top = *set(a, b).begin();
          if (!pick || top < *pick) {
            pick = top;
            to = b;
          }
        }
      if (!pick) break;
      const std::uint32_t from = block_[pick->v];
      move(pick->v, to);
      lock(pick->v);
      --size[from];
      ++size[to];
      moves.push_back({pick->v, from});
      const auto [lo, hi] = std::minmax_element(size.begin(), size.end());
      if (*hi - *lo <= 1 && width_ < best) {
        best = width_;
        best_len = moves.size();
      }
    }
    for (std::size_t i = moves.size(); i > best_len; --i) move(moves[i - 1].v, moves[i - 1].from);
    for (Vertex v = 0; v < g_.num_vertices(); ++v)
      if (locked_[v]) {
        locked_[v] = 0;
        insert(v);
      }
    return best < start;
  }

 private:
  struct Key {
    std::int64_t gain;
    std::uint32_t rank;
    Vertex v;
    bool operator<(const Key& o) const {
      if (gain != o.gain) return gain > o.gain;
      return rank < o.rank;
    }
  };
  struct Swap {
    Vertex u, v;
    std::int64_t delta;
  };

  std::int64_t gain(Vertex v, std::uint32_t to) const {
    return static_cast<std::int64_t>(conn_[v * k_ + to]) - static_cast<std::int64_t>(conn_[v * k_ + block_[v]]);
  }
  std::set<Key>& set(std::uint32_t from, std::uint32_t to) { return sets_[from * k_ + to]; }

  void insert(Vertex v) {
    if (locked_[v]) return;
    for (std::uint32_t b = 0; b < k_; ++b)
      if (b != block_[v]) set(block_[v], b).insert({gain(v, b), rank_[v], v});
  }
  void erase(Vertex v) {
    if (locked_[v]) return;
    for (std::uint32_t b = 0; b < k_; ++b)
      if (b != block_[v]) set(block_[v], b).erase({gain(v, b), rank_[v], v});
  }
  void lock(Vertex v) {
    erase(v);
    locked_[v] = 1;
  }

  bool improving_move() {
    std::vector<std::size_t> size(k_, 0);
    for (std::uint32_t b : block_) ++size[b];
    for (std::uint32_t a = 0; a < k_; ++a) {
      for (std::uint32_t b = 0; b < k_; ++b) {
        if (size[a] != size[b] + 1) continue;
        const auto& from = set(a, b);
        if (!from.empty() && from.begin()->gain > 0) {
          move(from.begin()->v, b);
          return true;
        }
      }
    }
    return false;
  }

  std::int64_t multiplicity(Vertex u, Vertex v) const {
    std::int64_t m = 0;
    for (const auto& inc : g_.incident(u))
      if (inc.neighbor == v) ++m;
    return m;
  }

  std::optional<Swap> find_swap(bool first_improving) {
    std::optional<Swap> best;
    for (std::uint32_t a = 0; a < k_; ++a) {
      for (std::uint32_t b = a + 1; b < k_; ++b) {
        auto& from_a = set(a, b);
        auto& from_b = set(b, a);
        if (from_a.empty() || from_b.empty()) continue;
        const std::int64_t top_b = from_b.begin()->gain;
        for (const Key& ku : from_a) {
          const std::int64_t bound = ku.gain + top_b;
          if (first_improving ? bound <= 0 : (best && bound <= best->delta)) break;
          for (const Key& kv : from_b) {
            const std::int64_t sum = ku.gain + kv.gain;
            if (first_improving ? sum <= 0 : (best && sum <= best->delta)) break;
            const std::int64_t delta = sum - 2 * multiplicity(ku.v, kv.v);
            if (!best || delta > best->delta) best = Swap{ku.v, kv.v, delta};
            if (first_improving && delta > 0) return best;
            if (delta == sum) break;  // later partners have smaller sums
          }
        }
      }
    }
    return best;
  }

  void move(Vertex v, std::uint32_t to) {
    const std::uint32_t from = block_[v];
    std::vector<Vertex> touched;
    for (const auto& inc : g_.incident(v))
      if (inc.neighbor != v) touched.push_back(inc.neighbor);
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    erase(v);
    for (Vertex u : touched) erase(u);
    for (const auto& inc : g_.incident(v)) {
      const Vertex u = inc.neighbor;
      if (u == v) continue;
      width_ += (block_[u] == from) ? 1 : 0;
      width_ -= (block_[u] == to) ? 1 : 0;
      --conn_[u * k_ + from];
      ++conn_[u * k_ + to];
    }
    block_[v] = to;
    insert(v);
    for (Vertex u : touched) insert(u);
  }

  void apply(Vertex u, Vertex v) {
    const std::uint32_t a = block_[u];
    const std::uint32_t b = block_[v];
    move(u, b);
    move(v, a);
  }

  const MultiGraph& g_;
  std::uint32_t k_;
  std::vector<std::uint32_t> block_;
  std::vector<std::uint32_t> rank_;
  std::vector<std::uint32_t> conn_;
  std::vector<char> locked_;
  std::vector<std::set<Key>> sets_;
  std::int64_t width_ = 0;
};

inline std::vector<std::uint32_t> random_permutation(std::size_t n, Rng& rng) {
  std::vector<std::uint32_t> p(n);
  std::iota(p.begin(), p.end(), 0u);
  for (std::size_t i = n; i > 1; --i) std::swap(p[i - 1], p[rng.below(i)]);
  return p;
}

}  // namespace detail

/// Balanced k-partition that admits no improving swap of two vertices in
/// different blocks. Restart 0 starts from the component-packing greedy
/// partition (swaps alone cannot carry a whole component across blocks);
/// the others start from uniformly random balanced partitions. Each descends
/// by first-improving swaps, then alternates Kernighan-Lin and
/// Fiduccia-Mattheyses passes until neither helps. Best restart wins; ties go to the lowest restart index.
inline std::pair<Partition, CutResult> bisection_local_search(const MultiGraph& g, std::uint32_t k, std::uint64_t seed,
                                                              std::uint32_t restarts = kDefaultRestarts) {
  if (k < 2) throw ArgumentError("bisection_local_search: k must be >= 2");
  if (restarts < 1) throw ArgumentError("bisection_local_search: restarts must be >= 1");
  const std::size_t n = g.num_vertices();
  Partition best{k, {}};
  std::int64_t best_width = -1;
  for (std::uint32_t r = 0; r < restarts; ++r) {
    Rng rng(derive_seed(seed, {r}));
    std::vector<std::uint32_t> block(n);
    if (r == 0) {
      block = ksection_greedy(g, k).first.assignment;
    } else {
      const auto perm = detail::random_permutation(n, rng);
      for (std::size_t i = 0; i < n; ++i) block[perm[i]] = static_cast<std::uint32_t>(i % k);
    }
    auto rank = detail::random_permutation(n, rng);
    std::optional<detail::SwapSearch> search;
    search.emplace(g, k, std::move(block), std::move(rank));
    search->descend();
    while (search->kl_pass() || search->fm_pass()) search->descend();
    // Iterated local search: random kicks, kept only if the re-descent beats
    // the current optimum.
    for (std::uint32_t t = 0; t < kPerturbRounds && search->width() > 0; ++t) {
      detail::SwapSearch trial = *search;
      trial.kick(rng, 2 + static_cast<std::uint32_t>(rng.below(2)));
      trial.descend();
      if (trial.width() < search->width()) search.emplace(std::move(trial));
    }
    if (best_width < 0 || search->width() < best_width) {
      best_width = search->width();
      best.assignment = search->blocks();
    }
  }
  CutResult result = evaluate_partition(g, best, "local");
  return {std::move(best), std::move(result)};
}

/// Max-Cut lower bound: random start, then single-vertex flips in a random
/// scan order while any flip increases the cut. The result is 1-flip
/// optimal, so at least half of the non-loop edges are cut.
inline MaxCutResult maxcut_local_search(const MultiGraph& g, std::uint64_t seed,
                                        std::uint32_t restarts = kDefaultRestarts) {
  if (restarts < 1) throw ArgumentError("maxcut_local_search: restarts must be >= 1");
  const std::size_t n = g.num_vertices();
  MaxCutResult best;
  best.partition.k = 2;
  bool have = false;
  for (std::uint32_t r = 0; r < restarts; ++r) {
    Rng rng(derive_seed(seed, {r}));
    std::vector<std::uint32_t> side(n);
    for (auto& s : side) s = static_cast<std::uint32_t>(rng.below(2));
    const auto order = detail::random_permutation(n, rng);
    bool changed = true;
    while (changed) {
      changed = false;
      for (Vertex v : order) {
        std::int64_t same = 0, cross = 0;
        for (const auto& inc : g.incident(v)) {
          if (inc.neighbor == v) continue;
          (side[inc.neighbor] == side[v] ? same : cross) += 1;
        }
        if (same > cross) {
          side[v] ^= 1u;
          changed = true;
        }
      }
    }
    Partition p{2, std::move(side)};
    const std::uint64_t value = cut_width(g, p);
    if (!have || value > best.value) {
      best.value = value;
      best.partition = std::move(p);
      have = true;
    }
  }
  if (!have) best.partition.assignment.assign(n, 0);
  return best;
}

/// Exhaustive Max-Cut of a small graph by Gray-code enumeration of the
/// 2^(n-1) bipartitions with vertex 0 fixed. Loops are never cut.
inline std::uint64_t exhaustive_maxcut(const MultiGraph& g) {
  const std::size_t n = g.num_vertices();
  if (n <= 1) return 0;
  if (n > 40) throw LimitError("exhaustive_maxcut: graph too large");
  std::vector<std::uint32_t> side(n, 0);
  std::int64_t cut = 0, best = 0;
  const std::uint64_t count = std::uint64_t{1} << (n - 1);
  for (std::uint64_t i = 1; i < count; ++i) {
    const auto bit = static_cast<Vertex>(__builtin_ctzll(i)) + 1;  // vertex 0 stays put
    std::int64_t same = 0, cross = 0;
    for (const auto& inc : g.incident(bit)) {
      if (inc.neighbor == bit) continue;
      (side[inc.neighbor] == side[bit] ? same : cross) += 1;
    }
    cut += same - cross;
    side[bit] ^= 1u;
    best = std::max(best, cut);
  }
  return static_cast<std::uint64_t>(best);
}

/// Minimum number of edge deletions making g bipartite, component by
/// component: bipartite -> 0, odd unicyclic -> 1, otherwise the exhaustive
/// Max-Cut complement when the component has at most exact_limit vertices and
/// a local-search upper bound beyond that. Each loop costs one deletion.
inline DistBipResult distbip(const MultiGraph& g, std::uint32_t exact_limit = kDefaultExactLimit,
                             std::uint64_t seed = 0) {
  if (exact_limit < 1) throw ArgumentError("distbip: exact_limit must be >= 1");
  DistBipResult result;
  const auto cd = components(g);
  for (std::uint32_t ci = 0; ci < cd.components.size(); ++ci) {
    const auto& comp = cd.components[ci];
    std::uint64_t degree_sum = 0, loops = 0;
    for (Vertex v : comp) {
      degree_sum += g.degree(v);
      for (const auto& inc : g.incident(v))
        if (inc.neighbor == v) ++loops;
    }
    loops /= 2;  // each loop appears twice in the incidence list
    const std::uint64_t edges = degree_sum / 2;
    if (edges + 1 <= comp.size()) continue;  // tree
    const std::uint64_t plain = edges - loops;

    ComponentContribution c{ci, loops, "bipartite"};
    const auto sub = induced_subgraph(g, comp);
    bool bipartite = true;
    {
      std::vector<signed char> color(sub.num_vertices(), -1);
      std::vector<Vertex> stack{0};
      color[0] = 0;
      while (!stack.empty() && bipartite) {
        const Vertex v = stack.back();
        stack.pop_back();
        for (const auto& inc : sub.incident(v)) {
          if (inc.neighbor == v) continue;
          if (color[inc.neighbor] < 0) {
            color[inc.neighbor] = static_cast<signed char>(1 - color[v]);
            stack.push_back(inc.neighbor);
          } else if (color[inc.neighbor] == color[v]) {
            bipartite = false;
            break;
          }
        }
      }
    }
    const bool unicyclic = plain == comp.size();
    if (bipartite) {
      c.contribution = loops;
    } else if (unicyclic) {
      c.contribution = 1 + loops;
      c.method = "odd_unicyclic";
    } else if (comp.size() <= exact_limit) {
      c.contribution = plain - exhaustive_maxcut(sub) + loops;
      c.method = "exhaustive";
    } else {
      c.contribution = plain - maxcut_local_search(sub, derive_seed(seed, {ci})).value + loops;
      c.method = "local_search";
      result.exact = false;
    }
    result.value += c.contribution;
    result.per_component.push_back(std::move(c));
  }
  return result;
}

/// Exact minimum k-section width by branch and bound over balanced
/// assignments. Intended for small graphs only.
inline std::pair<Partition, CutResult> ksection_exact(const MultiGraph& g, std::uint32_t k,
                                                      std::uint32_t vertex_limit = kDefaultExactLimit) {
  const std::size_t n = g.num_vertices();
  if (k < 2) throw ArgumentError("ksection_exact: k must be >= 2");
  if (k > n) throw ArgumentError("ksection_exact: k exceeds the number of vertices");
  if (n > vertex_limit)
    throw LimitError("ksection_exact: " + std::to_string(n) + " vertices exceeds limit " +
                     std::to_string(vertex_limit));
  const std::size_t lo = n / k, hi = (n + k - 1) / k;
  const std::size_t big_blocks = n % k;
  std::vector<std::uint32_t> assign(n, 0), best_assign;
  std::vector<std::size_t> size(k, 0);
  std::uint64_t best = std::numeric_limits<std::uint64_t>::max();

  auto rec = [&](auto&& self, Vertex v, std::uint32_t used, std::uint64_t cut) -> void {
    if (cut >= best) return;
    if (v == n) {
      std::size_t full = 0;
      for (auto s : size) {
        if (s < lo) return;
        full += s == hi && hi != lo ? 1 : 0;
      }
      if (hi != lo && full != big_blocks) return;
      best = cut;
      best_assign = assign;
      return;
    }
    const std::uint32_t limit = std::min<std::uint32_t>(k, used + 1);
    for (std::uint32_t b = 0; b < limit; ++b) {
      if (size[b] >= hi) continue;
      std::uint64_t add = 0;
      for (const auto& inc : g.incident(v))
        if (inc.neighbor < v && assign[inc.neighbor] != b) ++add;
      assign[v] = b;
      ++size[b];
      self(self, v + 1, std::max(used, b + 1), cut + add);
      --size[b];
    }
  };
  rec(rec, 0, 0, 0);
  Partition p{k, std::move(best_assign)};
  CutResult r = evaluate_partition(g, p, "exact");
  return {std::move(p), std::move(r)};
}

/// Whether the two-block split of `component` has both sides larger than
/// eps |V| and at most delta |V| crossing edges.
inline bool verify_eps_delta_cut(const MultiGraph& g, const VertexSet& component, const Partition& p, double eps,
                                 double delta) {
  validate_partition(g, p);
  if (p.k != 2) throw ArgumentError("verify_eps_delta_cut: partition must have two blocks");
  // eps >= 1/2 is accepted and simply cannot be satisfied by both sides.
  if (!(eps > 0.0 && eps < 1.0)) throw ArgumentError("verify_eps_delta_cut: eps must lie in (0, 1)");
  if (!(delta > 0.0)) throw ArgumentError("verify_eps_delta_cut: delta must be positive");
  const auto member = detail::set_to_mask(g.num_vertices(), component);
  std::size_t first = 0;
  for (Vertex v : component) first += p.assignment[v] == 0 ? 1 : 0;
  const std::size_t second = component.size() - first;
  if (first == 0 || second == 0) throw ArgumentError("verify_eps_delta_cut: a block is empty on the component");
  std::uint64_t cross = 0;
  for (Vertex v : component)
    for (const auto& inc : g.incident(v))
      if (member[inc.neighbor] && v < inc.neighbor && p.assignment[v] != p.assignment[inc.neighbor]) ++cross;
  const double size = static_cast<double>(component.size());
  return static_cast<double>(first) > eps * size && static_cast<double>(second) > eps * size &&
         static_cast<double>(cross) <= delta * size;
}

}  // namespace cmcut
