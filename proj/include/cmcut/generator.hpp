#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cmcut/distribution.hpp"
#include "cmcut/errors.hpp"
#include "cmcut/multigraph.hpp"
#include "cmcut/rng.hpp"

namespace cmcut {

struct GenReport {
  std::uint64_t seed = 0;
  std::uint64_t attempts = 1;
  bool simple = false;
  std::optional<Vertex> parity_adjusted;
};

/// n i.i.d. degrees from dist. An odd total is repaired by adding one to a
/// uniformly chosen vertex, recorded in parity_adjusted.
inline DegreeSequence sample_degree_sequence(const DegreeDistribution& dist, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw ArgumentError("sample_degree_sequence: n must be >= 1");
  Rng rng(seed);
  DegreeSampler sampler(dist);
  DegreeSequence seq;
  seq.degrees.resize(n);
  std::uint64_t total = 0;
  for (auto& d : seq.degrees) {
    d = sampler(rng);
    total += d;
  }
  if (total % 2 == 1) {
    const auto v = static_cast<Vertex>(rng.below(n));
    ++seq.degrees[v];
    seq.parity_adjusted = v;
  }
  return seq;
}

inline DegreeSequence regular_sequence(std::size_t n, std::uint32_t d) {
  DegreeSequence seq;
  seq.degrees.assign(n, d);
  return seq;
}

namespace detail {

inline void require_even(const DegreeSequence& seq, const char* who) {
  if (seq.total() % 2 != 0) throw ParityError(std::string(who) + ": degree sum is odd");
}

}  // namespace detail

/// Configuration model: uniform perfect matching of the half-edges.
/// Fisher-Yates shuffle of the stub array, then consecutive stubs are paired.
inline MultiGraph generate(const DegreeSequence& seq, std::uint64_t seed) {
  detail::require_even(seq, "generate");
  std::vector<Vertex> stubs;
  stubs.reserve(seq.total());
  for (Vertex v = 0; v < seq.size(); ++v) stubs.insert(stubs.end(), seq.degrees[v], v);
  Rng rng(seed);
  for (std::size_t i = stubs.size(); i > 1; --i) std::swap(stubs[i - 1], stubs[rng.below(i)]);
  std::vector<Edge> edges;
  edges.reserve(stubs.size() / 2);
  for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) edges.push_back({stubs[i], stubs[i + 1]});
  return MultiGraph(seq.size(), std::move(edges));
}

/// Default coalescing order: vertices of degree > 1 in increasing label order.
inline std::vector<Vertex> default_coalescing_order(const DegreeSequence& seq) {
  std::vector<Vertex> order;
  for (Vertex v = 0; v < seq.size(); ++v)
    if (seq.degrees[v] > 1) order.push_back(v);
  return order;
}

/// Configuration model built by coalescing. Starts from total-degree many
/// degree-one vertices with a uniform matching between them; for each vertex
/// of degree > 1, in the given order, picks that many still-unlabeled
/// degree-one vertices uniformly and merges them into it; finally labels the
/// leftover degree-one vertices with the degree-one vertices at random.
inline MultiGraph generate_sequential(const DegreeSequence& seq, const std::vector<Vertex>& order, std::uint64_t seed) {
  detail::require_even(seq, "generate_sequential");
  const std::size_t n = seq.size();
  {
    std::vector<char> seen(n, 0);
    std::size_t required = 0;
    for (Vertex v = 0; v < n; ++v) required += seq.degrees[v] > 1 ? 1 : 0;
    if (order.size() != required)
      throw ArgumentError("generate_sequential: order must list each vertex of degree > 1 exactly once");
    for (Vertex v : order) {
      if (v >= n || seq.degrees[v] <= 1 || seen[v])
        throw ArgumentError("generate_sequential: order must list each vertex of degree > 1 exactly once");
      seen[v] = 1;
    }
  }

  const std::size_t total = seq.total();
  Rng rng(seed);

  // Uniform matching of the stub-vertices 0..total-1.
  std::vector<std::size_t> perm(total);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = total; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);

  // Coalescing. `red` holds the unlabeled stub-vertices.
  std::vector<std::size_t> red(total);
  std::iota(red.begin(), red.end(), std::size_t{0});
  std::vector<Vertex> owner(total, 0);
  for (Vertex v : order) {
    for (std::uint32_t j = 0; j < seq.degrees[v]; ++j) {
      const std::size_t pick = rng.below(red.size());
      owner[red[pick]] = v;
      red[pick] = red.back();
      red.pop_back();
    }
  }

  std::vector<Vertex> ones;
  for (Vertex v = 0; v < n; ++v)
    if (seq.degrees[v] == 1) ones.push_back(v);
  for (std::size_t i = ones.size(); i > 1; --i) std::swap(ones[i - 1], ones[rng.below(i)]);
  for (std::size_t i = 0; i < red.size(); ++i) owner[red[i]] = ones[i];

  std::vector<Edge> edges;
  edges.reserve(total / 2);
  for (std::size_t i = 0; i + 1 < total; i += 2) edges.push_back({owner[perm[i]], owner[perm[i + 1]]});
  return MultiGraph(n, std::move(edges));
}

inline MultiGraph generate_sequential(const DegreeSequence& seq, std::uint64_t seed) {
  return generate_sequential(seq, default_coalescing_order(seq), seed);
}

/// Bond percolation: every edge, loops included, kept independently with
/// probability p.
inline MultiGraph percolate(const MultiGraph& g, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("percolate: p must lie in [0,1]");
  Rng rng(seed);
  std::vector<Edge> kept;
  kept.reserve(static_cast<std::size_t>(static_cast<double>(g.num_edges()) * p) + 16);
  for (const Edge& e : g.edges())
    if (rng.bernoulli(p)) kept.push_back(e);
  return MultiGraph(g.num_vertices(), std::move(kept));
}

/// Repeats generate() until the pairing is simple. The accepted graph is
/// uniform over simple graphs with the given degrees.
inline std::pair<MultiGraph, GenReport> condition_simple(const DegreeSequence& seq, std::uint64_t seed,
                                                         std::uint64_t max_attempts) {
  detail::require_even(seq, "condition_simple");
  if (max_attempts < 1) throw ArgumentError("condition_simple: max_attempts must be >= 1");
  for (std::uint64_t attempt = 1; attempt <= max_attempts; ++attempt) {
    MultiGraph g = generate(seq, derive_seed(seed, {attempt}));
    if (g.is_simple()) return {std::move(g), GenReport{seed, attempt, true, seq.parity_adjusted}};
  }
  throw RejectionFailureError("condition_simple: no simple graph after " + std::to_string(max_attempts) + " attempts",
                              max_attempts);
}

/// Odd double factorial with the argument written as an even number:
/// odd_double_factorial(2m) = (2m-1)(2m-3)...3*1, the number of perfect
/// matchings of 2m points. Note this is NOT the usual (2m)!! = 2m(2m-2)...2.
/// Returned as a natural logarithm to stay finite for large m.
inline double log_odd_double_factorial(std::uint64_t two_m) {
  if (two_m % 2 != 0) throw DomainError("odd double factorial: argument must be even");
  if (two_m == 0) return 0.0;
  const double m = static_cast<double>(two_m / 2);
  // (2m-1)!!_odd = (2m)! / (2^m m!)
  return std::lgamma(2.0 * m + 1.0) - m * std::log(2.0) - std::lgamma(m + 1.0);
}

/// Probability that a fixed set of s half-edges (s even) is matched within
/// itself in a uniform matching of 2m half-edges.
inline double matching_probability(std::uint64_t s, std::uint64_t m) {
  if (s % 2 != 0) throw DomainError("matching_probability: s must be even");
  if (s > 2 * m) throw DomainError("matching_probability: s must not exceed 2m");
  if (m == 0) return 1.0;
  // prod_{i < s/2} (s-2i-1)/(2m-2i-1); avoids overflow of the double factorials.
  double p = 1.0;
  for (std::uint64_t i = 0; i < s / 2; ++i)
    p *= static_cast<double>(s - 2 * i - 1) / static_cast<double>(2 * m - 2 * i - 1);
  return p;
}

}  // namespace cmcut
