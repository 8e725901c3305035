#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cmcut/distribution.hpp"
#include "cmcut/errors.hpp"
#include "cmcut/rng.hpp"

namespace cmcut {

/// Generation sizes of one run of the exploration process: root offspring
/// from D, every later individual has D* - 1 children.
struct BranchingOutcome {
  std::vector<std::uint64_t> generation_sizes;  ///< Z_0 = 1, Z_1, ..., Z_G
  std::optional<std::uint32_t> extinct_at;      ///< first g with Z_g = 0
  bool survived_horizon = false;
  bool capped = false;  ///< population cap hit; counted as survival
};

struct Estimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::uint64_t trials = 0;
};

inline constexpr std::uint64_t kPopulationCap = 10'000'000;
inline constexpr std::uint32_t kDefaultHorizon = 30;

/// Offspring law with a fast path for the total offspring of a whole
/// generation: small generations draw individually, large ones draw the
/// multinomial counts through conditional binomials.
class OffspringLaw {
 public:
  explicit OffspringLaw(const DegreeDistribution& law) : sampler_(law) {
    for (const auto& [j, p] : law.support()) {
      values_.push_back(j);
      probs_.push_back(p);
    }
  }

  std::uint32_t draw(Rng& rng) const { return sampler_(rng); }

  /// Sum of `parents` independent draws.
  std::uint64_t total(std::uint64_t parents, Rng& rng) const {
    if (parents <= 32) {
      std::uint64_t s = 0;
      for (std::uint64_t i = 0; i < parents; ++i) s += sampler_(rng);
      return s;
    }
    std::uint64_t remaining = parents, s = 0;
    double mass_left = 1.0;
    for (std::size_t i = 0; i < values_.size() && remaining > 0; ++i) {
      std::uint64_t count = remaining;
      if (i + 1 < values_.size()) {
        const double q = std::clamp(probs_[i] / mass_left, 0.0, 1.0);
        std::binomial_distribution<std::uint64_t> bin(remaining, q);
        count = bin(rng.engine());
      }
      s += count * values_[i];
      remaining -= count;
      mass_left -= probs_[i];
    }
    return s;
  }

 private:
  DegreeSampler sampler_;
  std::vector<std::uint32_t> values_;
  std::vector<double> probs_;
};

namespace detail {

inline double binomial_stderr(double p, std::uint64_t trials) {
  return std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(trials));
}

/// Deepest generation (capped at horizon) reached by the descendants of one
/// individual, which sits at depth 0. Reaching the population cap counts as
/// reaching the horizon.
inline std::uint32_t depth_reached(const OffspringLaw& law, std::uint32_t horizon, Rng& rng, std::uint64_t cap) {
  std::uint64_t z = 1;
  for (std::uint32_t t = 1; t <= horizon; ++t) {
    z = law.total(z, rng);
    if (z == 0) return t - 1;
    if (z >= cap) return horizon;
  }
  return horizon;
}

inline void require_positive_mean(const DegreeDistribution& dist, const char* who) {
  if (!(dist.mean() > 0.0)) throw DegenerateDistributionError(std::string(who) + ": E[D] = 0");
}

/// Explicit tree of the first `explicit_gens` generations. For every
/// individual it records the deepest descendant depth (capped at horizon);
/// the deepest explicit generation is finished with generation counts.
struct ExplicitTree {
  std::vector<std::vector<std::uint32_t>> parent;  ///< per generation g >= 1
  std::vector<std::vector<std::uint32_t>> depth;   ///< per generation g >= 0
};

inline ExplicitTree grow_tree(const DegreeSampler& root_law, const OffspringLaw& law, std::uint32_t explicit_gens,
                              std::uint32_t horizon, Rng& rng, std::uint64_t cap) {
  constexpr std::size_t kExplicitLimit = 50'000'000;
  ExplicitTree t;
  t.parent.resize(explicit_gens + 1);
  t.depth.resize(explicit_gens + 1);
  t.parent[0] = {0};
  for (std::uint32_t g = 0; g < explicit_gens; ++g) {
    const std::size_t count = t.parent[g].size();
    for (std::size_t i = 0; i < count; ++i) {
      const std::uint32_t c = g == 0 ? root_law(rng) : law.draw(rng);
      t.parent[g + 1].insert(t.parent[g + 1].end(), c, static_cast<std::uint32_t>(i));
    }
    if (t.parent[g + 1].size() > kExplicitLimit) throw LimitError("branching: explicit tree too large");
  }
  const std::uint32_t last = explicit_gens;
  t.depth[last].resize(t.parent[last].size());
  for (auto& d : t.depth[last]) d = depth_reached(law, horizon, rng, cap);
  for (std::uint32_t g = last; g-- > 0;) {
    t.depth[g].assign(t.parent[g].size(), 0);
    for (std::size_t i = 0; i < t.parent[g + 1].size(); ++i) {
      auto& d = t.depth[g][t.parent[g + 1][i]];
      d = std::max(d, std::min(horizon, t.depth[g + 1][i] + 1));
    }
  }
  return t;
}

/// Number of children of individual i at generation g whose subtrees reach
/// the horizon.
inline std::vector<std::vector<std::uint32_t>> surviving_children(const ExplicitTree& t, std::uint32_t gens,
                                                                  std::uint32_t horizon) {
  std::vector<std::vector<std::uint32_t>> out(gens);
  for (std::uint32_t g = 0; g < gens; ++g) {
    out[g].assign(t.parent[g].size(), 0);
    for (std::size_t i = 0; i < t.parent[g + 1].size(); ++i)
      if (t.depth[g + 1][i] >= horizon) ++out[g][t.parent[g + 1][i]];
  }
  return out;
}

}  // namespace detail

/// One run truncated at max_gen generations.
inline BranchingOutcome simulate_bp(const DegreeDistribution& dist, std::uint32_t max_gen, std::uint64_t seed,
                                    std::uint64_t cap = kPopulationCap) {
  if (max_gen < 1) throw ArgumentError("simulate_bp: max_gen must be >= 1");
  detail::require_positive_mean(dist, "simulate_bp");
  const DegreeSampler root(dist);
  const OffspringLaw law(dist.size_biased_minus_one());
  Rng rng(seed);
  BranchingOutcome out;
  out.generation_sizes.push_back(1);
  std::uint64_t z = root(rng);
  for (std::uint32_t g = 1; g <= max_gen; ++g) {
    if (g > 1) z = law.total(z, rng);
    out.generation_sizes.push_back(z);
    if (z == 0) {
      out.extinct_at = g;
      return out;
    }
    if (z >= cap) {
      out.capped = true;
      out.survived_horizon = true;
      return out;
    }
  }
  out.survived_horizon = true;
  return out;
}

/// Fraction of runs with Z_max_gen > 0.
inline Estimate estimate_survival(const DegreeDistribution& dist, std::uint32_t max_gen, std::uint64_t trials,
                                  std::uint64_t seed, std::uint64_t cap = kPopulationCap) {
  if (trials < 1) throw ArgumentError("estimate_survival: trials must be >= 1");
  if (max_gen < 1) throw ArgumentError("estimate_survival: max_gen must be >= 1");
  detail::require_positive_mean(dist, "estimate_survival");
  const DegreeSampler root(dist);
  const OffspringLaw law(dist.size_biased_minus_one());
  Rng rng(seed);
  std::uint64_t survived = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    std::uint64_t z = root(rng);
    bool alive = z > 0;
    for (std::uint32_t g = 2; g <= max_gen && alive && z < cap; ++g) {
      z = law.total(z, rng);
      alive = z > 0;
    }
    survived += alive ? 1 : 0;
  }
  const double p = static_cast<double>(survived) / static_cast<double>(trials);
  return {p, detail::binomial_stderr(p, trials), trials};
}

struct SurvivalCheck {
  Estimate at_L;
  Estimate at_2L;
  bool converged = false;  ///< |at_L - at_2L| < 2 * at_L.std_error
};

/// Survival to depth L and 2L from the same trials, as a check that depth L
/// stands in for survival forever.
inline SurvivalCheck survival_convergence(const DegreeDistribution& dist, std::uint32_t L, std::uint64_t trials,
                                          std::uint64_t seed, std::uint64_t cap = kPopulationCap) {
  if (trials < 1) throw ArgumentError("survival_convergence: trials must be >= 1");
  if (L < 1) throw ArgumentError("survival_convergence: L must be >= 1");
  detail::require_positive_mean(dist, "survival_convergence");
  const DegreeSampler root(dist);
  const OffspringLaw law(dist.size_biased_minus_one());
  Rng rng(seed);
  std::uint64_t reach_L = 0, reach_2L = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    std::uint64_t z = root(rng);  // generation 1
    std::uint32_t depth = z > 0 ? 1 : 0;
    for (std::uint32_t g = 2; g <= 2 * L && z > 0 && z < cap; ++g) {
      z = law.total(z, rng);
      if (z > 0) depth = g;
    }
    if (z >= cap) depth = 2 * L;  // capped runs count as survivors
    reach_L += depth >= L ? 1 : 0;
    reach_2L += depth >= 2 * L ? 1 : 0;
  }
  SurvivalCheck c;
  const double pL = static_cast<double>(reach_L) / static_cast<double>(trials);
  const double p2L = static_cast<double>(reach_2L) / static_cast<double>(trials);
  c.at_L = {pL, detail::binomial_stderr(pL, trials), trials};
  c.at_2L = {p2L, detail::binomial_stderr(p2L, trials), trials};
  c.converged = pL == p2L || std::abs(pL - p2L) < 2.0 * c.at_L.std_error;
  return c;
}

/// Probability that some individual in generations 0..r has at least two
/// children whose lines of descent each reach L further generations.
inline Estimate estimate_ds_r(const DegreeDistribution& dist, std::uint32_t r, std::uint32_t L, std::uint64_t trials,
                              std::uint64_t seed, std::uint64_t cap = kPopulationCap) {
  if (trials < 1) throw ArgumentError("estimate_ds_r: trials must be >= 1");
  if (L < 1) throw ArgumentError("estimate_ds_r: L must be >= 1");
  detail::require_positive_mean(dist, "estimate_ds_r");
  const DegreeSampler root(dist);
  const OffspringLaw law(dist.size_biased_minus_one());
  Rng rng(seed);
  std::uint64_t hits = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const auto tree = detail::grow_tree(root, law, r + 1, L, rng, cap);
    const auto surv = detail::surviving_children(tree, r + 1, L);
    bool hit = false;
    for (const auto& gen : surv)
      for (auto c : gen) hit = hit || c >= 2;
    hits += hit ? 1 : 0;
  }
  const double p = static_cast<double>(hits) / static_cast<double>(trials);
  return {p, detail::binomial_stderr(p, trials), trials};
}

/// Probability that exactly j of the root's children have lines of descent
/// reaching L generations below them.
inline Estimate estimate_rho_j(const DegreeDistribution& dist, std::uint32_t j, std::uint32_t L, std::uint64_t trials,
                               std::uint64_t seed, std::uint64_t cap = kPopulationCap) {
  if (trials < 1) throw ArgumentError("estimate_rho_j: trials must be >= 1");
  if (L < 1) throw ArgumentError("estimate_rho_j: L must be >= 1");
  detail::require_positive_mean(dist, "estimate_rho_j");
  const DegreeSampler root(dist);
  const OffspringLaw law(dist.size_biased_minus_one());
  Rng rng(seed);
  std::uint64_t hits = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const std::uint32_t children = root(rng);
    std::uint32_t surviving = 0;
    for (std::uint32_t c = 0; c < children; ++c)
      surviving += detail::depth_reached(law, L, rng, cap) >= L ? 1 : 0;
    hits += surviving == j ? 1 : 0;
  }
  const double p = static_cast<double>(hits) / static_cast<double>(trials);
  return {p, detail::binomial_stderr(p, trials), trials};
}

}  // namespace cmcut
