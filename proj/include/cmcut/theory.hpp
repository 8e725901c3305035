#pragma once

#include <cmath>
#include <cstdint>
#include <sstream>

#include "cmcut/distribution.hpp"
#include "cmcut/errors.hpp"

namespace cmcut {

struct Moments {
  double mu = 0.0;   ///< E[D]
  double ed2 = 0.0;  ///< E[D(D-1)]
  double nu = 0.0;   ///< E[D(D-1)] / E[D]
};

struct XiEta {
  double xi = 1.0;
  double eta = 0.0;
  std::uint64_t iterations = 0;
};

struct TheoryParams {
  double mu = 0.0;
  double ed2 = 0.0;
  double nu = 0.0;
  double xi = 1.0;
  double eta = 0.0;
};

struct PercolationThresholds {
  double p_min = 0.0;
  double p_max = 0.0;
};

inline Moments moments(const DegreeDistribution& dist) {
  Moments m;
  m.mu = dist.mean();
  if (!(m.mu > 0.0)) throw DegenerateDistributionError("moments: distribution has zero mean");
  m.ed2 = dist.second_factorial_moment();
  m.nu = m.ed2 / m.mu;
  return m;
}

/// Smallest fixed point xi in [0,1] of x -> g_D'(x)/E[D] and eta = 1 - g_D(xi).
///
/// Monotone iteration from 0: the map is nondecreasing on [0,1], so iterates
/// increase to the smallest fixed point. When nu <= 1 that point is 1.
inline XiEta solve_xi_eta(const DegreeDistribution& dist, double tol = 1e-12,
                          std::uint64_t max_iterations = 1'000'000) {
  if (!(tol > 0.0)) throw DomainError("solve_xi_eta: tol must be positive");
  const Moments m = moments(dist);
  XiEta r;
  if (m.nu <= 1.0) return r;
  double x = 0.0;
  for (std::uint64_t it = 1; it <= max_iterations; ++it) {
    const double next = dist.pgf_derivative(x) / m.mu;
    if (std::abs(next - x) < tol) {
      r.xi = next;
      r.eta = 1.0 - dist.pgf(next);
      r.iterations = it;
      return r;
    }
    x = next;
  }
  std::ostringstream os;
  os.precision(17);
  os << "solve_xi_eta: no convergence after " << max_iterations << " iterations (nu=" << m.nu
     << ", last iterate " << x << ", residual " << dist.pgf_derivative(x) / m.mu - x << ")";
  throw NumericalError(os.str());
}

inline TheoryParams theory_params(const DegreeDistribution& dist, double tol = 1e-12) {
  const Moments m = moments(dist);
  const XiEta s = solve_xi_eta(dist, tol);
  return {m.mu, m.ed2, m.nu, s.xi, s.eta};
}

/// Mean of the Poisson limit of the distance from bipartiteness for nu < 1.
inline double distbip_poisson_mean(double nu) {
  if (!(nu >= 0.0) || !(nu < 1.0)) throw DomainError("distbip_poisson_mean: requires 0 <= nu < 1");
  return 0.25 * std::log((1.0 + nu) / (1.0 - nu));
}

/// Mean of the Poisson limit of the number of k-cycles: nu^k / (2k).
inline double cycle_poisson_mean(double nu, std::uint32_t k) {
  if (k == 0) throw DomainError("cycle_poisson_mean: k must be >= 1");
  if (!(nu >= 0.0)) throw DomainError("cycle_poisson_mean: nu must be >= 0");
  return std::pow(nu, static_cast<double>(k)) / (2.0 * k);
}

/// Percolation thresholds on d-regular graphs: p_min(k, d) for the k-section
/// width and p_max(d) = 1/(d-1) for Max-Cut.
inline PercolationThresholds percolation_thresholds(int k, int d) {
  if (k < 2) throw DomainError("percolation_thresholds: k must be >= 2");
  if (d < 3) throw DomainError("percolation_thresholds: d must be >= 3");
  const double base = 1.0 - 1.0 / k;
  const double num = 1.0 - std::pow(base, 1.0 / d);
  const double den = 1.0 - std::pow(base, (d - 1.0) / d);
  return {num / den, 1.0 / (d - 1.0)};
}

/// f(c, mu) whose sign change locates c*(mu).
inline double cstar_objective(double c, double mu) {
  const double s = c / std::sqrt(mu);
  const double a = 0.25 - s;
  const double b = 0.25 + s;
  // x^{-x} with the continuous extension 0^0 = 1.
  auto pw = [](double x) { return x > 0.0 ? std::exp(-x * std::log(x)) : 1.0; };
  return pw(a) * pw(b) - std::pow(2.0, 1.0 - 1.0 / mu);
}

/// Root c* of f(., mu) on (0, sqrt(mu)/4), by bisection. f is strictly
/// decreasing in c, positive at 0 and negative near sqrt(mu)/4 when mu > 2.
inline double cstar(double mu, double tol = 1e-10) {
  if (!(mu > 2.0)) throw DomainError("cstar: requires mu > 2");
  if (!(tol > 0.0)) throw DomainError("cstar: tol must be positive");
  double lo = 1e-9;
  double hi = std::sqrt(mu) / 4.0 - 1e-9;
  if (!(cstar_objective(lo, mu) > 0.0) || !(cstar_objective(hi, mu) < 0.0))
    throw NumericalError("cstar: objective does not change sign on the bracket");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (cstar_objective(mid, mu) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

/// High-density upper bound n (mu/4 + c sqrt(mu)) on Max-Cut.
inline double maxcut_upper_bound(std::uint64_t n, double mu, double c) {
  if (n < 1) throw DomainError("maxcut_upper_bound: n must be >= 1");
  if (!(mu > 0.0)) throw DomainError("maxcut_upper_bound: mu must be positive");
  if (c < 0.0) throw DomainError("maxcut_upper_bound: c must be nonnegative");
  return static_cast<double>(n) * (mu / 4.0 + c * std::sqrt(mu));
}

}  // namespace cmcut
