#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cmcut/errors.hpp"
#include "cmcut/rng.hpp"

namespace cmcut {

/// Probability mass function on a finite set of nonnegative integer degrees.
///
/// Stored densely over 0..max_degree(). Construction validates that every
/// probability is nonnegative and that the total is 1 within 1e-12.
class DegreeDistribution {
 public:
  static constexpr double kSumTolerance = 1e-12;

  DegreeDistribution() = default;

  explicit DegreeDistribution(const std::map<std::uint32_t, double>& pmf) {
    if (pmf.empty()) throw ArgumentError("degree distribution: empty support");
    std::uint32_t top = 0;
    for (const auto& [d, p] : pmf)
      if (p > 0.0) top = std::max(top, d);
    pmf_.assign(top + 1, 0.0);
    double total = 0.0;
    for (const auto& [d, p] : pmf) {
      if (!(p >= 0.0) || !std::isfinite(p))
        throw ArgumentError("degree distribution: invalid probability " + std::to_string(p) +
                            " at degree " + std::to_string(d));
      if (p > 0.0) pmf_[d] = p;
      total += p;
    }
    if (std::abs(total - 1.0) > kSumTolerance) {
      std::ostringstream os;
      os.precision(17);
      os << "degree distribution: probabilities sum to " << total << ", expected 1";
      throw ArgumentError(os.str());
    }
  }

  /// Degree d with probability one.
  static DegreeDistribution regular(std::uint32_t d) { return DegreeDistribution({{d, 1.0}}); }

  /// Poisson(lambda) truncated at the first degree where the cumulative mass
  /// reaches 1 - 1e-12, then renormalized.
  static DegreeDistribution truncated_poisson(double lambda) {
    if (!(lambda > 0.0)) throw DomainError("truncated_poisson: lambda must be positive");
    std::vector<double> w;
    double term = std::exp(-lambda);
    double cum = 0.0;
    for (std::uint32_t k = 0;; ++k) {
      if (k > 0) term *= lambda / k;
      w.push_back(term);
      cum += term;
      if (cum >= 1.0 - 1e-12 || k > 100000) break;
    }
    std::map<std::uint32_t, double> m;
    double total = 0.0;
    for (double x : w) total += x;
    for (std::size_t k = 0; k < w.size(); ++k) m[static_cast<std::uint32_t>(k)] = w[k] / total;
    return DegreeDistribution(renormalized(m));
  }

  std::uint32_t max_degree() const { return pmf_.empty() ? 0 : static_cast<std::uint32_t>(pmf_.size() - 1); }
  double prob(std::uint32_t d) const { return d < pmf_.size() ? pmf_[d] : 0.0; }
  const std::vector<double>& dense() const { return pmf_; }

  std::map<std::uint32_t, double> support() const {
    std::map<std::uint32_t, double> m;
    for (std::size_t d = 0; d < pmf_.size(); ++d)
      if (pmf_[d] > 0.0) m[static_cast<std::uint32_t>(d)] = pmf_[d];
    return m;
  }

  double mean() const {
    double s = 0.0;
    for (std::size_t d = 1; d < pmf_.size(); ++d) s += static_cast<double>(d) * pmf_[d];
    return s;
  }

  /// E[D(D-1)].
  double second_factorial_moment() const {
    double s = 0.0;
    for (std::size_t d = 2; d < pmf_.size(); ++d) s += static_cast<double>(d) * (d - 1.0) * pmf_[d];
    return s;
  }

  /// g_D(x) = E[x^D], Horner evaluation.
  double pgf(double x) const {
    double s = 0.0;
    for (std::size_t i = pmf_.size(); i-- > 0;) s = s * x + pmf_[i];
    return s;
  }

  /// g_D'(x).
  double pgf_derivative(double x) const {
    double s = 0.0;
    for (std::size_t i = pmf_.size(); i-- > 1;) s = s * x + static_cast<double>(i) * pmf_[i];
    return s;
  }

  /// Law of D* - 1 where P(D* = j) = j P(D = j) / E[D].
  DegreeDistribution size_biased_minus_one() const {
    const double mu = mean();
    if (!(mu > 0.0)) throw DegenerateDistributionError("size-biased law undefined: E[D] = 0");
    std::map<std::uint32_t, double> m;
    for (std::size_t j = 1; j < pmf_.size(); ++j)
      if (pmf_[j] > 0.0) m[static_cast<std::uint32_t>(j - 1)] = static_cast<double>(j) * pmf_[j] / mu;
    return DegreeDistribution(renormalized(m));
  }

  friend bool operator==(const DegreeDistribution&, const DegreeDistribution&) = default;

 private:
  static std::map<std::uint32_t, double> renormalized(std::map<std::uint32_t, double> m) {
    double total = 0.0;
    for (const auto& kv : m) total += kv.second;
    for (auto& kv : m) kv.second /= total;
    return m;
  }

  std::vector<double> pmf_;
};

/// Inverse-CDF sampler over a cumulative table; O(log support) per draw.
class DegreeSampler {
 public:
  explicit DegreeSampler(const DegreeDistribution& dist) {
    double c = 0.0;
    for (const auto& [d, p] : dist.support()) {
      c += p;
      values_.push_back(d);
      cumulative_.push_back(c);
    }
    cumulative_.back() = 1.0;
  }

  std::uint32_t operator()(Rng& rng) const {
    const double u = rng.uniform();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return values_[static_cast<std::size_t>(it - cumulative_.begin())];
  }

  const std::vector<std::uint32_t>& values() const { return values_; }

 private:
  std::vector<std::uint32_t> values_;
  std::vector<double> cumulative_;
};

/// Parses the "degree probability" line format. Blank lines and text after
/// '#' are ignored. Repeated degrees are an error.
inline DegreeDistribution parse_distribution(const std::string& text) {
  std::map<std::uint32_t, double> m;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    long long degree = 0;
    double p = 0.0;
    if (!(ls >> degree)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw ParseError("distribution line " + std::to_string(lineno) + ": expected 'degree probability'");
    }
    std::string rest;
    if (!(ls >> p) || (ls >> rest))
      throw ParseError("distribution line " + std::to_string(lineno) + ": expected 'degree probability'");
    if (degree < 0 || degree > 100000000)
      throw ParseError("distribution line " + std::to_string(lineno) + ": degree out of range");
    if (!m.emplace(static_cast<std::uint32_t>(degree), p).second)
      throw ParseError("distribution line " + std::to_string(lineno) + ": duplicate degree " +
                       std::to_string(degree));
  }
  if (m.empty()) throw ParseError("distribution: no entries");
  try {
    return DegreeDistribution(m);
  } catch (const ArgumentError& e) {
    throw ParseError(e.what());
  }
}

inline DegreeDistribution read_distribution_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open distribution file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_distribution(ss.str());
}

inline std::string format_distribution(const DegreeDistribution& dist) {
  std::ostringstream os;
  os.precision(17);
  for (const auto& [d, p] : dist.support()) os << d << ' ' << p << '\n';
  return os.str();
}

}  // namespace cmcut
