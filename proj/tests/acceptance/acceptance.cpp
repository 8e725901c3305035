// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails. Pass criterion numbers as arguments to run a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../oracles.hpp"
#include "cmcut/cmcut.hpp"

using namespace cmcut;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct Stats {
  double mean = 0.0, se = 0.0;
};

Stats stats(const std::vector<double>& x) {
  Stats s;
  if (x.empty()) return s;
  s.mean = std::accumulate(x.begin(), x.end(), 0.0) / double(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - s.mean) * (v - s.mean);
  if (x.size() > 1) s.se = std::sqrt(ss / double(x.size() - 1) / double(x.size()));
  return s;
}

ExperimentSpec make_spec(std::variant<DegreeDistribution, std::uint32_t> law, std::uint64_t n, std::uint64_t reps,
                         std::uint64_t seed, std::vector<std::string> metrics) {
  ExperimentSpec s;
  s.law = std::move(law);
  s.n = n;
  s.replicates = reps;
  s.master_seed = seed;
  s.metrics = std::move(metrics);
  return s;
}

const DegreeDistribution kSub({{1, 0.75}, {2, 0.25}});
const DegreeDistribution kMixed({{1, 0.5}, {3, 0.5}});

Outcome c1_distbip_poisson() {
  auto spec = make_spec(kSub, 2000, 1000, 101, {"distbip", "distbip_exact"});
  const auto res = run_ensemble(spec);
  std::vector<std::uint64_t> samples;
  for (double v : res.values("distbip")) samples.push_back(static_cast<std::uint64_t>(v));
  const auto exact = res.values("distbip_exact");
  const bool all_exact = std::all_of(exact.begin(), exact.end(), [](double e) { return e == 1.0; });
  const double lambda = distbip_poisson_mean(theory_params(kSub).nu);
  const auto gof = poisson_gof(samples, lambda);
  return {all_exact && gof.tv_distance < 0.05 && gof.p_value > 0.01,
          fmt("lambda=%.6f tv=%.4f p=%.4f all_exact=%d", lambda, gof.tv_distance, gof.p_value, int(all_exact))};
}

Outcome c2_giant_fraction() {
  const auto res = run_ensemble(make_spec(kMixed, 100000, 20, 102, {"giant_fraction"}));
  const auto s = stats(res.values("giant_fraction"));
  const double eta = theory_params(kMixed).eta;
  return {std::abs(s.mean - 0.8148) < 0.01 && std::abs(eta - 22.0 / 27.0) < 1e-9,
          fmt("mean=%.5f eta=%.5f", s.mean, eta)};
}

Outcome c3_subcritical_ksection() {
  const DegreeDistribution law({{1, 0.7}, {3, 0.3}});
  const auto res = run_ensemble(make_spec(law, 10000, 100, 103, {"ksection_width", "ksection_conditions_met"}));
  const auto w = res.values("ksection_width");
  const auto ok = res.values("ksection_conditions_met");
  std::size_t good = 0;
  for (std::size_t i = 0; i < w.size(); ++i) good += (ok[i] == 1.0 && w[i] <= 1.0);
  const double eta = theory_params(law).eta;
  return {eta < 0.5 && good >= 95, fmt("eta=%.4f good=%zu/%zu", eta, good, w.size())};
}

Outcome c4_supercritical_bisection() {
  auto spec = make_spec(kMixed, 0, 20, 104, {"bisection_width"});
  const std::vector<double> ns = {2000, 4000, 8000};
  const auto res = threshold_scan(spec, "n", ns);
  std::vector<double> means;
  std::string detail;
  for (double n : ns) {
    auto w = res.values("bisection_width", n);
    for (auto& x : w) x /= n;
    means.push_back(stats(w).mean);
    detail += fmt("n=%.0f:%.4f ", n, means.back());
  }
  const bool nonvanishing = std::all_of(means.begin(), means.end(), [](double m) { return m >= 0.02; });
  const double ratio = means.front() / means.back();
  return {nonvanishing && ratio <= 2.0 && ratio >= 0.5, detail + fmt("ratio=%.3f", ratio)};
}

Outcome c5_cycle_means() {
  auto spec = make_spec(kSub, 5000, 500, 105, {"cycle_census"});
  spec.params.K_cycles = 3;
  const auto res = run_ensemble(spec);
  const double nu = theory_params(kSub).nu;
  bool pass = true;
  std::string detail;
  for (std::uint32_t k = 1; k <= 3; ++k) {
    const auto s = stats(res.values("cycle_census.C" + std::to_string(k)));
    const double want = cycle_poisson_mean(nu, k);
    pass = pass && std::abs(s.mean - want) <= 3 * s.se;
    detail += fmt("C%u=%.5f(se %.5f, want %.6f) ", k, s.mean, s.se, want);
  }
  return {pass, detail};
}

Outcome c6_sequential_equivalence() {
  const DegreeSequence seq{{2, 1, 1}, std::nullopt};
  const int samples = 10000;
  std::map<std::string, std::uint64_t> cm, sq;
  for (int i = 0; i < samples; ++i) {
    ++cm[oracle::edge_key(generate(seq, derive_seed(106, {0, std::uint64_t(i)})))];
    ++sq[oracle::edge_key(generate_sequential(seq, derive_seed(106, {1, std::uint64_t(i)})))];
  }
  const double f_cm = double(cm["1-1,2-3"]) / samples, f_sq = double(sq["1-1,2-3"]) / samples;
  const double p = oracle::homogeneity_p_value(cm, sq);
  const bool pass = std::abs(f_cm - 1.0 / 3) <= 0.02 && std::abs(f_sq - 1.0 / 3) <= 0.02 && p > 0.001 &&
                    cm.size() == 2 && sq.size() == 2;
  return {pass, fmt("cm=%.4f sequential=%.4f p=%.4f", f_cm, f_sq, p)};
}

Outcome c7_percolation_thresholds() {
  auto spec = make_spec(std::uint32_t{3}, 100000, 10, 107, {"giant_fraction"});
  std::vector<double> grid;
  for (int i = 40; i <= 65; ++i) grid.push_back(i / 100.0);
  const auto res = threshold_scan(spec, "percolation_p", grid);
  std::map<int, double> mean;
  for (std::size_t i = 0; i < grid.size(); ++i) mean[40 + int(i)] = stats(res.values("giant_fraction", grid[i])).mean;
  std::optional<double> first_half;
  for (const auto& [pc, m] : mean)
    if (!first_half && m > 0.5) first_half = pc / 100.0;
  const double pmin = percolation_thresholds(2, 3).p_min;
  const double pmax = percolation_thresholds(2, 3).p_max;
  const bool pass = pmax == 0.5 && mean[45] < 0.01 && mean[55] > 0.1 && first_half &&
                    std::abs(*first_half - 0.5575) <= 0.03 && std::abs(pmin - 0.5575) < 1e-3;
  return {pass, fmt("g(0.45)=%.4f g(0.55)=%.4f first>1/2 at %.2f pmin=%.4f", mean[45], mean[55],
                    first_half.value_or(-1.0), pmin)};
}

Outcome c8_maxcut_bound() {
  const std::uint64_t n = 10000;
  auto spec = make_spec(std::uint32_t{8}, n, 20, 108, {"maxcut_lower"});
  const auto res = run_ensemble(spec);
  const double c = cstar(8.0) + 0.05;
  const double bound = maxcut_upper_bound(n, 8.0, c);
  double worst = 0.0;
  for (double v : res.values("maxcut_lower")) worst = std::max(worst, v);
  return {worst <= bound && !res.rows.empty(), fmt("max value=%.0f bound=%.1f c=%.4f", worst, bound, c)};
}

Outcome c9_cstar_limits() {
  bool pass = true;
  double prev = 0.0;
  std::string detail;
  for (double mu : {3.0, 10.0, 30.0, 50.0}) {
    const double c = cstar(mu);
    pass = pass && c > 0.0 && c < std::sqrt(mu) / 4.0 && c >= prev;
    prev = c;
    detail += fmt("c*(%.0f)=%.6f ", mu, c);
  }
  pass = pass && std::abs(cstar(50.0) - 0.416277) < 0.05;
  return {pass, detail};
}

Outcome c10_pair_count() {
  const auto res = run_ensemble(make_spec(kSub, 10000, 50, 110, {"pair_count"}));
  auto v = res.values("pair_count");
  for (auto& x : v) x /= 10000.0;
  const auto s = stats(v);
  return {std::abs(s.mean - 0.225) < 0.01, fmt("mean P/n=%.5f", s.mean)};
}

Outcome c11_tc_ds() {
  auto spec = make_spec(kMixed, 100000, 10, 111, {"tc_r"});
  spec.params.r = 2;
  const auto g = stats(run_ensemble(spec).values("tc_r"));
  const auto bp = estimate_ds_r(kMixed, 2, 30, 100000, 1111);
  return {std::abs(g.mean - bp.estimate) < 0.02, fmt("graph=%.5f bp=%.5f(se %.5f)", g.mean, bp.estimate, bp.std_error)};
}

Outcome c12_oracle_suites() {
  std::mt19937_64 rng(112);
  int cyc_bad = 0, bip_bad = 0, bis_bad = 0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + rng() % 8;
    const auto g = oracle::random_multigraph(rng, n, rng() % (n + 5));
    cyc_bad += count_cycles(g, 5).counts != oracle::cycles_by_edge_subsets(g, 5);
  }
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + rng() % 12;
    const auto g = oracle::random_multigraph(rng, n, rng() % (2 * n + 1));
    bip_bad += distbip(g).value != oracle::distbip_by_deletion(g);
  }
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 2 + rng() % 11;
    const auto g = oracle::random_multigraph(rng, n, rng() % (2 * n + 1));
    bis_bad += bisection_local_search(g, 2, t).second.width != oracle::min_bisection(g);
  }
  double worst = 0.0;
  for (int i = 1; i <= 9; ++i) {
    const double nu = i / 10.0;
    double series = 0.0;
    for (int k = 1; k < 2000; k += 2) series += std::pow(nu, k) / (2.0 * k);
    worst = std::max(worst, std::abs(series - distbip_poisson_mean(nu)));
  }
  return {cyc_bad == 0 && bip_bad == 0 && bis_bad == 0 && worst <= 1e-9,
          fmt("mismatches cycles=%d distbip=%d bisection=%d series_err=%.2e", cyc_bad, bip_bad, bis_bad, worst)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"subcritical distbip is Poisson", c1_distbip_poisson},
      {"giant component fraction", c2_giant_fraction},
      {"subcritical bisection width <= 1", c3_subcritical_ksection},
      {"supercritical bisection width linear in n", c4_supercritical_bisection},
      {"short cycle Poisson means", c5_cycle_means},
      {"sequential construction law", c6_sequential_equivalence},
      {"percolation thresholds on 3-regular graphs", c7_percolation_thresholds},
      {"max-cut upper bound on 8-regular graphs", c8_maxcut_bound},
      {"c* limits and monotonicity", c9_cstar_limits},
      {"pair count limit", c10_pair_count},
      {"core neighborhood vs double survival", c11_tc_ds},
      {"brute-force oracle suites", c12_oracle_suites},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << id << ": " << criteria[i].first << "  [" << o.detail
              << "] (" << fmt("%.1fs", secs) << ")" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
