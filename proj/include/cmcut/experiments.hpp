#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "json.hpp"

#include "cmcut/branching.hpp"
#include "cmcut/cuts.hpp"
#include "cmcut/distribution.hpp"
#include "cmcut/errors.hpp"
#include "cmcut/generator.hpp"
#include "cmcut/rng.hpp"
#include "cmcut/structure.hpp"
#include "cmcut/theory.hpp"
#include "cmcut/version.hpp"

namespace cmcut {

/// Tunables shared by the metrics. Unset optionals mean "not applicable".
struct ExperimentParams {
  std::uint32_t k = 2;
  std::uint32_t r = 2;
  std::uint32_t L = kDefaultHorizon;
  std::uint32_t K_cycles = 3;
  std::optional<double> percolation_p;
  std::vector<double> p_grid;
  std::vector<double> n_grid;
  std::uint32_t exact_limit = kDefaultExactLimit;
  std::uint32_t restarts = kDefaultRestarts;
  bool simple = false;
  std::uint64_t max_attempts = 1000;
  friend bool operator==(const ExperimentParams&, const ExperimentParams&) = default;
};

struct ExperimentSpec {
  std::variant<DegreeDistribution, std::uint32_t> law;  ///< distribution or regular degree
  std::uint64_t n = 0;
  std::uint64_t replicates = 1;
  std::uint64_t master_seed = 0;
  std::vector<std::string> metrics;
  ExperimentParams params;
  friend bool operator==(const ExperimentSpec&, const ExperimentSpec&) = default;
};

struct ResultRow {
  std::uint64_t replicate = 0;
  std::uint64_t seed = 0;
  std::string grid_param;  ///< empty outside scans
  std::optional<double> grid_value;
  std::string metric;
  double value = 0.0;
  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

struct EnsembleResult {
  std::vector<ResultRow> rows;
  nlohmann::json provenance;

  /// Values of one metric in row order, optionally restricted to a grid value.
  std::vector<double> values(const std::string& metric, std::optional<double> grid_value = std::nullopt) const {
    std::vector<double> out;
    for (const auto& r : rows)
      if (r.metric == metric && (!grid_value || r.grid_value == grid_value)) out.push_back(r.value);
    return out;
  }
};

struct GofReport {
  double tv_distance = 0.0;
  double chi2 = 0.0;
  std::uint32_t dof = 1;
  double p_value = 1.0;
};

/// Names accepted in ExperimentSpec::metrics. cycle_census expands to one
/// row per length, named cycle_census.C1 .. cycle_census.CK.
inline const std::vector<std::string>& metric_registry() {
  static const std::vector<std::string> names = {
      "giant_fraction", "core_fraction",   "distbip",         "distbip_exact",          "cycle_census",
      "pair_count",     "ksection_width",  "ksection_conditions_met", "bisection_width", "maxcut_lower",
      "tc_r",           "num_edges"};
  return names;
}

inline void validate_spec(const ExperimentSpec& spec) {
  if (spec.n < 1) throw SpecError("field 'n': must be >= 1");
  if (spec.replicates < 1) throw SpecError("field 'replicates': must be >= 1");
  if (spec.metrics.empty()) throw SpecError("field 'metrics': at least one metric required");
  const auto& reg = metric_registry();
  for (std::size_t i = 0; i < spec.metrics.size(); ++i)
    if (std::find(reg.begin(), reg.end(), spec.metrics[i]) == reg.end())
      throw SpecError("field 'metrics[" + std::to_string(i) + "]': unknown metric '" + spec.metrics[i] + "'");
  const auto& p = spec.params;
  if (p.percolation_p && !(*p.percolation_p >= 0.0 && *p.percolation_p <= 1.0))
    throw SpecError("field 'params.percolation_p': must lie in [0,1]");
  for (double x : p.p_grid)
    if (!(x >= 0.0 && x <= 1.0)) throw SpecError("field 'params.p_grid': values must lie in [0,1]");
  for (double x : p.n_grid)
    if (!(x >= 1.0) || x != std::floor(x)) throw SpecError("field 'params.n_grid': values must be positive integers");
  if (p.k < 2) throw SpecError("field 'params.k': must be >= 2");
  if (p.L < 1) throw SpecError("field 'params.L': must be >= 1");
  if (p.K_cycles < 1 || p.K_cycles > kDefaultCycleCap)
    throw SpecError("field 'params.K_cycles': must lie in 1.." + std::to_string(kDefaultCycleCap));
  if (p.exact_limit < 1) throw SpecError("field 'params.exact_limit': must be >= 1");
  if (p.restarts < 1) throw SpecError("field 'params.restarts': must be >= 1");
  if (const auto* d = std::get_if<std::uint32_t>(&spec.law); d && (static_cast<std::uint64_t>(*d) * spec.n) % 2 != 0)
    throw SpecError("field 'regular_d': n * d must be even");
  const bool needs_k = std::find(spec.metrics.begin(), spec.metrics.end(), "ksection_width") != spec.metrics.end() ||
                       std::find(spec.metrics.begin(), spec.metrics.end(), "bisection_width") != spec.metrics.end() ||
                       std::find(spec.metrics.begin(), spec.metrics.end(), "ksection_conditions_met") !=
                           spec.metrics.end();
  if (needs_k && p.k > spec.n) throw SpecError("field 'params.k': exceeds n");
}

namespace detail {

inline std::vector<std::pair<std::string, double>> replicate_metrics(const ExperimentSpec& spec,
                                                                     std::uint64_t rep_seed) {
  const auto& prm = spec.params;
  DegreeSequence seq;
  if (const auto* dist = std::get_if<DegreeDistribution>(&spec.law))
    seq = sample_degree_sequence(*dist, spec.n, derive_seed(rep_seed, {1}));
  else
    seq = regular_sequence(spec.n, std::get<std::uint32_t>(spec.law));
  MultiGraph g = prm.simple ? condition_simple(seq, derive_seed(rep_seed, {2}), prm.max_attempts).first
                            : generate(seq, derive_seed(rep_seed, {2}));
  if (prm.percolation_p) g = percolate(g, *prm.percolation_p, derive_seed(rep_seed, {3}));

  std::optional<ComponentDecomposition> cd;
  auto comps = [&]() -> const ComponentDecomposition& {
    if (!cd) cd = components(g);
    return *cd;
  };
  std::optional<DistBipResult> db;
  auto bip = [&]() -> const DistBipResult& {
    if (!db) db = distbip(g, prm.exact_limit, derive_seed(rep_seed, {5}));
    return *db;
  };
  std::optional<std::pair<Partition, CutResult>> greedy;
  auto ks = [&]() -> const CutResult& {
    if (!greedy) greedy = ksection_greedy(g, prm.k);
    return greedy->second;
  };
  auto core_size = [&]() -> double {
    try {
      return static_cast<double>(two_core_decomposition(g, comps().components.front()).core_vertices.size());
    } catch (const NoCoreError&) {
      return 0.0;
    }
  };

  const double n = static_cast<double>(g.num_vertices());
  std::vector<std::pair<std::string, double>> out;
  for (const auto& m : spec.metrics) {
    if (m == "giant_fraction") {
      out.emplace_back(m, comps().giant_fraction());
    } else if (m == "core_fraction") {
      out.emplace_back(m, core_size() / n);
    } else if (m == "distbip") {
      out.emplace_back(m, static_cast<double>(bip().value));
    } else if (m == "distbip_exact") {
      out.emplace_back(m, bip().exact ? 1.0 : 0.0);
    } else if (m == "cycle_census") {
      const auto c = count_cycles(g, prm.K_cycles);
      for (std::size_t k = 0; k < c.counts.size(); ++k)
        out.emplace_back("cycle_census.C" + std::to_string(k + 1), static_cast<double>(c.counts[k]));
    } else if (m == "pair_count") {
      out.emplace_back(m, static_cast<double>(count_pairs(g)));
    } else if (m == "ksection_width") {
      out.emplace_back(m, static_cast<double>(ks().width));
    } else if (m == "ksection_conditions_met") {
      out.emplace_back(m, ks().conditions_met ? 1.0 : 0.0);
    } else if (m == "bisection_width") {
      out.emplace_back(m, static_cast<double>(
                              bisection_local_search(g, prm.k, derive_seed(rep_seed, {4}), prm.restarts).second.width));
    } else if (m == "maxcut_lower") {
      out.emplace_back(m, static_cast<double>(maxcut_local_search(g, derive_seed(rep_seed, {6}), prm.restarts).value));
    } else if (m == "tc_r") {
      double v = 0.0;
      try {
        v = measure_tc_r(g, prm.r);
      } catch (const NoCoreError&) {
      }
      out.emplace_back(m, v);
    } else if (m == "num_edges") {
      out.emplace_back(m, static_cast<double>(g.num_edges()));
    }
  }
  return out;
}

inline unsigned resolve_threads(unsigned threads) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  return threads;
}

/// Runs fn(i) for i in [0, count) on up to `threads` workers. The first
/// exception raised by any worker is rethrown.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  threads = static_cast<unsigned>(std::min<std::size_t>(resolve_threads(threads), std::max<std::size_t>(count, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < count;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = count;
        }
      }
    });
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace detail

nlohmann::json spec_to_json(const ExperimentSpec& spec);

/// Seed of replicate `replicate` at grid point `grid_index`.
inline std::uint64_t replicate_seed(std::uint64_t master_seed, std::uint64_t grid_index, std::uint64_t replicate) {
  return derive_seed(master_seed, {grid_index, replicate});
}

namespace detail {

inline std::vector<ResultRow> run_grid_point(const ExperimentSpec& spec, std::uint64_t grid_index,
                                             const std::string& grid_param, std::optional<double> grid_value,
                                             unsigned threads) {
  std::vector<std::vector<ResultRow>> per_rep(spec.replicates);
  parallel_for(spec.replicates, threads, [&](std::size_t rep) {
    const std::uint64_t seed = replicate_seed(spec.master_seed, grid_index, rep);
    for (auto& [name, value] : replicate_metrics(spec, seed))
      per_rep[rep].push_back({rep, seed, grid_param, grid_value, std::move(name), value});
  });
  std::vector<ResultRow> rows;
  for (auto& v : per_rep) rows.insert(rows.end(), std::make_move_iterator(v.begin()), std::make_move_iterator(v.end()));
  return rows;
}

}  // namespace detail

/// Runs every replicate of the spec. Output is identical for any thread
/// count: rows are ordered by replicate, then by metric in spec order.
inline EnsembleResult run_ensemble(const ExperimentSpec& spec, unsigned threads = 0) {
  validate_spec(spec);
  EnsembleResult result;
  result.rows = detail::run_grid_point(spec, 0, "", std::nullopt, threads);
  result.provenance = {{"spec", spec_to_json(spec)}, {"library", std::string("cmcut ") + kVersion}};
  return result;
}

/// run_ensemble over a grid of one parameter ("percolation_p" or "n"), with
/// independent seeds per grid point. Rows are tagged by the grid value.
inline EnsembleResult threshold_scan(const ExperimentSpec& base, const std::string& vary, const std::vector<double>& grid,
                                     unsigned threads = 0) {
  if (vary != "percolation_p" && vary != "n") throw SpecError("threshold_scan: cannot vary '" + vary + "'");
  if (grid.empty()) throw SpecError("threshold_scan: empty grid");
  std::vector<ExperimentSpec> points;
  for (double x : grid) {
    ExperimentSpec s = base;
    s.params.p_grid.clear();
    s.params.n_grid.clear();
    if (vary == "percolation_p")
      s.params.percolation_p = x;
    else {
      if (!(x >= 1.0) || x != std::floor(x)) throw SpecError("threshold_scan: n grid values must be positive integers");
      s.n = static_cast<std::uint64_t>(x);
    }
    validate_spec(s);
    points.push_back(std::move(s));
  }
  EnsembleResult result;
  for (std::size_t gi = 0; gi < points.size(); ++gi) {
    auto rows = detail::run_grid_point(points[gi], gi, vary, grid[gi], threads);
    result.rows.insert(result.rows.end(), std::make_move_iterator(rows.begin()), std::make_move_iterator(rows.end()));
  }
  result.provenance = {{"spec", spec_to_json(base)},
                       {"vary", vary},
                       {"grid", grid},
                       {"library", std::string("cmcut ") + kVersion}};
  return result;
}

/// Goodness of fit of integer samples to Poisson(lambda): total variation
/// distance (with the unobserved upper tail included) and a chi-square test
/// whose cells are pooled until each expects at least 5 counts.
inline GofReport poisson_gof(const std::vector<std::uint64_t>& samples, double lambda) {
  if (samples.empty()) throw ArgumentError("poisson_gof: no samples");
  if (!(lambda > 0.0)) throw DomainError("poisson_gof: lambda must be positive");
  const std::uint64_t top = *std::max_element(samples.begin(), samples.end());
  const double total = static_cast<double>(samples.size());
  std::vector<double> observed(top + 1, 0.0);
  for (auto s : samples) observed[s] += 1.0;
  std::vector<double> pmf(top + 1);
  double term = std::exp(-lambda), cum = 0.0;
  for (std::uint64_t k = 0; k <= top; ++k) {
    if (k > 0) term *= lambda / static_cast<double>(k);
    pmf[k] = term;
    cum += term;
  }
  const double tail_above = std::max(0.0, 1.0 - cum);

  GofReport rep;
  double tv = tail_above;
  for (std::uint64_t k = 0; k <= top; ++k) tv += std::abs(observed[k] / total - pmf[k]);
  rep.tv_distance = std::clamp(0.5 * tv, 0.0, 1.0);

  // Cells 0..top-1 and a last cell for ">= top".
  std::vector<double> exp_cells(pmf.begin(), pmf.end());
  exp_cells.back() += tail_above;
  for (auto& e : exp_cells) e *= total;
  std::vector<std::pair<double, double>> cells;  // (observed, expected)
  double o_acc = 0.0, e_acc = 0.0;
  for (std::size_t k = 0; k < exp_cells.size(); ++k) {
    o_acc += observed[k];
    e_acc += exp_cells[k];
    if (e_acc >= 5.0) {
      cells.emplace_back(o_acc, e_acc);
      o_acc = e_acc = 0.0;
    }
  }
  if (e_acc > 0.0 || o_acc > 0.0) {
    if (cells.empty())
      cells.emplace_back(o_acc, e_acc);
    else {
      cells.back().first += o_acc;
      cells.back().second += e_acc;
    }
  }
  if (cells.size() < 2) {
    // Everything pooled into one cell: fall back to {0} vs {>= 1}.
    const double e0 = total * std::exp(-lambda);
    cells = {{observed[0], e0}, {total - observed[0], total - e0}};
  }
  double chi2 = 0.0;
  for (const auto& [o, e] : cells)
    if (e > 0.0) chi2 += (o - e) * (o - e) / e;
  rep.chi2 = chi2;
  rep.dof = static_cast<std::uint32_t>(cells.size() - 1);
  boost::math::chi_squared_distribution<double> law(rep.dof);
  rep.p_value = boost::math::cdf(boost::math::complement(law, chi2));
  return rep;
}

// ---------------------------------------------------------------------------
// Serialization

inline nlohmann::json spec_to_json(const ExperimentSpec& spec) {
  nlohmann::json j;
  if (const auto* dist = std::get_if<DegreeDistribution>(&spec.law)) {
    nlohmann::json d = nlohmann::json::object();
    for (const auto& [deg, p] : dist->support()) d[std::to_string(deg)] = p;
    j["dist"] = d;
  } else {
    j["regular_d"] = std::get<std::uint32_t>(spec.law);
  }
  j["n"] = spec.n;
  j["replicates"] = spec.replicates;
  j["master_seed"] = spec.master_seed;
  j["metrics"] = spec.metrics;
  const auto& p = spec.params;
  nlohmann::json pj = {{"k", p.k},
                       {"r", p.r},
                       {"L", p.L},
                       {"K_cycles", p.K_cycles},
                       {"exact_limit", p.exact_limit},
                       {"restarts", p.restarts},
                       {"simple", p.simple},
                       {"max_attempts", p.max_attempts}};
  if (p.percolation_p) pj["percolation_p"] = *p.percolation_p;
  if (!p.p_grid.empty()) pj["p_grid"] = p.p_grid;
  if (!p.n_grid.empty()) pj["n_grid"] = p.n_grid;
  j["params"] = pj;
  return j;
}

namespace detail {

template <typename T>
T json_field(const nlohmann::json& obj, const std::string& key, const std::string& path) {
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw SpecError("field '" + path + "': missing or of the wrong type");
  }
}

template <typename T>
void json_optional(const nlohmann::json& obj, const std::string& key, const std::string& path, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw SpecError("field '" + path + "': wrong type");
  }
}

}  // namespace detail

inline ExperimentSpec spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw SpecError("spec: top level must be a JSON object");
  static const std::set<std::string> top_keys = {"dist", "regular_d", "n", "replicates", "master_seed", "metrics", "params"};
  for (const auto& [key, _] : j.items())
    if (!top_keys.count(key)) throw SpecError("field '" + key + "': unknown field");
  ExperimentSpec spec;
  const bool has_dist = j.contains("dist"), has_reg = j.contains("regular_d");
  if (has_dist == has_reg) throw SpecError("field 'dist': exactly one of 'dist' and 'regular_d' is required");
  if (has_dist) {
    const auto& d = j.at("dist");
    if (!d.is_object() || d.empty()) throw SpecError("field 'dist': must be a nonempty object degree -> probability");
    std::map<std::uint32_t, double> pmf;
    for (const auto& [key, val] : d.items()) {
      std::size_t used = 0;
      unsigned long deg = 0;
      try {
        deg = std::stoul(key, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != key.size() || !val.is_number())
        throw SpecError("field 'dist." + key + "': expected integer degree key and numeric probability");
      pmf[static_cast<std::uint32_t>(deg)] = val.get<double>();
    }
    try {
      spec.law = DegreeDistribution(pmf);
    } catch (const ArgumentError& e) {
      throw SpecError(std::string("field 'dist': ") + e.what());
    }
  } else {
    spec.law = detail::json_field<std::uint32_t>(j, "regular_d", "regular_d");
  }
  spec.n = detail::json_field<std::uint64_t>(j, "n", "n");
  spec.replicates = detail::json_field<std::uint64_t>(j, "replicates", "replicates");
  spec.master_seed = detail::json_field<std::uint64_t>(j, "master_seed", "master_seed");
  if (!j.contains("metrics") || !j.at("metrics").is_array()) throw SpecError("field 'metrics': must be an array");
  for (std::size_t i = 0; i < j.at("metrics").size(); ++i) {
    const auto& m = j.at("metrics")[i];
    if (!m.is_string()) throw SpecError("field 'metrics[" + std::to_string(i) + "]': must be a string");
    spec.metrics.push_back(m.get<std::string>());
  }
  if (j.contains("params")) {
    const auto& p = j.at("params");
    if (!p.is_object()) throw SpecError("field 'params': must be an object");
    static const std::set<std::string> keys = {"k",        "r",           "L",        "K_cycles",
                                               "percolation_p", "p_grid", "n_grid",   "exact_limit",
                                               "restarts", "simple",      "max_attempts"};
    for (const auto& [key, _] : p.items())
      if (!keys.count(key)) throw SpecError("field 'params." + key + "': unknown parameter");
    auto& q = spec.params;
    detail::json_optional(p, "k", "params.k", q.k);
    detail::json_optional(p, "r", "params.r", q.r);
    detail::json_optional(p, "L", "params.L", q.L);
    detail::json_optional(p, "K_cycles", "params.K_cycles", q.K_cycles);
    if (p.contains("percolation_p")) {
      double v = 0.0;
      detail::json_optional(p, "percolation_p", "params.percolation_p", v);
      q.percolation_p = v;
    }
    detail::json_optional(p, "p_grid", "params.p_grid", q.p_grid);
    detail::json_optional(p, "n_grid", "params.n_grid", q.n_grid);
    detail::json_optional(p, "exact_limit", "params.exact_limit", q.exact_limit);
    detail::json_optional(p, "restarts", "params.restarts", q.restarts);
    detail::json_optional(p, "simple", "params.simple", q.simple);
    detail::json_optional(p, "max_attempts", "params.max_attempts", q.max_attempts);
  }
  validate_spec(spec);
  return spec;
}

inline ExperimentSpec parse_spec(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SpecError(std::string("spec: invalid JSON: ") + e.what());
  }
  return spec_from_json(j);
}

inline ExperimentSpec read_spec(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open spec file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_spec(ss.str());
}

inline void write_spec(const ExperimentSpec& spec, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write spec file '" + path + "'");
  f << spec_to_json(spec).dump(2) << '\n';
}

inline std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline const char* kCsvHeader = "replicate,seed,grid_param,grid_value,metric,value";

inline std::string to_csv(const EnsembleResult& result) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& r : result.rows) {
    out += std::to_string(r.replicate) + ',' + std::to_string(r.seed) + ',' + r.grid_param + ',' +
           (r.grid_value ? format_real(*r.grid_value) : std::string()) + ',' + r.metric + ',' + format_real(r.value) +
           '\n';
  }
  return out;
}

inline void write_csv(const EnsembleResult& result, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write CSV '" + path + "'");
  f << to_csv(result);
  if (!f) throw IoError("write failed for '" + path + "'");
}

}  // namespace cmcut
