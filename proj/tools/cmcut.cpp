// Command-line front end. Exit codes: 0 success, 1 runtime error, 2 usage error.

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "cmcut/cmcut.hpp"

using json = nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LawOptions {
  std::string dist_file;
  std::optional<std::uint32_t> regular;
};

void add_law_options(CLI::App* cmd, LawOptions& law) {
  auto* file = cmd->add_option("--dist-file", law.dist_file, "Degree distribution file (lines 'degree probability')");
  auto* reg = cmd->add_option("--regular", law.regular, "Use the d-regular law instead of a file");
  file->excludes(reg);
}

cmcut::DegreeDistribution load_law(const LawOptions& law) {
  if (law.regular) return cmcut::DegreeDistribution::regular(*law.regular);
  if (law.dist_file.empty()) throw UsageError("one of --dist-file or --regular is required");
  return cmcut::read_distribution_file(law.dist_file);
}

json nullable(std::optional<double> x) { return x ? json(*x) : json(nullptr); }

std::string show(const json& v) {
  if (v.is_null()) return "n/a";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) {
    std::ostringstream os;
    os << std::setprecision(10) << v.get<double>();
    return os.str();
  }
  return v.dump();
}

// Prints an object either as JSON or as an aligned "key  value" table.
void emit(const json& obj, bool as_json, std::ostream& os = std::cout) {
  if (as_json) {
    os << obj.dump(2) << '\n';
    return;
  }
  std::size_t width = 0;
  for (const auto& [k, v] : obj.items()) width = std::max(width, k.size());
  for (const auto& [k, v] : obj.items()) os << std::left << std::setw(static_cast<int>(width) + 2) << k << show(v) << '\n';
}

template <typename Fn>
void with_output(const std::string& path, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw cmcut::IoError("cannot write '" + path + "'");
  fn(f);
  if (!f) throw cmcut::IoError("write failed for '" + path + "'");
}

// ---------------------------------------------------------------------------

struct TheoryCmd {
  LawOptions law;
  std::uint32_t k = 2;
  bool as_json = false;

  int run() const {
    const auto dist = load_law(law);
    const auto t = cmcut::theory_params(dist);
    std::optional<double> db, pmin, pmax, cs;
    if (t.nu < 1.0) db = cmcut::distbip_poisson_mean(t.nu);
    // Percolation thresholds are defined for regular laws of degree >= 3.
    const auto support = dist.support();
    if (support.size() == 1 && support.begin()->first >= 3) {
      const auto th = cmcut::percolation_thresholds(static_cast<int>(k), static_cast<int>(support.begin()->first));
      pmin = th.p_min;
      pmax = th.p_max;
    }
    if (t.mu > 2.0) cs = cmcut::cstar(t.mu);
    emit({{"mu", t.mu},
          {"ed2", t.ed2},
          {"nu", t.nu},
          {"xi", t.xi},
          {"eta", t.eta},
          {"distbip_mean", nullable(db)},
          {"pmin", nullable(pmin)},
          {"pmax", nullable(pmax)},
          {"cstar", nullable(cs)}},
         as_json);
    return 0;
  }
};

struct GenCmd {
  LawOptions law;
  std::uint64_t n = 0;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool simple = false;
  bool sequential = false;
  std::uint64_t max_attempts = 1000;
  std::optional<double> p;
  bool as_json = false;

  int run() const {
    const auto dist = load_law(law);
    const auto seq = law.regular ? cmcut::regular_sequence(n, *law.regular)
                                 : cmcut::sample_degree_sequence(dist, n, cmcut::derive_seed(*seed, {1}));
    cmcut::GenReport report{*seed, 1, false, seq.parity_adjusted};
    const std::uint64_t graph_seed = cmcut::derive_seed(*seed, {2});
    cmcut::MultiGraph g = [&] {
      if (simple) {
        auto [h, r] = cmcut::condition_simple(seq, graph_seed, max_attempts);
        report.attempts = r.attempts;
        return std::move(h);
      }
      return sequential ? cmcut::generate_sequential(seq, graph_seed) : cmcut::generate(seq, graph_seed);
    }();
    if (p) g = cmcut::percolate(g, *p, cmcut::derive_seed(*seed, {3}));
    report.simple = g.is_simple();

    with_output(out, [&](std::ostream& os) { cmcut::write_edge_list(os, g); });
    const json summary = {{"n", g.num_vertices()},
                          {"m", g.num_edges()},
                          {"seed", report.seed},
                          {"attempts", report.attempts},
                          {"simple", report.simple},
                          {"parity_adjusted", report.parity_adjusted ? json(*report.parity_adjusted + 1) : json(nullptr)}};
    // The edge list owns stdout when no --out is given.
    emit(summary, as_json, out.empty() || out == "-" ? std::cerr : std::cout);
    return 0;
  }
};

struct AnalyzeCmd {
  std::string input;
  std::uint32_t r = 3;
  std::uint32_t cycles = 4;
  bool as_json = false;

  int run() const {
    const auto g = cmcut::read_edge_list_file(input);
    const auto cd = cmcut::components(g);
    json report;
    report["n"] = g.num_vertices();
    report["m"] = g.num_edges();
    report["component_sizes"] = cd.sizes();
    report["giant_fraction"] = cd.giant_fraction();
    std::map<std::string, std::uint64_t> trees;
    json tc = nullptr;
    std::size_t core_size = 0;
    if (!cd.components.empty()) {
      try {
        const auto core = cmcut::two_core_decomposition(g, cd.components.front());
        core_size = core.core_vertices.size();
        for (const auto& t : core.hanging_trees) ++trees[std::to_string(t.vertices.size())];
        tc = cmcut::tc_curve(g, r);
      } catch (const cmcut::NoCoreError&) {
      }
    }
    report["core_size"] = core_size;
    report["tree_size_histogram"] = trees;
    report["cycle_census"] = cmcut::count_cycles(g, cycles).counts;
    report["pair_count"] = cmcut::count_pairs(g);
    report["tc_r"] = tc;
    if (as_json) {
      std::cout << report.dump(2) << '\n';
      return 0;
    }
    // Long lists are summarized in the table view.
    json table = report;
    const auto sizes = cd.sizes();
    table["component_sizes"] = std::to_string(sizes.size()) + " components, largest " +
                               std::to_string(sizes.empty() ? 0 : sizes.front());
    table["tree_size_histogram"] = std::to_string(trees.size()) + " distinct sizes";
    emit(table, false);
    return 0;
  }
};

struct CutCmd {
  std::string input;
  std::uint32_t k = 2;
  std::string method = "greedy";
  std::uint32_t exact_limit = cmcut::kDefaultExactLimit;
  std::uint32_t restarts = cmcut::kDefaultRestarts;
  std::optional<std::uint64_t> seed;
  std::optional<double> eps, delta;
  bool as_json = false;

  int run() const {
    if (method == "local" && !seed) throw UsageError("--seed is required with --method local");
    if (eps.has_value() != delta.has_value()) throw UsageError("--eps and --delta must be given together");
    if (eps && k != 2) throw UsageError("--eps/--delta need a two-block partition (--k 2)");
    const auto g = cmcut::read_edge_list_file(input);
    std::pair<cmcut::Partition, cmcut::CutResult> cut;
    if (method == "greedy")
      cut = cmcut::ksection_greedy(g, k);
    else if (method == "local")
      cut = cmcut::bisection_local_search(g, k, cmcut::derive_seed(*seed, {1}), restarts);
    else
      cut = cmcut::ksection_exact(g, k, exact_limit);
    const auto& [part, res] = cut;
    const auto db = cmcut::distbip(g, exact_limit, cmcut::derive_seed(seed.value_or(0), {2}));
    json report = {{"method", res.method},
                   {"k", k},
                   {"width", res.width},
                   {"block_sizes", res.block_sizes},
                   {"balanced", res.balanced},
                   {"conditions_met", res.conditions_met},
                   {"distbip", db.value},
                   {"exact", db.exact}};
    if (eps) {
      const auto cd = cmcut::components(g);
      bool ok = false;
      try {
        ok = !cd.components.empty() && cmcut::verify_eps_delta_cut(g, cd.components.front(), part, *eps, *delta);
      } catch (const cmcut::ArgumentError&) {
        ok = false;  // one side of the giant is empty
      }
      report["eps_delta_cut"] = ok;
    }
    emit(report, as_json);
    return 0;
  }
};

struct BpCmd {
  LawOptions law;
  std::string mode = "survival";
  std::uint32_t r = 2;
  std::uint32_t L = cmcut::kDefaultHorizon;
  std::uint32_t j = 2;
  std::uint64_t trials = 100000;
  std::optional<std::uint64_t> seed;
  bool as_json = false;

  int run() const {
    const auto dist = load_law(law);
    cmcut::Estimate e;
    std::optional<bool> converged;
    if (mode == "survival") {
      const auto check = cmcut::survival_convergence(dist, L, trials, *seed);
      e = check.at_L;
      converged = check.converged;
      if (!check.converged)
        std::cerr << "warning: survival to depth " << L << " and " << 2 * L
                  << " differ by more than 2 standard errors; raise --L\n";
    } else if (mode == "dsr")
      e = cmcut::estimate_ds_r(dist, r, L, trials, *seed);
    else
      e = cmcut::estimate_rho_j(dist, j, L, trials, *seed);
    json report = {{"estimate", e.estimate}, {"stderr", e.std_error}, {"trials", e.trials}};
    if (converged) report["converged"] = *converged;
    emit(report, as_json);
    return 0;
  }
};

struct ExperimentCmd {
  std::string spec_path;
  std::string out;
  unsigned threads = 0;
  bool as_json = false;

  int run() const {
    const auto spec = cmcut::read_spec(spec_path);
    const auto& prm = spec.params;
    if (!prm.p_grid.empty() && !prm.n_grid.empty())
      throw cmcut::SpecError("fields 'params.p_grid' and 'params.n_grid': give at most one scan grid");
    cmcut::EnsembleResult result;
    if (!prm.p_grid.empty())
      result = cmcut::threshold_scan(spec, "percolation_p", prm.p_grid, threads);
    else if (!prm.n_grid.empty())
      result = cmcut::threshold_scan(spec, "n", prm.n_grid, threads);
    else
      result = cmcut::run_ensemble(spec, threads);
    with_output(out, [&](std::ostream& os) { os << cmcut::to_csv(result); });

    // Per (grid value, metric) mean and standard error.
    struct Acc {
      double sum = 0, sq = 0;
      std::uint64_t count = 0;
    };
    std::map<std::pair<std::string, std::string>, Acc> acc;
    for (const auto& row : result.rows) {
      auto& a = acc[{row.grid_value ? cmcut::format_real(*row.grid_value) : std::string(), row.metric}];
      a.sum += row.value;
      a.sq += row.value * row.value;
      ++a.count;
    }
    json summary = json::array();
    for (const auto& [key, a] : acc) {
      const double mean = a.sum / double(a.count);
      const double var = a.count > 1 ? (a.sq - a.sum * mean) / double(a.count - 1) : 0.0;
      summary.push_back({{"grid_value", key.first},
                         {"metric", key.second},
                         {"mean", mean},
                         {"stderr", std::sqrt(std::max(0.0, var) / double(a.count))},
                         {"count", a.count}});
    }
    std::ostream& os = out.empty() || out == "-" ? std::cerr : std::cout;
    if (as_json) {
      os << json::object({{"rows", result.rows.size()}, {"summary", summary}}).dump(2) << '\n';
    } else {
      for (const auto& s : summary)
        os << (s["grid_value"].get<std::string>().empty() ? "" : s["grid_value"].get<std::string>() + "  ")
           << s["metric"].get<std::string>() << "  mean " << show(s["mean"]) << "  se " << show(s["stderr"]) << "  n "
           << s["count"] << '\n';
    }
    return 0;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Configuration-model random graphs: generation, structure, cuts and ensembles"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(cmcut::kVersion));

  TheoryCmd theory;
  auto* th = app.add_subcommand("theory", "Moments, survival probability, thresholds and limit constants");
  add_law_options(th, theory.law);
  th->add_option("--k", theory.k, "Number of blocks for p_min")->check(CLI::Range(2u, 1000000u));
  th->add_flag("--json", theory.as_json, "JSON output");

  GenCmd gen;
  auto* gn = app.add_subcommand("gen", "Sample a configuration-model graph as an edge list");
  add_law_options(gn, gen.law);
  gn->add_option("--n", gen.n, "Number of vertices")->required()->check(CLI::Range(std::uint64_t{1}, std::uint64_t{1} << 32));
  gn->add_option("--seed", gen.seed, "Random seed")->required();
  gn->add_option("--out", gen.out, "Edge-list output path (default stdout)");
  gn->add_flag("--simple", gen.simple, "Condition on a simple graph by rejection");
  gn->add_flag("--sequential", gen.sequential, "Use the sequential coalescing construction");
  gn->add_option("--max-attempts", gen.max_attempts, "Rejection attempts for --simple")->check(CLI::PositiveNumber);
  gn->add_option("--p", gen.p, "Bond percolation retention probability")->check(CLI::Range(0.0, 1.0));
  gn->add_flag("--json", gen.as_json, "JSON report");

  AnalyzeCmd analyze;
  auto* an = app.add_subcommand("analyze", "Structural report for an edge-list file");
  an->add_option("input", analyze.input, "Edge-list file")->required();
  an->add_option("--r", analyze.r, "Largest radius of the core-neighborhood curve");
  an->add_option("--cycles", analyze.cycles, "Longest cycle length counted")
      ->check(CLI::Range(1u, cmcut::kDefaultCycleCap));
  an->add_flag("--json", analyze.as_json, "JSON output");

  CutCmd cut;
  auto* ct = app.add_subcommand("cut", "Balanced k-section and distance from bipartiteness");
  ct->add_option("input", cut.input, "Edge-list file")->required();
  ct->add_option("--k", cut.k, "Number of blocks")->check(CLI::Range(2u, 1000000u));
  ct->add_option("--method", cut.method, "greedy, local or exact")
      ->check(CLI::IsMember({"greedy", "local", "exact"}));
  ct->add_option("--exact-limit", cut.exact_limit, "Largest component solved exhaustively")
      ->check(CLI::Range(1u, 40u));
  ct->add_option("--restarts", cut.restarts, "Local-search restarts")->check(CLI::Range(1u, 1000000u));
  ct->add_option("--seed", cut.seed, "Random seed (required with --method local)");
  ct->add_option("--eps", cut.eps, "Check an (eps, delta)-cut of the largest component")->check(CLI::Range(0.0, 1.0));
  ct->add_option("--delta", cut.delta, "Crossing-edge budget per vertex")->check(CLI::PositiveNumber);
  ct->add_flag("--json", cut.as_json, "JSON output");

  BpCmd bp;
  auto* b = app.add_subcommand("bp", "Monte Carlo estimates for the local branching process");
  add_law_options(b, bp.law);
  b->add_option("--mode", bp.mode, "survival, dsr or rho")->check(CLI::IsMember({"survival", "dsr", "rho"}));
  b->add_option("--r", bp.r, "Generations searched for a double survivor (dsr)");
  b->add_option("--L", bp.L, "Depth that counts as survival")->check(CLI::Range(1u, 100000u));
  b->add_option("--j", bp.j, "Number of surviving root children (rho)");
  b->add_option("--trials", bp.trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
  b->add_option("--seed", bp.seed, "Random seed")->required();
  b->add_flag("--json", bp.as_json, "JSON output");

  ExperimentCmd exp;
  auto* ex = app.add_subcommand("experiment", "Run an ensemble described by a JSON spec; rows go to CSV");
  ex->add_option("--spec", exp.spec_path, "Spec file")->required();
  ex->add_option("--out", exp.out, "CSV output path (default stdout)");
  ex->add_option("--threads", exp.threads, "Worker threads (0 = all cores)");
  ex->add_flag("--json", exp.as_json, "JSON summary");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (th->parsed()) return theory.run();
    if (gn->parsed()) return gen.run();
    if (an->parsed()) return analyze.run();
    if (ct->parsed()) return cut.run();
    if (b->parsed()) return bp.run();
    if (ex->parsed()) return exp.run();
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
