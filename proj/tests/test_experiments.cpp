#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "cmcut/experiments.hpp"

using namespace cmcut;

namespace {

ExperimentSpec spec_for(DegreeDistribution d, std::uint64_t n, std::uint64_t reps, std::vector<std::string> metrics,
                        std::uint64_t seed = 1) {
  ExperimentSpec s;
  s.law = std::move(d);
  s.n = n;
  s.replicates = reps;
  s.master_seed = seed;
  s.metrics = std::move(metrics);
  return s;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("cmcut_test_" + name);
}

std::vector<std::uint64_t> poisson_samples(double lambda, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::poisson_distribution<std::uint64_t> law(lambda);
  std::vector<std::uint64_t> out(count);
  for (auto& x : out) x = law(rng);
  return out;
}

}  // namespace

TEST(RunEnsemble, SingleReplicateOnTwoRegular) {
  const auto r = run_ensemble(spec_for(DegreeDistribution::regular(2), 100, 1, {"giant_fraction"}));
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_EQ(r.rows[0].metric, "giant_fraction");
  EXPECT_GT(r.rows[0].value, 0.0);
  EXPECT_LE(r.rows[0].value, 1.0);
  EXPECT_EQ(r.rows[0].seed, replicate_seed(1, 0, 0));
  EXPECT_EQ(r.provenance["spec"]["n"], 100);
}

TEST(RunEnsemble, RowCountAndOrdering) {
  ExperimentSpec s = spec_for(DegreeDistribution({{1, 0.5}, {3, 0.5}}), 300, 4,
                              {"num_edges", "cycle_census", "pair_count", "tc_r"});
  s.params.K_cycles = 4;
  const auto r = run_ensemble(s);
  ASSERT_EQ(r.rows.size(), 4u * (1 + 4 + 1 + 1));
  EXPECT_EQ(r.rows[1].metric, "cycle_census.C1");
  EXPECT_EQ(r.rows[4].metric, "cycle_census.C4");
  for (std::size_t i = 0; i < r.rows.size(); ++i) EXPECT_EQ(r.rows[i].replicate, i / 7);
}

TEST(RunEnsemble, EveryMetricRuns) {
  ExperimentSpec s = spec_for(DegreeDistribution({{0, 0.1}, {1, 0.5}, {3, 0.4}}), 200, 2, metric_registry());
  s.params.k = 3;
  const auto r = run_ensemble(s);
  std::set<std::string> names;
  for (const auto& row : r.rows) {
    names.insert(row.metric);
    EXPECT_TRUE(std::isfinite(row.value));
    EXPECT_GE(row.value, 0.0);
  }
  EXPECT_TRUE(names.count("distbip") && names.count("cycle_census.C3") && names.count("maxcut_lower"));
}

TEST(RunEnsemble, DeterministicAcrossRunsAndThreadCounts) {
  ExperimentSpec s = spec_for(DegreeDistribution({{1, 0.6}, {2, 0.2}, {4, 0.2}}), 500, 12,
                              {"giant_fraction", "distbip", "bisection_width", "maxcut_lower"}, 99);
  s.params.restarts = 2;
  const auto a = to_csv(run_ensemble(s, 1));
  const auto b = to_csv(run_ensemble(s, 1));
  const auto c = to_csv(run_ensemble(s, 4));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
  s.master_seed = 100;
  EXPECT_NE(a, to_csv(run_ensemble(s, 1)));
}

TEST(RunEnsemble, SimpleConditioningAndPercolation) {
  ExperimentSpec s = spec_for(DegreeDistribution({{1, 0.5}, {3, 0.5}}), 200, 3, {"cycle_census", "num_edges"});
  s.params.simple = true;
  s.params.K_cycles = 2;
  for (const auto& row : run_ensemble(s).rows)
    if (row.metric != "num_edges") {
      EXPECT_EQ(row.value, 0.0);
    }
  ExperimentSpec p;
  p.law = std::uint32_t{3};
  p.n = 100;
  p.replicates = 2;
  p.metrics = {"num_edges"};
  p.params.percolation_p = 0.0;
  for (const auto& row : run_ensemble(p).rows) EXPECT_EQ(row.value, 0.0);
}

TEST(RunEnsemble, RejectsInvalidSpecs) {
  auto bad = spec_for(DegreeDistribution::regular(2), 10, 1, {"giant_fraction", "nonsense"});
  try {
    run_ensemble(bad);
    FAIL();
  } catch (const SpecError& e) {
    EXPECT_NE(std::string(e.what()).find("metrics[1]"), std::string::npos);
  }
  EXPECT_THROW(run_ensemble(spec_for(DegreeDistribution::regular(2), 10, 0, {"giant_fraction"})), SpecError);
  EXPECT_THROW(run_ensemble(spec_for(DegreeDistribution::regular(2), 0, 1, {"giant_fraction"})), SpecError);
  EXPECT_THROW(run_ensemble(spec_for(DegreeDistribution::regular(2), 10, 1, {})), SpecError);
  auto big_k = spec_for(DegreeDistribution::regular(2), 3, 1, {"ksection_width"});
  big_k.params.k = 4;
  EXPECT_THROW(run_ensemble(big_k), SpecError);
  ExperimentSpec odd;
  odd.law = std::uint32_t{3};
  odd.n = 5;
  odd.metrics = {"giant_fraction"};
  EXPECT_THROW(run_ensemble(odd), SpecError);
}

TEST(ReplicateSeeds, PairwiseDistinct) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t g = 0; g < 4; ++g)
    for (std::uint64_t r = 0; r < 50000; ++r) seen.insert(replicate_seed(7, g, r));
  EXPECT_EQ(seen.size(), 200000u);
}

TEST(ThresholdScan, PercolationRowsAreTaggedAndMonotone) {
  ExperimentSpec base;
  base.law = std::uint32_t{3};
  base.n = 20000;
  base.replicates = 4;
  base.master_seed = 5;
  base.metrics = {"giant_fraction"};
  const std::vector<double> grid = {0.40, 0.45, 0.50, 0.55, 0.60};
  const auto r = threshold_scan(base, "percolation_p", grid);
  ASSERT_EQ(r.rows.size(), grid.size() * 4);
  std::vector<double> means;
  for (double p : grid) {
    const auto v = r.values("giant_fraction", p);
    ASSERT_EQ(v.size(), 4u);
    means.push_back(std::accumulate(v.begin(), v.end(), 0.0) / double(v.size()));
  }
  for (const auto& row : r.rows) EXPECT_EQ(row.grid_param, "percolation_p");
  EXPECT_LT(means[1], 0.01);
  EXPECT_GT(means[3], 0.1);
  for (std::size_t i = 1; i < means.size(); ++i) EXPECT_GE(means[i], means[i - 1] - 0.01);
}

TEST(ThresholdScan, VaryN) {
  auto base = spec_for(DegreeDistribution({{1, 0.5}, {3, 0.5}}), 10, 2, {"num_edges"});
  const auto r = threshold_scan(base, "n", {200, 400, 800});
  ASSERT_EQ(r.rows.size(), 6u);
  EXPECT_EQ(r.rows[0].grid_param, "n");
  EXPECT_EQ(r.rows[0].grid_value, 200.0);
  EXPECT_EQ(r.rows[5].grid_value, 800.0);
  // Edge count is about n: the 800 rows must exceed the 200 rows.
  EXPECT_GT(r.rows[5].value, r.rows[0].value);
  EXPECT_NE(r.rows[0].seed, r.rows[2].seed);
  EXPECT_THROW(threshold_scan(base, "k", {2}), SpecError);
  EXPECT_THROW(threshold_scan(base, "n", {}), SpecError);
  EXPECT_THROW(threshold_scan(base, "n", {10.5}), SpecError);
  EXPECT_THROW(threshold_scan(base, "percolation_p", {1.5}), SpecError);
}

TEST(PoissonGof, Examples) {
  const auto zeros = poisson_gof(std::vector<std::uint64_t>(1000, 0), 0.2);
  EXPECT_NEAR(zeros.tv_distance, 1.0 - std::exp(-0.2), 1e-12);
  EXPECT_GE(zeros.dof, 1u);
  const auto wrong = poisson_gof(poisson_samples(1.0, 10000, 3), 0.2);
  EXPECT_LT(wrong.p_value, 0.01);
  EXPECT_THROW(poisson_gof({}, 0.2), ArgumentError);
  EXPECT_THROW(poisson_gof({1, 2}, 0.0), DomainError);
}

TEST(PoissonGof, CalibratedUnderTheNull) {
  int passed = 0;
  const int meta = 200;
  for (int t = 0; t < meta; ++t) {
    const auto r = poisson_gof(poisson_samples(0.2, 10000, 1000 + t), 0.2);
    EXPECT_GE(r.tv_distance, 0.0);
    EXPECT_LE(r.tv_distance, 1.0);
    passed += r.p_value > 0.01 ? 1 : 0;
  }
  EXPECT_GE(passed, meta * 95 / 100);
}

TEST(PoissonGof, NullPValuesAreNearlyUniform) {
  const int meta = 1000;
  std::vector<double> p(meta);
  for (int t = 0; t < meta; ++t) p[t] = poisson_gof(poisson_samples(2.0, 1000, 5000 + t), 2.0).p_value;
  std::sort(p.begin(), p.end());
  double ks = 0.0;
  for (int i = 0; i < meta; ++i)
    ks = std::max({ks, std::abs(p[i] - double(i) / meta), std::abs(p[i] - double(i + 1) / meta)});
  EXPECT_LT(ks, 0.05);
}

TEST(SpecIo, RoundTrip) {
  ExperimentSpec s = spec_for(DegreeDistribution({{1, 0.75}, {2, 0.25}}), 2000, 10, {"distbip", "cycle_census"}, 42);
  s.params.K_cycles = 5;
  s.params.p_grid = {0.1, 0.2};
  s.params.percolation_p = 0.7;
  s.params.simple = true;
  const auto path = temp_file("spec.json");
  write_spec(s, path.string());
  EXPECT_EQ(read_spec(path.string()), s);
  ExperimentSpec reg;
  reg.law = std::uint32_t{3};
  reg.n = 10;
  reg.metrics = {"giant_fraction"};
  reg.params.n_grid = {10, 20};
  write_spec(reg, path.string());
  EXPECT_EQ(read_spec(path.string()), reg);
  std::filesystem::remove(path);
}

TEST(SpecIo, SchemaErrorsNameTheField) {
  auto message = [](const std::string& text) {
    try {
      parse_spec(text);
    } catch (const SpecError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(message(R"({"regular_d":3,"n":10,"replicates":1,"master_seed":1,"metrics":["bogus"]})").find("metrics[0]"),
            std::string::npos);
  EXPECT_NE(message(R"({"regular_d":3,"replicates":1,"master_seed":1,"metrics":["giant_fraction"]})").find("'n'"),
            std::string::npos);
  EXPECT_NE(message(R"({"regular_d":4,"n":10,"replicates":1,"master_seed":1,"metrics":["giant_fraction"],
                        "params":{"kk":2}})")
                .find("params.kk"),
            std::string::npos);
  EXPECT_NE(message(R"({"dist":{"1":0.5,"3":0.4},"n":10,"replicates":1,"master_seed":1,"metrics":["distbip"]})")
                .find("dist"),
            std::string::npos);
  EXPECT_NE(message("{not json").find("invalid JSON"), std::string::npos);
  EXPECT_THROW(read_spec("/nonexistent/spec.json"), IoError);
}

TEST(Csv, HeaderOnlyForEmptyResult) {
  EnsembleResult empty;
  EXPECT_EQ(to_csv(empty), "replicate,seed,grid_param,grid_value,metric,value\n");
  const auto path = temp_file("empty.csv");
  write_csv(empty, path.string());
  std::ifstream f(path);
  std::string line, rest;
  std::getline(f, line);
  EXPECT_EQ(line, kCsvHeader);
  EXPECT_FALSE(std::getline(f, rest));
  std::filesystem::remove(path);
}

TEST(Csv, RowsFormatting) {
  EnsembleResult r;
  r.rows.push_back({3, 17, "percolation_p", 0.55, "giant_fraction", 0.25});
  r.rows.push_back({0, 1, "", std::nullopt, "distbip", 2});
  EXPECT_EQ(to_csv(r), std::string(kCsvHeader) +
                           "\n3,17,percolation_p,0.55000000000000004,giant_fraction,0.25\n0,1,,,distbip,2\n");
}
