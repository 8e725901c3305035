#include <gtest/gtest.h>

#include "cmcut/distribution.hpp"

using namespace cmcut;

TEST(DegreeDistribution, ParsesLineFormatWithComments) {
  const auto d = parse_distribution("# mixed law\n1 0.5   # leaves\n\n3 0.5\n");
  EXPECT_EQ(d.max_degree(), 3u);
  EXPECT_DOUBLE_EQ(d.prob(1), 0.5);
  EXPECT_DOUBLE_EQ(d.prob(2), 0.0);
  EXPECT_DOUBLE_EQ(d.prob(3), 0.5);
  EXPECT_DOUBLE_EQ(d.mean(), 2.0);
}

TEST(DegreeDistribution, RejectsBadInput) {
  EXPECT_THROW(parse_distribution("1 0.5\n3 0.4\n"), ParseError);
  EXPECT_THROW(parse_distribution("1 0.5\n1 0.5\n"), ParseError);
  EXPECT_THROW(parse_distribution("1 -0.5\n2 1.5\n"), ParseError);
  EXPECT_THROW(parse_distribution("one half\n"), ParseError);
  EXPECT_THROW(parse_distribution("1 0.5 extra\n"), ParseError);
  EXPECT_THROW(parse_distribution("# nothing\n"), ParseError);
}

TEST(DegreeDistribution, FormatRoundTrips) {
  const DegreeDistribution d({{1, 0.7}, {3, 0.3}});
  EXPECT_EQ(parse_distribution(format_distribution(d)), d);
}

TEST(DegreeDistribution, GeneratingFunctionAndDerivative) {
  const DegreeDistribution d({{1, 0.5}, {3, 0.5}});
  EXPECT_DOUBLE_EQ(d.pgf(1.0), 1.0);
  EXPECT_NEAR(d.pgf(0.5), 0.5 * 0.5 + 0.5 * 0.125, 1e-15);
  EXPECT_NEAR(d.pgf_derivative(0.5), 0.5 + 1.5 * 0.25, 1e-15);
  EXPECT_DOUBLE_EQ(d.pgf_derivative(1.0), d.mean());
}

TEST(DegreeDistribution, SizeBiasedMinusOne) {
  const auto sb = DegreeDistribution({{1, 0.5}, {3, 0.5}}).size_biased_minus_one();
  EXPECT_NEAR(sb.prob(0), 0.25, 1e-15);
  EXPECT_NEAR(sb.prob(2), 0.75, 1e-15);
  EXPECT_THROW(DegreeDistribution::regular(0).size_biased_minus_one(), DegenerateDistributionError);
}

TEST(DegreeDistribution, TruncatedPoissonKeepsMassAndMean) {
  const auto d = DegreeDistribution::truncated_poisson(2.0);
  double total = 0.0;
  for (const auto& [k, p] : d.support()) total += p;
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_NEAR(d.mean(), 2.0, 1e-9);
  EXPECT_THROW(DegreeDistribution::truncated_poisson(0.0), DomainError);
}

TEST(DegreeSampler, EmpiricalFrequencies) {
  const DegreeDistribution d({{0, 0.2}, {2, 0.3}, {5, 0.5}});
  DegreeSampler s(d);
  Rng rng(11);
  std::map<std::uint32_t, int> counts;
  const int draws = 200000;
  for (int i = 0; i < draws; ++i) ++counts[s(rng)];
  EXPECT_EQ(counts.size(), 3u);
  for (const auto& [k, p] : d.support()) EXPECT_NEAR(counts[k] / double(draws), p, 0.005);
}

TEST(Rng, BelowIsUniformAndInRange) {
  Rng rng(5);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const auto x = rng.below(7);
    ASSERT_LT(x, 7u);
    ++counts[x];
  }
  for (int c : counts) EXPECT_NEAR(c, 10000, 450);
  EXPECT_EQ(rng.below(1), 0u);
}

TEST(Rng, DerivedSeedsAreDistinct) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t g = 0; g < 20; ++g)
    for (std::uint64_t r = 0; r < 5000; ++r) seen.insert(derive_seed(42, {g, r}));
  EXPECT_EQ(seen.size(), 20u * 5000u);
}
