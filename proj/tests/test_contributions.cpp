#include "support.hpp"

#include <gtest/gtest.h>

using namespace aircomplex;
using testsupport::graph_from_edges;
using testsupport::graph_from_matrix;

namespace {

// Indicator frame carrying only the given strengths (cc and nnd zero).
IndicatorFrame strength_only_frame(const std::vector<double>& s) {
  IndicatorFrame f;
  auto names = std::make_shared<std::vector<std::string>>();
  for (std::size_t i = 0; i < s.size(); ++i) names->push_back(std::to_string(i + 1));
  f.names = names;
  f.strength = s;
  f.cc.assign(s.size(), 0.0);
  f.nnd.assign(s.size(), 0.0);
  f.max_incident_weight.assign(s.size(), 0.0);
  f.strength_total = std::accumulate(s.begin(), s.end(), 0.0);
  return f;
}

// Two mirrored four-aircraft clusters bridged by 4-5; the 5..8 side carries
// half the weight.
GraphSnapshot mirrored_clusters() {
  std::vector<std::tuple<std::string, std::string, double>> e{
      {"1", "2", 0.6}, {"1", "4", 0.5}, {"2", "4", 0.9}, {"2", "3", 0.4},
      {"5", "6", 0.3}, {"5", "8", 0.25}, {"6", "8", 0.45}, {"6", "7", 0.2},
      {"4", "5", 0.3}};
  return graph_from_edges({"1", "2", "3", "4", "5", "6", "7", "8"}, e);
}

double sum(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0); }

} // namespace

TEST(IndicatorContribution, TableOneStrengths) {
  const auto f = strength_only_frame({1.1, 1.4, 1.3, 1.1, 0.1});
  const auto c = indicator_contribution(f, Indicator::strength);
  const std::vector<double> expected{22, 28, 26, 22, 2};
  ASSERT_EQ(c.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(c[i] * 100.0, expected[i], 0.01);
}

TEST(IndicatorContribution, InactiveAndSingle) {
  const auto f = strength_only_frame({1.1, 1.4});
  EXPECT_TRUE(indicator_contribution(f, Indicator::cc).empty());
  const auto one = strength_only_frame({0.0, 0.7, 0.0});
  const auto c = indicator_contribution(one, Indicator::strength);
  EXPECT_EQ(c, (std::vector<double>{0.0, 1.0, 0.0}));
}

TEST(CombinedContribution, SingleActiveIndicatorReducesToIt) {
  const auto cf = combined_contribution(strength_only_frame({1.1, 1.4, 1.3, 1.1, 0.1}));
  EXPECT_TRUE(cf.is_active(Indicator::strength));
  EXPECT_FALSE(cf.is_active(Indicator::cc));
  EXPECT_FALSE(cf.is_active(Indicator::nnd));
  const auto frac = cf.fractions(Indicator::strength);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(cf.combined[i], frac[i] * 100.0);
  EXPECT_NEAR(cf.combined_of("2"), 28.0, 1e-9);
}

TEST(CombinedContribution, SingleEdgeSplitsEvenly) {
  const auto g = graph_from_edges({"a", "b"}, {{"a", "b", 0.7}});
  const auto cf = combined_contribution(compute_frame(g));
  EXPECT_TRUE(cf.is_active(Indicator::strength));
  EXPECT_TRUE(cf.is_active(Indicator::nnd));
  EXPECT_FALSE(cf.is_active(Indicator::cc));
  EXPECT_DOUBLE_EQ(cf.combined[0], 50.0);
  EXPECT_DOUBLE_EQ(cf.combined[1], 50.0);
}

TEST(CombinedContribution, EmptyGraphHasNoActivity) {
  const auto g = graph_from_edges({"a", "b", "c"}, {});
  const auto cf = combined_contribution(compute_frame(g));
  EXPECT_FALSE(cf.has_activity());
  EXPECT_EQ(cf.combined, (std::vector<double>{0, 0, 0}));
  const auto none = combined_contribution(compute_frame(GraphSnapshot{}));
  EXPECT_FALSE(none.has_activity());
  EXPECT_TRUE(none.combined.empty());
}

TEST(CombinedContribution, SumsToHundredWhenActive) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 500; ++trial) {
    const auto w = testsupport::random_matrix(rng, 1 + trial % 25, 0.02 * (trial % 15));
    const auto f = compute_frame(graph_from_matrix(w));
    const auto cf = combined_contribution(f);
    for (auto ind : kContributingIndicators)
      if (cf.is_active(ind)) { EXPECT_NEAR(sum(cf.fractions(ind)), 1.0, 1e-9); }
    if (cf.has_activity()) {
      EXPECT_NEAR(sum(cf.combined), 100.0, 1e-6);
    } else {
      for (double c : cf.combined) EXPECT_EQ(c, 0.0);
    }
  }
}

TEST(CombinedContribution, StrengthFractionsAreScaleInvariant) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> lambda(0.05, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    auto w = testsupport::random_matrix(rng, 3 + trial % 12, 0.4);
    const auto base = indicator_contribution(compute_frame(graph_from_matrix(w)), Indicator::strength);
    const double l = lambda(rng);
    for (auto& row : w)
      for (auto& x : row) x *= l;
    const auto scaled = indicator_contribution(compute_frame(graph_from_matrix(w)), Indicator::strength);
    ASSERT_EQ(base.size(), scaled.size());
    for (std::size_t i = 0; i < base.size(); ++i) EXPECT_NEAR(base[i], scaled[i], 1e-12);
  }
}

TEST(CommunityContribution, PartitionsAddToHundred) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 15;
    const auto w = testsupport::random_matrix(rng, n, 0.3);
    const auto g = graph_from_matrix(w);
    const auto cf = combined_contribution(compute_frame(g));
    if (!cf.has_activity()) continue;
    // Random partition into up to four blocks.
    std::vector<std::vector<std::string>> blocks(4);
    for (std::size_t i = 0; i < n; ++i) blocks[rng() % 4].push_back(g.callsigns()[i]);
    double total = 0.0;
    for (const auto& b : blocks) total += community_contribution(cf, b);
    EXPECT_NEAR(total, 100.0, 1e-6);
  }
}

TEST(CommunityContribution, EmptyAndUnknown) {
  const auto g = graph_from_edges({"a", "b"}, {{"a", "b", 1}});
  const auto cf = combined_contribution(compute_frame(g));
  EXPECT_EQ(community_contribution(cf, std::vector<std::string>{}), 0.0);
  const std::vector<std::string> all{"a", "b"};
  EXPECT_NEAR(community_contribution(cf, all), 100.0, 1e-9);
  const std::vector<std::string> bad{"zz"};
  EXPECT_THROW(community_contribution(cf, bad), UnknownVertex);
}

TEST(CommunityContribution, WeakerMirrorContributesLess) {
  const auto g = mirrored_clusters();
  const auto cf = combined_contribution(compute_frame(g));
  const std::vector<std::string> left{"1", "2", "3", "4"};
  const std::vector<std::string> right{"5", "6", "7", "8"};
  EXPECT_GT(community_contribution(cf, left), community_contribution(cf, right));
}

TEST(WeightedContribution, UniformWeightsEqualPlainMean) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const auto f = compute_frame(graph_from_matrix(testsupport::random_matrix(rng, 3 + trial % 10, 0.4)));
    const auto plain = combined_contribution(f);
    for (double x : {0.1, 1.0, 3.7}) {
      const auto weighted = combined_contribution(f, IndicatorWeights{x, x, x});
      EXPECT_EQ(weighted.combined, plain.combined);
    }
  }
}

TEST(WeightedContribution, RenormalisesOverActiveIndicators) {
  const auto g = graph_from_edges({"a", "b", "c"}, {{"a", "b", 1.0}, {"b", "c", 0.5}});
  const auto f = compute_frame(g);
  const auto cf = combined_contribution(f, IndicatorWeights{3.0, 5.0, 1.0});
  ASSERT_FALSE(cf.is_active(Indicator::cc));
  const auto s = cf.fractions(Indicator::strength);
  const auto n = cf.fractions(Indicator::nnd);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(cf.combined[i], 100.0 * (0.75 * s[i] + 0.25 * n[i]), 1e-12);
  EXPECT_NEAR(sum(cf.combined), 100.0, 1e-9);
}

TEST(WeightedContribution, ZeroWeightOnActiveSetFallsBackToMean) {
  const auto g = graph_from_edges({"a", "b", "c"}, {{"a", "b", 1.0}, {"b", "c", 0.5}});
  const auto f = compute_frame(g);
  EXPECT_EQ(combined_contribution(f, IndicatorWeights{0.0, 1.0, 0.0}).combined, combined_contribution(f).combined);
}

TEST(WeightedContribution, InvalidWeights) {
  const auto f = strength_only_frame({1.0, 2.0});
  EXPECT_THROW(combined_contribution(f, IndicatorWeights{-1, 1, 1}), InvalidWeights);
  EXPECT_THROW(combined_contribution(f, IndicatorWeights{0, 0, 0}), InvalidWeights);
}
