#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>

#include "immunorec/datastore.hpp"
#include "immunorec/errors.hpp"
#include "immunorec/recommender.hpp"
#include "test_support.hpp"

namespace immunorec {
namespace {

using testing::make_profile;

FinalPopulation population_of(std::vector<std::pair<UserProfile, double>> members) {
  FinalPopulation fp;
  for (auto& [p, w] : members) fp.members.push_back({std::move(p), w});
  fp.converged = true;
  return fp;
}

TEST(PredictTest, WeightedMeanByHand) {
  const auto fp = population_of({{make_profile(1, {{10, 1.0}}), 2.0}, {make_profile(2, {{10, 0.4}}), 1.0}});
  const auto p = predict_rating(fp, 10);
  EXPECT_NEAR(p.value, 0.8, 1e-12);
  EXPECT_EQ(p.support, 2u);
  EXPECT_FALSE(p.fallback);
  EXPECT_EQ(p.category().index(), 5);
}

TEST(PredictTest, EqualWeightsGivePlainMean) {
  const auto fp = population_of({{make_profile(1, {{10, 1.0}}), 0.7},
                                 {make_profile(2, {{10, 0.4}}), 0.7},
                                 {make_profile(3, {{10, 0.2}}), 0.7}});
  EXPECT_NEAR(predict_rating(fp, 10).value, (1.0 + 0.4 + 0.2) / 3.0, 1e-12);
}

TEST(PredictTest, SingleRaterAndZeroWeight) {
  const auto fp = population_of({{make_profile(1, {{10, 0.6}, {11, 0.0}}), 1.3},
                                 {make_profile(2, {{11, 1.0}, {12, 1.0}}), 0.0}});
  EXPECT_EQ(predict_rating(fp, 10).value, 0.6);
  const auto p11 = predict_rating(fp, 11);
  EXPECT_EQ(p11.value, 0.0);
  EXPECT_EQ(p11.support, 1u);
  // Only a zero-weight antibody rated 12.
  EXPECT_TRUE(predict_rating(fp, 12).fallback);
}

TEST(PredictTest, FallbackUsesPopulationMean) {
  const auto fp = population_of({{make_profile(1, {{10, 0.6}, {11, 0.0}}), 1.0}, {make_profile(2, {{12, 0.8}}), 2.0}});
  const auto p = predict_rating(fp, 99);
  EXPECT_TRUE(p.fallback);
  EXPECT_EQ(p.support, 0u);
  EXPECT_NEAR(p.value, (0.6 + 0.0 + 0.8) / 3.0, 1e-12);
}

TEST(PredictTest, EmptyPopulation) {
  try {
    (void)predict_rating(FinalPopulation{}, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyPopulation);
  }
  EXPECT_THROW((void)recommend_top_n(FinalPopulation{}, testing::worked_user1(), 3), Error);
}

TEST(PredictTest, BoundednessAndHomogeneity) {
  std::mt19937 gen(12);
  std::uniform_real_distribution<double> wdist(0.01, 5.0);
  for (int round = 0; round < 100; ++round) {
    FinalPopulation fp;
    for (UserId u = 1; u <= 15; ++u) fp.members.push_back({testing::random_profile(u, gen, 20, 1, 10), wdist(gen)});
    auto scaled = fp;
    for (auto& m : scaled.members) m.weight *= 3.7;
    for (MovieId movie = 1; movie <= 20; ++movie) {
      const auto p = predict_rating(fp, movie);
      if (p.fallback) continue;
      double lo = 1.0;
      double hi = 0.0;
      for (const auto& m : fp.members) {
        if (const auto c = m.profile.find(movie)) {
          lo = std::min(lo, c->rating());
          hi = std::max(hi, c->rating());
        }
      }
      EXPECT_GE(p.value, lo - 1e-12);
      EXPECT_LE(p.value, hi + 1e-12);
      EXPECT_NEAR(predict_rating(scaled, movie).value, p.value, 1e-12);
    }
  }
}

TEST(RecommendTest, CountLargerThanCandidatesAndExclusion) {
  const auto fp = population_of({{make_profile(1, {{1, 1.0}, {2, 0.2}, {3, 0.8}}), 1.0},
                                 {make_profile(2, {{2, 0.4}, {4, 0.6}}), 1.0}});
  const auto antigen = make_profile(9, {{3, 0.0}});
  const auto list = recommend_top_n(fp, antigen, 50);
  ASSERT_EQ(list.size(), 3u);
  EXPECT_EQ(list[0].movie, 1u);
  EXPECT_EQ(list[1].movie, 4u);
  EXPECT_EQ(list[2].movie, 2u);
  for (const auto& r : list) EXPECT_FALSE(antigen.rates(r.movie));
  EXPECT_THROW((void)recommend_top_n(fp, antigen, 0), Error);
}

TEST(RecommendTest, AntigenRatedEverything) {
  const auto fp = population_of({{make_profile(1, {{1, 1.0}, {2, 0.2}}), 1.0}});
  EXPECT_TRUE(recommend_top_n(fp, make_profile(9, {{1, 0.0}, {2, 0.0}, {3, 0.4}}), 5).empty());
}

TEST(RecommendTest, TiesBrokenByMovieId) {
  const auto fp = population_of({{make_profile(1, {{7, 0.8}, {3, 0.8}, {5, 0.8}}), 1.0}});
  const auto list = recommend_top_n(fp, make_profile(9, {{100, 0.0}}), 2);
  ASSERT_EQ(list.size(), 2u);
  EXPECT_EQ(list[0].movie, 3u);
  EXPECT_EQ(list[1].movie, 5u);
}

TEST(RecommendTest, MatchesBruteForceOracleOnSyntheticFixture) {
  SyntheticConfig c;
  c.num_users = 150;
  c.num_movies = 90;
  c.min_ratings = 10;
  c.max_ratings = 30;
  c.seed = 8;
  const auto data = generate_synthetic(c);
  const auto& antigen = data.users()[0];
  const auto fp = run_to_convergence(antigen, data, {MeasureKind::kWeightedKappa, 2}, ImmuneParams{}, 42);

  // Every quotient from scratch, then a full sort.
  std::vector<Recommendation> oracle;
  for (MovieId movie = 1; movie <= 90; ++movie) {
    if (antigen.rates(movie)) continue;
    double num = 0.0;
    double den = 0.0;
    std::size_t support = 0;
    for (const auto& m : fp.members) {
      const auto cat = m.profile.find(movie);
      if (!cat || m.weight <= 0.0) continue;
      num += m.weight * cat->rating();
      den += m.weight;
      ++support;
    }
    if (support > 0) oracle.push_back({movie, num / den, support});
  }
  std::ranges::sort(oracle, [](const auto& a, const auto& b) {
    return a.value != b.value ? a.value > b.value : a.movie < b.movie;
  });
  oracle.resize(std::min<std::size_t>(oracle.size(), 15));
  EXPECT_EQ(recommend_top_n(fp, antigen, 15), oracle);
}

}  // namespace
}  // namespace immunorec
