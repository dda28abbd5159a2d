#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "immunorec/affinity.hpp"
#include "immunorec/datastore.hpp"
#include "immunorec/errors.hpp"
#include "test_support.hpp"

namespace immunorec {
namespace {

IngestConfig loose() {
  IngestConfig c;
  c.min_ratings_per_user = 1;
  return c;
}

LoadResult parse(const std::string& text, const IngestConfig& config) {
  std::istringstream in(text);
  return parse_ratings(in, config);
}

TEST(LoadTest, SmallCategoryCsv) {
  const auto r = parse("1,153,4\n1,253,4\n2,153,5\n", loose());
  EXPECT_EQ(r.dataset.size(), 2u);
  EXPECT_EQ(r.dataset.movie_ids().size(), 2u);
  EXPECT_EQ(r.report.users_kept, 2u);
  EXPECT_EQ(r.report.movies, 2u);
  EXPECT_EQ(r.dataset.find(2)->find(153)->index(), 5);
}

TEST(LoadTest, CrlfAndBlankLines) {
  const auto r = parse("1,153,4\r\n\r\n1,253,2\r\n", loose());
  EXPECT_EQ(r.dataset.rating_count(), 2u);
}

TEST(LoadTest, ScaledCsv) {
  auto c = loose();
  c.format = CsvFormat::kScaled;
  const auto r = parse("1,153,0.6\n1,253,1\n2,153,0\n", c);
  EXPECT_EQ(r.dataset.find(1)->find(153)->index(), 4);
  EXPECT_EQ(r.dataset.find(1)->find(253)->index(), 6);
  EXPECT_THROW(parse("1,153,0.5\n", c), ParseError);
}

TEST(LoadTest, BadCategoryNamesLine) {
  try {
    parse("1,153,4\n1,253,7\n", loose());
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.column(), 3u);
    EXPECT_EQ(e.code(), ErrorCode::kParse);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(LoadTest, MalformedRowsAndDuplicates) {
  EXPECT_THROW(parse("1,153\n", loose()), ParseError);
  EXPECT_THROW(parse("1,153,4,9\n", loose()), ParseError);
  EXPECT_THROW(parse("x,153,4\n", loose()), ParseError);
  EXPECT_THROW(parse("0,153,4\n", loose()), ParseError);
  try {
    parse("1,153,4\n1,153,5\n", loose());
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(LoadTest, LenientCountsRejectedRows) {
  auto c = loose();
  c.strict = false;
  const auto r = parse("1,153,4\n1,253,7\n1,153,5\nbad\n2,9,1\n", c);
  EXPECT_EQ(r.report.rows_rejected, 3u);
  EXPECT_EQ(r.report.diagnostics.size(), 3u);
  EXPECT_EQ(r.dataset.rating_count(), 2u);
}

TEST(LoadTest, MinRatingsDropsUsers) {
  IngestConfig c;
  c.min_ratings_per_user = 2;
  const auto r = parse("1,1,4\n1,2,4\n2,1,5\n", c);
  EXPECT_EQ(r.report.users_kept, 1u);
  EXPECT_EQ(r.report.users_dropped, 1u);
  EXPECT_EQ(r.report.to_json()["users_dropped"], 1);
}

TEST(LoadTest, EmptyAndMissing) {
  try {
    parse("", loose());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyDataset);
  }
  try {
    (void)load_ratings("/nonexistent/ratings.csv", loose());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
}

TEST(SaveTest, CanonicalFormAndRoundTrip) {
  const Dataset d({testing::worked_user2(), testing::worked_user1()});
  std::ostringstream out;
  write_ratings(out, d);
  const auto text = out.str();
  EXPECT_EQ(text.substr(0, 16), "1,153,4\n1,253,4\n");
  EXPECT_EQ(text.find('\r'), std::string::npos);

  const auto path = std::filesystem::temp_directory_path() / "immunorec_roundtrip.csv";
  save_ratings(path, d);
  EXPECT_EQ(load_ratings(path, loose()).dataset, d);
  std::filesystem::remove(path);
}

TEST(SaveTest, RoundTripOnSyntheticData) {
  SyntheticConfig c;
  c.num_users = 80;
  c.seed = 3;
  const auto d = generate_synthetic(c);
  std::ostringstream out;
  write_ratings(out, d);
  std::istringstream in(out.str());
  EXPECT_EQ(parse_ratings(in, loose()).dataset, d);
}

std::vector<UserProfile> users_with_ids(std::initializer_list<UserId> ids) {
  std::vector<UserProfile> out;
  for (const auto id : ids) out.emplace_back(id, std::vector<RatedMovie>{{1, Category(3)}, {2, Category(4)}});
  return out;
}

TEST(PartitionTest, IdThreshold) {
  const Dataset d(users_with_ids({14999, 15001}));
  auto c = loose();
  c.pool_id_threshold = 15000;
  const auto p = partition(d, c);
  ASSERT_EQ(p.pool.size(), 1u);
  ASSERT_EQ(p.antigens.size(), 1u);
  EXPECT_EQ(p.pool.users()[0].id(), 15001u);
  EXPECT_EQ(p.antigens.users()[0].id(), 14999u);
  EXPECT_TRUE(p.warnings.empty());
}

TEST(PartitionTest, AllBelowThresholdWarns) {
  const Dataset d(users_with_ids({1, 2, 3}));
  auto c = loose();
  c.pool_id_threshold = 15000;
  const auto p = partition(d, c);
  EXPECT_TRUE(p.pool.empty());
  EXPECT_EQ(p.warnings.size(), 1u);
}

TEST(PartitionTest, SeededFractionIsReproducibleAndDisjoint) {
  std::vector<UserId> ids;
  for (UserId i = 1; i <= 50; ++i) ids.push_back(i * 3);
  std::vector<UserProfile> users;
  for (const auto id : ids) users.emplace_back(id, std::vector<RatedMovie>{{1, Category(2)}});
  const Dataset d(std::move(users));
  auto c = loose();
  c.pool_fraction = 0.8;
  c.split_seed = 7;
  const auto a = partition(d, c);
  const auto b = partition(d, c);
  EXPECT_EQ(a.pool, b.pool);
  EXPECT_EQ(a.antigens, b.antigens);
  EXPECT_EQ(a.pool.size(), 40u);
  EXPECT_EQ(a.antigens.size(), 10u);
  for (const auto& u : a.antigens.users()) EXPECT_EQ(a.pool.find(u.id()), nullptr);
  c.split_seed = 8;
  EXPECT_NE(partition(d, c).pool, a.pool);
}

TEST(PartitionTest, UnionEqualsFilteredInput) {
  SyntheticConfig sc;
  sc.num_users = 120;
  sc.min_ratings = 5;
  sc.max_ratings = 40;
  const auto d = generate_synthetic(sc);
  IngestConfig c;
  c.min_ratings_per_user = 20;
  c.pool_id_threshold = 60;
  const auto p = partition(d, c);
  std::size_t expected = 0;
  for (const auto& u : d.users()) {
    if (u.size() < 20) continue;
    ++expected;
    const bool in_pool = p.pool.find(u.id()) != nullptr;
    const bool in_antigens = p.antigens.find(u.id()) != nullptr;
    EXPECT_NE(in_pool, in_antigens);
    EXPECT_EQ(in_pool, u.id() > 60);
  }
  EXPECT_EQ(p.pool.size() + p.antigens.size(), expected);
}

TEST(SyntheticTest, DeterministicAndValid) {
  SyntheticConfig c;
  c.num_users = 100;
  const auto a = generate_synthetic(c);
  const auto b = generate_synthetic(c);
  EXPECT_EQ(a, b);
  std::ostringstream sa;
  std::ostringstream sb;
  write_ratings(sa, a);
  write_ratings(sb, b);
  EXPECT_EQ(sa.str(), sb.str());
  for (const auto& u : a.users()) {
    EXPECT_GE(u.size(), c.min_ratings);
    EXPECT_LE(u.size(), c.max_ratings);
  }
  c.seed = 43;
  EXPECT_NE(generate_synthetic(c), a);
}

TEST(SyntheticTest, NoiselessSameClusterAgreesExactly) {
  SyntheticConfig c;
  c.num_users = 60;
  c.num_movies = 80;
  c.num_clusters = 3;
  c.noise = 0.0;
  c.min_ratings = 20;
  c.max_ratings = 40;
  const auto s = generate_synthetic_with_clusters(c);
  int checked = 0;
  for (std::size_t i = 0; i < s.dataset.size(); ++i) {
    for (std::size_t j = i + 1; j < s.dataset.size(); ++j) {
      if (s.cluster_of[i] != s.cluster_of[j]) continue;
      const auto& a = s.dataset.users()[i];
      const auto& b = s.dataset.users()[j];
      if (overlap_count(a, b) == 0) continue;
      EXPECT_EQ(weighted_kappa(a, b), 1.0);
      ++checked;
    }
  }
  EXPECT_GT(checked, 100);
}

TEST(SyntheticTest, ComplementaryClustersSeparate) {
  SyntheticConfig c;
  c.num_users = 60;
  c.num_movies = 80;
  c.num_clusters = 2;
  c.noise = 0.0;
  c.min_ratings = 20;
  c.max_ratings = 40;
  c.complementary_clusters = true;
  const auto s = generate_synthetic_with_clusters(c);
  double worst_within = 1.0;
  double best_cross = 0.0;
  for (std::size_t i = 0; i < s.dataset.size(); ++i) {
    for (std::size_t j = i + 1; j < s.dataset.size(); ++j) {
      const auto& a = s.dataset.users()[i];
      const auto& b = s.dataset.users()[j];
      if (overlap_count(a, b) == 0) continue;
      const double wk = weighted_kappa(a, b);
      if (s.cluster_of[i] == s.cluster_of[j]) {
        worst_within = std::min(worst_within, wk);
      } else {
        best_cross = std::max(best_cross, wk);
      }
    }
  }
  EXPECT_LT(best_cross, worst_within);
}

TEST(SyntheticTest, RejectsInvalidConfig) {
  SyntheticConfig c;
  c.num_clusters = 0;
  EXPECT_THROW((void)generate_synthetic(c), Error);
  c = SyntheticConfig{};
  c.noise = 1.5;
  EXPECT_THROW((void)generate_synthetic(c), Error);
  c = SyntheticConfig{};
  c.min_ratings = 50;
  c.max_ratings = 10;
  EXPECT_THROW((void)generate_synthetic(c), Error);
}

}  // namespace
}  // namespace immunorec
