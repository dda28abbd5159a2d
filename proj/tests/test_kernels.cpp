#include <gtest/gtest.h>

#include <string>

#include <omp.h>

#include <random>

#include "immunorec/kernels.hpp"
#include "test_support.hpp"

namespace immunorec {
namespace {

std::vector<UserProfile> make_profiles(std::size_t n, unsigned seed) {
  std::mt19937 gen(seed);
  std::vector<UserProfile> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(testing::random_profile(static_cast<UserId>(i + 1), gen, 80, 5, 40));
  return out;
}

std::vector<const UserProfile*> pointers(const std::vector<UserProfile>& v) {
  std::vector<const UserProfile*> out;
  for (const auto& p : v) out.push_back(&p);
  return out;
}

class KernelEquivalence : public ::testing::TestWithParam<std::tuple<std::size_t, MeasureKind>> {
 protected:
  void SetUp() override { omp_set_num_threads(4); }
};

TEST_P(KernelEquivalence, AffinityMatrixSerialEqualsParallel) {
  const auto [n, kind] = GetParam();
  const auto profiles = make_profiles(n, 3);
  const auto ptrs = pointers(profiles);
  const kernels::PairScorer scorer{{kind, 2}, true};
  std::vector<double> serial(n * n, -7.0);
  std::vector<double> parallel(n * n, -9.0);
  kernels::affinity_matrix_serial(scorer, ptrs, serial);
  kernels::affinity_matrix_parallel(scorer, ptrs, parallel);
  EXPECT_EQ(serial, parallel);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) EXPECT_EQ(serial[i * n + j], serial[j * n + i]);
  }
}

TEST_P(KernelEquivalence, ScoreAgainstSerialEqualsParallel) {
  const auto [n, kind] = GetParam();
  const auto profiles = make_profiles(n + 1, 4);
  const auto ptrs = pointers(profiles);
  const std::span<const UserProfile* const> others(ptrs.data() + 1, n);
  const kernels::PairScorer scorer{{kind, 2}, false};
  std::vector<double> serial(n);
  std::vector<double> parallel(n);
  kernels::score_against_serial(scorer, profiles[0], others, serial);
  kernels::score_against_parallel(scorer, profiles[0], others, parallel);
  EXPECT_EQ(serial, parallel);
}

TEST_P(KernelEquivalence, ConcentrationStepSerialEqualsParallel) {
  const auto [n, kind] = GetParam();
  (void)kind;
  std::mt19937 gen(static_cast<unsigned>(n));
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<double> x(n);
  std::vector<double> m(n);
  std::vector<double> mat(n * n);
  for (auto& v : x) v = std::abs(unit(gen)) * 2.0;
  for (auto& v : m) v = unit(gen);
  for (auto& v : mat) v = unit(gen);
  for (const bool self : {true, false}) {
    kernels::StepCoefficients c;
    c.include_self = self;
    std::vector<double> serial(n);
    std::vector<double> parallel(n);
    kernels::concentration_step_serial(c, x, m, mat, serial);
    kernels::concentration_step_parallel(c, x, m, mat, parallel);
    EXPECT_EQ(serial, parallel);
    for (const double v : serial) EXPECT_GE(v, 0.0);
  }
}

INSTANTIATE_TEST_SUITE_P(Sizes, KernelEquivalence,
                         ::testing::Combine(::testing::Values(1, 7, 33, 150, 300),
                                            ::testing::Values(MeasureKind::kWeightedKappa,
                                                              MeasureKind::kKendallsTau)),
                         [](const auto& info) {
                           return std::string(to_string(std::get<1>(info.param))) + "_n" +
                                  std::to_string(std::get<0>(info.param));
                         });

TEST(PairScorerTest, RemapsOnlySignedMeasures) {
  const auto u1 = testing::worked_user1();
  const auto u2 = testing::worked_user2();
  const kernels::PairScorer wk{{MeasureKind::kWeightedKappa, 2}, true};
  const kernels::PairScorer kt{{MeasureKind::kKendallsTau, 2}, true};
  const kernels::PairScorer kt_raw{{MeasureKind::kKendallsTau, 2}, false};
  EXPECT_NEAR(wk(u1, u2), 0.725, 1e-12);
  EXPECT_NEAR(kt_raw(u1, u2), 3.0 / 28.0, 1e-12);
  EXPECT_NEAR(kt(u1, u2), (3.0 / 28.0 + 1.0) / 2.0, 1e-12);
}

TEST(ConcentrationKernelTest, DivergenceIsExtinction) {
  kernels::StepCoefficients c;
  const std::vector<double> x = {1e300};
  const std::vector<double> m = {1.0};
  const std::vector<double> mat = {-1e300};
  std::vector<double> next(1);
  kernels::concentration_step_serial(c, x, m, mat, next);
  EXPECT_EQ(next[0], 0.0);
}

}  // namespace
}  // namespace immunorec
