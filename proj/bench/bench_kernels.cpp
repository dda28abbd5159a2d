#include <benchmark/benchmark.h>

#include <vector>

#include "immunorec/datastore.hpp"
#include "immunorec/immune_network.hpp"
#include "immunorec/kernels.hpp"

namespace {

using namespace immunorec;

const Dataset& fixture() {
  static const Dataset data = [] {
    SyntheticConfig c;
    c.num_users = 500;
    c.num_movies = 300;
    c.seed = 42;
    return generate_synthetic(c);
  }();
  return data;
}

std::vector<const UserProfile*> first_profiles(std::size_t n) {
  std::vector<const UserProfile*> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(&fixture().users()[i]);
  return out;
}

kernels::PairScorer scorer_for(int kind) {
  return {{kind == 0 ? MeasureKind::kWeightedKappa : MeasureKind::kKendallsTau, 2}, true};
}

template <bool Parallel>
void BM_AffinityMatrix(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto profiles = first_profiles(n);
  const auto scorer = scorer_for(static_cast<int>(state.range(1)));
  std::vector<double> out(n * n);
  for (auto _ : state) {
    if constexpr (Parallel) {
      kernels::affinity_matrix_parallel(scorer, profiles, out);
    } else {
      kernels::affinity_matrix_serial(scorer, profiles, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n * (n + 1) / 2));
}

template <bool Parallel>
void BM_ScoreAgainst(benchmark::State& state) {
  const auto profiles = first_profiles(fixture().size());
  const std::span<const UserProfile* const> others(profiles.data() + 1, profiles.size() - 1);
  const auto scorer = scorer_for(static_cast<int>(state.range(0)));
  std::vector<double> out(others.size());
  for (auto _ : state) {
    if constexpr (Parallel) {
      kernels::score_against_parallel(scorer, *profiles[0], others, out);
    } else {
      kernels::score_against_serial(scorer, *profiles[0], others, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_ConcentrationStep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto profiles = first_profiles(n);
  const auto scorer = scorer_for(0);
  std::vector<double> matrix(n * n);
  kernels::affinity_matrix_serial(scorer, profiles, matrix);
  std::vector<double> m(n);
  kernels::score_against_serial(scorer, fixture().users().back(), profiles, m);
  std::vector<double> x(n, 1.0);
  std::vector<double> next(n);
  const auto c = ImmuneParams{}.coefficients();
  for (auto _ : state) {
    if constexpr (Parallel) {
      kernels::concentration_step_parallel(c, x, m, matrix, next);
    } else {
      kernels::concentration_step_serial(c, x, m, matrix, next);
    }
    benchmark::DoNotOptimize(next.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n * n));
}

// range(0) population, range(1) 0 = weighted kappa, 1 = Kendall's tau
BENCHMARK(BM_AffinityMatrix<false>)->Name("affinity_matrix/serial")->ArgsProduct({{100, 400}, {0, 1}})
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AffinityMatrix<true>)->Name("affinity_matrix/parallel")->ArgsProduct({{100, 400}, {0, 1}})
    ->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ScoreAgainst<false>)->Name("score_against/serial")->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ScoreAgainst<true>)->Name("score_against/parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond)
    ->UseRealTime();
BENCHMARK(BM_ConcentrationStep<false>)->Name("concentration_step/serial")->Arg(100)->Arg(500);
BENCHMARK(BM_ConcentrationStep<true>)->Name("concentration_step/parallel")->Arg(100)->Arg(500)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
