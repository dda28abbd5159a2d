#include "immunorec/kernels.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>

namespace immunorec::kernels {

namespace {

// Below this many rows the fork/join cost outweighs the work.
constexpr std::ptrdiff_t kMinParallelRows = 32;

inline double step_one(const StepCoefficients& c, std::span<const double> x,
                       std::span<const double> antigen_affinity, std::span<const double> matrix,
                       std::size_t i) {
  const std::size_t n = x.size();
  const double xi = x[i];
  const double* row = matrix.data() + i * n;
  double interaction = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (j == i && !c.include_self) continue;
    interaction += row[j] * x[j];
  }
  const double dx = c.k1 * antigen_affinity[i] * xi * c.antigen_concentration -
                    (c.k2 / static_cast<double>(n)) * interaction * xi - c.k3 * xi;
  const double next = xi + c.dt * dx;
  return std::isfinite(next) ? std::max(0.0, next) : 0.0;
}

}  // namespace

double PairScorer::operator()(const UserProfile& a, const UserProfile& b) const {
  const double v = affinity(measure, a, b).value;
  const bool is_signed = measure.kind != MeasureKind::kWeightedKappa;
  return remap_signed && is_signed ? (v + 1.0) / 2.0 : v;
}

void score_against_serial(const PairScorer& scorer, const UserProfile& anchor,
                          std::span<const UserProfile* const> others, std::span<double> out) {
  assert(out.size() == others.size());
  for (std::size_t k = 0; k < others.size(); ++k) out[k] = scorer(anchor, *others[k]);
}

void score_against_parallel(const PairScorer& scorer, const UserProfile& anchor,
                            std::span<const UserProfile* const> others, std::span<double> out) {
  assert(out.size() == others.size());
  const auto n = static_cast<std::ptrdiff_t>(others.size());
#pragma omp parallel for schedule(static) if (n >= kMinParallelRows)
  for (std::ptrdiff_t k = 0; k < n; ++k) out[k] = scorer(anchor, *others[k]);
}

void affinity_matrix_serial(const PairScorer& scorer, std::span<const UserProfile* const> profiles,
                            std::span<double> out) {
  const std::size_t n = profiles.size();
  assert(out.size() == n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double v = scorer(*profiles[i], *profiles[j]);
      out[i * n + j] = v;
      out[j * n + i] = v;
    }
  }
}

void affinity_matrix_parallel(const PairScorer& scorer, std::span<const UserProfile* const> profiles,
                              std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(profiles.size());
  assert(out.size() == static_cast<std::size_t>(n * n));
  // Row i owns the cells (i, j >= i) and their mirrors, so no cell is shared.
#pragma omp parallel for schedule(dynamic, 4) if (n >= kMinParallelRows)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    for (std::ptrdiff_t j = i; j < n; ++j) {
      const double v = scorer(*profiles[i], *profiles[j]);
      out[i * n + j] = v;
      out[j * n + i] = v;
    }
  }
}

void concentration_step_serial(const StepCoefficients& c, std::span<const double> x,
                               std::span<const double> antigen_affinity,
                               std::span<const double> matrix, std::span<double> next) {
  assert(next.size() == x.size() && matrix.size() == x.size() * x.size());
  for (std::size_t i = 0; i < x.size(); ++i) next[i] = step_one(c, x, antigen_affinity, matrix, i);
}

void concentration_step_parallel(const StepCoefficients& c, std::span<const double> x,
                                 std::span<const double> antigen_affinity,
                                 std::span<const double> matrix, std::span<double> next) {
  assert(next.size() == x.size() && matrix.size() == x.size() * x.size());
  const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static) if (n >= 4 * kMinParallelRows)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    next[i] = step_one(c, x, antigen_affinity, matrix, static_cast<std::size_t>(i));
  }
}

}  // namespace immunorec::kernels
