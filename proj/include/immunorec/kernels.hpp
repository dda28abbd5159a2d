#pragma once

// Data-parallel inner loops of the immune network. Each kernel has a serial
// reference and an OpenMP variant; the two produce bit-identical output
// because every output cell is computed by one thread in the serial order.

#include <span>

#include "immunorec/affinity.hpp"
#include "immunorec/domain.hpp"

namespace immunorec::kernels {

// Affinity as fed to the concentration equation: the measure's value, with
// signed measures optionally remapped by (v + 1) / 2 from [-1, 1] onto [0, 1].
// Weighted kappa already lies in [0, 1] and is never remapped.
struct PairScorer {
  AffinityMeasure measure;
  bool remap_signed = true;

  double operator()(const UserProfile& a, const UserProfile& b) const;
};

// out[k] = scorer(anchor, *others[k]).
void score_against_serial(const PairScorer& scorer, const UserProfile& anchor,
                          std::span<const UserProfile* const> others, std::span<double> out);
void score_against_parallel(const PairScorer& scorer, const UserProfile& anchor,
                            std::span<const UserProfile* const> others, std::span<double> out);

// Symmetric row-major n x n matrix including the diagonal.
void affinity_matrix_serial(const PairScorer& scorer, std::span<const UserProfile* const> profiles,
                            std::span<double> out);
void affinity_matrix_parallel(const PairScorer& scorer, std::span<const UserProfile* const> profiles,
                              std::span<double> out);

struct StepCoefficients {
  double k1 = 0.3;
  double k2 = 0.2;
  double k3 = 0.1;
  double antigen_concentration = 1.0;
  double dt = 1.0;
  bool include_self = true;
};

// One forward-Euler step of
//   dx_i/dt = k1 m_i x_i y - (k2 / n) sum_j m_ij x_i x_j - k3 x_i
// computed from the pre-step state for every i, then clamped at zero. A
// non-finite update (divergence) is treated as extinction and yields 0.
void concentration_step_serial(const StepCoefficients& c, std::span<const double> x,
                               std::span<const double> antigen_affinity,
                               std::span<const double> matrix, std::span<double> next);
void concentration_step_parallel(const StepCoefficients& c, std::span<const double> x,
                                 std::span<const double> antigen_affinity,
                                 std::span<const double> matrix, std::span<double> next);

}  // namespace immunorec::kernels
