#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "immunorec/affinity.hpp"
#include "immunorec/domain.hpp"
#include "immunorec/kernels.hpp"
#include "immunorec/rng.hpp"

namespace immunorec {

// Coefficients of the concentration equation and the selection loop.
struct ImmuneParams {
  double k1 = 0.3;  // stimulation
  double k2 = 0.2;  // suppression
  double k3 = 0.1;  // death
  double antigen_concentration = 1.0;
  std::size_t population_size = 100;
  double dt = 1.0;
  double prune_threshold = 0.05;
  double initial_concentration = 1.0;
  std::size_t stability_window = 10;
  std::size_t max_iterations = 500;
  // The interaction sum runs over every j including j == i unless cleared.
  bool include_self = true;
  // Map signed measures (Kendall, Pearson) from [-1, 1] onto [0, 1] before
  // they enter the dynamics. Raw negative m_ij turn suppression into
  // quadratic growth and the Euler iteration diverges.
  bool remap_signed = true;

  // Throws Error(kInvalidConfig) naming the first offending field.
  void validate() const;
  [[nodiscard]] kernels::StepCoefficients coefficients() const noexcept;

  friend bool operator==(const ImmuneParams&, const ImmuneParams&) = default;
};

struct Antibody {
  const UserProfile* profile = nullptr;
  double concentration = 0.0;
  double antigen_affinity = 0.0;  // m_i
};

// Symmetric m_ij over the current population, row-major.
class AffinityMatrix {
 public:
  AffinityMatrix() = default;
  explicit AffinityMatrix(std::size_t n) : n_(n), values_(n * n, 0.0) {}

  [[nodiscard]] std::size_t dimension() const noexcept { return n_; }
  [[nodiscard]] double at(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }
  void set(std::size_t i, std::size_t j, double v) {
    values_[i * n_ + j] = v;
    values_[j * n_ + i] = v;
  }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] std::span<double> values() noexcept { return values_; }

  // Drops the rows and columns whose keep flag is false.
  void retain(const std::vector<bool>& keep);
  // Appends one member; row holds its affinity to the existing members
  // followed by its self-affinity.
  void append(std::span<const double> row);

 private:
  std::size_t n_ = 0;
  std::vector<double> values_;
};

struct AisState {
  UserProfile antigen;
  kernels::PairScorer scorer;
  std::vector<Antibody> population;
  AffinityMatrix matrix;
  // Candidates not yet admitted; replacements are drawn from here only.
  std::vector<const UserProfile*> pool_remaining;
  std::vector<UserId> discarded;
  std::size_t iteration = 0;
  std::size_t stable_count = 0;
  std::size_t shortfall = 0;  // population_size minus members admitted at init
};

struct PopulationMember {
  UserProfile profile;
  double weight = 0.0;  // final concentration

  friend bool operator==(const PopulationMember&, const PopulationMember&) = default;
};

struct FinalPopulation {
  std::vector<PopulationMember> members;
  bool converged = false;
  std::size_t iterations_used = 0;

  friend bool operator==(const FinalPopulation&, const FinalPopulation&) = default;
};

// Samples min(population_size, |eligible|) antibodies uniformly without
// replacement. Users sharing the antigen's id are never eligible.
// Throws Error(kEmptyPool) if nobody is eligible.
AisState init_population(const UserProfile& antigen, const Dataset& pool, const AffinityMeasure& measure,
                         const ImmuneParams& params, Rng& rng);
AisState init_population(const UserProfile& antigen, const Dataset& pool, const AffinityMeasure& measure,
                         const ImmuneParams& params, std::uint64_t seed);

// One simultaneous Euler update of every concentration.
void concentration_step(AisState& state, const ImmuneParams& params);

// Moves antibodies below prune_threshold into `discarded`, refills from
// pool_remaining and maintains stable_count.
void prune_and_replace(AisState& state, const ImmuneParams& params, Rng& rng);

// Alternates concentration_step and prune_and_replace until membership holds
// for stability_window consecutive iterations or max_iterations is reached.
FinalPopulation run_to_convergence(const UserProfile& antigen, const Dataset& pool,
                                   const AffinityMeasure& measure, const ImmuneParams& params,
                                   std::uint64_t seed);

FinalPopulation finalize(const AisState& state, bool converged);

}  // namespace immunorec
