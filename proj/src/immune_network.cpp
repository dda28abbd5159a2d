#include "immunorec/immune_network.hpp"

#include <cmath>
#include <string>

#include <spdlog/spdlog.h>

#include "immunorec/errors.hpp"

namespace immunorec {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::kInvalidConfig, std::string("invalid immune parameter: ") + what);
}

std::vector<const UserProfile*> member_profiles(const AisState& state) {
  std::vector<const UserProfile*> out;
  out.reserve(state.population.size());
  for (const auto& ab : state.population) out.push_back(ab.profile);
  return out;
}

}  // namespace

void ImmuneParams::validate() const {
  require(std::isfinite(k1) && k1 >= 0.0, "k1 must be >= 0");
  require(std::isfinite(k2) && k2 >= 0.0, "k2 must be >= 0");
  require(std::isfinite(k3) && k3 >= 0.0, "k3 must be >= 0");
  require(std::isfinite(antigen_concentration) && antigen_concentration > 0.0,
          "antigen concentration must be > 0");
  require(population_size >= 1, "population size must be >= 1");
  require(std::isfinite(dt) && dt > 0.0, "dt must be > 0");
  require(std::isfinite(prune_threshold) && prune_threshold >= 0.0, "prune threshold must be >= 0");
  require(std::isfinite(initial_concentration) && initial_concentration > 0.0,
          "initial concentration must be > 0");
  require(stability_window >= 1, "stability window must be >= 1");
}

kernels::StepCoefficients ImmuneParams::coefficients() const noexcept {
  return {k1, k2, k3, antigen_concentration, dt, include_self};
}

void AffinityMatrix::retain(const std::vector<bool>& keep) {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < n_; ++i) {
    if (keep[i]) rows.push_back(i);
  }
  const std::size_t m = rows.size();
  std::vector<double> next(m * m);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) next[a * m + b] = values_[rows[a] * n_ + rows[b]];
  }
  n_ = m;
  values_ = std::move(next);
}

void AffinityMatrix::append(std::span<const double> row) {
  const std::size_t m = n_ + 1;
  std::vector<double> next(m * m);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) next[i * m + j] = values_[i * n_ + j];
  }
  for (std::size_t j = 0; j < m; ++j) {
    next[n_ * m + j] = row[j];
    next[j * m + n_] = row[j];
  }
  n_ = m;
  values_ = std::move(next);
}

AisState init_population(const UserProfile& antigen, const Dataset& pool, const AffinityMeasure& measure,
                         const ImmuneParams& params, Rng& rng) {
  params.validate();
  AisState state;
  state.antigen = antigen;
  state.scorer = {measure, params.remap_signed};

  std::vector<const UserProfile*> candidates;
  candidates.reserve(pool.size());
  for (const auto& u : pool.users()) {
    if (u.id() != antigen.id()) candidates.push_back(&u);
  }
  if (candidates.empty()) {
    throw Error(ErrorCode::kEmptyPool, "no candidate antibodies for user " + std::to_string(antigen.id()));
  }

  const std::size_t taken = rng.sample_front(candidates, params.population_size);
  if (taken < params.population_size) {
    state.shortfall = params.population_size - taken;
    spdlog::warn("pool holds {} candidates; population of {} is short by {}", taken,
                 params.population_size, state.shortfall);
  }
  std::vector<const UserProfile*> members(candidates.begin(), candidates.begin() + taken);
  state.pool_remaining.assign(candidates.begin() + taken, candidates.end());

  std::vector<double> antigen_affinity(taken);
  kernels::score_against_parallel(state.scorer, antigen, members, antigen_affinity);
  state.matrix = AffinityMatrix(taken);
  kernels::affinity_matrix_parallel(state.scorer, members, state.matrix.values());

  state.population.reserve(params.population_size);
  for (std::size_t i = 0; i < taken; ++i) {
    state.population.push_back({members[i], params.initial_concentration, antigen_affinity[i]});
  }
  return state;
}

AisState init_population(const UserProfile& antigen, const Dataset& pool, const AffinityMeasure& measure,
                         const ImmuneParams& params, std::uint64_t seed) {
  Rng rng(seed);
  return init_population(antigen, pool, measure, params, rng);
}

void concentration_step(AisState& state, const ImmuneParams& params) {
  const std::size_t n = state.population.size();
  if (n == 0) return;
  std::vector<double> x(n);
  std::vector<double> m(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = state.population[i].concentration;
    m[i] = state.population[i].antigen_affinity;
  }
  std::vector<double> next(n);
  kernels::concentration_step_parallel(params.coefficients(), x, m, state.matrix.values(), next);
  for (std::size_t i = 0; i < n; ++i) state.population[i].concentration = next[i];
}

void prune_and_replace(AisState& state, const ImmuneParams& params, Rng& rng) {
  const std::size_t n = state.population.size();
  std::vector<bool> keep(n, true);
  std::size_t removed = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (state.population[i].concentration < params.prune_threshold) {
      keep[i] = false;
      ++removed;
    }
  }
  if (removed == 0) {
    ++state.stable_count;
    return;
  }

  std::vector<Antibody> survivors;
  survivors.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (keep[i]) {
      survivors.push_back(state.population[i]);
    } else {
      state.discarded.push_back(state.population[i].profile->id());
    }
  }
  state.population = std::move(survivors);
  state.matrix.retain(keep);

  std::size_t added = 0;
  while (added < removed && !state.pool_remaining.empty()) {
    const auto pick = static_cast<std::size_t>(rng.below(state.pool_remaining.size()));
    const UserProfile* fresh = state.pool_remaining[pick];
    state.pool_remaining[pick] = state.pool_remaining.back();
    state.pool_remaining.pop_back();

    auto members = member_profiles(state);
    members.push_back(fresh);
    std::vector<double> row(members.size());
    kernels::score_against_parallel(state.scorer, *fresh, members, row);
    state.matrix.append(row);
    state.population.push_back(
        {fresh, params.initial_concentration, state.scorer(state.antigen, *fresh)});
    ++added;
  }
  if (added < removed) {
    spdlog::debug("pool exhausted; population shrinks to {}", state.population.size());
  }
  state.stable_count = 0;
}

FinalPopulation finalize(const AisState& state, bool converged) {
  FinalPopulation out;
  out.converged = converged;
  out.iterations_used = state.iteration;
  out.members.reserve(state.population.size());
  for (const auto& ab : state.population) out.members.push_back({*ab.profile, ab.concentration});
  return out;
}

FinalPopulation run_to_convergence(const UserProfile& antigen, const Dataset& pool,
                                   const AffinityMeasure& measure, const ImmuneParams& params,
                                   std::uint64_t seed) {
  Rng rng(seed);
  AisState state = init_population(antigen, pool, measure, params, rng);
  bool converged = false;
  while (state.iteration < params.max_iterations) {
    if (state.population.empty()) {
      spdlog::info("population for user {} died out after {} iterations", antigen.id(), state.iteration);
      break;
    }
    concentration_step(state, params);
    prune_and_replace(state, params, rng);
    ++state.iteration;
    if (state.stable_count >= params.stability_window) {
      converged = true;
      break;
    }
  }
  if (!converged && !state.population.empty()) {
    spdlog::warn("user {}: membership not stable after {} iterations", antigen.id(), state.iteration);
  }
  return finalize(state, converged);
}

}  // namespace immunorec
