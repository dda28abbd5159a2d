#include "immunorec/recommender.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "immunorec/errors.hpp"

namespace immunorec {

namespace {

void require_members(const FinalPopulation& population) {
  if (population.members.empty()) {
    throw Error(ErrorCode::kEmptyPopulation, "cannot predict from an empty population");
  }
}

struct Accumulator {
  double weighted = 0.0;
  double weight = 0.0;
  std::size_t support = 0;
};

}  // namespace

Category Prediction::category() const {
  return Category(static_cast<int>(std::lround(std::clamp(value, 0.0, 1.0) * 5.0)) + 1);
}

double population_mean_rating(const FinalPopulation& population) {
  require_members(population);
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& m : population.members) {
    for (const auto& r : m.profile.ratings()) sum += r.category.rating();
    n += m.profile.size();
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

Prediction predict_rating(const FinalPopulation& population, MovieId movie) {
  require_members(population);
  Accumulator acc;
  for (const auto& m : population.members) {
    if (!(m.weight > 0.0)) continue;
    if (const auto c = m.profile.find(movie)) {
      acc.weighted += m.weight * c->rating();
      acc.weight += m.weight;
      ++acc.support;
    }
  }
  if (acc.support == 0) return {movie, population_mean_rating(population), 0, true};
  return {movie, std::clamp(acc.weighted / acc.weight, 0.0, 1.0), acc.support, false};
}

RecommendationList recommend_top_n(const FinalPopulation& population, const UserProfile& antigen,
                                   std::size_t count) {
  require_members(population);
  if (count == 0) throw Error(ErrorCode::kInvalidConfig, "recommendation count must be >= 1");

  std::map<MovieId, Accumulator> totals;
  for (const auto& m : population.members) {
    for (const auto& r : m.profile.ratings()) {
      if (antigen.rates(r.movie)) continue;
      auto& acc = totals[r.movie];
      if (m.weight > 0.0) {
        acc.weighted += m.weight * r.category.rating();
        acc.weight += m.weight;
        ++acc.support;
      }
    }
  }

  RecommendationList out;
  for (const auto& [movie, acc] : totals) {
    if (acc.support == 0) continue;
    out.push_back({movie, std::clamp(acc.weighted / acc.weight, 0.0, 1.0), acc.support});
  }
  std::ranges::sort(out, [](const Recommendation& a, const Recommendation& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.movie < b.movie;
  });
  if (out.size() > count) out.resize(count);
  return out;
}

}  // namespace immunorec
