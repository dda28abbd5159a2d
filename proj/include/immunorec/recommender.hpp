#pragma once

#include <cstddef>
#include <vector>

#include "immunorec/domain.hpp"
#include "immunorec/immune_network.hpp"

namespace immunorec {

struct Prediction {
  MovieId movie = 0;
  double value = 0.0;       // on the 0..1 scale
  std::size_t support = 0;  // antibodies with weight > 0 that rated the movie
  bool fallback = false;    // no qualifying rater; value is the population mean

  // Nearest category, for display.
  [[nodiscard]] Category category() const;
};

struct Recommendation {
  MovieId movie = 0;
  double value = 0.0;
  std::size_t support = 0;

  friend bool operator==(const Recommendation&, const Recommendation&) = default;
};

// Descending by value, ties by ascending movie id.
using RecommendationList = std::vector<Recommendation>;

// Concentration-weighted mean of the ratings given to `movie` by antibodies
// that rated it with positive weight. Throws Error(kEmptyPopulation).
Prediction predict_rating(const FinalPopulation& population, MovieId movie);

// Unweighted mean over every rating held by the population.
double population_mean_rating(const FinalPopulation& population);

// Best `count` non-fallback predictions over movies some member rated and
// the antigen did not. Throws Error(kEmptyPopulation) or Error(kInvalidConfig)
// when count is 0.
RecommendationList recommend_top_n(const FinalPopulation& population, const UserProfile& antigen,
                                   std::size_t count);

}  // namespace immunorec
