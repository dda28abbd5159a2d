#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace immunorec {

using UserId = std::uint32_t;
using MovieId = std::uint32_t;

inline constexpr int kCategoryCount = 6;

// The six points of the rating scale, indexed by category - 1.
inline constexpr std::array<double, kCategoryCount> kScalePoints = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};

// One of the six rating categories: 1 = Very Bad ... 6 = Very Good.
class Category {
 public:
  // Throws Error(kOutOfRange) unless 1 <= index <= 6.
  explicit Category(int index);

  [[nodiscard]] constexpr int index() const noexcept { return index_; }
  [[nodiscard]] constexpr double rating() const noexcept { return kScalePoints[index_ - 1]; }

  friend constexpr auto operator<=>(Category, Category) = default;

 private:
  std::uint8_t index_;
};

// Throws Error(kInvalidScalePoint) unless r is within 1e-9 of a scale point.
Category category_from_rating(double r);
// Throws Error(kOutOfRange) unless 1 <= c <= 6.
double rating_from_category(int c);

struct RatedMovie {
  MovieId movie;
  Category category;

  friend bool operator==(const RatedMovie&, const RatedMovie&) = default;
};

// A user's ratings, kept sorted by movie id with at most one entry per movie.
class UserProfile {
 public:
  UserProfile() = default;
  // Sorts the ratings. Throws Error(kDuplicateRating) on a repeated movie id.
  UserProfile(UserId id, std::vector<RatedMovie> ratings);

  [[nodiscard]] UserId id() const noexcept { return id_; }
  [[nodiscard]] std::span<const RatedMovie> ratings() const noexcept { return ratings_; }
  [[nodiscard]] std::size_t size() const noexcept { return ratings_.size(); }
  [[nodiscard]] bool empty() const noexcept { return ratings_.empty(); }

  [[nodiscard]] std::optional<Category> find(MovieId movie) const noexcept;
  [[nodiscard]] bool rates(MovieId movie) const noexcept { return find(movie).has_value(); }

  // Copy of this profile with the given movies' ratings removed.
  [[nodiscard]] UserProfile without(std::span<const MovieId> movies) const;
  [[nodiscard]] UserProfile without(MovieId movie) const { return without(std::span(&movie, 1)); }

  friend bool operator==(const UserProfile&, const UserProfile&) = default;

 private:
  UserId id_ = 0;
  std::vector<RatedMovie> ratings_;
};

struct CommonRating {
  MovieId movie;
  Category a;
  Category b;
};

// Movies rated by both users, ascending by movie id.
std::vector<CommonRating> common_movies(const UserProfile& a, const UserProfile& b);

// Number of movies rated by both users; same as common_movies(a, b).size().
std::size_t overlap_count(const UserProfile& a, const UserProfile& b) noexcept;

// Users sorted by id, plus the sorted set of every movie id they rate.
class Dataset {
 public:
  Dataset() = default;
  // Throws Error(kDuplicateUser) on a repeated user id.
  explicit Dataset(std::vector<UserProfile> users);

  [[nodiscard]] std::span<const UserProfile> users() const noexcept { return users_; }
  [[nodiscard]] std::span<const MovieId> movie_ids() const noexcept { return movie_ids_; }
  [[nodiscard]] std::size_t size() const noexcept { return users_.size(); }
  [[nodiscard]] bool empty() const noexcept { return users_.empty(); }
  [[nodiscard]] std::size_t rating_count() const noexcept;

  [[nodiscard]] const UserProfile* find(UserId id) const noexcept;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::vector<UserProfile> users_;
  std::vector<MovieId> movie_ids_;
};

}  // namespace immunorec
