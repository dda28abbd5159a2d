#include "immunorec/domain.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "immunorec/errors.hpp"

namespace immunorec {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidScalePoint: return "invalid-scale-point";
    case ErrorCode::kOutOfRange: return "out-of-range";
    case ErrorCode::kDuplicateRating: return "duplicate-rating";
    case ErrorCode::kDuplicateUser: return "duplicate-user";
    case ErrorCode::kInsufficientOverlap: return "insufficient-overlap";
    case ErrorCode::kEmptyPool: return "empty-pool";
    case ErrorCode::kEmptyPopulation: return "empty-population";
    case ErrorCode::kIo: return "io-error";
    case ErrorCode::kParse: return "parse-error";
    case ErrorCode::kEmptyDataset: return "empty-dataset";
    case ErrorCode::kInsufficientRatings: return "insufficient-ratings";
    case ErrorCode::kInsufficientAntigens: return "insufficient-antigens";
    case ErrorCode::kSampleMismatch: return "sample-mismatch";
    case ErrorCode::kUnknownUser: return "unknown-user";
    case ErrorCode::kInvalidConfig: return "invalid-config";
  }
  return "unknown";
}

namespace {

std::string parse_message(std::size_t line, std::size_t column, const std::string& reason) {
  std::string msg = "line " + std::to_string(line);
  if (column > 0) msg += ", column " + std::to_string(column);
  return msg + ": " + reason;
}

}  // namespace

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& reason)
    : Error(ErrorCode::kParse, parse_message(line, column, reason)),
      line_(line),
      column_(column),
      reason_(reason) {}

Category::Category(int index) {
  if (index < 1 || index > kCategoryCount) {
    throw Error(ErrorCode::kOutOfRange, "category " + std::to_string(index) + " outside 1..6");
  }
  index_ = static_cast<std::uint8_t>(index);
}

Category category_from_rating(double r) {
  if (!std::isfinite(r)) throw Error(ErrorCode::kInvalidScalePoint, "rating is not finite");
  const double scaled = std::round(r / 0.2);
  if (scaled >= 0.0 && scaled < kCategoryCount) {
    const int index = static_cast<int>(scaled) + 1;
    if (std::abs(r - kScalePoints[index - 1]) <= 1e-9) return Category(index);
  }
  throw Error(ErrorCode::kInvalidScalePoint, "rating " + std::to_string(r) + " is not a scale point");
}

double rating_from_category(int c) { return Category(c).rating(); }

UserProfile::UserProfile(UserId id, std::vector<RatedMovie> ratings)
    : id_(id), ratings_(std::move(ratings)) {
  std::ranges::sort(ratings_, {}, &RatedMovie::movie);
  const auto dup = std::ranges::adjacent_find(ratings_, {}, &RatedMovie::movie);
  if (dup != ratings_.end()) {
    throw Error(ErrorCode::kDuplicateRating, "user " + std::to_string(id) + " rates movie " +
                                                 std::to_string(dup->movie) + " twice");
  }
}

std::optional<Category> UserProfile::find(MovieId movie) const noexcept {
  const auto it = std::ranges::lower_bound(ratings_, movie, {}, &RatedMovie::movie);
  if (it == ratings_.end() || it->movie != movie) return std::nullopt;
  return it->category;
}

UserProfile UserProfile::without(std::span<const MovieId> movies) const {
  UserProfile copy;
  copy.id_ = id_;
  copy.ratings_.reserve(ratings_.size());
  for (const auto& r : ratings_) {
    if (std::ranges::find(movies, r.movie) == movies.end()) copy.ratings_.push_back(r);
  }
  return copy;
}

std::vector<CommonRating> common_movies(const UserProfile& a, const UserProfile& b) {
  std::vector<CommonRating> out;
  const auto ra = a.ratings();
  const auto rb = b.ratings();
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < ra.size() && j < rb.size()) {
    if (ra[i].movie < rb[j].movie) {
      ++i;
    } else if (rb[j].movie < ra[i].movie) {
      ++j;
    } else {
      out.push_back({ra[i].movie, ra[i].category, rb[j].category});
      ++i;
      ++j;
    }
  }
  return out;
}

std::size_t overlap_count(const UserProfile& a, const UserProfile& b) noexcept {
  const auto ra = a.ratings();
  const auto rb = b.ratings();
  std::size_t i = 0;
  std::size_t j = 0;
  std::size_t n = 0;
  while (i < ra.size() && j < rb.size()) {
    if (ra[i].movie < rb[j].movie) {
      ++i;
    } else if (rb[j].movie < ra[i].movie) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

Dataset::Dataset(std::vector<UserProfile> users) : users_(std::move(users)) {
  std::ranges::sort(users_, {}, &UserProfile::id);
  const auto dup = std::ranges::adjacent_find(users_, {}, &UserProfile::id);
  if (dup != users_.end()) {
    throw Error(ErrorCode::kDuplicateUser, "user " + std::to_string(dup->id()) + " appears twice");
  }
  for (const auto& u : users_) {
    for (const auto& r : u.ratings()) movie_ids_.push_back(r.movie);
  }
  std::ranges::sort(movie_ids_);
  const auto tail = std::ranges::unique(movie_ids_);
  movie_ids_.erase(tail.begin(), tail.end());
}

std::size_t Dataset::rating_count() const noexcept {
  std::size_t n = 0;
  for (const auto& u : users_) n += u.size();
  return n;
}

const UserProfile* Dataset::find(UserId id) const noexcept {
  const auto it = std::ranges::lower_bound(users_, id, {}, &UserProfile::id);
  if (it == users_.end() || it->id() != id) return nullptr;
  return &*it;
}

}  // namespace immunorec
