#include "immunorec/datastore.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <string_view>
#include <utility>

#include <spdlog/spdlog.h>

#include "immunorec/errors.hpp"
#include "immunorec/rng.hpp"

namespace immunorec {

namespace {

struct Row {
  UserId user;
  MovieId movie;
  Category category;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::uint32_t parse_id(std::string_view field, std::size_t line, std::size_t column, const char* name) {
  std::uint32_t value = 0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc() || ptr != end) {
    throw ParseError(line, column, std::string(name) + " '" + std::string(field) + "' is not an integer");
  }
  if (value == 0) throw ParseError(line, column, std::string(name) + " must be positive");
  return value;
}

Category parse_category(std::string_view field, std::size_t line, CsvFormat format) {
  const auto* end = field.data() + field.size();
  if (format == CsvFormat::kCategory) {
    int value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (field.empty() || ec != std::errc() || ptr != end) {
      throw ParseError(line, 3, "category '" + std::string(field) + "' is not an integer");
    }
    if (value < 1 || value > kCategoryCount) {
      throw ParseError(line, 3, "category " + std::to_string(value) + " outside 1..6");
    }
    return Category(value);
  }
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc() || ptr != end) {
    throw ParseError(line, 3, "rating '" + std::string(field) + "' is not a number");
  }
  try {
    return category_from_rating(value);
  } catch (const Error&) {
    throw ParseError(line, 3, "rating " + std::string(field) + " is not on the 6-point scale");
  }
}

Row parse_row(std::string_view text, std::size_t line, CsvFormat format) {
  std::array<std::string_view, 3> fields;
  std::size_t count = 0;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    const auto piece = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    if (count == fields.size()) throw ParseError(line, 0, "expected 3 fields, found more");
    fields[count++] = trim(piece);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (count != fields.size()) {
    throw ParseError(line, 0, "expected 3 fields, found " + std::to_string(count));
  }
  return {parse_id(fields[0], line, 1, "user id"), parse_id(fields[1], line, 2, "movie id"),
          parse_category(fields[2], line, format)};
}

}  // namespace

nlohmann::json LoadReport::to_json() const {
  return {{"users_kept", users_kept},
          {"users_dropped", users_dropped},
          {"rows_rejected", rows_rejected},
          {"movies", movies}};
}

LoadResult parse_ratings(std::istream& in, const IngestConfig& config) {
  if (config.min_ratings_per_user < 1) {
    throw Error(ErrorCode::kInvalidConfig, "min_ratings_per_user must be >= 1");
  }
  LoadReport report;
  std::map<UserId, std::vector<RatedMovie>> by_user;
  std::set<std::pair<UserId, MovieId>> seen;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (trim(text).empty()) continue;
    try {
      const Row row = parse_row(text, line, config.format);
      if (!seen.emplace(row.user, row.movie).second) {
        throw ParseError(line, 0,
                         "duplicate rating for user " + std::to_string(row.user) + ", movie " +
                             std::to_string(row.movie));
      }
      by_user[row.user].push_back({row.movie, row.category});
    } catch (const ParseError& e) {
      if (config.strict) throw;
      ++report.rows_rejected;
      report.diagnostics.emplace_back(e.what());
      spdlog::debug("rejected {}", e.what());
    }
  }
  if (in.bad()) throw Error(ErrorCode::kIo, "read failure after line " + std::to_string(line));

  std::vector<UserProfile> users;
  for (auto& [id, ratings] : by_user) {
    if (ratings.size() < config.min_ratings_per_user) {
      ++report.users_dropped;
      continue;
    }
    users.emplace_back(id, std::move(ratings));
  }
  if (users.empty()) throw Error(ErrorCode::kEmptyDataset, "no users left after filtering");
  Dataset dataset(std::move(users));
  report.users_kept = dataset.size();
  report.movies = dataset.movie_ids().size();
  return {std::move(dataset), std::move(report)};
}

LoadResult load_ratings(const std::filesystem::path& path, const IngestConfig& config) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return parse_ratings(in, config);
}

void write_ratings(std::ostream& out, const Dataset& dataset) {
  for (const auto& u : dataset.users()) {
    for (const auto& r : u.ratings()) {
      out << u.id() << ',' << r.movie << ',' << r.category.index() << '\n';
    }
  }
}

void save_ratings(const std::filesystem::path& path, const Dataset& dataset) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  write_ratings(out, dataset);
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

Partition partition(const Dataset& dataset, const IngestConfig& config) {
  std::vector<const UserProfile*> kept;
  for (const auto& u : dataset.users()) {
    if (u.size() >= config.min_ratings_per_user) kept.push_back(&u);
  }

  std::vector<UserProfile> pool;
  std::vector<UserProfile> antigens;
  if (config.pool_id_threshold) {
    for (const auto* u : kept) (u->id() > *config.pool_id_threshold ? pool : antigens).push_back(*u);
  } else {
    if (!(config.pool_fraction >= 0.0 && config.pool_fraction <= 1.0)) {
      throw Error(ErrorCode::kInvalidConfig, "pool fraction must lie in [0, 1]");
    }
    Rng rng(config.split_seed);
    const auto pool_size =
        static_cast<std::size_t>(std::llround(config.pool_fraction * static_cast<double>(kept.size())));
    rng.sample_front(kept, pool_size);
    for (std::size_t i = 0; i < kept.size(); ++i) (i < pool_size ? pool : antigens).push_back(*kept[i]);
  }

  Partition out{Dataset(std::move(pool)), Dataset(std::move(antigens)), {}};
  if (out.pool.empty()) out.warnings.emplace_back("partition produced an empty pool");
  if (out.antigens.empty()) out.warnings.emplace_back("partition produced no antigens");
  for (const auto& w : out.warnings) spdlog::warn("{}", w);
  return out;
}

void SyntheticConfig::validate() const {
  auto fail = [](const char* what) { throw Error(ErrorCode::kInvalidConfig, what); };
  if (num_users < 1) fail("num_users must be >= 1");
  if (num_movies < 1) fail("num_movies must be >= 1");
  if (num_clusters < 1) fail("num_clusters must be >= 1");
  if (!(noise >= 0.0 && noise <= 1.0)) fail("noise must lie in [0, 1]");
  if (min_ratings < 1) fail("min_ratings must be >= 1");
  if (max_ratings < min_ratings) fail("max_ratings must be >= min_ratings");
}

nlohmann::json SyntheticConfig::to_json() const {
  return {{"num_users", num_users},
          {"num_movies", num_movies},
          {"num_clusters", num_clusters},
          {"noise", noise},
          {"min_ratings", min_ratings},
          {"max_ratings", max_ratings},
          {"seed", seed},
          {"complementary_clusters", complementary_clusters}};
}

SyntheticData generate_synthetic_with_clusters(const SyntheticConfig& config) {
  config.validate();
  Rng rng(config.seed);

  std::vector<std::vector<double>> latent(config.num_clusters, std::vector<double>(config.num_movies));
  for (std::size_t c = 0; c < config.num_clusters; ++c) {
    for (std::size_t m = 0; m < config.num_movies; ++m) {
      latent[c][m] = (config.complementary_clusters && c % 2 == 1) ? 1.0 - latent[c - 1][m] : rng.unit();
    }
  }

  std::vector<MovieId> movies(config.num_movies);
  for (std::size_t m = 0; m < config.num_movies; ++m) movies[m] = static_cast<MovieId>(m + 1);

  SyntheticData out;
  out.cluster_of.reserve(config.num_users);
  std::vector<UserProfile> users;
  users.reserve(config.num_users);
  for (std::size_t u = 0; u < config.num_users; ++u) {
    const auto cluster = static_cast<std::size_t>(rng.below(config.num_clusters));
    const auto count = std::min<std::size_t>(
        static_cast<std::size_t>(rng.between(config.min_ratings, config.max_ratings)), config.num_movies);
    rng.sample_front(movies, count);
    std::vector<RatedMovie> ratings;
    ratings.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
      double v = latent[cluster][movies[k] - 1];
      if (config.noise > 0.0) v += rng.uniform(-config.noise, config.noise);
      v = std::clamp(v, 0.0, 1.0);
      ratings.push_back({movies[k], Category(static_cast<int>(std::lround(v * 5.0)) + 1)});
    }
    users.emplace_back(static_cast<UserId>(u + 1), std::move(ratings));
    out.cluster_of.push_back(cluster);
  }
  out.dataset = Dataset(std::move(users));
  return out;
}

Dataset generate_synthetic(const SyntheticConfig& config) {
  return generate_synthetic_with_clusters(config).dataset;
}

}  // namespace immunorec
