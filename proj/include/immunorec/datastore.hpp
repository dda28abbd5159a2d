#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "immunorec/domain.hpp"

namespace immunorec {

// category_csv: "user_id,movie_id,category" with category in 1..6.
// scaled_csv: same shape with the rating in {0, 0.2, ..., 1.0}.
enum class CsvFormat { kCategory, kScaled };

struct IngestConfig {
  CsvFormat format = CsvFormat::kCategory;
  std::size_t min_ratings_per_user = 20;
  // Users with id > threshold form the pool, the rest are antigens.
  std::optional<UserId> pool_id_threshold;
  // Used when no threshold is set: seeded random split.
  double pool_fraction = 0.8;
  std::uint64_t split_seed = 0;
  // Strict loads throw on the first bad row; lenient loads skip and count it.
  bool strict = true;
};

struct LoadReport {
  std::size_t users_kept = 0;
  std::size_t users_dropped = 0;
  std::size_t rows_rejected = 0;
  std::size_t movies = 0;
  std::vector<std::string> diagnostics;

  [[nodiscard]] nlohmann::json to_json() const;
};

struct LoadResult {
  Dataset dataset;
  LoadReport report;
};

// Throws Error(kIo), ParseError, or Error(kEmptyDataset).
LoadResult load_ratings(const std::filesystem::path& path, const IngestConfig& config);
LoadResult parse_ratings(std::istream& in, const IngestConfig& config);

// Canonical category_csv: LF line endings, ascending (user_id, movie_id).
void write_ratings(std::ostream& out, const Dataset& dataset);
void save_ratings(const std::filesystem::path& path, const Dataset& dataset);

struct Partition {
  Dataset pool;
  Dataset antigens;
  std::vector<std::string> warnings;
};

// Drops users below min_ratings_per_user, then splits by id threshold or by
// a seeded random fraction.
Partition partition(const Dataset& dataset, const IngestConfig& config);

struct SyntheticConfig {
  std::size_t num_users = 500;
  std::size_t num_movies = 300;
  std::size_t num_clusters = 4;
  double noise = 0.1;
  std::size_t min_ratings = 30;
  std::size_t max_ratings = 80;
  std::uint64_t seed = 42;
  // Odd clusters take 1 - p of the preceding cluster's latent preference p.
  bool complementary_clusters = false;

  void validate() const;
  [[nodiscard]] nlohmann::json to_json() const;
};

struct SyntheticData {
  Dataset dataset;
  // cluster_of[k] is the cluster of the user with id k + 1.
  std::vector<std::size_t> cluster_of;
};

SyntheticData generate_synthetic_with_clusters(const SyntheticConfig& config);
Dataset generate_synthetic(const SyntheticConfig& config);

}  // namespace immunorec
