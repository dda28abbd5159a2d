#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>

#include "immunorec/domain.hpp"

namespace immunorec {

// Category co-occurrence counts for a user pair. Rows are the first user's
// category, columns the second user's, both 1-based through at().
struct FrequencyTable {
  static constexpr int categories = kCategoryCount;

  std::array<std::array<std::uint32_t, kCategoryCount>, kCategoryCount> counts{};
  std::uint32_t observations = 0;

  [[nodiscard]] std::uint32_t at(int row, int col) const { return counts.at(row - 1).at(col - 1); }
  [[nodiscard]] FrequencyTable transposed() const noexcept;

  friend bool operator==(const FrequencyTable&, const FrequencyTable&) = default;
};

using WeightMatrix = std::array<std::array<double, kCategoryCount>, kCategoryCount>;

// Linear agreement weight 1 - |i - j| / (g - 1) for 1-based categories.
constexpr double agreement_weight(int i, int j, int g = kCategoryCount) noexcept {
  const int d = i > j ? i - j : j - i;
  return 1.0 - static_cast<double>(d) / static_cast<double>(g - 1);
}

constexpr WeightMatrix linear_weights() noexcept {
  WeightMatrix w{};
  for (int i = 0; i < kCategoryCount; ++i) {
    for (int j = 0; j < kCategoryCount; ++j) w[i][j] = agreement_weight(i + 1, j + 1);
  }
  return w;
}

FrequencyTable build_frequency_table(const UserProfile& a, const UserProfile& b);
FrequencyTable build_frequency_table(std::span<const CommonRating> common);

// Weighted kappa with chance agreement fixed at zero, i.e. the weighted
// observed agreement (1/n) * sum_ij w_ij f_ij. Always in [0, 1].
// Throws Error(kInsufficientOverlap) when the table is empty.
double weighted_kappa(const FrequencyTable& table);
double weighted_kappa(const UserProfile& a, const UserProfile& b);

enum class PairDecision { kConcordant, kDiscordant, kIgnored };

// Tie rule: both differences zero is concordant, exactly one zero is ignored,
// otherwise concordant on matching signs and discordant on opposite signs.
constexpr PairDecision classify_pair(int diff_a, int diff_b) noexcept {
  if (diff_a == 0 && diff_b == 0) return PairDecision::kConcordant;
  if (diff_a == 0 || diff_b == 0) return PairDecision::kIgnored;
  return (diff_a > 0) == (diff_b > 0) ? PairDecision::kConcordant : PairDecision::kDiscordant;
}

struct KendallResult {
  std::uint64_t concordant = 0;
  std::uint64_t discordant = 0;
  std::uint64_t ignored = 0;
  std::uint64_t total_pairs = 0;
  // 2(C - D) / (n(n - 1)); ignored pairs remain in the denominator.
  double tau = 0.0;

  [[nodiscard]] std::int64_t s() const noexcept {
    return static_cast<std::int64_t>(concordant) - static_cast<std::int64_t>(discordant);
  }
  [[nodiscard]] double ignored_fraction() const noexcept {
    return total_pairs == 0 ? 0.0 : static_cast<double>(ignored) / static_cast<double>(total_pairs);
  }

  friend bool operator==(const KendallResult&, const KendallResult&) = default;
};

// Throws Error(kInsufficientOverlap) when fewer than two movies are common.
KendallResult kendalls_tau(std::span<const CommonRating> common);
KendallResult kendalls_tau(const UserProfile& a, const UserProfile& b);

double tie_ignored_fraction(const UserProfile& a, const UserProfile& b);

struct PearsonResult {
  double value = 0.0;
  // Set when either side's common ratings are constant; value is then 0.
  bool degenerate = false;
};

// Product-moment correlation over common-movie ratings.
// Throws Error(kInsufficientOverlap) when fewer than two movies are common.
PearsonResult pearson_baseline(std::span<const CommonRating> common);
PearsonResult pearson_baseline(const UserProfile& a, const UserProfile& b);

enum class MeasureKind { kWeightedKappa, kKendallsTau, kPearsonBaseline };

std::string_view to_string(MeasureKind kind) noexcept;
// Accepts "wk", "kt", "pearson" and the full names. Throws Error(kInvalidConfig).
MeasureKind parse_measure(std::string_view name);

struct AffinityMeasure {
  MeasureKind kind = MeasureKind::kWeightedKappa;
  int min_overlap = 2;
};

struct AffinityValue {
  double value = 0.0;
  bool insufficient_overlap = false;
  bool degenerate = false;
};

// Dispatches on measure.kind. Pairs with fewer than max(min_overlap, the
// measure's own minimum) common movies score 0 with insufficient_overlap set.
AffinityValue affinity(const AffinityMeasure& measure, const UserProfile& a, const UserProfile& b);

}  // namespace immunorec
