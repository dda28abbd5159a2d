#include "immunorec/affinity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "immunorec/errors.hpp"

namespace immunorec {

FrequencyTable FrequencyTable::transposed() const noexcept {
  FrequencyTable t;
  t.observations = observations;
  for (int i = 0; i < kCategoryCount; ++i) {
    for (int j = 0; j < kCategoryCount; ++j) t.counts[j][i] = counts[i][j];
  }
  return t;
}

FrequencyTable build_frequency_table(std::span<const CommonRating> common) {
  FrequencyTable table;
  for (const auto& c : common) ++table.counts[c.a.index() - 1][c.b.index() - 1];
  table.observations = static_cast<std::uint32_t>(common.size());
  return table;
}

FrequencyTable build_frequency_table(const UserProfile& a, const UserProfile& b) {
  return build_frequency_table(common_movies(a, b));
}

double weighted_kappa(const FrequencyTable& table) {
  if (table.observations == 0) {
    throw Error(ErrorCode::kInsufficientOverlap, "weighted kappa needs at least one common movie");
  }
  // (g - 1) * w_ij = (g - 1) - |i - j| is integral, so the weighted sum is
  // accumulated exactly and divided once.
  std::uint64_t scaled = 0;
  for (int i = 0; i < kCategoryCount; ++i) {
    for (int j = 0; j < kCategoryCount; ++j) {
      const int d = i > j ? i - j : j - i;
      scaled += static_cast<std::uint64_t>(kCategoryCount - 1 - d) * table.counts[i][j];
    }
  }
  return static_cast<double>(scaled) /
         (static_cast<double>(kCategoryCount - 1) * static_cast<double>(table.observations));
}

double weighted_kappa(const UserProfile& a, const UserProfile& b) {
  return weighted_kappa(build_frequency_table(a, b));
}

KendallResult kendalls_tau(std::span<const CommonRating> common) {
  const std::uint64_t n = common.size();
  if (n < 2) {
    throw Error(ErrorCode::kInsufficientOverlap, "Kendall's tau needs at least two common movies");
  }
  KendallResult r;
  r.total_pairs = n * (n - 1) / 2;
  for (std::size_t i = 0; i < common.size(); ++i) {
    const int ai = common[i].a.index();
    const int bi = common[i].b.index();
    for (std::size_t j = i + 1; j < common.size(); ++j) {
      switch (classify_pair(common[j].a.index() - ai, common[j].b.index() - bi)) {
        case PairDecision::kConcordant: ++r.concordant; break;
        case PairDecision::kDiscordant: ++r.discordant; break;
        case PairDecision::kIgnored: ++r.ignored; break;
      }
    }
  }
  r.tau = 2.0 * static_cast<double>(r.s()) / static_cast<double>(n * (n - 1));
  return r;
}

KendallResult kendalls_tau(const UserProfile& a, const UserProfile& b) {
  return kendalls_tau(common_movies(a, b));
}

double tie_ignored_fraction(const UserProfile& a, const UserProfile& b) {
  return kendalls_tau(a, b).ignored_fraction();
}

PearsonResult pearson_baseline(std::span<const CommonRating> common) {
  if (common.size() < 2) {
    throw Error(ErrorCode::kInsufficientOverlap, "Pearson needs at least two common movies");
  }
  // Correlation is invariant under the affine map category -> rating, so the
  // sums run over integer categories and the zero-variance test is exact.
  const auto n = static_cast<std::int64_t>(common.size());
  std::int64_t sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
  for (const auto& c : common) {
    const std::int64_t a = c.a.index();
    const std::int64_t b = c.b.index();
    sa += a;
    sb += b;
    saa += a * a;
    sbb += b * b;
    sab += a * b;
  }
  const std::int64_t cov = n * sab - sa * sb;
  const std::int64_t var_a = n * saa - sa * sa;
  const std::int64_t var_b = n * sbb - sb * sb;
  if (var_a == 0 || var_b == 0) return {0.0, true};
  const double r = static_cast<double>(cov) / std::sqrt(static_cast<double>(var_a) * static_cast<double>(var_b));
  return {std::clamp(r, -1.0, 1.0), false};
}

PearsonResult pearson_baseline(const UserProfile& a, const UserProfile& b) {
  return pearson_baseline(common_movies(a, b));
}

std::string_view to_string(MeasureKind kind) noexcept {
  switch (kind) {
    case MeasureKind::kWeightedKappa: return "wk";
    case MeasureKind::kKendallsTau: return "kt";
    case MeasureKind::kPearsonBaseline: return "pearson";
  }
  return "unknown";
}

MeasureKind parse_measure(std::string_view name) {
  if (name == "wk" || name == "weighted-kappa") return MeasureKind::kWeightedKappa;
  if (name == "kt" || name == "kendall" || name == "kendalls-tau") return MeasureKind::kKendallsTau;
  if (name == "pearson" || name == "pr") return MeasureKind::kPearsonBaseline;
  throw Error(ErrorCode::kInvalidConfig, "unknown affinity measure '" + std::string(name) + "'");
}

AffinityValue affinity(const AffinityMeasure& measure, const UserProfile& a, const UserProfile& b) {
  const auto common = common_movies(a, b);
  const std::size_t intrinsic = measure.kind == MeasureKind::kWeightedKappa ? 1 : 2;
  const std::size_t needed = std::max<std::size_t>(intrinsic, static_cast<std::size_t>(std::max(measure.min_overlap, 1)));
  if (common.size() < needed) return {0.0, true, false};
  switch (measure.kind) {
    case MeasureKind::kWeightedKappa:
      return {weighted_kappa(build_frequency_table(common)), false, false};
    case MeasureKind::kKendallsTau:
      return {kendalls_tau(common).tau, false, false};
    case MeasureKind::kPearsonBaseline: {
      const auto p = pearson_baseline(common);
      return {p.value, false, p.degenerate};
    }
  }
  return {};
}

}  // namespace immunorec
