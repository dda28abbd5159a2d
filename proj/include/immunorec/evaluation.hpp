#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "immunorec/affinity.hpp"
#include "immunorec/domain.hpp"
#include "immunorec/immune_network.hpp"

namespace immunorec {

enum class Predictor {
  kImmuneNetwork,  // full AIS run, then the concentration-weighted mean
  kGlobalMean,     // baseline: the mean of every rating in the pool
};

struct EvalOptions {
  Predictor predictor = Predictor::kImmuneNetwork;
  // Hide all trial movies at once and reuse one AIS run per user. Faster,
  // still leak-free, but not the per-trial protocol. Exploration only.
  bool shared_population = false;
  int jobs = 1;
  // Test hook: sees the antigen profile exactly as the AIS sees it.
  std::function<void(const UserProfile& visible, MovieId hidden)> on_trial;
};

struct AccuracyRow {
  UserId user_id = 0;
  std::size_t num_ratings = 0;
  double accuracy = 0.0;
  std::size_t fallback_trials = 0;
};

// 1 minus the mean absolute error on the 0..1 scale.
double accuracy_from_errors(std::span<const double> absolute_errors);

// The `trials` distinct movies hidden for this user; depends only on the
// seed and the profile, so every measure sees the same trials.
std::vector<MovieId> trial_movies(const UserProfile& antigen, std::size_t trials, std::uint64_t seed);

// Throws Error(kInsufficientRatings) unless antigen has more than `trials` ratings.
AccuracyRow user_accuracy(const UserProfile& antigen, const Dataset& pool, const AffinityMeasure& measure,
                          const ImmuneParams& params, std::size_t trials, std::uint64_t seed,
                          const EvalOptions& options = {});

enum class ReportKind { kAccuracy, kTies };

std::string_view to_string(Predictor predictor) noexcept;
nlohmann::json params_to_json(const ImmuneParams& params);

struct ReportRow {
  UserId user_id = 0;
  std::size_t num_ratings = 0;
  double value = 0.0;       // accuracy or tie fraction
  std::size_t flagged = 0;  // fallback trials or skipped peer pairs

  friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

struct ExperimentReport {
  ReportKind kind = ReportKind::kAccuracy;
  MeasureKind measure = MeasureKind::kWeightedKappa;
  Predictor predictor = Predictor::kImmuneNetwork;
  std::vector<ReportRow> rows;  // ascending user id
  double median = 0.0;
  double mean = 0.0;
  std::uint64_t seed = 0;
  ImmuneParams params;
  std::size_t trials = 0;          // accuracy only
  std::size_t peers_per_user = 0;  // ties only
  std::vector<UserId> skipped_users;

  [[nodiscard]] nlohmann::json to_json() const;
  void write_csv(std::ostream& out) const;
};

double median_of(std::vector<double> values);
double mean_of(std::span<const double> values);

// Throws Error(kInsufficientAntigens) when fewer than `users` antigens have
// more than `trials` ratings.
ExperimentReport accuracy_experiment(const Dataset& antigens, const Dataset& pool,
                                     const AffinityMeasure& measure, const ImmuneParams& params,
                                     std::size_t users, std::size_t trials, std::uint64_t seed,
                                     const EvalOptions& options = {});

// Mean ignored-pair fraction per sampled user over a seeded peer sample.
// users == 0 takes every user. Users without a single peer sharing two movies
// are listed in skipped_users.
ExperimentReport ties_experiment(const Dataset& users_sample, const Dataset& peers, std::size_t users,
                                 std::size_t peers_per_user, std::uint64_t seed, int jobs = 1);

struct PairedComparison {
  MeasureKind measure_a = MeasureKind::kWeightedKappa;
  MeasureKind measure_b = MeasureKind::kKendallsTau;
  double median_a = 0.0;
  double median_b = 0.0;
  std::vector<UserId> users;
  std::vector<double> differences;  // a - b per user
  double mean_difference = 0.0;
  double sd_difference = 0.0;  // sample standard deviation
  // mean / (sd / sqrt(n)); empty when sd is zero or n < 2.
  std::optional<double> t_statistic;
  std::size_t degrees_of_freedom = 0;

  [[nodiscard]] nlohmann::json to_json() const;
};

// Throws Error(kSampleMismatch) unless both reports cover the same users.
PairedComparison paired_comparison(const ExperimentReport& a, const ExperimentReport& b);

}  // namespace immunorec
