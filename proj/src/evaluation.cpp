#include "immunorec/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <ostream>
#include <string>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "immunorec/errors.hpp"
#include "immunorec/recommender.hpp"
#include "immunorec/rng.hpp"

namespace immunorec {

namespace {

// Stream tags keep the sub-seeds of different purposes apart.
constexpr std::uint64_t kTrialPickTag = 0x747269616c736574ULL;
constexpr std::uint64_t kUserSampleTag = 0x7573657273616d70ULL;
constexpr std::uint64_t kPeerSampleTag = 0x7065657273616d70ULL;
constexpr std::uint64_t kAisRunTag = 0x61697372756e0000ULL;
constexpr std::uint64_t kSharedRunTag = 0x7368617265640000ULL;

double pool_mean_rating(const Dataset& pool) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& u : pool.users()) {
    for (const auto& r : u.ratings()) sum += r.category.rating();
    n += u.size();
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

struct TrialOutcome {
  double error = 0.0;
  bool fallback = false;
};

TrialOutcome predict_hidden(const FinalPopulation& population, MovieId movie, double actual,
                            const Dataset& pool) {
  if (population.members.empty()) return {std::abs(pool_mean_rating(pool) - actual), true};
  const auto p = predict_rating(population, movie);
  return {std::abs(p.value - actual), p.fallback};
}

template <typename Fn>
void run_indexed(std::size_t count, int jobs, Fn&& fn) {
  std::exception_ptr failure;
  const auto n = static_cast<std::ptrdiff_t>(count);
  const int threads = std::max(1, jobs);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads) if (threads > 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(immunorec_eval_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

void summarize(ExperimentReport& report) {
  std::vector<double> values;
  values.reserve(report.rows.size());
  for (const auto& r : report.rows) values.push_back(r.value);
  report.mean = mean_of(values);
  report.median = median_of(std::move(values));
}

}  // namespace

std::string_view to_string(Predictor predictor) noexcept {
  return predictor == Predictor::kImmuneNetwork ? "ais" : "global-mean";
}

nlohmann::json params_to_json(const ImmuneParams& p) {
  return {{"k1", p.k1},
          {"k2", p.k2},
          {"k3", p.k3},
          {"antigen_concentration", p.antigen_concentration},
          {"population_size", p.population_size},
          {"dt", p.dt},
          {"prune_threshold", p.prune_threshold},
          {"initial_concentration", p.initial_concentration},
          {"stability_window", p.stability_window},
          {"max_iterations", p.max_iterations},
          {"include_self", p.include_self},
          {"remap_signed", p.remap_signed}};
}

double accuracy_from_errors(std::span<const double> absolute_errors) {
  if (absolute_errors.empty()) return 0.0;
  const double total = std::accumulate(absolute_errors.begin(), absolute_errors.end(), 0.0);
  return std::clamp(1.0 - total / static_cast<double>(absolute_errors.size()), 0.0, 1.0);
}

double median_of(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::ranges::sort(values);
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return (values[mid - 1] + values[mid]) / 2.0;
}

double mean_of(std::span<const double> values) {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

std::vector<MovieId> trial_movies(const UserProfile& antigen, std::size_t trials, std::uint64_t seed) {
  std::vector<MovieId> movies;
  movies.reserve(antigen.size());
  for (const auto& r : antigen.ratings()) movies.push_back(r.movie);
  Rng rng(derive_seed({seed, antigen.id(), kTrialPickTag}));
  movies.resize(rng.sample_front(movies, trials));
  return movies;
}

AccuracyRow user_accuracy(const UserProfile& antigen, const Dataset& pool, const AffinityMeasure& measure,
                          const ImmuneParams& params, std::size_t trials, std::uint64_t seed,
                          const EvalOptions& options) {
  if (trials == 0 || antigen.size() <= trials) {
    throw Error(ErrorCode::kInsufficientRatings,
                fmt::format("user {} has {} ratings; need more than {}", antigen.id(), antigen.size(), trials));
  }
  const auto hidden = trial_movies(antigen, trials, seed);
  std::vector<double> errors;
  errors.reserve(trials);
  AccuracyRow row{antigen.id(), antigen.size(), 0.0, 0};

  if (options.predictor == Predictor::kGlobalMean) {
    const double mean = pool_mean_rating(pool);
    for (const auto movie : hidden) errors.push_back(std::abs(mean - antigen.find(movie)->rating()));
  } else if (options.shared_population) {
    const auto visible = antigen.without(hidden);
    for (const auto movie : hidden) {
      if (options.on_trial) options.on_trial(visible, movie);
    }
    const auto population =
        run_to_convergence(visible, pool, measure, params, derive_seed({seed, antigen.id(), kSharedRunTag}));
    for (const auto movie : hidden) {
      const auto outcome = predict_hidden(population, movie, antigen.find(movie)->rating(), pool);
      errors.push_back(outcome.error);
      row.fallback_trials += outcome.fallback ? 1 : 0;
    }
  } else {
    for (std::size_t t = 0; t < hidden.size(); ++t) {
      const MovieId movie = hidden[t];
      const auto visible = antigen.without(movie);
      if (options.on_trial) options.on_trial(visible, movie);
      const auto population =
          run_to_convergence(visible, pool, measure, params, derive_seed({seed, antigen.id(), kAisRunTag, t}));
      const auto outcome = predict_hidden(population, movie, antigen.find(movie)->rating(), pool);
      errors.push_back(outcome.error);
      row.fallback_trials += outcome.fallback ? 1 : 0;
    }
  }
  row.accuracy = accuracy_from_errors(errors);
  return row;
}

ExperimentReport accuracy_experiment(const Dataset& antigens, const Dataset& pool,
                                     const AffinityMeasure& measure, const ImmuneParams& params,
                                     std::size_t users, std::size_t trials, std::uint64_t seed,
                                     const EvalOptions& options) {
  params.validate();
  std::vector<const UserProfile*> eligible;
  for (const auto& u : antigens.users()) {
    if (u.size() > trials) eligible.push_back(&u);
  }
  if (users == 0 || eligible.size() < users) {
    throw Error(ErrorCode::kInsufficientAntigens,
                fmt::format("{} antigens have more than {} ratings; {} requested", eligible.size(), trials, users));
  }
  Rng rng(derive_seed({seed, kUserSampleTag}));
  rng.sample_front(eligible, users);
  eligible.resize(users);
  std::ranges::sort(eligible, {}, &UserProfile::id);

  ExperimentReport report;
  report.kind = ReportKind::kAccuracy;
  report.measure = measure.kind;
  report.predictor = options.predictor;
  report.seed = seed;
  report.params = params;
  report.trials = trials;
  report.rows.resize(users);
  run_indexed(users, options.jobs, [&](std::size_t i) {
    const auto row = user_accuracy(*eligible[i], pool, measure, params, trials, seed, options);
    report.rows[i] = {row.user_id, row.num_ratings, row.accuracy, row.fallback_trials};
    spdlog::debug("user {} accuracy {:.4f} ({} fallback)", row.user_id, row.accuracy, row.fallback_trials);
  });
  summarize(report);
  return report;
}

ExperimentReport ties_experiment(const Dataset& users_sample, const Dataset& peers, std::size_t users,
                                 std::size_t peers_per_user, std::uint64_t seed, int jobs) {
  if (peers_per_user == 0) throw Error(ErrorCode::kInvalidConfig, "peers per user must be >= 1");
  std::vector<const UserProfile*> eligible;
  for (const auto& u : users_sample.users()) {
    if (u.size() >= 2) eligible.push_back(&u);
  }
  const std::size_t take = users == 0 ? eligible.size() : users;
  if (take == 0 || eligible.size() < take) {
    throw Error(ErrorCode::kInsufficientAntigens,
                fmt::format("{} users with two or more ratings; {} requested", eligible.size(), take));
  }
  Rng rng(derive_seed({seed, kUserSampleTag}));
  rng.sample_front(eligible, take);
  eligible.resize(take);
  std::ranges::sort(eligible, {}, &UserProfile::id);

  std::vector<std::optional<ReportRow>> rows(take);
  run_indexed(take, jobs, [&](std::size_t i) {
    const UserProfile& user = *eligible[i];
    std::vector<const UserProfile*> candidates;
    candidates.reserve(peers.size());
    for (const auto& p : peers.users()) {
      if (p.id() != user.id()) candidates.push_back(&p);
    }
    Rng peer_rng(derive_seed({seed, user.id(), kPeerSampleTag}));
    candidates.resize(peer_rng.sample_front(candidates, peers_per_user));
    std::vector<double> fractions;
    std::size_t skipped = 0;
    for (const auto* peer : candidates) {
      if (overlap_count(user, *peer) < 2) {
        ++skipped;
        continue;
      }
      fractions.push_back(tie_ignored_fraction(user, *peer));
    }
    if (fractions.empty()) {
      spdlog::info("user {}: none of {} sampled peers shares two movies; skipped", user.id(), candidates.size());
      return;
    }
    rows[i] = ReportRow{user.id(), user.size(), mean_of(fractions), skipped};
  });

  ExperimentReport report;
  report.kind = ReportKind::kTies;
  report.measure = MeasureKind::kKendallsTau;
  report.seed = seed;
  report.peers_per_user = peers_per_user;
  for (std::size_t i = 0; i < take; ++i) {
    if (rows[i]) {
      report.rows.push_back(*rows[i]);
    } else {
      report.skipped_users.push_back(eligible[i]->id());
    }
  }
  summarize(report);
  return report;
}

nlohmann::json ExperimentReport::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  const bool accuracy = kind == ReportKind::kAccuracy;
  for (const auto& r : rows) {
    rows_json.push_back({{"user_id", r.user_id},
                         {"num_ratings", r.num_ratings},
                         {accuracy ? "accuracy" : "tie_fraction", r.value},
                         {accuracy ? "fallback_trials" : "skipped_pairs", r.flagged}});
  }
  nlohmann::json out = {{"kind", accuracy ? "accuracy" : "ties"},
                        {"measure", to_string(measure)},
                        {"seed", seed},
                        {"median", median},
                        {"mean", mean},
                        {"users", rows.size()},
                        {"skipped_users", skipped_users},
                        {"rows", std::move(rows_json)}};
  if (accuracy) {
    out["predictor"] = to_string(predictor);
    out["trials"] = trials;
    out["params"] = params_to_json(params);
  } else {
    out["peers_per_user"] = peers_per_user;
  }
  return out;
}

void ExperimentReport::write_csv(std::ostream& out) const {
  const bool accuracy = kind == ReportKind::kAccuracy;
  out << (accuracy ? "user_id,num_ratings,accuracy,fallback_trials\n"
                   : "user_id,num_ratings,tie_fraction,skipped_pairs\n");
  for (const auto& r : rows) out << fmt::format("{},{},{},{}\n", r.user_id, r.num_ratings, r.value, r.flagged);
}

PairedComparison paired_comparison(const ExperimentReport& a, const ExperimentReport& b) {
  if (a.kind != b.kind || a.rows.size() != b.rows.size() || a.seed != b.seed || a.trials != b.trials) {
    throw Error(ErrorCode::kSampleMismatch, "reports cover different samples or trials");
  }
  PairedComparison out;
  out.measure_a = a.measure;
  out.measure_b = b.measure;
  out.median_a = a.median;
  out.median_b = b.median;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    if (a.rows[i].user_id != b.rows[i].user_id) {
      throw Error(ErrorCode::kSampleMismatch,
                  fmt::format("row {} holds user {} vs user {}", i, a.rows[i].user_id, b.rows[i].user_id));
    }
    out.users.push_back(a.rows[i].user_id);
    out.differences.push_back(a.rows[i].value - b.rows[i].value);
  }
  const std::size_t n = out.differences.size();
  out.mean_difference = mean_of(out.differences);
  out.degrees_of_freedom = n > 0 ? n - 1 : 0;
  if (n >= 2) {
    double ss = 0.0;
    for (const double d : out.differences) ss += (d - out.mean_difference) * (d - out.mean_difference);
    out.sd_difference = std::sqrt(ss / static_cast<double>(n - 1));
    if (out.sd_difference > 0.0) {
      out.t_statistic = out.mean_difference / (out.sd_difference / std::sqrt(static_cast<double>(n)));
    }
  }
  return out;
}

nlohmann::json PairedComparison::to_json() const {
  return {{"measure_a", to_string(measure_a)},
          {"measure_b", to_string(measure_b)},
          {"median_a", median_a},
          {"median_b", median_b},
          {"users", users},
          {"differences", differences},
          {"mean_difference", mean_difference},
          {"sd_difference", sd_difference},
          {"t_statistic", t_statistic ? nlohmann::json(*t_statistic) : nlohmann::json(nullptr)},
          {"t_defined", t_statistic.has_value()},
          {"degrees_of_freedom", degrees_of_freedom}};
}

}  // namespace immunorec
