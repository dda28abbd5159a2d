#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "immunorec/affinity.hpp"
#include "immunorec/datastore.hpp"
#include "immunorec/errors.hpp"
#include "immunorec/evaluation.hpp"
#include "immunorec/immune_network.hpp"
#include "immunorec/logging.hpp"
#include "immunorec/recommender.hpp"

namespace fs = std::filesystem;
using namespace immunorec;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitRuntime = 3;

struct DataFlags {
  std::string path;
  bool scaled = false;
  bool lenient = false;
  std::size_t min_ratings = 20;
  std::optional<UserId> pool_threshold;
  double pool_fraction = 0.8;

  [[nodiscard]] IngestConfig ingest(std::uint64_t split_seed) const {
    IngestConfig c;
    c.format = scaled ? CsvFormat::kScaled : CsvFormat::kCategory;
    c.min_ratings_per_user = min_ratings;
    c.pool_id_threshold = pool_threshold;
    c.pool_fraction = pool_fraction;
    c.split_seed = split_seed;
    c.strict = !lenient;
    return c;
  }
};

struct ParamFlags {
  ImmuneParams params;
  bool raw_affinity = false;
  bool exclude_self = false;
  int min_overlap = 2;

  [[nodiscard]] ImmuneParams effective() const {
    auto p = params;
    p.remap_signed = !raw_affinity;
    p.include_self = !exclude_self;
    p.validate();
    return p;
  }
};

struct OutputFlags {
  std::string path;
  std::string format = "csv";
};

void add_data_flags(CLI::App* cmd, DataFlags& d) {
  cmd->add_option("--data", d.path, "ratings CSV (user_id,movie_id,rating)")->required()->check(CLI::ExistingFile);
  cmd->add_flag("--scaled", d.scaled, "ratings are on the 0..1 scale instead of categories 1..6");
  cmd->add_flag("--lenient", d.lenient, "skip and count malformed rows instead of failing");
  cmd->add_option("--min-ratings", d.min_ratings, "drop users with fewer ratings")->capture_default_str();
}

void add_split_flags(CLI::App* cmd, DataFlags& d) {
  cmd->add_option("--pool-threshold", d.pool_threshold, "users with id above this form the pool");
  cmd->add_option("--pool-fraction", d.pool_fraction, "pool share of a seeded random split")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
}

void add_param_flags(CLI::App* cmd, ParamFlags& f) {
  auto& p = f.params;
  cmd->add_option("--k1", p.k1, "stimulation rate")->check(CLI::NonNegativeNumber)->capture_default_str();
  cmd->add_option("--k2", p.k2, "suppression rate")->check(CLI::NonNegativeNumber)->capture_default_str();
  cmd->add_option("--k3", p.k3, "death rate")->check(CLI::NonNegativeNumber)->capture_default_str();
  cmd->add_option("--antigen-concentration", p.antigen_concentration)->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--population", p.population_size, "antibody population size")->check(CLI::Range(1, 1000000))
      ->capture_default_str();
  cmd->add_option("--threshold", p.prune_threshold, "prune concentration")->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--stability", p.stability_window, "unchanged iterations that count as converged")
      ->check(CLI::Range(1, 1000000))
      ->capture_default_str();
  cmd->add_option("--dt", p.dt, "Euler step")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--initial-concentration", p.initial_concentration)->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--max-iterations", p.max_iterations)->capture_default_str();
  cmd->add_option("--min-overlap", f.min_overlap, "common movies required for a nonzero affinity")
      ->check(CLI::Range(1, 1000000))
      ->capture_default_str();
  cmd->add_flag("--raw-affinity", f.raw_affinity, "feed signed measures into the dynamics unmapped");
  cmd->add_flag("--exclude-self", f.exclude_self, "drop j == i from the suppression sum");
}

void add_output_flags(CLI::App* cmd, OutputFlags& o) {
  cmd->add_option("-o,--output", o.path, "output file");
  cmd->add_option("--format", o.format, "output file format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
}

void add_seed(CLI::App* cmd, std::uint64_t& seed) {
  cmd->add_option("--seed", seed, "RNG seed")->required();
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, fmt::format("cannot write {}", path.string()));
  return out;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  auto out = open_output(path);
  out << j.dump(2) << '\n';
}

fs::path sidecar_of(const fs::path& path) { return fs::path(path.string() + ".json"); }

Dataset load(const DataFlags& d, std::uint64_t split_seed) {
  auto result = load_ratings(d.path, d.ingest(split_seed));
  if (result.report.rows_rejected > 0) {
    spdlog::warn("{} rows rejected while loading {}", result.report.rows_rejected, d.path);
  }
  return std::move(result.dataset);
}

Partition load_split(const DataFlags& d, std::uint64_t seed) {
  auto cfg = d.ingest(seed);
  auto loaded = load_ratings(d.path, cfg);
  auto p = partition(loaded.dataset, cfg);
  for (const auto& w : p.warnings) spdlog::warn("{}", w);
  return p;
}

nlohmann::json data_json(const DataFlags& d) {
  nlohmann::json j = {{"path", d.path},
                      {"format", d.scaled ? "scaled" : "category"},
                      {"lenient", d.lenient},
                      {"min_ratings", d.min_ratings},
                      {"pool_fraction", d.pool_fraction}};
  j["pool_threshold"] = d.pool_threshold ? nlohmann::json(*d.pool_threshold) : nlohmann::json(nullptr);
  return j;
}

const UserProfile& require_user(const Dataset& data, UserId id) {
  const auto* u = data.find(id);
  if (u == nullptr) throw Error(ErrorCode::kUnknownUser, fmt::format("user {} not in dataset", id));
  return *u;
}

std::string measure_list(const std::vector<std::string>& names) {
  std::string out;
  for (const auto& n : names) out += (out.empty() ? "" : ",") + n;
  return out;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidConfig: return kExitUsage;
    case ErrorCode::kInvalidScalePoint:
    case ErrorCode::kOutOfRange:
    case ErrorCode::kDuplicateRating:
    case ErrorCode::kDuplicateUser:
    case ErrorCode::kIo:
    case ErrorCode::kParse:
    case ErrorCode::kEmptyDataset:
    case ErrorCode::kInsufficientRatings:
    case ErrorCode::kInsufficientAntigens:
    case ErrorCode::kSampleMismatch:
    case ErrorCode::kUnknownUser:
    case ErrorCode::kEmptyPool: return kExitData;
    default: return kExitRuntime;
  }
}

void print_report_summary(const ExperimentReport& r) {
  const bool accuracy = r.kind == ReportKind::kAccuracy;
  std::cout << fmt::format("{:<10} {:>7} {:>12}\n", "user", "ratings", accuracy ? "accuracy" : "tie_frac");
  for (const auto& row : r.rows) std::cout << fmt::format("{:<10} {:>7} {:>12.4f}\n", row.user_id, row.num_ratings, row.value);
  std::cout << fmt::format("users {}  median {:.4f}  mean {:.4f}\n", r.rows.size(), r.median, r.mean);
  if (!r.skipped_users.empty()) std::cout << fmt::format("skipped users {}\n", r.skipped_users.size());
}

void write_report(const ExperimentReport& r, const OutputFlags& o, const nlohmann::json& extra) {
  if (o.path.empty()) return;
  auto j = r.to_json();
  j["run"] = extra;
  if (o.format == "json") {
    write_json(o.path, j);
    return;
  }
  auto out = open_output(o.path);
  r.write_csv(out);
  j.erase("rows");
  write_json(sidecar_of(o.path), j);
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();

  CLI::App app{"Immune-network collaborative filtering"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "immunorec 1.0.0");

  // gen
  auto* gen = app.add_subcommand("gen", "generate a clustered synthetic ratings dataset");
  SyntheticConfig syn;
  std::string gen_out;
  gen->add_option("--users", syn.num_users)->check(CLI::Range(1, 10000000))->capture_default_str();
  gen->add_option("--movies", syn.num_movies)->check(CLI::Range(1, 10000000))->capture_default_str();
  gen->add_option("--clusters", syn.num_clusters)->check(CLI::Range(1, 100000))->capture_default_str();
  gen->add_option("--noise", syn.noise)->check(CLI::Range(0.0, 1.0))->capture_default_str();
  gen->add_option("--min-ratings", syn.min_ratings)->capture_default_str();
  gen->add_option("--max-ratings", syn.max_ratings)->capture_default_str();
  gen->add_flag("--complementary", syn.complementary_clusters, "odd clusters invert the preceding one");
  add_seed(gen, syn.seed);
  gen->add_option("-o,--output", gen_out, "output CSV")->required();

  // ingest-check
  auto* check = app.add_subcommand("ingest-check", "validate a ratings file and report what would load");
  DataFlags check_data;
  OutputFlags check_out;
  std::optional<std::uint64_t> check_seed;
  add_data_flags(check, check_data);
  add_split_flags(check, check_data);
  check->add_option("--seed", check_seed, "split seed; without it only an id threshold split is shown");
  check->add_option("-o,--output", check_out.path, "JSON report");

  // affinity
  auto* aff = app.add_subcommand("affinity", "print every affinity measure for two users");
  DataFlags aff_data;
  UserId aff_a = 0;
  UserId aff_b = 0;
  int aff_overlap = 2;
  add_data_flags(aff, aff_data);
  aff->add_option("user_a", aff_a)->required();
  aff->add_option("user_b", aff_b)->required();
  aff->add_option("--min-overlap", aff_overlap)->check(CLI::Range(1, 1000000))->capture_default_str();

  // recommend
  auto* rec = app.add_subcommand("recommend", "run the immune network for one user and list recommendations");
  DataFlags rec_data;
  ParamFlags rec_params;
  OutputFlags rec_out;
  std::string rec_measure = "wk";
  UserId rec_user = 0;
  std::size_t rec_count = 10;
  std::uint64_t rec_seed = 0;
  add_data_flags(rec, rec_data);
  add_param_flags(rec, rec_params);
  add_output_flags(rec, rec_out);
  add_seed(rec, rec_seed);
  rec->add_option("--user", rec_user, "antigen user id")->required();
  rec->add_option("-n,--count", rec_count, "list length")->check(CLI::Range(1, 1000000))->capture_default_str();
  rec->add_option("--measure", rec_measure)->check(CLI::IsMember({"wk", "kt", "pearson"}))->capture_default_str();

  // eval
  auto* eval = app.add_subcommand("eval", "run an evaluation experiment");
  eval->require_subcommand(1);
  DataFlags ev_data;
  ParamFlags ev_params;
  OutputFlags ev_out;
  std::uint64_t ev_seed = 0;
  std::size_t ev_users = 50;
  std::size_t ev_trials = 20;
  int ev_jobs = 1;
  std::string ev_measure = "wk";
  std::string ev_predictor = "ais";
  std::vector<std::string> ev_measures{"wk", "kt"};
  bool ev_shared = false;
  std::size_t ev_peers = 30;

  auto* acc = eval->add_subcommand("accuracy", "leave-one-out prediction accuracy per user");
  auto* ties = eval->add_subcommand("ties", "fraction of Kendall pairs lost to one-sided ties");
  auto* cmp = eval->add_subcommand("compare", "accuracy under two measures on identical trials");
  for (auto* sub : {acc, ties, cmp}) {
    add_data_flags(sub, ev_data);
    add_split_flags(sub, ev_data);
    add_output_flags(sub, ev_out);
    add_seed(sub, ev_seed);
    sub->add_option("--users", ev_users, "sampled users")->capture_default_str();
    sub->add_option("--jobs", ev_jobs, "worker threads")->check(CLI::Range(1, 1024))->capture_default_str();
  }
  for (auto* sub : {acc, cmp}) {
    add_param_flags(sub, ev_params);
    sub->add_option("--trials", ev_trials, "hidden movies per user")->check(CLI::Range(1, 1000000))
        ->capture_default_str();
    sub->add_flag("--shared-population", ev_shared, "one network per user for all trials");
  }
  acc->add_option("--measure", ev_measure)->check(CLI::IsMember({"wk", "kt", "pearson"}))->capture_default_str();
  acc->add_option("--predictor", ev_predictor)->check(CLI::IsMember({"ais", "global-mean"}))->capture_default_str();
  cmp->add_option("--measures", ev_measures)->delimiter(',')->expected(2)
      ->check(CLI::IsMember({"wk", "kt", "pearson"}))
      ->capture_default_str();
  ties->add_option("--peers", ev_peers, "peers sampled per user")->check(CLI::Range(1, 10000000))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) {
      syn.validate();
      const auto data = generate_synthetic(syn);
      save_ratings(gen_out, data);
      write_json(sidecar_of(gen_out), {{"command", "gen"}, {"synthetic", syn.to_json()}});
      std::cout << fmt::format("wrote {} users, {} ratings to {}\n", data.size(), data.rating_count(), gen_out);
      return kExitOk;
    }

    if (*check) {
      const auto cfg = check_data.ingest(check_seed.value_or(0));
      const auto loaded = load_ratings(check_data.path, cfg);
      auto j = loaded.report.to_json();
      j["data"] = data_json(check_data);
      std::cout << fmt::format("users kept {}  dropped {}  movies {}  ratings {}  rows rejected {}\n",
                               loaded.report.users_kept, loaded.report.users_dropped, loaded.report.movies,
                               loaded.dataset.rating_count(), loaded.report.rows_rejected);
      for (const auto& d : loaded.report.diagnostics) std::cout << "  " << d << '\n';
      if (check_data.pool_threshold || check_seed) {
        const auto p = partition(loaded.dataset, cfg);
        std::cout << fmt::format("pool {}  antigens {}\n", p.pool.size(), p.antigens.size());
        for (const auto& w : p.warnings) std::cout << "warning: " << w << '\n';
        j["pool_users"] = p.pool.size();
        j["antigen_users"] = p.antigens.size();
        j["warnings"] = p.warnings;
      }
      if (!check_out.path.empty()) write_json(check_out.path, j);
      return kExitOk;
    }

    if (*aff) {
      const auto data = load(aff_data, 0);
      const auto& a = require_user(data, aff_a);
      const auto& b = require_user(data, aff_b);
      const auto common = common_movies(a, b);
      std::cout << fmt::format("users {} and {}: {} common movies\n", aff_a, aff_b, common.size());
      for (const auto kind : {MeasureKind::kWeightedKappa, MeasureKind::kKendallsTau, MeasureKind::kPearsonBaseline}) {
        const auto v = affinity({kind, aff_overlap}, a, b);
        std::string line = fmt::format("{:<8} ", to_string(kind));
        if (v.insufficient_overlap) {
          line += "insufficient-overlap";
        } else {
          line += fmt::format("{:.4f}", v.value);
          if (v.degenerate) line += " degenerate";
          if (kind == MeasureKind::kKendallsTau) {
            const auto k = kendalls_tau(common);
            line += fmt::format("  C {}  D {}  ignored {}  pairs {}", k.concordant, k.discordant, k.ignored,
                                k.total_pairs);
          }
        }
        std::cout << line << '\n';
      }
      return kExitOk;
    }

    if (*rec) {
      const auto params = rec_params.effective();
      const AffinityMeasure measure{parse_measure(rec_measure), rec_params.min_overlap};
      const auto data = load(rec_data, rec_seed);
      const auto& antigen = require_user(data, rec_user);
      const auto population = run_to_convergence(antigen, data, measure, params, rec_seed);
      if (population.members.empty()) {
        throw Error(ErrorCode::kEmptyPopulation, "every antibody died out; nothing to recommend from");
      }
      const auto list = recommend_top_n(population, antigen, rec_count);
      std::cout << fmt::format("user {}  antibodies {}  iterations {}  converged {}\n", rec_user,
                               population.members.size(), population.iterations_used, population.converged);
      if (list.empty()) std::cout << "no unrated movie is rated by the final population\n";
      for (std::size_t i = 0; i < list.size(); ++i) {
        std::cout << fmt::format("{:>3}. movie {:<8} {:.4f}  support {}\n", i + 1, list[i].movie, list[i].value,
                                 list[i].support);
      }
      if (!rec_out.path.empty()) {
        nlohmann::json meta = {{"command", "recommend"},
                               {"user_id", rec_user},
                               {"count", rec_count},
                               {"measure", rec_measure},
                               {"min_overlap", rec_params.min_overlap},
                               {"seed", rec_seed},
                               {"params", params_to_json(params)},
                               {"data", data_json(rec_data)},
                               {"iterations", population.iterations_used},
                               {"converged", population.converged},
                               {"antibodies", population.members.size()}};
        if (rec_out.format == "json") {
          nlohmann::json items = nlohmann::json::array();
          for (const auto& r : list) {
            items.push_back({{"movie_id", r.movie}, {"predicted", r.value}, {"support", r.support}});
          }
          meta["recommendations"] = std::move(items);
          write_json(rec_out.path, meta);
        } else {
          auto out = open_output(rec_out.path);
          out << "rank,movie_id,predicted,support\n";
          for (std::size_t i = 0; i < list.size(); ++i) {
            out << fmt::format("{},{},{},{}\n", i + 1, list[i].movie, list[i].value, list[i].support);
          }
          write_json(sidecar_of(rec_out.path), meta);
        }
      }
      return kExitOk;
    }

    if (*eval) {
      const auto split = load_split(ev_data, ev_seed);
      nlohmann::json run = {{"data", data_json(ev_data)}, {"users", ev_users}, {"jobs", ev_jobs}};

      if (*ties) {
        run["command"] = "eval ties";
        const auto report = ties_experiment(split.antigens, split.pool, ev_users, ev_peers, ev_seed, ev_jobs);
        print_report_summary(report);
        write_report(report, ev_out, run);
        return kExitOk;
      }

      const auto params = ev_params.effective();
      EvalOptions options;
      options.jobs = ev_jobs;
      options.shared_population = ev_shared;
      run["min_overlap"] = ev_params.min_overlap;
      run["shared_population"] = ev_shared;

      if (*acc) {
        run["command"] = "eval accuracy";
        options.predictor = ev_predictor == "ais" ? Predictor::kImmuneNetwork : Predictor::kGlobalMean;
        const AffinityMeasure measure{parse_measure(ev_measure), ev_params.min_overlap};
        const auto report =
            accuracy_experiment(split.antigens, split.pool, measure, params, ev_users, ev_trials, ev_seed, options);
        print_report_summary(report);
        write_report(report, ev_out, run);
        return kExitOk;
      }

      run["command"] = "eval compare";
      run["measures"] = measure_list(ev_measures);
      const AffinityMeasure ma{parse_measure(ev_measures[0]), ev_params.min_overlap};
      const AffinityMeasure mb{parse_measure(ev_measures[1]), ev_params.min_overlap};
      const auto ra = accuracy_experiment(split.antigens, split.pool, ma, params, ev_users, ev_trials, ev_seed, options);
      const auto rb = accuracy_experiment(split.antigens, split.pool, mb, params, ev_users, ev_trials, ev_seed, options);
      const auto pc = paired_comparison(ra, rb);
      std::cout << fmt::format("{:<10} {:>7} {:>10} {:>10} {:>10}\n", "user", "ratings", ev_measures[0],
                               ev_measures[1], "diff");
      for (std::size_t i = 0; i < ra.rows.size(); ++i) {
        std::cout << fmt::format("{:<10} {:>7} {:>10.4f} {:>10.4f} {:>10.4f}\n", ra.rows[i].user_id,
                                 ra.rows[i].num_ratings, ra.rows[i].value, rb.rows[i].value, pc.differences[i]);
      }
      std::cout << fmt::format("median {} {:.4f}  median {} {:.4f}  mean diff {:.4f}  t {}  dof {}\n", ev_measures[0],
                               pc.median_a, ev_measures[1], pc.median_b, pc.mean_difference,
                               pc.t_statistic ? fmt::format("{:.4f}", *pc.t_statistic) : "undefined",
                               pc.degrees_of_freedom);
      if (!ev_out.path.empty()) {
        nlohmann::json j = {{"a", ra.to_json()}, {"b", rb.to_json()}, {"comparison", pc.to_json()}, {"run", run}};
        if (ev_out.format == "json") {
          write_json(ev_out.path, j);
        } else {
          auto out = open_output(ev_out.path);
          out << fmt::format("user_id,num_ratings,accuracy_{},accuracy_{},difference\n", ev_measures[0], ev_measures[1]);
          for (std::size_t i = 0; i < ra.rows.size(); ++i) {
            out << fmt::format("{},{},{},{},{}\n", ra.rows[i].user_id, ra.rows[i].num_ratings, ra.rows[i].value,
                               rb.rows[i].value, pc.differences[i]);
          }
          j["a"].erase("rows");
          j["b"].erase("rows");
          write_json(sidecar_of(ev_out.path), j);
        }
      }
      return kExitOk;
    }
  } catch (const ParseError& e) {
    spdlog::error("{}", e.what());
    return kExitData;
  } catch (const Error& e) {
    spdlog::error("{}: {}", to_string(e.code()), e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitRuntime;
  }
  return kExitUsage;
}
