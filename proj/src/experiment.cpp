#include "ldv/experiment.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <ostream>
#include <random>
#include <thread>

#include <fmt/format.h>

#include "ldv/trace_io.hpp"

namespace ldv {

namespace {

// Stream tags keep profile, scheduler and setup randomness independent.
enum : std::uint64_t { kProfileStream = 1, kScheduleStream = 2, kSetupStream = 3 };

using ProfileSource = std::function<GeneratedProfile(const CellSpec&, int profile)>;

std::string format_value(double v) { return fmt::format("{}", v); }

std::string format_value(const std::optional<double>& v) { return v ? fmt::format("{}", *v) : std::string(); }

std::string scheduler_label(const Scheduler& s) {
  if (s.kind == Scheduler::Kind::SingletonUniform) {
    return s.opportunity_priority ? "singleton:priority" : "singleton";
  }
  return fmt::format("group:cap={}:priority={}:p_singleton={}", s.group_cap, s.opportunity_priority ? 1 : 0,
                     s.p_singleton);
}

std::vector<VoterType> voter_types(const ExperimentConfig& cfg, const CellSpec& cell, std::mt19937_64& setup) {
  std::vector<VoterType> types(static_cast<std::size_t>(cell.n));
  std::uniform_int_distribution<int> diverse_r(0, cell.n / cell.m);
  for (VoterType& t : types) {
    t.metric = cfg.metric;
    t.bias = cfg.bias;
    t.r = cell.r ? cell.r->resolve(cell.n) : Radius::integer(diverse_r(setup));
    if (cfg.k) t.k = cfg.k->apply(t.r);
  }
  return types;
}

BallotProfile initial_ballots(const ExperimentConfig& cfg, const PreferenceProfile& profile, std::mt19937_64& setup) {
  if (cfg.initial_state == InitialState::Truthful) return truthful_ballots(profile);
  std::uniform_int_distribution<int> pick(0, profile.num_candidates() - 1);
  BallotProfile b;
  for (int i = 0; i < profile.num_voters(); ++i) b.votes.push_back(Action::vote(pick(setup)));
  return b;
}

ResultRow run_profile(const ExperimentConfig& cfg, const CellSpec& cell, int profile_index,
                      const GeneratedProfile& gp, bool guaranteed) {
  std::vector<RunOutcome> outcomes;
  outcomes.reserve(static_cast<std::size_t>(cfg.repetitions));
  for (int rep = 0; rep < cfg.repetitions; ++rep) {
    const auto c = static_cast<std::uint64_t>(cell.index);
    const auto p = static_cast<std::uint64_t>(profile_index);
    const auto k = static_cast<std::uint64_t>(rep);
    std::mt19937_64 setup(derive_seed(cfg.master_seed, {kSetupStream, c, p, k}));
    const auto types = voter_types(cfg, cell, setup);
    const BallotProfile initial = initial_ballots(cfg, gp.profile, setup);
    const std::uint64_t seed = derive_seed(cfg.master_seed, {kScheduleStream, c, p, k});
    const Trace trace = run_to_equilibrium(gp.profile, types, initial, cfg.scheduler, seed, cfg.max_steps.value_or(0));

    if (!trace.converged && guaranteed) {
      throw NonConvergenceError(fmt::format(
          "cell {} (n={}, m={}, r={}) profile {} repetition {}: no equilibrium after {} ticks although convergence is "
          "guaranteed for this configuration; this indicates a bug",
          cell.index, cell.n, cell.m, cell.r ? cell.r->label() : "diverse", profile_index, rep, trace.ticks));
    }
    if (!cfg.trace_dir.empty()) {
      TraceHeader header;
      header.n = cell.n;
      header.m = cell.m;
      header.metric = {cfg.metric, types.front().r};
      header.bias = cfg.bias;
      header.homogeneous = !cfg.diverse;
      header.truthful_start = cfg.initial_state == InitialState::Truthful;
      header.singleton_scheduler = cfg.scheduler.kind == Scheduler::Kind::SingletonUniform;
      const auto file = std::filesystem::path(cfg.trace_dir) /
                        fmt::format("cell{:03}_profile{:04}_rep{:04}.jsonl", cell.index, profile_index, rep);
      std::ofstream out(file, std::ios::binary);
      if (!out) throw std::runtime_error(fmt::format("cannot write trace '{}'", file.string()));
      write_trace(out, header, trace);
    }
    outcomes.push_back(outcome_of(trace));
  }
  return aggregate(gp.profile, outcomes, gp.truth);
}

ExperimentOutput run_cells(const ExperimentConfig& cfg, std::vector<CellSpec> cells, int profiles,
                           const ProfileSource& source, std::string label) {
  if (!cfg.trace_dir.empty()) std::filesystem::create_directories(cfg.trace_dir);
  const bool guaranteed = convergence_guaranteed(cfg);

  struct Job {
    std::size_t cell;
    int profile;
  };
  std::vector<Job> jobs;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (int p = 0; p < profiles; ++p) jobs.push_back({c, p});
  }
  std::vector<ResultRow> rows(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      try {
        const CellSpec& cell = cells[jobs[j].cell];
        rows[j] = run_profile(cfg, cell, jobs[j].profile, source(cell, jobs[j].profile), guaranteed);
      } catch (...) {
        errors[j] = std::current_exception();
      }
    }
  };
  unsigned threads = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads) : std::thread::hardware_concurrency();
  threads = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(std::max<std::size_t>(jobs.size(), 1)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  // Report the first failure in job order so errors are reproducible.
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  ExperimentOutput out;
  out.distribution_label = std::move(label);
  std::size_t j = 0;
  for (CellSpec& cell : cells) {
    CellResult cr;
    cr.cell = cell;
    for (int p = 0; p < profiles; ++p) cr.rows.push_back(rows[j++]);
    out.cells.push_back(std::move(cr));
  }
  return out;
}

std::vector<CellSpec> cells_for(const ExperimentConfig& cfg, const std::vector<std::pair<int, int>>& sizes) {
  std::vector<CellSpec> cells;
  for (std::size_t s = 0; s < sizes.size(); ++s) {
    const auto [n, m] = sizes[s];
    validate_for(cfg, n, m);
    if (cfg.diverse) {
      cells.push_back({static_cast<int>(cells.size()), n, m, static_cast<int>(s), std::nullopt});
      continue;
    }
    for (const RadiusSpec& r : cfg.r_values) {
      cells.push_back({static_cast<int>(cells.size()), n, m, static_cast<int>(s), r});
    }
  }
  return cells;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::vector<std::uint32_t> words;
  words.push_back(static_cast<std::uint32_t>(master));
  words.push_back(static_cast<std::uint32_t>(master >> 32));
  for (std::uint64_t p : path) {
    words.push_back(static_cast<std::uint32_t>(p));
    words.push_back(static_cast<std::uint32_t>(p >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

std::vector<CellSpec> expand_cells(const ExperimentConfig& cfg) {
  std::vector<std::pair<int, int>> sizes;
  for (int n : cfg.n_values) {
    for (int m : cfg.m_values) sizes.emplace_back(n, m);
  }
  return cells_for(cfg, sizes);
}

bool convergence_guaranteed(const ExperimentConfig& cfg) {
  if (cfg.diverse) return false;
  const bool singleton = cfg.scheduler.kind == Scheduler::Kind::SingletonUniform;
  const bool truthful = cfg.initial_state == InitialState::Truthful;
  if (cfg.bias == Bias::None) {
    if (truthful && singleton && cfg.metric != MetricKind::EarthMover) return true;
    // Opportunity-first scheduling that eventually picks singletons.
    const bool eventually_singleton = singleton || cfg.scheduler.p_singleton > 0.0;
    return cfg.metric == MetricKind::L1 && cfg.scheduler.opportunity_priority && eventually_singleton;
  }
  return cfg.metric == MetricKind::L1 && truthful && singleton;
}

ExperimentOutput run_experiment(const ExperimentConfig& cfg) {
  if (!cfg.distribution) throw ConfigError("distribution", "required key is missing");
  const Distribution dist = *cfg.distribution;
  auto cells = expand_cells(cfg);
  const ProfileSource source = [&](const CellSpec& cell, int profile) {
    const std::uint64_t seed = derive_seed(cfg.master_seed, {kProfileStream, static_cast<std::uint64_t>(cell.size_index),
                                                             static_cast<std::uint64_t>(profile)});
    return generate_profile(dist, cell.n, cell.m, cfg.urn_k, seed);
  };
  std::string label(to_string(dist));
  if (dist == Distribution::Urn) label += fmt::format(":k={}", cfg.urn_k);
  return run_cells(cfg, std::move(cells), cfg.profiles_per_cell, source, std::move(label));
}

ExperimentOutput run_preflib(const ExperimentConfig& cfg, const PreflibData& data, const std::string& label) {
  const int n = data.profile.num_voters();
  const int m = data.profile.num_candidates();
  auto cells = cells_for(cfg, {{n, m}});
  const ProfileSource source = [&](const CellSpec&, int) { return GeneratedProfile{data.profile, std::nullopt}; };
  return run_cells(cfg, std::move(cells), 1, source, "preflib:" + label);
}

ResultRow mean_row(const std::vector<ResultRow>& rows) {
  ResultRow mean;
  if (rows.empty()) return mean;
  const double count = static_cast<double>(rows.size());
  double condorcet = 0;
  int condorcet_count = 0;
  double gap12 = 0;
  double gap23 = 0;
  bool gap12_inf = false;
  bool gap23_inf = false;
  double ground = 0;
  int ground_count = 0;
  for (const ResultRow& r : rows) {
    mean.num_step += r.num_step;
    mean.num_states += r.num_states;
    mean.num_winners += r.num_winners;
    mean.winner_consistency += r.winner_consistency;
    mean.plurality_agreement += r.plurality_agreement;
    mean.borda_agreement += r.borda_agreement;
    mean.copeland_agreement += r.copeland_agreement;
    mean.maximin_agreement += r.maximin_agreement;
    mean.social_welfare += r.social_welfare;
    mean.total_duverger += r.total_duverger;
    mean.relative_duverger += r.relative_duverger;
    if (r.condorcet_agreement) {
      condorcet += *r.condorcet_agreement;
      ++condorcet_count;
    }
    if (r.gap1_2) gap12 += *r.gap1_2; else gap12_inf = true;
    if (r.gap2_3) gap23 += *r.gap2_3; else gap23_inf = true;
    if (r.winner_ground_rank) {
      ground += *r.winner_ground_rank;
      ++ground_count;
    }
  }
  mean.num_step /= count;
  mean.num_states /= count;
  mean.num_winners /= count;
  mean.winner_consistency /= count;
  mean.plurality_agreement /= count;
  mean.borda_agreement /= count;
  mean.copeland_agreement /= count;
  mean.maximin_agreement /= count;
  mean.social_welfare /= count;
  mean.total_duverger /= count;
  mean.relative_duverger /= count;
  if (condorcet_count > 0) mean.condorcet_agreement = condorcet / condorcet_count;
  if (!gap12_inf) mean.gap1_2 = gap12 / count;
  if (!gap23_inf) mean.gap2_3 = gap23 / count;
  if (ground_count > 0) mean.winner_ground_rank = ground / ground_count;
  return mean;
}

void write_csv(std::ostream& out, const ExperimentConfig& cfg, const ExperimentOutput& result) {
  out << "row,cell,profile,n,m,distribution,metric,r,k,bias,diverse,scheduler,initial_state,"
         "NumStep,NumStates,NumWinners,WinnerConsistency,PluralityAgreement,BordaAgreement,CoplandAgreement,"
         "MaximinAgreement,CondorcetAgreement,SocialWelfare,Gap1_2,Gap2_3,TotalDuverger,RelativeDuverger,"
         "WinnerGroundRank\n";
  const std::string sched = scheduler_label(cfg.scheduler);
  auto emit = [&](std::string_view kind, const CellSpec& cell, const std::string& profile, const ResultRow& r) {
    out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},", kind, cell.index, profile, cell.n, cell.m,
                       result.distribution_label, to_string(cfg.metric), cell.r ? cell.r->label() : "diverse",
                       cfg.k ? cfg.k->label() : "", to_string(cfg.bias), cfg.diverse ? 1 : 0, sched,
                       to_string(cfg.initial_state));
    out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", format_value(r.num_step),
                       format_value(r.num_states), format_value(r.num_winners), format_value(r.winner_consistency),
                       format_value(r.plurality_agreement), format_value(r.borda_agreement),
                       format_value(r.copeland_agreement), format_value(r.maximin_agreement),
                       format_value(r.condorcet_agreement), format_value(r.social_welfare), format_value(r.gap1_2),
                       format_value(r.gap2_3), format_value(r.total_duverger), format_value(r.relative_duverger),
                       format_value(r.winner_ground_rank));
  };
  for (const CellResult& cr : result.cells) {
    for (std::size_t p = 0; p < cr.rows.size(); ++p) emit("profile", cr.cell, std::to_string(p), cr.rows[p]);
  }
  for (const CellResult& cr : result.cells) emit("cell", cr.cell, "", mean_row(cr.rows));
}

void write_csv_file(const ExperimentConfig& cfg, const ExperimentOutput& result) {
  const std::filesystem::path path(cfg.output_path);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", cfg.output_path));
  write_csv(out, cfg, result);
  if (!out) throw std::runtime_error(fmt::format("write to '{}' failed", cfg.output_path));
}

}  // namespace ldv
