#pragma once

// Iterative Plurality: pending responses, schedulers, the run loop and
// post-hoc auditing of convergence invariants.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ldv/dominance.hpp"
#include "ldv/election.hpp"

namespace ldv {

struct PendingMove {
  int voter = 0;
  Action to;
  StepType type = StepType::Type1;
};

// Shares response computations between voters with the same order, type and
// current vote; such voters face the same accessible set.
class ResponseTable {
 public:
  ResponseTable(const PreferenceProfile& profile, std::span<const VoterType> types);

  // Every voter's response against `ballots`, ascending by voter.
  std::vector<PendingMove> pending(const BallotProfile& ballots) const;

 private:
  const PreferenceProfile* profile_;
  std::vector<VoterType> types_;
  std::vector<int> order_id_;
  std::vector<int> type_id_;
  int num_orders_ = 0;
};

std::vector<PendingMove> pending_moves(const PreferenceProfile& profile, const BallotProfile& ballots,
                                       std::span<const VoterType> types);

bool is_equilibrium(const PreferenceProfile& profile, const BallotProfile& ballots, std::span<const VoterType> types);

struct Scheduler {
  enum class Kind { SingletonUniform, GroupRandom };

  Kind kind = Kind::SingletonUniform;
  // Largest group; 0 means n/2 (at least 1).
  int group_cap = 0;
  // Draw only from Type2 movers whenever any exist.
  bool opportunity_priority = false;
  // Chance that a group tick selects a single voter.
  double p_singleton = 0.2;
};

struct StepRecord {
  int time = 0;
  int voter = 0;
  Action from;
  Action to;
  StepType type = StepType::Type1;
  ScoreVector scores_before;
  ScoreVector scores_after;
};

struct Trace {
  BallotProfile initial;
  std::vector<StepRecord> steps;
  BallotProfile final_state;
  bool converged = false;
  int ticks = 0;
  int singleton_ticks = 0;

  int num_moves() const { return static_cast<int>(steps.size()); }
};

// max_ticks <= 0 selects 10*n*m.
Trace run_to_equilibrium(const PreferenceProfile& profile, std::span<const VoterType> types,
                         const BallotProfile& initial, const Scheduler& scheduler, std::uint64_t seed,
                         int max_ticks = 0);

// Replays `trace.steps` from `trace.initial`; returns the resulting ballots.
BallotProfile replay(const Trace& trace);

// Audits a trace from the truthful start with homogeneous bias-free voters and
// a singleton scheduler against the leader band: the possible winners of an
// abstaining voter facing the full tally (h_bar(., r+1) for L1, h_bar(., 2r+1)
// for LInf). Empty means clean. Throws UnsupportedMetricError for EarthMover.
std::vector<std::string> verify_trace_invariants(const Trace& trace, DistanceMetric metric);

// -n*|h_bar(s, r+1)| + number of voters whose vote lies in h_bar(s, r+1).
std::int64_t chunk_potential(const BallotProfile& ballots, int m, int r);

// A Type1 tick followed by every Type2 tick before the next Type1 tick.
struct Chunk {
  int start_time = 0;
  std::int64_t potential_before = 0;
  std::int64_t potential_after = 0;
  // Every Type2 move returns its voter to the vote they left in the Type1 tick.
  bool rollback_only = true;
};

// Chunks from the first Type1 tick on; earlier Type2 ticks are not part of any chunk.
std::vector<Chunk> chunks(const Trace& trace, int m, int r);

// A bias move made while the mover already voted for their favourite member of
// a multi-member h_bar(s, r+1).
bool is_type_a_bias_move(const PreferenceOrder& prefs, const StepRecord& step, int r);

// Throws std::invalid_argument if `ballots` is not an equilibrium.
std::vector<std::string> check_equilibrium_properties(const PreferenceProfile& profile, const BallotProfile& ballots,
                                                      std::span<const VoterType> types);

}  // namespace ldv
