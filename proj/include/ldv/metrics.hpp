#pragma once

// Truthful-profile comparison rules and per-profile aggregation of run outcomes.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ldv/dynamics.hpp"
#include "ldv/election.hpp"
#include "ldv/prefgen.hpp"

namespace ldv {

// support[c][d]: voters ranking c above d.
std::vector<std::vector<int>> pairwise_support(const PreferenceProfile& profile);

std::vector<std::int64_t> borda_scores(const PreferenceProfile& profile);

// Every rule maximizes its score; ties go to the lower index.
Candidate borda_winner(const PreferenceProfile& profile);
Candidate copeland_winner(const PreferenceProfile& profile);
Candidate maximin_winner(const PreferenceProfile& profile);
// Strict pairwise-majority winner over every rival, if any.
std::optional<Candidate> condorcet_winner(const PreferenceProfile& profile);

// (max Borda - Borda(winner)) / (n(m-1)); 0 is best. 0 when m == 1.
double social_welfare_rank(const PreferenceProfile& profile, Candidate winner);

struct Benchmarks {
  Candidate plurality = 0;
  Candidate borda = 0;
  Candidate copeland = 0;
  Candidate maximin = 0;
  std::optional<Candidate> condorcet;
  std::vector<std::int64_t> borda_scores;
};

Benchmarks compute_benchmarks(const PreferenceProfile& profile);

// What aggregation needs from one run.
struct RunOutcome {
  int moves = 0;
  BallotProfile final_state;
};

RunOutcome outcome_of(const Trace& trace);

// Observed variables of one profile, averaged over its runs. Gap ratios are
// nullopt when infinite (a zero denominator in any run).
struct ResultRow {
  double num_step = 0;
  double num_states = 0;
  double num_winners = 0;
  double winner_consistency = 0;
  double plurality_agreement = 0;
  double borda_agreement = 0;
  double copeland_agreement = 0;
  double maximin_agreement = 0;
  std::optional<double> condorcet_agreement;  // absent without a Condorcet winner
  double social_welfare = 0;
  std::optional<double> gap1_2;
  std::optional<double> gap2_3;
  double total_duverger = 0;
  double relative_duverger = 0;
  std::optional<double> winner_ground_rank;
};

// Throws std::invalid_argument on an empty run list.
ResultRow aggregate(const PreferenceProfile& profile, std::span<const RunOutcome> runs,
                    const std::optional<GroundTruth>& ground = std::nullopt);

}  // namespace ldv
