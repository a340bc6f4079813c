#pragma once

// Brute-force reference implementations. Each one evaluates a definition
// directly over explicit states and shares no logic with the library beyond
// tallying and the plurality winner.

#include <cstdint>
#include <optional>
#include <vector>

#include "ldv/dominance.hpp"
#include "ldv/election.hpp"

namespace oracle {

using ldv::Action;
using ldv::Candidate;

// Smallest w such that c wins after receiving w extra votes, by incrementing.
int min_votes_to_win(const ldv::ScoreVector& s, Candidate c);

// Every action's outcome over every enumerated accessible state: m candidate
// votes followed by abstention.
class OutcomeTable {
 public:
  OutcomeTable(const ldv::AccessibleStateSet& set, std::uint64_t budget);

  std::size_t num_states() const { return outcomes_.size(); }
  Candidate outcome(std::size_t state, Action a) const;

  bool beats(const ldv::PreferenceOrder& prefs, Action b, Action a) const;
  bool dominates(const ldv::PreferenceOrder& prefs, Action b, Action a) const;
  std::vector<Candidate> possible_winners() const;
  std::vector<Candidate> dominating_set(const ldv::PreferenceOrder& prefs, Action current) const;
  // Most preferred member of dominating_set().
  std::optional<Candidate> strategic_response(const ldv::PreferenceOrder& prefs, Action current) const;

 private:
  int m_;
  std::vector<std::vector<Candidate>> outcomes_;
};

// True iff some other action of `voter` gives a strictly preferred winner now.
// Abstention is considered only when `allow_abstain`.
bool has_improving_deviation(const ldv::PreferenceProfile& profile, const ldv::BallotProfile& ballots, int voter,
                             bool allow_abstain = false);

// Candidates beating every rival in strict pairwise majority, by direct count.
std::optional<Candidate> condorcet_winner(const ldv::PreferenceProfile& profile);

}  // namespace oracle
