#pragma once

// Plurality election primitives: candidates, preference orders, ballots,
// score vectors and the lexicographic tie-break.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ldv {

// Candidates are indices in [0, m). Lower index wins every tie.
using Candidate = int;

// A ballot: either a vote for one candidate or an abstention.
class Action {
 public:
  constexpr Action() = default;

  static constexpr Action abstain() { return Action{}; }
  static constexpr Action vote(Candidate c) { return Action{c}; }

  constexpr bool is_abstain() const { return value_ < 0; }
  constexpr bool is_vote() const { return value_ >= 0; }
  constexpr Candidate candidate() const { return value_; }

  // -1 for abstain, otherwise the candidate index.
  constexpr int raw() const { return value_; }
  static constexpr Action from_raw(int v) { return v < 0 ? abstain() : vote(v); }

  constexpr auto operator<=>(const Action&) const = default;

 private:
  constexpr explicit Action(int v) : value_(v) {}
  int value_ = -1;
};

std::string to_string(Action a);

// A strict total order over m candidates; position 0 is the favourite.
class PreferenceOrder {
 public:
  PreferenceOrder() = default;
  // Throws std::invalid_argument unless `ranking` is a permutation of [0, m).
  explicit PreferenceOrder(std::vector<Candidate> ranking);

  int size() const { return static_cast<int>(ranking_.size()); }
  Candidate top() const { return ranking_.front(); }
  Candidate at(int position) const { return ranking_[position]; }
  std::span<const Candidate> ranking() const { return ranking_; }

  // 1-based rank: rank(top()) == 1.
  int rank(Candidate c) const { return position_[c] + 1; }
  bool prefers(Candidate a, Candidate b) const { return position_[a] < position_[b]; }

  bool operator==(const PreferenceOrder& o) const { return ranking_ == o.ranking_; }

 private:
  std::vector<Candidate> ranking_;
  std::vector<int> position_;
};

class PreferenceProfile {
 public:
  PreferenceProfile() = default;
  // All orders must range over the same m candidates; n >= 1.
  PreferenceProfile(int m, std::vector<PreferenceOrder> orders);

  int num_voters() const { return static_cast<int>(orders_.size()); }
  int num_candidates() const { return m_; }
  const PreferenceOrder& order(int voter) const { return orders_[voter]; }
  const std::vector<PreferenceOrder>& orders() const { return orders_; }

 private:
  int m_ = 0;
  std::vector<PreferenceOrder> orders_;
};

struct BallotProfile {
  std::vector<Action> votes;

  int size() const { return static_cast<int>(votes.size()); }
  const Action& operator[](int i) const { return votes[i]; }
  Action& operator[](int i) { return votes[i]; }
  bool operator==(const BallotProfile&) const = default;
  auto operator<=>(const BallotProfile&) const = default;
};

BallotProfile truthful_ballots(const PreferenceProfile& profile);

// Raw per-candidate vote counts. Comparison with the tie-break is exposed
// separately through beats()/priority_key() so raw counts are never confused
// with tie-break-adjusted scores.
class ScoreVector {
 public:
  ScoreVector() = default;
  explicit ScoreVector(int m) : counts_(static_cast<std::size_t>(m), 0) {}
  explicit ScoreVector(std::vector<int> counts) : counts_(std::move(counts)) {}

  int size() const { return static_cast<int>(counts_.size()); }
  int operator[](Candidate c) const { return counts_[c]; }
  int& operator[](Candidate c) { return counts_[c]; }
  std::span<const int> counts() const { return counts_; }
  int total() const;

  // c >_Q d with c's score raised by `c_bonus` and d's by `d_bonus`.
  bool beats(Candidate c, Candidate d, int c_bonus = 0, int d_bonus = 0) const;

  bool operator==(const ScoreVector&) const = default;
  auto operator<=>(const ScoreVector&) const = default;

 private:
  std::vector<int> counts_;
};

// Integer key realising >_Q: key(c, v) > key(d, u) iff (v > u) or (v == u and c < d).
constexpr std::int64_t priority_key(Candidate c, std::int64_t score, int m) {
  return score * m + (m - 1 - c);
}

ScoreVector tally(const BallotProfile& ballots, int m);
Candidate plurality_winner(const ScoreVector& scores);
ScoreVector with_vote(ScoreVector scores, Action action);
// Tally of everyone except `voter`.
ScoreVector tally_without(const BallotProfile& ballots, int m, int voter);

// Smallest w >= 0 such that c wins after receiving w extra votes.
int min_votes_to_win(const ScoreVector& scores, Candidate c);

// Candidates that need at most w extra votes to win; sorted, always contains the winner.
std::vector<Candidate> h_bar(const ScoreVector& scores, int w);

std::string to_string(const ScoreVector& s);

}  // namespace ldv
