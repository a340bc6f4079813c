#include "ldv/election.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace ldv {

std::string to_string(Action a) {
  return a.is_abstain() ? std::string("-") : std::to_string(a.candidate());
}

PreferenceOrder::PreferenceOrder(std::vector<Candidate> ranking) : ranking_(std::move(ranking)) {
  const int m = static_cast<int>(ranking_.size());
  if (m == 0) throw std::invalid_argument("preference order over zero candidates");
  position_.assign(static_cast<std::size_t>(m), -1);
  for (int pos = 0; pos < m; ++pos) {
    const Candidate c = ranking_[pos];
    if (c < 0 || c >= m) throw std::invalid_argument("candidate index out of range in preference order");
    if (position_[c] != -1) throw std::invalid_argument("duplicate candidate in preference order");
    position_[c] = pos;
  }
}

PreferenceProfile::PreferenceProfile(int m, std::vector<PreferenceOrder> orders)
    : m_(m), orders_(std::move(orders)) {
  if (m_ < 1) throw std::invalid_argument("profile needs at least one candidate");
  if (orders_.empty()) throw std::invalid_argument("profile needs at least one voter");
  for (const auto& o : orders_) {
    if (o.size() != m_) throw std::invalid_argument("preference order size differs from candidate count");
  }
}

BallotProfile truthful_ballots(const PreferenceProfile& profile) {
  BallotProfile b;
  b.votes.reserve(profile.orders().size());
  for (const auto& o : profile.orders()) b.votes.push_back(Action::vote(o.top()));
  return b;
}

int ScoreVector::total() const { return std::accumulate(counts_.begin(), counts_.end(), 0); }

bool ScoreVector::beats(Candidate c, Candidate d, int c_bonus, int d_bonus) const {
  const int sc = counts_[c] + c_bonus;
  const int sd = counts_[d] + d_bonus;
  return sc > sd || (sc == sd && c < d);
}

ScoreVector tally(const BallotProfile& ballots, int m) {
  ScoreVector s(m);
  for (const Action& a : ballots.votes) {
    if (a.is_vote()) ++s[a.candidate()];
  }
  return s;
}

Candidate plurality_winner(const ScoreVector& scores) {
  Candidate best = 0;
  for (Candidate c = 1; c < scores.size(); ++c) {
    if (scores[c] > scores[best]) best = c;
  }
  return best;
}

ScoreVector with_vote(ScoreVector scores, Action action) {
  if (action.is_vote()) ++scores[action.candidate()];
  return scores;
}

ScoreVector tally_without(const BallotProfile& ballots, int m, int voter) {
  ScoreVector s = tally(ballots, m);
  const Action a = ballots[voter];
  if (a.is_vote()) --s[a.candidate()];
  return s;
}

int min_votes_to_win(const ScoreVector& scores, Candidate c) {
  const Candidate w = plurality_winner(scores);
  if (w == c) return 0;
  // w is the strongest rival; c must overtake it under the tie-break.
  return scores[w] - scores[c] + (c < w ? 0 : 1);
}

std::vector<Candidate> h_bar(const ScoreVector& scores, int w) {
  std::vector<Candidate> out;
  for (Candidate c = 0; c < scores.size(); ++c) {
    if (min_votes_to_win(scores, c) <= w) out.push_back(c);
  }
  return out;
}

std::string to_string(const ScoreVector& s) {
  std::string out = "(";
  for (int c = 0; c < s.size(); ++c) {
    if (c) out += ",";
    out += std::to_string(s[c]);
  }
  return out + ")";
}

}  // namespace ldv
