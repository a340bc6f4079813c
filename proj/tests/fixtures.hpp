#pragma once

#include <algorithm>
#include <initializer_list>
#include <random>
#include <vector>

#include "ldv/dominance.hpp"
#include "ldv/election.hpp"

namespace fixtures {

inline ldv::PreferenceOrder order(std::initializer_list<ldv::Candidate> r) { return ldv::PreferenceOrder(std::vector<ldv::Candidate>(r)); }

// 100 voters split 45/40/15 between a, b and c. Voter kVoterV ranks c > b > a,
// voter kVoterVPrime ranks c > a > b; the other c voters alternate between the two.
inline ldv::PreferenceProfile running_example() {
  std::vector<ldv::PreferenceOrder> orders;
  for (int i = 0; i < 45; ++i) orders.push_back(order({0, 1, 2}));
  for (int i = 0; i < 40; ++i) orders.push_back(order({1, 0, 2}));
  orders.push_back(order({2, 1, 0}));
  orders.push_back(order({2, 0, 1}));
  for (int i = 0; i < 13; ++i) orders.push_back(i % 2 ? order({2, 0, 1}) : order({2, 1, 0}));
  return ldv::PreferenceProfile(3, std::move(orders));
}

inline constexpr int kVoterV = 85;
inline constexpr int kVoterVPrime = 86;

inline ldv::VoterType plain(ldv::MetricKind kind, ldv::Radius r) {
  ldv::VoterType t;
  t.metric = kind;
  t.r = r;
  return t;
}

inline ldv::VoterType l1(int r) { return plain(ldv::MetricKind::L1, ldv::Radius::integer(r)); }

inline ldv::VoterType biased(ldv::Bias bias, int r, int k) {
  ldv::VoterType t = l1(r);
  t.bias = bias;
  t.k = ldv::Radius::integer(k);
  return t;
}

inline ldv::PreferenceOrder random_order(int m, std::mt19937_64& rng) {
  std::vector<ldv::Candidate> v(static_cast<std::size_t>(m));
  for (int c = 0; c < m; ++c) v[c] = c;
  std::shuffle(v.begin(), v.end(), rng);
  return ldv::PreferenceOrder(std::move(v));
}

inline ldv::PreferenceProfile random_profile(int n, int m, std::mt19937_64& rng) {
  std::vector<ldv::PreferenceOrder> orders;
  for (int i = 0; i < n; ++i) orders.push_back(random_order(m, rng));
  return ldv::PreferenceProfile(m, std::move(orders));
}

// Random ballots; abstentions appear with probability `p_abstain`.
inline ldv::BallotProfile random_ballots(int n, int m, std::mt19937_64& rng, double p_abstain = 0.0) {
  std::uniform_int_distribution<int> pick(0, m - 1);
  std::bernoulli_distribution abstain(p_abstain);
  ldv::BallotProfile b;
  for (int i = 0; i < n; ++i) b.votes.push_back(abstain(rng) ? ldv::Action::abstain() : ldv::Action::vote(pick(rng)));
  return b;
}

}  // namespace fixtures
