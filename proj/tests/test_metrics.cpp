#include <doctest.h>

#include <algorithm>
#include <random>

#include "fixtures.hpp"
#include "ldv/metrics.hpp"
#include "support/oracle.hpp"

using namespace ldv;
using fixtures::order;

namespace {

constexpr Candidate a = 0;
constexpr Candidate b = 1;
constexpr Candidate c = 2;

PreferenceProfile hand_profile() { return PreferenceProfile(3, {order({a, b, c}), order({a, c, b}), order({b, a, c})}); }

RunOutcome outcome(std::vector<int> votes) {
  RunOutcome r;
  for (int v : votes) r.final_state.votes.push_back(Action::from_raw(v));
  return r;
}

}  // namespace

TEST_CASE("Borda, Copeland and Maximin on a hand profile") {
  const PreferenceProfile p = hand_profile();
  CHECK(borda_scores(p) == std::vector<std::int64_t>{5, 3, 1});
  CHECK(borda_winner(p) == a);
  CHECK(copeland_winner(p) == a);
  CHECK(maximin_winner(p) == a);
  CHECK(condorcet_winner(p) == a);
  CHECK(social_welfare_rank(p, c) == doctest::Approx(4.0 / 6.0));
  CHECK(social_welfare_rank(p, a) == 0.0);
  const auto support = pairwise_support(p);
  CHECK(support[a][b] == 2);
  CHECK(support[b][a] == 1);
  CHECK(support[c][b] == 1);
}

TEST_CASE("unanimity, a sole candidate and a Condorcet cycle") {
  const PreferenceProfile unanimous(3, {order({c, a, b}), order({c, a, b}), order({c, a, b})});
  CHECK(borda_winner(unanimous) == c);
  CHECK(copeland_winner(unanimous) == c);
  CHECK(maximin_winner(unanimous) == c);
  CHECK(condorcet_winner(unanimous) == c);
  CHECK(social_welfare_rank(unanimous, c) == 0.0);

  const PreferenceProfile sole(1, {order({0}), order({0})});
  CHECK(borda_winner(sole) == 0);
  CHECK(copeland_winner(sole) == 0);
  CHECK(maximin_winner(sole) == 0);
  CHECK(social_welfare_rank(sole, 0) == 0.0);

  const PreferenceProfile cycle(3, {order({a, b, c}), order({b, c, a}), order({c, a, b})});
  CHECK_FALSE(condorcet_winner(cycle).has_value());
  CHECK_FALSE(oracle::condorcet_winner(cycle).has_value());

  // A pairwise tie defeats candidacy.
  const PreferenceProfile tie(2, {order({0, 1}), order({1, 0})});
  CHECK_FALSE(condorcet_winner(tie).has_value());
}

TEST_CASE("rules agree with the oracle and ignore voter order") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 400; ++trial) {
    const int n = std::uniform_int_distribution<int>(1, 15)(rng);
    const int m = std::uniform_int_distribution<int>(1, 6)(rng);
    const PreferenceProfile p = fixtures::random_profile(n, m, rng);
    CHECK(condorcet_winner(p) == oracle::condorcet_winner(p));
    std::vector<PreferenceOrder> shuffled = p.orders();
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const PreferenceProfile q(m, shuffled);
    CHECK(borda_winner(p) == borda_winner(q));
    CHECK(copeland_winner(p) == copeland_winner(q));
    CHECK(maximin_winner(p) == maximin_winner(q));
    const Candidate bw = borda_winner(p);
    for (Candidate x = 0; x < m; ++x) CHECK(social_welfare_rank(p, bw) <= social_welfare_rank(p, x));
  }
}

TEST_CASE("aggregate of identical runs") {
  const PreferenceProfile p = hand_profile();
  const std::vector<RunOutcome> runs(4, outcome({0, 0, 1}));
  const ResultRow row = aggregate(p, runs);
  CHECK(row.num_step == 0.0);
  CHECK(row.num_states == 1.0);
  CHECK(row.num_winners == 1.0);
  CHECK(row.winner_consistency == 1.0);
  CHECK(row.plurality_agreement == 1.0);
  CHECK(row.borda_agreement == 1.0);
  CHECK(row.condorcet_agreement == 1.0);
  CHECK(row.social_welfare == 0.0);
  CHECK(row.gap1_2 == 2.0);
  CHECK_FALSE(row.gap2_3.has_value());
  CHECK(row.total_duverger == 1.0);
  CHECK(row.relative_duverger == 1.0);
  CHECK_FALSE(row.winner_ground_rank.has_value());
  CHECK_THROWS_AS(aggregate(p, std::vector<RunOutcome>{}), std::invalid_argument);
}

TEST_CASE("aggregate of differing runs") {
  // Truthful winner a; Condorcet winner a; ground truth ranks b first.
  const PreferenceProfile p = hand_profile();
  std::vector<RunOutcome> runs{outcome({0, 0, 1}), outcome({1, 2, 1}), outcome({1, -1, 1}), outcome({0, 2, 1})};
  runs[1].moves = 2;
  runs[2].moves = 1;
  runs[3].moves = 1;
  const GroundTruth truth{{0.4, 0.9, 0.1}};
  const ResultRow row = aggregate(p, runs, truth);
  CHECK(row.num_step == 1.0);
  CHECK(row.num_states == 4.0);
  CHECK(row.num_winners == 2.0);
  CHECK(row.winner_consistency == 0.5);
  CHECK(row.plurality_agreement == 0.5);
  CHECK(row.condorcet_agreement == 0.5);
  CHECK(row.social_welfare == doctest::Approx((0 + 2.0 / 6 + 2.0 / 6 + 0) / 4));
  CHECK_FALSE(row.gap1_2.has_value());
  CHECK_FALSE(row.gap2_3.has_value());
  CHECK(row.total_duverger == 0.75);
  CHECK(row.relative_duverger == doctest::Approx((1.0 + 1.0 + 2.0 / 3 + 2.0 / 3) / 4));
  CHECK(row.winner_ground_rank == doctest::Approx((1 + 0 + 0 + 1) / 4.0));
  CHECK(row.winner_consistency >= 1.0 / row.num_winners);
  CHECK(row.num_winners <= row.num_states);
}
