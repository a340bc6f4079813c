#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "ldv/dynamics.hpp"
#include "support/oracle.hpp"

using namespace ldv;
using fixtures::order;

namespace {

constexpr Candidate a = 0;
constexpr Candidate b = 1;
constexpr Candidate c = 2;

std::vector<VoterType> same(int n, const VoterType& t) { return std::vector<VoterType>(static_cast<std::size_t>(n), t); }

PreferenceProfile five_voters() {
  return PreferenceProfile(3, {order({a, b, c}), order({a, b, c}), order({b, a, c}), order({b, a, c}), order({c, b, a})});
}

}  // namespace

TEST_CASE("five-voter instance: the c supporter compromises on b") {
  const PreferenceProfile profile = five_voters();
  const auto types = same(5, fixtures::l1(0));
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Trace t = run_to_equilibrium(profile, types, truthful_ballots(profile), {}, seed);
    REQUIRE(t.converged);
    REQUIRE(t.num_moves() == 1);
    CHECK(t.steps[0].voter == 4);
    CHECK(t.steps[0].to == Action::vote(b));
    CHECK(t.steps[0].type == StepType::Type1);
    CHECK(plurality_winner(tally(t.final_state, 3)) == b);
    CHECK(verify_trace_invariants(t, {MetricKind::L1, Radius::integer(0)}).empty());
  }
}

TEST_CASE("pending moves and equilibria") {
  const PreferenceProfile example = fixtures::running_example();
  const BallotProfile truthful = truthful_ballots(example);
  const auto moves = pending_moves(example, truthful, same(100, fixtures::l1(10)));
  CHECK(moves.size() == 15);
  for (const PendingMove& mv : moves) {
    CHECK(mv.voter >= 85);
    CHECK(mv.to == Action::vote(example.order(mv.voter).at(1)));
  }
  CHECK_FALSE(is_equilibrium(example, truthful, same(100, fixtures::l1(10))));
  CHECK(pending_moves(example, truthful, same(100, fixtures::l1(100))).empty());

  const PreferenceProfile three(3, {order({a, b, c}), order({b, a, c}), order({c, a, b})});
  CHECK(is_equilibrium(three, truthful_ballots(three), same(3, fixtures::l1(0))));

  const PreferenceProfile solo(4, {order({2, 0, 3, 1})});
  CHECK(is_equilibrium(solo, truthful_ballots(solo), same(1, fixtures::l1(2))));
  CHECK_THROWS(pending_moves(solo, truthful_ballots(solo), same(2, fixtures::l1(0))));
}

TEST_CASE("stable start takes zero steps") {
  const PreferenceProfile profile(3, {order({a, b, c}), order({a, c, b}), order({b, a, c})});
  const Trace t = run_to_equilibrium(profile, same(3, fixtures::l1(1)), truthful_ballots(profile), {}, 7);
  CHECK(t.converged);
  CHECK(t.num_moves() == 0);
  CHECK(t.final_state == t.initial);
  CHECK(verify_trace_invariants(t, {MetricKind::L1, Radius::integer(1)}).empty());
}

TEST_CASE("singleton runs from the truthful start converge within n(m-1) moves") {
  std::mt19937_64 rng(2024);
  for (MetricKind kind : {MetricKind::L1, MetricKind::LInf, MetricKind::Multiplicative}) {
    for (int trial = 0; trial < 60; ++trial) {
      const int n = std::uniform_int_distribution<int>(3, 15)(rng);
      const int m = std::uniform_int_distribution<int>(3, 5)(rng);
      const Radius r = kind == MetricKind::Multiplicative ? Radius{trial % 4, 3}
                                                          : Radius::integer(trial % 5);
      const PreferenceProfile profile = fixtures::random_profile(n, m, rng);
      const Trace t = run_to_equilibrium(profile, same(n, fixtures::plain(kind, r)), truthful_ballots(profile), {},
                                         rng());
      CAPTURE(to_string(kind));
      REQUIRE(t.converged);
      CHECK(t.num_moves() <= n * (m - 1));
      CHECK(replay(t) == t.final_state);
      const auto report = verify_trace_invariants(t, {kind, r});
      CAPTURE(to_string(r));
      CAPTURE(report.empty() ? std::string() : report.front());
      CHECK(report.empty());
      CHECK(check_equilibrium_properties(profile, t.final_state, same(n, fixtures::plain(kind, r))).empty());
      std::vector<int> per_voter(static_cast<std::size_t>(n), 0);
      for (const StepRecord& st : t.steps) ++per_voter[st.voter];
      for (int x : per_voter) CHECK(x <= m - 1);
    }
  }
}

TEST_CASE("runs are deterministic in the seed") {
  std::mt19937_64 rng(3);
  const PreferenceProfile profile = fixtures::random_profile(12, 4, rng);
  const BallotProfile start = fixtures::random_ballots(12, 4, rng);
  Scheduler group;
  group.kind = Scheduler::Kind::GroupRandom;
  group.opportunity_priority = true;
  const auto types = same(12, fixtures::l1(1));
  const Trace x = run_to_equilibrium(profile, types, start, group, 99);
  const Trace y = run_to_equilibrium(profile, types, start, group, 99);
  CHECK(x.final_state == y.final_state);
  REQUIRE(x.steps.size() == y.steps.size());
  for (std::size_t i = 0; i < x.steps.size(); ++i) {
    CHECK(x.steps[i].time == y.steps[i].time);
    CHECK(x.steps[i].voter == y.steps[i].voter);
    CHECK(x.steps[i].to == y.steps[i].to);
  }
  CHECK(x.ticks == y.ticks);
}

TEST_CASE("the audit flags an injected opportunity step and nothing else") {
  // Scores (5,5,1,1); the c voter prefers d and jumps there.
  std::vector<PreferenceOrder> orders;
  for (int i = 0; i < 5; ++i) orders.push_back(order({0, 1, 2, 3}));
  for (int i = 0; i < 5; ++i) orders.push_back(order({1, 0, 2, 3}));
  orders.push_back(order({3, 2, 0, 1}));
  orders.push_back(order({3, 0, 1, 2}));
  const PreferenceProfile profile(4, orders);

  Trace t;
  t.initial = truthful_ballots(profile);
  t.initial[10] = Action::vote(2);
  StepRecord st;
  st.time = 0;
  st.voter = 10;
  st.from = Action::vote(2);
  st.to = Action::vote(3);
  st.type = classify_step(profile.order(10), st.from, st.to);
  st.scores_before = tally(t.initial, 4);
  t.final_state = t.initial;
  t.final_state[10] = st.to;
  st.scores_after = tally(t.final_state, 4);
  t.steps.push_back(st);
  t.converged = true;

  const auto report = verify_trace_invariants(t, {MetricKind::L1, Radius::integer(0)});
  REQUIRE(report.size() == 1);
  CHECK(report[0].find("expected a compromise") != std::string::npos);

  t.final_state[10] = Action::vote(1);
  CHECK(verify_trace_invariants(t, {MetricKind::L1, Radius::integer(0)}).size() >= 2);
}

TEST_CASE("chunk potential") {
  const PreferenceProfile example = fixtures::running_example();
  CHECK(chunk_potential(truthful_ballots(example), 3, 10) == -115);

  BallotProfile all_a;
  all_a.votes.assign(7, Action::vote(a));
  CHECK(chunk_potential(all_a, 3, 2) == 0);
}

TEST_CASE("group runs with opportunity priority converge; rollback-only chunks never lower the potential") {
  std::mt19937_64 rng(11);
  Scheduler group;
  group.kind = Scheduler::Kind::GroupRandom;
  group.opportunity_priority = true;
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int n = std::uniform_int_distribution<int>(3, 14)(rng);
    const int m = std::uniform_int_distribution<int>(3, 5)(rng);
    const int r = trial % 4;
    const PreferenceProfile profile = fixtures::random_profile(n, m, rng);
    const BallotProfile start = fixtures::random_ballots(n, m, rng);
    const Trace t = run_to_equilibrium(profile, same(n, fixtures::l1(r)), start, group, rng());
    REQUIRE(t.converged);
    CHECK(t.singleton_ticks <= 4 * n * m);
    for (const Chunk& c : chunks(t, m, r)) {
      if (!c.rollback_only) continue;
      CHECK(c.potential_before <= c.potential_after);
      ++checked;
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("a wasted-vote opportunity step can lower the chunk potential") {
  // The winner's supporter 0 ranks it below another contender and jumps to a
  // non-contender that locally dominates it; that is no rollback.
  const PreferenceProfile profile(5, {order({4, 0, 1, 2, 3}), order({3, 2, 4, 1, 0}), order({0, 1, 3, 4, 2}),
                                      order({4, 3, 2, 1, 0}), order({4, 1, 2, 0, 3}), order({2, 1, 3, 0, 4}),
                                      order({3, 2, 1, 0, 4}), order({3, 2, 4, 1, 0}), order({0, 2, 1, 4, 3}),
                                      order({1, 3, 0, 2, 4}), order({4, 2, 0, 1, 3})});
  BallotProfile state;
  for (int v : {2, 3, 0, 2, 2, 2, 3, 2, 0, 3, 2}) state.votes.push_back(Action::vote(v));
  const auto types = same(11, fixtures::l1(3));
  auto has = [](const std::vector<PendingMove>& moves, int voter, Candidate to, StepType type) {
    return std::any_of(moves.begin(), moves.end(), [&](const PendingMove& mv) {
      return mv.voter == voter && mv.to == Action::vote(to) && mv.type == type;
    });
  };
  // No opportunity moves: a chunk starts with voter 9's compromise.
  const auto first = pending_moves(profile, state, types);
  REQUIRE(std::none_of(first.begin(), first.end(), [](const PendingMove& mv) { return mv.type == StepType::Type2; }));
  REQUIRE(has(first, 9, 0, StepType::Type1));
  BallotProfile next = state;
  next[9] = Action::vote(0);
  REQUIRE(has(pending_moves(profile, next, types), 0, 4, StepType::Type2));
  next[0] = Action::vote(4);
  CHECK(chunk_potential(state, 5, 3) == -22);
  CHECK(chunk_potential(next, 5, 3) == -23);
}

TEST_CASE("biased voters converge within 3nm moves without type-a bias moves") {
  std::mt19937_64 rng(17);
  for (Bias bias : {Bias::Truth, Bias::Lazy}) {
    for (int trial = 0; trial < 60; ++trial) {
      const int n = std::uniform_int_distribution<int>(3, 15)(rng);
      const int m = std::uniform_int_distribution<int>(3, 5)(rng);
      const int r = trial % 4;
      const int k = trial % 2 ? r + 1 : 2 * r + 1;
      const PreferenceProfile profile = fixtures::random_profile(n, m, rng);
      const auto types = same(n, fixtures::biased(bias, r, k));
      const Trace t = run_to_equilibrium(profile, types, truthful_ballots(profile), {}, rng());
      CAPTURE(to_string(bias));
      REQUIRE(t.converged);
      CHECK(t.num_moves() <= 3 * n * m);
      for (const StepRecord& st : t.steps) CHECK_FALSE(is_type_a_bias_move(profile.order(st.voter), st, r));
      CHECK(check_equilibrium_properties(profile, t.final_state, types).empty());
    }
  }
}

TEST_CASE("equilibrium properties guard non-equilibria") {
  const PreferenceProfile example = fixtures::running_example();
  CHECK_THROWS_AS(check_equilibrium_properties(example, truthful_ballots(example), same(100, fixtures::l1(10))),
                  std::invalid_argument);
  const PreferenceProfile single(1, {order({0}), order({0})});
  CHECK(check_equilibrium_properties(single, truthful_ballots(single), same(2, fixtures::l1(1))).empty());
}

TEST_CASE("zero-radius equilibria are pure Nash equilibria") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = std::uniform_int_distribution<int>(1, 6)(rng);
    const int m = std::uniform_int_distribution<int>(2, 4)(rng);
    const PreferenceProfile profile = fixtures::random_profile(n, m, rng);
    const BallotProfile start = trial % 2 ? truthful_ballots(profile) : fixtures::random_ballots(n, m, rng);
    const Trace t = run_to_equilibrium(profile, same(n, fixtures::l1(0)), start, {}, rng());
    if (!t.converged) continue;
    for (int i = 0; i < n; ++i) CHECK_FALSE(oracle::has_improving_deviation(profile, t.final_state, i));
  }
}
