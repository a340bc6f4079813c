#include "ldv/dynamics.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <stdexcept>
#include <unordered_map>

#include <fmt/format.h>

namespace ldv {

namespace {

bool contains(const std::vector<Candidate>& sorted, Candidate c) {
  return std::binary_search(sorted.begin(), sorted.end(), c);
}

bool is_subset(const std::vector<Candidate>& inner, const std::vector<Candidate>& outer) {
  return std::includes(outer.begin(), outer.end(), inner.begin(), inner.end());
}

std::string set_string(const std::vector<Candidate>& s) {
  return fmt::format("{{{}}}", fmt::join(s, ","));
}

int top_score(const ScoreVector& s) { return s[plurality_winner(s)]; }

// Possible winners of an abstaining voter facing the full tally. For L1 this
// is h_bar(s, r+1) and for LInf h_bar(s, 2r+1).
std::vector<Candidate> leader_band(const ScoreVector& s, const DistanceMetric& metric) {
  return possible_winners(AccessibleStateSet{s, metric});
}

void check_replay(const StepRecord& st, const BallotProfile& cur, int m, std::vector<std::string>& out) {
  if (st.voter < 0 || st.voter >= cur.size()) {
    out.push_back(fmt::format("step {}: voter {} out of range", st.time, st.voter));
    return;
  }
  if (cur[st.voter] != st.from) {
    out.push_back(fmt::format("step {}: recorded source {} but voter {} votes {}", st.time, to_string(st.from),
                              st.voter, to_string(cur[st.voter])));
  }
  if (st.from == st.to) out.push_back(fmt::format("step {}: voter {} does not change vote", st.time, st.voter));
  if (tally(cur, m) != st.scores_before) out.push_back(fmt::format("step {}: scores_before mismatch", st.time));
}

}  // namespace

ResponseTable::ResponseTable(const PreferenceProfile& profile, std::span<const VoterType> types)
    : profile_(&profile) {
  const int n = profile.num_voters();
  if (static_cast<int>(types.size()) != n) throw std::invalid_argument("one voter type per voter required");
  std::map<std::vector<Candidate>, int> orders;
  order_id_.resize(static_cast<std::size_t>(n));
  type_id_.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto r = profile.order(i).ranking();
    auto [it, fresh] = orders.emplace(std::vector<Candidate>(r.begin(), r.end()), static_cast<int>(orders.size()));
    order_id_[i] = it->second;
    types[i].validate();
    auto pos = std::find(types_.begin(), types_.end(), types[i]);
    if (pos == types_.end()) pos = types_.insert(types_.end(), types[i]);
    type_id_[i] = static_cast<int>(pos - types_.begin());
  }
  num_orders_ = static_cast<int>(orders.size());
}

std::vector<PendingMove> ResponseTable::pending(const BallotProfile& ballots) const {
  const PreferenceProfile& profile = *profile_;
  const int n = profile.num_voters();
  const int m = profile.num_candidates();
  if (ballots.size() != n) throw std::invalid_argument("ballot profile size differs from voter count");
  std::unordered_map<std::int64_t, std::optional<Response>> cache;
  std::vector<PendingMove> out;
  for (int i = 0; i < n; ++i) {
    const std::int64_t key =
        (static_cast<std::int64_t>(type_id_[i]) * num_orders_ + order_id_[i]) * (m + 1) + ballots[i].raw() + 1;
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, respond(profile, ballots, i, types_[type_id_[i]])).first;
    if (!it->second) continue;
    const Response& r = *it->second;
    const StepType type = r.bias_move ? StepType::BiasMove : classify_step(profile.order(i), ballots[i], r.to);
    out.push_back({i, r.to, type});
  }
  return out;
}

std::vector<PendingMove> pending_moves(const PreferenceProfile& profile, const BallotProfile& ballots,
                                       std::span<const VoterType> types) {
  return ResponseTable(profile, types).pending(ballots);
}

bool is_equilibrium(const PreferenceProfile& profile, const BallotProfile& ballots, std::span<const VoterType> types) {
  return pending_moves(profile, ballots, types).empty();
}

Trace run_to_equilibrium(const PreferenceProfile& profile, std::span<const VoterType> types,
                         const BallotProfile& initial, const Scheduler& scheduler, std::uint64_t seed,
                         int max_ticks) {
  const int n = profile.num_voters();
  const int m = profile.num_candidates();
  if (initial.size() != n) throw std::invalid_argument("initial ballot profile size differs from voter count");
  if (max_ticks <= 0) max_ticks = 10 * n * m;
  const int cap = scheduler.group_cap > 0 ? scheduler.group_cap : std::max(1, n / 2);

  const ResponseTable table(profile, types);
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution singleton_coin(scheduler.p_singleton);

  Trace trace;
  trace.initial = initial;
  BallotProfile cur = initial;
  std::vector<PendingMove> moves = table.pending(cur);
  std::vector<PendingMove> pool;
  while (!moves.empty() && trace.ticks < max_ticks) {
    pool.clear();
    if (scheduler.opportunity_priority) {
      std::copy_if(moves.begin(), moves.end(), std::back_inserter(pool),
                   [](const PendingMove& p) { return p.type == StepType::Type2; });
    }
    if (pool.empty()) pool = moves;

    std::size_t size = 1;
    if (scheduler.kind == Scheduler::Kind::GroupRandom && !singleton_coin(rng)) {
      const std::size_t hi = std::min<std::size_t>(static_cast<std::size_t>(cap), pool.size());
      size = std::uniform_int_distribution<std::size_t>(1, hi)(rng);
    }
    for (std::size_t j = 0; j < size; ++j) {
      const std::size_t pick = std::uniform_int_distribution<std::size_t>(j, pool.size() - 1)(rng);
      std::swap(pool[j], pool[pick]);
    }
    pool.resize(size);
    std::sort(pool.begin(), pool.end(), [](const PendingMove& a, const PendingMove& b) { return a.voter < b.voter; });

    const ScoreVector before = tally(cur, m);
    const std::size_t first = trace.steps.size();
    for (const PendingMove& mv : pool) {
      trace.steps.push_back({trace.ticks, mv.voter, cur[mv.voter], mv.to, mv.type, before, {}});
    }
    // All selected voters respond to the same pre-step state.
    for (const PendingMove& mv : pool) cur[mv.voter] = mv.to;
    const ScoreVector after = tally(cur, m);
    for (std::size_t j = first; j < trace.steps.size(); ++j) trace.steps[j].scores_after = after;

    ++trace.ticks;
    if (size == 1) ++trace.singleton_ticks;
    moves = table.pending(cur);
  }
  trace.converged = moves.empty();
  trace.final_state = std::move(cur);
  return trace;
}

BallotProfile replay(const Trace& trace) {
  BallotProfile cur = trace.initial;
  for (const StepRecord& st : trace.steps) cur[st.voter] = st.to;
  return cur;
}

std::vector<std::string> verify_trace_invariants(const Trace& trace, DistanceMetric metric) {
  metric.validate();
  if (metric.kind == MetricKind::EarthMover) throw UnsupportedMetricError("no trace invariants for earth-mover voters");
  std::vector<std::string> out;
  const int n = trace.initial.size();
  if (trace.final_state.size() != n) {
    out.push_back("final state size differs from initial");
    return out;
  }
  int m = 0;
  if (!trace.steps.empty()) {
    m = trace.steps.front().scores_before.size();
  } else {
    for (const Action& a : trace.initial.votes) m = std::max(m, a.raw() + 1);
    for (const Action& a : trace.final_state.votes) m = std::max(m, a.raw() + 1);
  }
  if (replay(trace) != trace.final_state) out.push_back("replaying the steps does not reproduce the final state");
  if (trace.steps.empty()) return out;

  const int r = static_cast<int>(metric.radius.num);
  BallotProfile cur = trace.initial;

  for (const StepRecord& st : trace.steps) {
    check_replay(st, cur, m, out);
    if (st.voter < 0 || st.voter >= n) return out;
    const ScoreVector& before = st.scores_before;
    BallotProfile next = cur;
    next[st.voter] = st.to;
    const ScoreVector after = tally(next, m);
    if (after != st.scores_after) out.push_back(fmt::format("step {}: scores_after mismatch", st.time));

    if (st.type != StepType::Type1) {
      out.push_back(fmt::format("step {}: voter {} made a {} step, expected a compromise", st.time, st.voter,
                                to_string(st.type)));
    }
    if (top_score(after) < top_score(before)) {
      out.push_back(fmt::format("step {}: winner score fell from {} to {}", st.time, top_score(before),
                                top_score(after)));
    }
    const auto hb = leader_band(before, metric);
    const auto ha = leader_band(after, metric);
    if (st.from.is_vote() && contains(ha, st.from.candidate())) {
      out.push_back(fmt::format("step {}: deserted candidate {} is still a contender", st.time, st.from.candidate()));
    }
    if (!is_subset(ha, hb)) {
      out.push_back(fmt::format("step {}: leader band grew from {} to {}", st.time, set_string(hb), set_string(ha)));
    }
    if (hb.size() <= 1) out.push_back(fmt::format("step {}: single leader before a move", st.time));
    cur = std::move(next);
  }

  if (metric.kind == MetricKind::L1) {
    const ScoreVector fin = tally(trace.final_state, m);
    if (h_bar(fin, r).size() != 1) {
      for (int i = 0; i < n; ++i) {
        const Action a = trace.final_state[i];
        if (a.is_abstain()) continue;
        if (!contains(possible_winners(trace.final_state, m, i, metric), a.candidate())) {
          out.push_back(fmt::format("final state: several near-leaders yet voter {} backs non-contender {}", i,
                                    a.candidate()));
          break;
        }
      }
    }
  }
  return out;
}

std::int64_t chunk_potential(const BallotProfile& ballots, int m, int r) {
  const auto band = h_bar(tally(ballots, m), r + 1);
  std::int64_t inside = 0;
  for (const Action& a : ballots.votes) {
    if (a.is_vote() && contains(band, a.candidate())) ++inside;
  }
  return -static_cast<std::int64_t>(ballots.size()) * static_cast<std::int64_t>(band.size()) + inside;
}

std::vector<Chunk> chunks(const Trace& trace, int m, int r) {
  std::vector<Chunk> out;
  BallotProfile cur = trace.initial;
  std::unordered_map<int, Action> left;  // voter -> vote left in the chunk's Type1 tick
  std::size_t i = 0;
  while (i < trace.steps.size()) {
    const int time = trace.steps[i].time;
    const bool compromise = trace.steps[i].type == StepType::Type1;
    if (compromise) {
      if (!out.empty()) out.back().potential_after = chunk_potential(cur, m, r);
      out.push_back({time, chunk_potential(cur, m, r), 0, true});
      left.clear();
    }
    for (; i < trace.steps.size() && trace.steps[i].time == time; ++i) {
      const StepRecord& st = trace.steps[i];
      if (compromise) {
        left[st.voter] = st.from;
      } else if (!out.empty()) {
        const auto it = left.find(st.voter);
        if (it == left.end() || it->second != st.to) out.back().rollback_only = false;
      }
      cur[st.voter] = st.to;
    }
  }
  if (!out.empty()) out.back().potential_after = chunk_potential(cur, m, r);
  return out;
}

bool is_type_a_bias_move(const PreferenceOrder& prefs, const StepRecord& step, int r) {
  if (step.type != StepType::BiasMove || step.from.is_abstain()) return false;
  const auto band = h_bar(step.scores_before, r + 1);
  if (band.size() <= 1) return false;
  const auto favourite = std::min_element(band.begin(), band.end(),
                                          [&](Candidate a, Candidate b) { return prefs.prefers(a, b); });
  return *favourite == step.from.candidate();
}

std::vector<std::string> check_equilibrium_properties(const PreferenceProfile& profile, const BallotProfile& ballots,
                                                      std::span<const VoterType> types) {
  if (!is_equilibrium(profile, ballots, types)) throw std::invalid_argument("ballot profile is not an equilibrium");
  const int m = profile.num_candidates();
  std::vector<std::string> out;
  for (int i = 0; i < profile.num_voters(); ++i) {
    const VoterType& t = types[i];
    const PreferenceOrder& prefs = profile.order(i);
    const Action a = ballots[i];
    if (t.bias != Bias::None) {
      const Action fallback = t.bias == Bias::Truth ? Action::vote(prefs.top()) : Action::abstain();
      if (a != fallback) {
        const auto keep = possible_winners(ballots, m, i, {t.metric, *t.k});
        if (a.is_abstain() || !contains(keep, a.candidate())) {
          out.push_back(fmt::format("voter {} votes {}, neither their default nor a contender at radius {}", i,
                                    to_string(a), to_string(*t.k)));
        }
      }
    }
    if (a.is_abstain()) continue;
    const auto winners = possible_winners(ballots, m, i, t.response_metric());
    if (winners.size() >= 2) {
      const auto worst = std::max_element(winners.begin(), winners.end(),
                                          [&](Candidate x, Candidate y) { return prefs.prefers(x, y); });
      if (*worst == a.candidate()) {
        out.push_back(fmt::format("voter {} backs their least preferred possible winner {}", i, a.candidate()));
      }
    }
  }
  return out;
}

}  // namespace ldv
