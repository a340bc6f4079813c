#include "ldv/metrics.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace ldv {

namespace {

// First index attaining the maximum.
template <class T>
Candidate argmax(const std::vector<T>& v) {
  return static_cast<Candidate>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

std::vector<std::vector<int>> pairwise_support(const PreferenceProfile& profile) {
  const int m = profile.num_candidates();
  std::vector<std::vector<int>> s(static_cast<std::size_t>(m), std::vector<int>(static_cast<std::size_t>(m), 0));
  for (const PreferenceOrder& o : profile.orders()) {
    for (int hi = 0; hi < m; ++hi) {
      for (int lo = hi + 1; lo < m; ++lo) ++s[o.at(hi)][o.at(lo)];
    }
  }
  return s;
}

std::vector<std::int64_t> borda_scores(const PreferenceProfile& profile) {
  const int m = profile.num_candidates();
  std::vector<std::int64_t> score(static_cast<std::size_t>(m), 0);
  for (const PreferenceOrder& o : profile.orders()) {
    for (Candidate c = 0; c < m; ++c) score[c] += m - o.rank(c);
  }
  return score;
}

Candidate borda_winner(const PreferenceProfile& profile) { return argmax(borda_scores(profile)); }

Candidate copeland_winner(const PreferenceProfile& profile) {
  const int m = profile.num_candidates();
  const auto sup = pairwise_support(profile);
  std::vector<int> score(static_cast<std::size_t>(m), 0);
  for (Candidate c = 0; c < m; ++c) {
    for (Candidate d = 0; d < m; ++d) {
      if (sup[c][d] > sup[d][c]) ++score[c];
      if (sup[c][d] < sup[d][c]) --score[c];
    }
  }
  return argmax(score);
}

Candidate maximin_winner(const PreferenceProfile& profile) {
  const int m = profile.num_candidates();
  const auto sup = pairwise_support(profile);
  std::vector<int> score(static_cast<std::size_t>(m), profile.num_voters());
  for (Candidate c = 0; c < m; ++c) {
    for (Candidate d = 0; d < m; ++d) {
      if (d != c) score[c] = std::min(score[c], sup[c][d]);
    }
  }
  return argmax(score);
}

std::optional<Candidate> condorcet_winner(const PreferenceProfile& profile) {
  const int m = profile.num_candidates();
  const auto sup = pairwise_support(profile);
  for (Candidate c = 0; c < m; ++c) {
    bool beats_all = true;
    for (Candidate d = 0; d < m && beats_all; ++d) {
      if (d != c && sup[c][d] <= sup[d][c]) beats_all = false;
    }
    if (beats_all) return c;
  }
  return std::nullopt;
}

double social_welfare_rank(const PreferenceProfile& profile, Candidate winner) {
  const int m = profile.num_candidates();
  if (m == 1) return 0.0;
  const auto score = borda_scores(profile);
  const auto best = *std::max_element(score.begin(), score.end());
  return static_cast<double>(best - score[winner]) /
         (static_cast<double>(profile.num_voters()) * static_cast<double>(m - 1));
}

Benchmarks compute_benchmarks(const PreferenceProfile& profile) {
  Benchmarks b;
  b.plurality = plurality_winner(tally(truthful_ballots(profile), profile.num_candidates()));
  b.borda_scores = borda_scores(profile);
  b.borda = argmax(b.borda_scores);
  b.copeland = copeland_winner(profile);
  b.maximin = maximin_winner(profile);
  b.condorcet = condorcet_winner(profile);
  return b;
}

RunOutcome outcome_of(const Trace& trace) { return {trace.num_moves(), trace.final_state}; }

ResultRow aggregate(const PreferenceProfile& profile, std::span<const RunOutcome> runs,
                    const std::optional<GroundTruth>& ground) {
  if (runs.empty()) throw std::invalid_argument("aggregate needs at least one run");
  const int n = profile.num_voters();
  const int m = profile.num_candidates();
  const Benchmarks bench = compute_benchmarks(profile);
  const double reps = static_cast<double>(runs.size());

  ResultRow row;
  std::set<BallotProfile> states;
  std::map<Candidate, int> winners;
  double gap12 = 0;
  double gap23 = 0;
  bool gap12_inf = false;
  bool gap23_inf = false;
  double condorcet_hits = 0;
  double ground_rank = 0;

  for (const RunOutcome& run : runs) {
    const ScoreVector s = tally(run.final_state, m);
    const Candidate w = plurality_winner(s);
    states.insert(run.final_state);
    ++winners[w];
    row.num_step += run.moves;
    row.plurality_agreement += w == bench.plurality;
    row.borda_agreement += w == bench.borda;
    row.copeland_agreement += w == bench.copeland;
    row.maximin_agreement += w == bench.maximin;
    if (bench.condorcet) condorcet_hits += w == *bench.condorcet;
    row.social_welfare += social_welfare_rank(profile, w);
    if (ground) ground_rank += ground->rank_of(w);

    // Top three by count, ties toward the lower index; missing places score 0.
    std::vector<Candidate> order(static_cast<std::size_t>(m));
    for (Candidate c = 0; c < m; ++c) order[c] = c;
    std::stable_sort(order.begin(), order.end(), [&](Candidate a, Candidate b) { return s[a] > s[b]; });
    const int s1 = s[order[0]];
    const int s2 = m > 1 ? s[order[1]] : 0;
    const int s3 = m > 2 ? s[order[2]] : 0;
    if (s2 == 0) gap12_inf = true; else gap12 += static_cast<double>(s1) / s2;
    if (s3 == 0) gap23_inf = true; else gap23 += static_cast<double>(s2) / s3;
    row.total_duverger += s3 == 0;
    row.relative_duverger += static_cast<double>(s1 + s2) / n;
  }

  row.num_step /= reps;
  row.num_states = static_cast<double>(states.size());
  row.num_winners = static_cast<double>(winners.size());
  int most = 0;
  for (const auto& [c, count] : winners) most = std::max(most, count);
  row.winner_consistency = most / reps;
  row.plurality_agreement /= reps;
  row.borda_agreement /= reps;
  row.copeland_agreement /= reps;
  row.maximin_agreement /= reps;
  if (bench.condorcet) row.condorcet_agreement = condorcet_hits / reps;
  row.social_welfare /= reps;
  if (!gap12_inf) row.gap1_2 = gap12 / reps;
  if (!gap23_inf) row.gap2_3 = gap23 / reps;
  row.total_duverger /= reps;
  row.relative_duverger /= reps;
  if (ground) row.winner_ground_rank = ground_rank / reps;
  return row;
}

}  // namespace ldv
