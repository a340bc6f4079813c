#include "ldv/dominance.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <numeric>

#include <fmt/format.h>

namespace ldv {

namespace {

using i64 = std::int64_t;

i64 ceil_div(i64 a, i64 b) { return a >= 0 ? (a + b - 1) / b : -((-a) / b); }
i64 floor_div(i64 a, i64 b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }

i64 parse_int(std::string_view text, std::string_view what) {
  i64 v = 0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || text.empty()) {
    throw std::invalid_argument(fmt::format("invalid {} '{}'", what, text));
  }
  return v;
}

struct Interval {
  i64 lo;
  i64 hi;
};

// Per-coordinate range of the box metrics (LInf, Multiplicative).
Interval box_bounds(const DistanceMetric& metric, i64 s) {
  const Radius& r = metric.radius;
  if (metric.kind == MetricKind::LInf) return {std::max<i64>(0, s - r.num), s + r.num};
  // s' <= s(1+x) and s <= s'(1+x), with x = num/den.
  return {ceil_div(s * r.den, r.den + r.num), floor_div(s * (r.den + r.num), r.den)};
}

bool is_box(MetricKind k) { return k == MetricKind::LInf || k == MetricKind::Multiplicative; }

i64 sat_mul(i64 a, i64 b) {
  if (a == 0 || b == 0) return 0;
  if (a > std::numeric_limits<i64>::max() / b) return std::numeric_limits<i64>::max();
  return a * b;
}

i64 sat_add(i64 a, i64 b) {
  if (a > std::numeric_limits<i64>::max() - b) return std::numeric_limits<i64>::max();
  return a + b;
}

// Number of nonnegative integer vectors within l1 distance r of base.
i64 count_l1_ball(std::span<const int> base, i64 r) {
  std::vector<i64> ways(static_cast<std::size_t>(r + 1), 0);
  ways[0] = 1;
  for (int s : base) {
    std::vector<i64> next(ways.size(), 0);
    for (i64 used = 0; used <= r; ++used) {
      if (ways[used] == 0) continue;
      for (i64 d = 0; used + d <= r; ++d) {
        const i64 choices = d == 0 ? 1 : (d <= s ? 2 : 1);
        next[used + d] = sat_add(next[used + d], sat_mul(ways[used], choices));
      }
    }
    ways = std::move(next);
  }
  i64 total = 0;
  for (i64 w : ways) total = sat_add(total, w);
  return total;
}

// ---------------------------------------------------------------------------
// Critical-state feasibility.
//
// Every way an action can beat another reduces to one shape: two "special"
// candidates p and q whose scores are locked together (q = p + delta) and every
// other candidate d capped at p + offset(d). Caps only ever rise with p, so each
// metric can decide feasibility without enumerating states.

constexpr int kUncapped = std::numeric_limits<int>::min();

template <class Offset>
bool box_feasible(const AccessibleStateSet& set, Candidate p, Candidate q, int delta, Offset offset) {
  const ScoreVector& s = set.base;
  const Interval bp = box_bounds(set.metric, s[p]);
  const Interval bq = box_bounds(set.metric, s[q]);
  i64 xlo = std::max(bp.lo, bq.lo - delta);
  const i64 xhi = std::min(bp.hi, bq.hi - delta);
  for (Candidate d = 0; d < s.size(); ++d) {
    const int off = offset(d);
    if (off == kUncapped) continue;
    xlo = std::max(xlo, box_bounds(set.metric, s[d]).lo - off);
  }
  return xlo <= xhi;
}

template <class Offset>
bool l1_feasible(const AccessibleStateSet& set, Candidate p, Candidate q, int delta, Offset offset) {
  const ScoreVector& s = set.base;
  const i64 r = set.metric.radius.num;
  i64 xmin = std::max<i64>(0, -delta);
  for (Candidate d = 0; d < s.size(); ++d) {
    const int off = offset(d);
    if (off != kUncapped) xmin = std::max<i64>(xmin, -off);
  }
  auto cost = [&](i64 x) {
    i64 c = std::abs(x - s[p]) + std::abs(x + delta - s[q]);
    for (Candidate d = 0; d < s.size(); ++d) {
      const int off = offset(d);
      if (off != kUncapped) c += std::max<i64>(0, s[d] - off - x);
    }
    return c;
  };
  // The cost is convex piecewise linear in x; its minimum sits at xmin or a kink.
  if (cost(xmin) <= r) return true;
  if (cost(std::max<i64>(xmin, s[p])) <= r) return true;
  if (cost(std::max<i64>(xmin, s[q] - delta)) <= r) return true;
  for (Candidate d = 0; d < s.size(); ++d) {
    const int off = offset(d);
    if (off != kUncapped && cost(std::max<i64>(xmin, s[d] - off)) <= r) return true;
  }
  return false;
}

template <class Offset>
bool em_feasible(const AccessibleStateSet& set, Candidate p, Candidate q, int delta, Offset offset) {
  const ScoreVector& s = set.base;
  const i64 r = set.metric.radius.num;
  const i64 total = s.total();
  i64 xmin = std::max<i64>(0, -delta);
  for (Candidate d = 0; d < s.size(); ++d) {
    const int off = offset(d);
    if (off != kUncapped) xmin = std::max<i64>(xmin, -off);
  }
  // Moving v voters changes the l1 distance by 2v, so |x - s_p| <= 2r.
  for (i64 x = std::max<i64>(xmin, s[p] - 2 * r); x <= s[p] + 2 * r; ++x) {
    const i64 y = x + delta;
    const i64 rest = total - x - y;
    if (rest < 0) break;
    i64 clamped = 0;
    i64 cap_sum = 0;
    i64 over = 0;
    for (Candidate d = 0; d < s.size(); ++d) {
      const int off = offset(d);
      if (off == kUncapped) continue;
      const i64 cap = x + off;
      clamped += std::min<i64>(s[d], cap);
      cap_sum += cap;
      over += std::max<i64>(0, s[d] - cap);
    }
    if (rest > cap_sum) continue;
    const i64 l1 = std::abs(x - s[p]) + std::abs(y - s[q]) + over + std::abs(clamped - rest);
    if (l1 <= 2 * r) return true;
  }
  return false;
}

template <class Offset>
bool scenario_feasible(const AccessibleStateSet& set, Candidate p, Candidate q, int delta, Offset offset) {
  switch (set.metric.kind) {
    case MetricKind::L1:
      return l1_feasible(set, p, q, delta, offset);
    case MetricKind::EarthMover:
      return em_feasible(set, p, q, delta, offset);
    case MetricKind::LInf:
    case MetricKind::Multiplicative:
      return box_feasible(set, p, q, delta, offset);
  }
  return false;
}

// Largest score d may hold while staying strictly below t holding z, expressed
// relative to z: the cap is z - 1 + [d > t].
int below(Candidate d, Candidate t) { return d > t ? 0 : -1; }

// f(s'+b) = b and f(s'+a) = a in the same state.
bool both_pivotal(const AccessibleStateSet& set, Candidate b, Candidate a) {
  const std::array<int, 2> deltas = a < b ? std::array<int, 2>{0, 1} : std::array<int, 2>{0, -1};
  for (int delta : deltas) {
    auto offset = [&](Candidate d) {
      if (d == a || d == b) return kUncapped;
      return std::min(delta + 1 + below(d, b), 1 + below(d, a));
    };
    if (scenario_feasible(set, a, b, delta, offset)) return true;
  }
  return false;
}

// f(s') = w, f(s'+mover) = mover, and (if `blocked` is a vote) f(s'+blocked) = w.
bool mover_takes_from(const AccessibleStateSet& set, Candidate w, Candidate mover, Action blocked) {
  const int delta = w < mover ? 0 : -1;
  auto offset = [&](Candidate d) {
    if (d == w || d == mover) return kUncapped;
    if (blocked.is_vote() && d == blocked.candidate()) return below(d, w) - 1;
    return below(d, w);
  };
  return scenario_feasible(set, w, mover, delta, offset);
}

}  // namespace

// ---------------------------------------------------------------------------

std::string_view to_string(MetricKind k) {
  switch (k) {
    case MetricKind::L1:
      return "l1";
    case MetricKind::LInf:
      return "linf";
    case MetricKind::Multiplicative:
      return "multiplicative";
    case MetricKind::EarthMover:
      return "earth_mover";
  }
  return "?";
}

MetricKind parse_metric(std::string_view text) {
  if (text == "l1") return MetricKind::L1;
  if (text == "linf") return MetricKind::LInf;
  if (text == "multiplicative" || text == "mult") return MetricKind::Multiplicative;
  if (text == "earth_mover" || text == "em") return MetricKind::EarthMover;
  throw std::invalid_argument(fmt::format("unknown metric '{}'", text));
}

Radius Radius::parse(std::string_view text) {
  Radius out;
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    out = {parse_int(text.substr(0, slash), "radius"), parse_int(text.substr(slash + 1), "radius")};
  } else if (auto dot = text.find('.'); dot != std::string_view::npos) {
    const std::string_view whole = text.substr(0, dot);
    const std::string_view frac = text.substr(dot + 1);
    if (frac.empty() || frac.size() > 12) throw std::invalid_argument(fmt::format("invalid radius '{}'", text));
    i64 den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    const i64 w = whole.empty() ? 0 : parse_int(whole, "radius");
    out = {w * den + parse_int(frac, "radius"), den};
  } else {
    out = {parse_int(text, "radius"), 1};
  }
  if (out.den <= 0 || out.num < 0) throw std::invalid_argument(fmt::format("invalid radius '{}'", text));
  return out.normalized();
}

Radius Radius::normalized() const {
  const i64 g = std::gcd(num, den);
  return g == 0 ? Radius{0, 1} : Radius{num / g, den / g};
}

std::string to_string(const Radius& r) {
  const Radius n = r.normalized();
  return n.den == 1 ? std::to_string(n.num) : fmt::format("{}/{}", n.num, n.den);
}

void DistanceMetric::validate() const {
  if (radius.den <= 0 || radius.num < 0) throw std::invalid_argument("radius must be nonnegative");
  if (kind != MetricKind::Multiplicative && !radius.normalized().is_integer()) {
    throw std::invalid_argument(fmt::format("{} radius must be an integer", to_string(kind)));
  }
}

bool AccessibleStateSet::contains(const ScoreVector& s) const {
  if (s.size() != base.size()) return false;
  const Radius r = metric.radius;
  i64 up = 0;
  i64 down = 0;
  i64 widest = 0;
  for (Candidate c = 0; c < s.size(); ++c) {
    if (s[c] < 0) return false;
    const i64 diff = static_cast<i64>(s[c]) - base[c];
    if (diff > 0) up += diff; else down -= diff;
    widest = std::max(widest, std::abs(diff));
    if (metric.kind == MetricKind::Multiplicative) {
      if (s[c] * r.den > base[c] * (r.den + r.num)) return false;
      if (base[c] * r.den > s[c] * (r.den + r.num)) return false;
    }
  }
  switch (metric.kind) {
    case MetricKind::L1:
      return up + down <= r.num;
    case MetricKind::LInf:
      return widest <= r.num;
    case MetricKind::Multiplicative:
      return true;
    case MetricKind::EarthMover:
      return up == down && up <= r.num;
  }
  return false;
}

AccessibleStateSet accessible_set(const BallotProfile& ballots, int m, int voter, DistanceMetric metric) {
  return AccessibleStateSet{tally_without(ballots, m, voter), metric};
}

EnumerationBudgetError::EnumerationBudgetError(std::uint64_t estimate, std::uint64_t budget)
    : std::runtime_error(fmt::format("accessible state set has about {} states, budget is {}", estimate, budget)),
      estimate_(estimate) {}

std::uint64_t estimate_accessible_states(const AccessibleStateSet& set) {
  set.metric.validate();
  const auto counts = set.base.counts();
  if (is_box(set.metric.kind)) {
    i64 total = 1;
    for (int s : counts) {
      const Interval b = box_bounds(set.metric, s);
      total = sat_mul(total, b.hi - b.lo + 1);
    }
    return static_cast<std::uint64_t>(total);
  }
  const i64 r = set.metric.radius.num;
  return static_cast<std::uint64_t>(count_l1_ball(counts, set.metric.kind == MetricKind::L1 ? r : 2 * r));
}

std::vector<ScoreVector> accessible_states_enumerate(const AccessibleStateSet& set, std::uint64_t budget) {
  const std::uint64_t estimate = estimate_accessible_states(set);
  if (estimate > budget) throw EnumerationBudgetError(estimate, budget);

  const ScoreVector& base = set.base;
  const int m = base.size();
  const i64 r = set.metric.radius.num;
  std::vector<ScoreVector> out;
  out.reserve(static_cast<std::size_t>(estimate));
  ScoreVector cur(m);

  // up/down: total raised/lowered so far.
  auto rec = [&](auto&& self, int c, i64 up, i64 down) -> void {
    if (c == m) {
      if (set.metric.kind == MetricKind::EarthMover && up != down) return;
      out.push_back(cur);
      return;
    }
    i64 lo = 0;
    i64 hi = 0;
    switch (set.metric.kind) {
      case MetricKind::L1:
        lo = std::max<i64>(0, base[c] - (r - up - down));
        hi = base[c] + (r - up - down);
        break;
      case MetricKind::EarthMover:
        lo = std::max<i64>(0, base[c] - (r - down));
        hi = base[c] + (r - up);
        break;
      default: {
        const Interval b = box_bounds(set.metric, base[c]);
        lo = b.lo;
        hi = b.hi;
      }
    }
    for (i64 v = lo; v <= hi; ++v) {
      cur[c] = static_cast<int>(v);
      const i64 diff = v - base[c];
      self(self, c + 1, up + std::max<i64>(0, diff), down + std::max<i64>(0, -diff));
    }
  };
  rec(rec, 0, 0, 0);
  return out;
}

bool s_beats(const PreferenceOrder& prefs, const AccessibleStateSet& set, Action b, Action a) {
  if (b == a) return false;
  const int m = set.base.size();
  if (b.is_vote() && a.is_vote() && prefs.prefers(b.candidate(), a.candidate()) &&
      both_pivotal(set, b.candidate(), a.candidate())) {
    return true;
  }
  // b pivots to win over the state's leader w, which a leaves in place.
  if (b.is_vote()) {
    const Candidate bc = b.candidate();
    for (Candidate w = 0; w < m; ++w) {
      if (w == bc || (a.is_vote() && w == a.candidate())) continue;
      if (prefs.prefers(bc, w) && mover_takes_from(set, w, bc, a)) return true;
    }
  }
  // a pivots and displaces a leader w that b would have kept.
  if (a.is_vote()) {
    const Candidate ac = a.candidate();
    for (Candidate w = 0; w < m; ++w) {
      if (w == ac || (b.is_vote() && w == b.candidate())) continue;
      if (prefs.prefers(w, ac) && mover_takes_from(set, w, ac, b)) return true;
    }
  }
  return false;
}

bool s_dominates(const PreferenceOrder& prefs, const AccessibleStateSet& set, Action b, Action a) {
  return s_beats(prefs, set, b, a) && !s_beats(prefs, set, a, b);
}

std::int64_t threshold_beta(MetricKind metric, Radius r, std::int64_t winner_score) {
  DistanceMetric{metric, r}.validate();
  r = r.normalized();
  switch (metric) {
    case MetricKind::L1:
      return winner_score - r.num - 1;
    case MetricKind::LInf:
      return winner_score - 2 * r.num - 1;
    case MetricKind::Multiplicative: {
      const i64 once = ceil_div(winner_score * r.den, r.den + r.num);
      return ceil_div(once * r.den, r.den + r.num) - 1;
    }
    case MetricKind::EarthMover:
      break;
  }
  throw UnsupportedMetricError("earth mover distance has no winner-score threshold");
}

std::vector<Candidate> possible_winners(const AccessibleStateSet& set) {
  set.metric.validate();
  const ScoreVector& s = set.base;
  const int m = s.size();
  const Candidate leader = plurality_winner(s);
  std::vector<Candidate> out;

  switch (set.metric.kind) {
    case MetricKind::L1:
    case MetricKind::LInf: {
      // Ties at the threshold are broken as if against the leader.
      const i64 beta = threshold_beta(set.metric.kind, set.metric.radius, s[leader]);
      for (Candidate c = 0; c < m; ++c) {
        if (c == leader || priority_key(c, s[c], m) > priority_key(leader, beta, m)) out.push_back(c);
      }
      break;
    }
    case MetricKind::Multiplicative: {
      // The nested-ceiling threshold is not tie-exact here: c at its ceiling
      // must clear every rival at its floor, and those floors can reorder ties.
      for (Candidate c = 0; c < m; ++c) {
        const i64 top = priority_key(c, box_bounds(set.metric, s[c]).hi + 1, m);
        bool wins = true;
        for (Candidate d = 0; d < m && wins; ++d) {
          if (d != c && priority_key(d, box_bounds(set.metric, s[d]).lo, m) > top) wins = false;
        }
        if (wins) out.push_back(c);
      }
      break;
    }
    case MetricKind::EarthMover: {
      const i64 r = set.metric.radius.num;
      for (Candidate c = 0; c < m; ++c) {
        ScoreVector cur = s;
        for (i64 moved = 0;; ++moved) {
          Candidate rival = -1;
          for (Candidate d = 0; d < m; ++d) {
            if (d != c && (rival < 0 || cur.beats(d, rival))) rival = d;
          }
          if (rival < 0 || cur.beats(c, rival, 1, 0)) {
            out.push_back(c);
            break;
          }
          if (moved == r || cur[rival] == 0) break;
          --cur[rival];
          ++cur[c];
        }
      }
      break;
    }
  }
  return out;
}

std::vector<Candidate> possible_winners(const BallotProfile& ballots, int m, int voter, DistanceMetric metric) {
  return possible_winners(accessible_set(ballots, m, voter, metric));
}

std::string_view to_string(Bias b) {
  switch (b) {
    case Bias::None:
      return "none";
    case Bias::Truth:
      return "truth";
    case Bias::Lazy:
      return "lazy";
  }
  return "?";
}

Bias parse_bias(std::string_view text) {
  if (text == "none") return Bias::None;
  if (text == "truth") return Bias::Truth;
  if (text == "lazy") return Bias::Lazy;
  throw std::invalid_argument(fmt::format("unknown bias '{}'", text));
}

void VoterType::validate() const {
  response_metric().validate();
  if (bias == Bias::None) {
    if (k) throw std::invalid_argument("keep radius k is only meaningful for biased voters");
    return;
  }
  if (!k) throw std::invalid_argument("biased voters need a keep radius k");
  DistanceMetric{metric, *k}.validate();
  if (!(*k > r)) throw std::invalid_argument("keep radius k must exceed response radius r");
}

std::vector<Candidate> dominating_set(const PreferenceProfile& profile, const BallotProfile& ballots, int voter,
                                      const VoterType& type) {
  const int m = profile.num_candidates();
  const AccessibleStateSet set = accessible_set(ballots, m, voter, type.response_metric());
  const PreferenceOrder& prefs = profile.order(voter);
  const Action current = ballots[voter];
  std::vector<Candidate> out;
  for (Candidate c = 0; c < m; ++c) {
    const Action cand = Action::vote(c);
    if (cand != current && s_dominates(prefs, set, cand, current)) out.push_back(c);
  }
  return out;
}

std::optional<Action> strategic_response(const PreferenceProfile& profile, const BallotProfile& ballots, int voter,
                                         const VoterType& type) {
  if (type.bias != Bias::None) throw std::invalid_argument("strategic_response needs a bias-free voter");
  const int m = profile.num_candidates();
  const AccessibleStateSet set = accessible_set(ballots, m, voter, type.response_metric());
  const std::vector<Candidate> winners = possible_winners(set);
  // With a single possible winner every action yields the same outcome.
  if (winners.size() <= 1) return std::nullopt;

  const PreferenceOrder& prefs = profile.order(voter);
  const Action current = ballots[voter];
  const bool current_can_win =
      current.is_vote() && std::binary_search(winners.begin(), winners.end(), current.candidate());
  for (Candidate c : prefs.ranking()) {
    const Action cand = Action::vote(c);
    if (cand == current) continue;
    // Switching between two non-possible-winners never changes an outcome, so
    // only possible winners can dominate a vote that cannot win itself.
    if (!current_can_win && !std::binary_search(winners.begin(), winners.end(), c)) continue;
    if (s_dominates(prefs, set, cand, current)) return cand;
  }
  return std::nullopt;
}

std::optional<Response> biased_response(const PreferenceProfile& profile, const BallotProfile& ballots, int voter,
                                        const VoterType& type) {
  if (type.bias == Bias::None || !type.k) throw std::invalid_argument("biased_response needs a biased voter with k");
  VoterType plain = type;
  plain.bias = Bias::None;
  plain.k.reset();
  if (auto move = strategic_response(profile, ballots, voter, plain)) return Response{*move, false};

  const PreferenceOrder& prefs = profile.order(voter);
  const Action current = ballots[voter];
  const Action fallback = type.bias == Bias::Truth ? Action::vote(prefs.top()) : Action::abstain();
  if (current == fallback) return std::nullopt;
  const AccessibleStateSet keep = accessible_set(ballots, profile.num_candidates(), voter, {type.metric, *type.k});
  if (s_beats(prefs, keep, current, fallback)) return std::nullopt;
  return Response{fallback, true};
}

std::optional<Response> respond(const PreferenceProfile& profile, const BallotProfile& ballots, int voter,
                                const VoterType& type) {
  if (type.bias != Bias::None) return biased_response(profile, ballots, voter, type);
  if (auto move = strategic_response(profile, ballots, voter, type)) return Response{*move, false};
  return std::nullopt;
}

std::string_view to_string(StepType t) {
  switch (t) {
    case StepType::Type1:
      return "type1";
    case StepType::Type2:
      return "type2";
    case StepType::BiasMove:
      return "bias";
  }
  return "?";
}

StepType classify_step(const PreferenceOrder& prefs, Action from, Action to) {
  if (from == to) throw std::invalid_argument("a step must change the vote");
  if (from.is_abstain()) return StepType::Type2;
  if (to.is_abstain()) return StepType::Type1;
  return prefs.prefers(to.candidate(), from.candidate()) ? StepType::Type2 : StepType::Type1;
}

}  // namespace ldv
