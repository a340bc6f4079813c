#pragma once

// Local dominance under strict (non-probabilistic) uncertainty.
//
// A voter i looks at the tally of everyone else, s_{-i}, and treats every
// score vector within distance r of it as possible. An action b "beats" a if
// some possible state makes the outcome with b strictly better for i than the
// outcome with a; b "dominates" a if b beats a and a does not beat b.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ldv/election.hpp"

namespace ldv {

enum class MetricKind { L1, LInf, Multiplicative, EarthMover };

std::string_view to_string(MetricKind k);
MetricKind parse_metric(std::string_view text);

// Nonnegative exact rational. Integer metrics require den == 1.
struct Radius {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Radius integer(std::int64_t v) { return Radius{v, 1}; }
  // Accepts "3", "1/50" or "0.3".
  static Radius parse(std::string_view text);

  bool is_integer() const { return den == 1; }
  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  Radius normalized() const;

  friend bool operator==(const Radius& a, const Radius& b) { return a.num * b.den == b.num * a.den; }
  friend bool operator<(const Radius& a, const Radius& b) { return a.num * b.den < b.num * a.den; }
  friend bool operator<=(const Radius& a, const Radius& b) { return !(b < a); }
  friend bool operator>(const Radius& a, const Radius& b) { return b < a; }
};

std::string to_string(const Radius& r);

struct DistanceMetric {
  MetricKind kind = MetricKind::L1;
  Radius radius;

  // Throws std::invalid_argument for negative or non-integer radii where disallowed.
  void validate() const;
};

// S_i(a, x): every score vector within `metric` of `base` (= s_{-i}).
struct AccessibleStateSet {
  ScoreVector base;
  DistanceMetric metric;

  bool contains(const ScoreVector& s) const;
};

AccessibleStateSet accessible_set(const BallotProfile& ballots, int m, int voter, DistanceMetric metric);

class EnumerationBudgetError : public std::runtime_error {
 public:
  EnumerationBudgetError(std::uint64_t estimate, std::uint64_t budget);
  std::uint64_t estimate() const { return estimate_; }

 private:
  std::uint64_t estimate_;
};

inline constexpr std::uint64_t kDefaultEnumerationBudget = 10'000'000;

// Lattice-point count of the set (exact for L1/LInf/Multiplicative, an upper bound for EarthMover).
std::uint64_t estimate_accessible_states(const AccessibleStateSet& set);

// Every integer state of the set exactly once, in lexicographic order.
std::vector<ScoreVector> accessible_states_enumerate(const AccessibleStateSet& set,
                                                     std::uint64_t budget = kDefaultEnumerationBudget);

bool s_beats(const PreferenceOrder& prefs, const AccessibleStateSet& set, Action b, Action a);
bool s_dominates(const PreferenceOrder& prefs, const AccessibleStateSet& set, Action b, Action a);

class UnsupportedMetricError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Minimum s_{-i} score making a candidate a possible winner, as a function of the
// leader's score. Not defined for EarthMover.
std::int64_t threshold_beta(MetricKind metric, Radius r, std::int64_t winner_score);

// W_i: candidates that win in some accessible state once i votes for them.
std::vector<Candidate> possible_winners(const AccessibleStateSet& set);
std::vector<Candidate> possible_winners(const BallotProfile& ballots, int m, int voter, DistanceMetric metric);

enum class Bias { None, Truth, Lazy };

std::string_view to_string(Bias b);
Bias parse_bias(std::string_view text);

struct VoterType {
  MetricKind metric = MetricKind::L1;
  Radius r;
  std::optional<Radius> k;
  Bias bias = Bias::None;

  DistanceMetric response_metric() const { return {metric, r}; }
  // bias != None requires k > r; bias == None requires k to be absent.
  void validate() const;

  bool operator==(const VoterType& o) const {
    return metric == o.metric && r == o.r && bias == o.bias && k.has_value() == o.k.has_value() &&
           (!k || *k == *o.k);
  }
};

std::vector<Candidate> dominating_set(const PreferenceProfile& profile, const BallotProfile& ballots, int voter,
                                      const VoterType& type);

// Most preferred member of the dominating set, if any. Requires bias == None.
std::optional<Action> strategic_response(const PreferenceProfile& profile, const BallotProfile& ballots, int voter,
                                         const VoterType& type);

struct Response {
  Action to;
  bool bias_move = false;
};

// Truth- or lazy-biased response. Requires bias != None.
std::optional<Response> biased_response(const PreferenceProfile& profile, const BallotProfile& ballots, int voter,
                                        const VoterType& type);

// Dispatches on type.bias.
std::optional<Response> respond(const PreferenceProfile& profile, const BallotProfile& ballots, int voter,
                                const VoterType& type);

enum class StepType { Type1, Type2, BiasMove };

std::string_view to_string(StepType t);

// Type1 (compromise) when the new vote is less preferred, Type2 (opportunity)
// when more preferred. Entering from abstention is Type2, abstaining is Type1.
StepType classify_step(const PreferenceOrder& prefs, Action from, Action to);

}  // namespace ldv
