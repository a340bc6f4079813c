#pragma once

// Seeded preference-profile generators and PrefLib strict-order ingestion.

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ldv/election.hpp"

namespace ldv {

// Per-candidate values in [0,1]; only Plackett-Luce profiles carry one.
struct GroundTruth {
  std::vector<double> values;

  // Descending value, ties toward the lower index.
  std::vector<Candidate> ranking() const;
  // 0-based position of c in ranking().
  int rank_of(Candidate c) const;
};

PreferenceProfile gen_impartial_culture(int n, int m, std::uint64_t seed);

struct SinglePeakedProfile {
  PreferenceProfile profile;
  std::vector<double> positions;  // per candidate
  std::vector<double> ideals;     // per voter
};

SinglePeakedProfile gen_single_peaked(int n, int m, std::uint64_t seed);

// Candidates by ascending position, ties toward the lower index.
std::vector<Candidate> axis_order(std::span<const double> positions);

// True iff every order, read from the bottom, peels endpoints off `axis`.
bool is_single_peaked(const PreferenceProfile& profile, std::span<const Candidate> axis);

// Top choice of the voter with the median ideal point (the lower median for even n).
Candidate median_voter_top(const SinglePeakedProfile& sp);

// Requires k in {2, 3} and m! >= k.
PreferenceProfile gen_urn(int n, int m, int k, std::uint64_t seed);

// Requires m >= 2.
PreferenceProfile gen_riffle(int n, int m, std::uint64_t seed);

struct PlackettLuceProfile {
  PreferenceProfile profile;
  GroundTruth truth;
};

inline constexpr double kMinPlackettLuceWeight = 1e-3;

PlackettLuceProfile gen_plackett_luce(int n, int m, std::uint64_t seed, double min_weight = kMinPlackettLuceWeight);

enum class Distribution { Impartial, SinglePeaked, Urn, Riffle, PlackettLuce };

std::string_view to_string(Distribution d);
Distribution parse_distribution(std::string_view text);

struct GeneratedProfile {
  PreferenceProfile profile;
  std::optional<GroundTruth> truth;
};

GeneratedProfile generate_profile(Distribution d, int n, int m, int urn_k, std::uint64_t seed);

class PreflibParseError : public std::runtime_error {
 public:
  PreflibParseError(int line, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

struct PreflibData {
  PreferenceProfile profile;
  std::vector<std::string> names;  // by 0-based candidate index
};

// Strict complete orders: "# NUMBER ALTERNATIVES: m" and optional
// "# ALTERNATIVE NAME i: ..." headers, then "<count>: <id>,<id>,..." lines
// with 1-based ids. Line numbers in errors are 1-based; 0 means whole file.
PreflibData parse_preflib(std::string_view text);
PreflibData load_preflib(const std::string& path);

}  // namespace ldv
