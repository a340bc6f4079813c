#include "ldv/prefgen.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace ldv {

namespace {

using Rng = std::mt19937_64;

std::vector<Candidate> identity(int m) {
  std::vector<Candidate> v(static_cast<std::size_t>(m));
  std::iota(v.begin(), v.end(), 0);
  return v;
}

std::vector<Candidate> uniform_order(int m, Rng& rng) {
  auto v = identity(m);
  std::shuffle(v.begin(), v.end(), rng);
  return v;
}

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

// m! capped at `cap`.
std::uint64_t factorial_capped(int m, std::uint64_t cap) {
  std::uint64_t f = 1;
  for (int i = 2; i <= m && f < cap; ++i) f *= static_cast<std::uint64_t>(i);
  return std::min(f, cap);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::optional<long> to_long(std::string_view s) {
  s = trim(s);
  long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

std::vector<Candidate> GroundTruth::ranking() const {
  auto order = identity(static_cast<int>(values.size()));
  std::stable_sort(order.begin(), order.end(), [&](Candidate a, Candidate b) { return values[a] > values[b]; });
  return order;
}

int GroundTruth::rank_of(Candidate c) const {
  const auto order = ranking();
  return static_cast<int>(std::find(order.begin(), order.end(), c) - order.begin());
}

PreferenceProfile gen_impartial_culture(int n, int m, std::uint64_t seed) {
  require(n >= 1 && m >= 1, "impartial culture needs n >= 1 and m >= 1");
  Rng rng(seed);
  std::vector<PreferenceOrder> orders;
  orders.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) orders.emplace_back(uniform_order(m, rng));
  return PreferenceProfile(m, std::move(orders));
}

SinglePeakedProfile gen_single_peaked(int n, int m, std::uint64_t seed) {
  require(n >= 1 && m >= 1, "single-peaked generation needs n >= 1 and m >= 1");
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SinglePeakedProfile out;
  for (int c = 0; c < m; ++c) out.positions.push_back(unit(rng));
  std::vector<PreferenceOrder> orders;
  for (int i = 0; i < n; ++i) {
    const double ideal = unit(rng);
    out.ideals.push_back(ideal);
    auto order = identity(m);
    std::stable_sort(order.begin(), order.end(), [&](Candidate a, Candidate b) {
      return std::abs(out.positions[a] - ideal) < std::abs(out.positions[b] - ideal);
    });
    orders.emplace_back(std::move(order));
  }
  out.profile = PreferenceProfile(m, std::move(orders));
  return out;
}

std::vector<Candidate> axis_order(std::span<const double> positions) {
  auto order = identity(static_cast<int>(positions.size()));
  std::stable_sort(order.begin(), order.end(), [&](Candidate a, Candidate b) { return positions[a] < positions[b]; });
  return order;
}

bool is_single_peaked(const PreferenceProfile& profile, std::span<const Candidate> axis) {
  const int m = profile.num_candidates();
  if (static_cast<int>(axis.size()) != m) return false;
  for (const PreferenceOrder& o : profile.orders()) {
    int lo = 0;
    int hi = m - 1;
    for (int pos = m - 1; pos > 0; --pos) {
      const Candidate c = o.at(pos);
      if (c == axis[lo]) {
        ++lo;
      } else if (c == axis[hi]) {
        --hi;
      } else {
        return false;
      }
    }
  }
  return true;
}

Candidate median_voter_top(const SinglePeakedProfile& sp) {
  const int n = sp.profile.num_voters();
  auto voters = identity(n);
  std::stable_sort(voters.begin(), voters.end(), [&](int a, int b) { return sp.ideals[a] < sp.ideals[b]; });
  return sp.profile.order(voters[(n - 1) / 2]).top();
}

PreferenceProfile gen_urn(int n, int m, int k, std::uint64_t seed) {
  require(n >= 1 && m >= 1, "urn generation needs n >= 1 and m >= 1");
  require(k == 2 || k == 3, "urn reference count must be 2 or 3");
  const std::uint64_t orders_total = factorial_capped(m, 1000);
  require(orders_total >= static_cast<std::uint64_t>(k), "urn needs at least k distinct orders (m! >= k)");
  Rng rng(seed);

  std::vector<std::vector<Candidate>> refs;
  while (static_cast<int>(refs.size()) < k) {
    auto o = uniform_order(m, rng);
    if (std::find(refs.begin(), refs.end(), o) == refs.end()) refs.push_back(std::move(o));
  }
  // With no order outside the references, the remainder mass falls back on them.
  const bool remainder_empty = orders_total == static_cast<std::uint64_t>(k);

  std::uniform_int_distribution<int> slot(0, k);
  std::vector<PreferenceOrder> orders;
  orders.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int s = slot(rng);
    if (s < k) {
      orders.emplace_back(refs[s]);
    } else if (remainder_empty) {
      orders.emplace_back(refs[std::uniform_int_distribution<int>(0, k - 1)(rng)]);
    } else {
      std::vector<Candidate> o;
      do {
        o = uniform_order(m, rng);
      } while (std::find(refs.begin(), refs.end(), o) != refs.end());
      orders.emplace_back(std::move(o));
    }
  }
  return PreferenceProfile(m, std::move(orders));
}

PreferenceProfile gen_riffle(int n, int m, std::uint64_t seed) {
  require(n >= 1 && m >= 2, "riffle generation needs n >= 1 and m >= 2");
  Rng rng(seed);
  // A uniform shuffle yields a uniform split and uniform orders within each half.
  const auto shuffled = uniform_order(m, rng);
  const int h1 = m / 2;
  std::vector<bool> slots(static_cast<std::size_t>(m), false);
  std::fill(slots.begin(), slots.begin() + h1, true);

  std::vector<PreferenceOrder> orders;
  orders.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::shuffle(slots.begin(), slots.end(), rng);
    std::vector<Candidate> o;
    o.reserve(static_cast<std::size_t>(m));
    int a = 0;
    int b = h1;
    for (bool first_half : slots) o.push_back(first_half ? shuffled[a++] : shuffled[b++]);
    orders.emplace_back(std::move(o));
  }
  return PreferenceProfile(m, std::move(orders));
}

PlackettLuceProfile gen_plackett_luce(int n, int m, std::uint64_t seed, double min_weight) {
  require(n >= 1 && m >= 1, "Plackett-Luce generation needs n >= 1 and m >= 1");
  require(min_weight > 0.0, "Plackett-Luce weight floor must be positive");
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  PlackettLuceProfile out;
  for (int c = 0; c < m; ++c) out.truth.values.push_back(unit(rng));
  std::vector<double> weight(out.truth.values);
  for (double& w : weight) w = std::max(w, min_weight);

  std::vector<PreferenceOrder> orders;
  orders.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto remaining = identity(m);
    std::vector<Candidate> o;
    o.reserve(static_cast<std::size_t>(m));
    while (!remaining.empty()) {
      double total = 0.0;
      for (Candidate c : remaining) total += weight[c];
      double u = unit(rng) * total;
      std::size_t pick = remaining.size() - 1;
      for (std::size_t j = 0; j < remaining.size(); ++j) {
        u -= weight[remaining[j]];
        if (u < 0.0) {
          pick = j;
          break;
        }
      }
      o.push_back(remaining[pick]);
      remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    orders.emplace_back(std::move(o));
  }
  out.profile = PreferenceProfile(m, std::move(orders));
  return out;
}

std::string_view to_string(Distribution d) {
  switch (d) {
    case Distribution::Impartial:
      return "impartial";
    case Distribution::SinglePeaked:
      return "single_peaked";
    case Distribution::Urn:
      return "urn";
    case Distribution::Riffle:
      return "riffle";
    case Distribution::PlackettLuce:
      return "plackett_luce";
  }
  return "?";
}

Distribution parse_distribution(std::string_view text) {
  for (Distribution d : {Distribution::Impartial, Distribution::SinglePeaked, Distribution::Urn, Distribution::Riffle,
                         Distribution::PlackettLuce}) {
    if (text == to_string(d)) return d;
  }
  throw std::invalid_argument(fmt::format("unknown distribution '{}'", text));
}

GeneratedProfile generate_profile(Distribution d, int n, int m, int urn_k, std::uint64_t seed) {
  switch (d) {
    case Distribution::Impartial:
      return {gen_impartial_culture(n, m, seed), std::nullopt};
    case Distribution::SinglePeaked:
      return {gen_single_peaked(n, m, seed).profile, std::nullopt};
    case Distribution::Urn:
      return {gen_urn(n, m, urn_k, seed), std::nullopt};
    case Distribution::Riffle:
      return {gen_riffle(n, m, seed), std::nullopt};
    case Distribution::PlackettLuce: {
      auto pl = gen_plackett_luce(n, m, seed);
      return {std::move(pl.profile), std::move(pl.truth)};
    }
  }
  throw std::invalid_argument("unknown distribution");
}

PreflibParseError::PreflibParseError(int line, const std::string& what)
    : std::runtime_error(line > 0 ? fmt::format("line {}: {}", line, what) : what), line_(line) {}

PreflibData parse_preflib(std::string_view text) {
  int m = -1;
  std::vector<std::string> names;
  std::vector<PreferenceOrder> orders;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find('\n', start), text.size());
    const std::string_view line = trim(text.substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (line.empty()) continue;

    if (line.front() == '#') {
      const std::string_view body = trim(line.substr(1));
      const auto colon = body.find(':');
      if (colon == std::string_view::npos) continue;
      const std::string_view key = trim(body.substr(0, colon));
      const std::string_view value = trim(body.substr(colon + 1));
      if (key == "NUMBER ALTERNATIVES") {
        const auto v = to_long(value);
        if (!v || *v < 1) throw PreflibParseError(line_no, "invalid alternative count");
        if (!orders.empty()) throw PreflibParseError(line_no, "alternative count declared after data");
        m = static_cast<int>(*v);
        names.assign(static_cast<std::size_t>(m), std::string());
        for (int c = 0; c < m; ++c) names[c] = std::to_string(c + 1);
      } else if (key.rfind("ALTERNATIVE NAME", 0) == 0) {
        const auto id = to_long(key.substr(std::string_view("ALTERNATIVE NAME").size()));
        if (m < 0) throw PreflibParseError(line_no, "alternative name before the alternative count");
        if (!id || *id < 1 || *id > m) throw PreflibParseError(line_no, "alternative name for unknown id");
        names[*id - 1] = std::string(value);
      }
      continue;
    }

    if (m < 0) throw PreflibParseError(line_no, "data line before '# NUMBER ALTERNATIVES' header");
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) throw PreflibParseError(line_no, "malformed line, expected '<count>: <order>'");
    const auto count = to_long(line.substr(0, colon));
    if (!count || *count < 1) throw PreflibParseError(line_no, "malformed voter count");
    const std::string_view rest = line.substr(colon + 1);
    if (rest.find('{') != std::string_view::npos) throw PreflibParseError(line_no, "tied orders are not supported");

    std::vector<Candidate> ranking;
    std::vector<bool> seen(static_cast<std::size_t>(m), false);
    std::size_t p = 0;
    while (p <= rest.size()) {
      const std::size_t q = std::min(rest.find(',', p), rest.size());
      const auto id = to_long(rest.substr(p, q - p));
      p = q + 1;
      if (!id) throw PreflibParseError(line_no, "malformed candidate id");
      if (*id < 1 || *id > m) throw PreflibParseError(line_no, fmt::format("unknown candidate id {}", *id));
      if (seen[*id - 1]) throw PreflibParseError(line_no, fmt::format("duplicate candidate id {}", *id));
      seen[*id - 1] = true;
      ranking.push_back(static_cast<Candidate>(*id - 1));
    }
    if (static_cast<int>(ranking.size()) != m) {
      throw PreflibParseError(line_no, fmt::format("incomplete order: {} of {} candidates", ranking.size(), m));
    }
    const PreferenceOrder order(std::move(ranking));
    for (long v = 0; v < *count; ++v) orders.push_back(order);
  }
  if (m < 0) throw PreflibParseError(0, "missing '# NUMBER ALTERNATIVES' header");
  if (orders.empty()) throw PreflibParseError(0, "profile has no voters");
  return {PreferenceProfile(m, std::move(orders)), std::move(names)};
}

PreflibData load_preflib(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", path));
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_preflib(buf.str());
}

}  // namespace ldv
