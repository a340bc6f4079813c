#pragma once

// Experiment configuration: a flat YAML map of scalar or list values.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ldv/dominance.hpp"
#include "ldv/dynamics.hpp"
#include "ldv/prefgen.hpp"

namespace ldv {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what);
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

// A response radius on the grid; "max" resolves to the voter count.
struct RadiusSpec {
  bool is_max = false;
  Radius value;

  Radius resolve(int n) const { return is_max ? Radius::integer(n) : value; }
  std::string label() const;
};

// Keep radius as a function of r: scale*r + offset ("r+1", "2r+1", "3").
struct KeepRule {
  std::int64_t scale = 0;
  Radius offset;

  static KeepRule parse(std::string_view text);
  Radius apply(Radius r) const;
  std::string label() const;
};

enum class InitialState { Truthful, Random };

std::string_view to_string(InitialState s);

struct ExperimentConfig {
  std::vector<int> n_values;
  std::vector<int> m_values;
  std::optional<Distribution> distribution;
  int urn_k = 2;
  MetricKind metric = MetricKind::L1;
  std::vector<RadiusSpec> r_values;
  std::optional<KeepRule> k;
  Bias bias = Bias::None;
  // Per-run, per-voter radii drawn from {0, ..., floor(n/m)}; replaces the r grid.
  bool diverse = false;
  Scheduler scheduler;
  InitialState initial_state = InitialState::Truthful;
  int profiles_per_cell = 200;
  int repetitions = 100;
  std::uint64_t master_seed = 0;
  std::string output_path = "results.csv";
  // Tick cap per run; unset means 10*n*m.
  std::optional<int> max_steps;
  // 0 means one per hardware thread.
  int threads = 1;
  // Empty disables trace dumps.
  std::string trace_dir;
};

enum class ConfigMode {
  Generated,  // n, m and distribution are required
  Preflib,    // the profile file supplies voters and candidates
};

ExperimentConfig parse_config(std::string_view yaml_text, ConfigMode mode = ConfigMode::Generated);
ExperimentConfig load_config(const std::string& path, ConfigMode mode = ConfigMode::Generated);

// Re-checks every cross-key constraint for the given voter and candidate counts.
void validate_for(const ExperimentConfig& cfg, int n, int m);

}  // namespace ldv
