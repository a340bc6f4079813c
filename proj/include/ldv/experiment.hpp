#pragma once

// Batch runs over the configured grid and their CSV serialization.

#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ldv/config.hpp"
#include "ldv/metrics.hpp"
#include "ldv/prefgen.hpp"

namespace ldv {

// Independent 64-bit stream seed for a path such as (cell, profile, rep).
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

struct CellSpec {
  int index = 0;
  int n = 0;
  int m = 0;
  // Index of (n, m) in the grid; profiles are shared by cells with the same one.
  int size_index = 0;
  // Absent for diverse populations.
  std::optional<RadiusSpec> r;
};

std::vector<CellSpec> expand_cells(const ExperimentConfig& cfg);

// Whether a proved convergence result covers every run of the configuration.
bool convergence_guaranteed(const ExperimentConfig& cfg);

class NonConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CellResult {
  CellSpec cell;
  std::vector<ResultRow> rows;  // one per profile
};

struct ExperimentOutput {
  std::string distribution_label;
  std::vector<CellResult> cells;
};

// Throws NonConvergenceError when a run covered by a convergence result fails to converge.
ExperimentOutput run_experiment(const ExperimentConfig& cfg);

// Runs the r grid on one fixed profile; n and m in the config are ignored.
ExperimentOutput run_preflib(const ExperimentConfig& cfg, const PreflibData& data, const std::string& label);

// Mean over profiles. Optional fields average over profiles that have them;
// a gap is infinite if any profile's is.
ResultRow mean_row(const std::vector<ResultRow>& rows);

void write_csv(std::ostream& out, const ExperimentConfig& cfg, const ExperimentOutput& result);
// Writes to cfg.output_path.
void write_csv_file(const ExperimentConfig& cfg, const ExperimentOutput& result);

}  // namespace ldv
