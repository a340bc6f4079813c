#pragma once

// Line-per-record JSON trace files: a header line, one line per step, a final line.

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "ldv/dominance.hpp"
#include "ldv/dynamics.hpp"

namespace ldv {

struct TraceHeader {
  int n = 0;
  int m = 0;
  DistanceMetric metric;
  Bias bias = Bias::None;
  bool homogeneous = true;
  bool truthful_start = true;
  bool singleton_scheduler = true;

  // Whether verify_trace_invariants applies to traces with this header.
  bool auditable() const {
    return homogeneous && truthful_start && singleton_scheduler && bias == Bias::None &&
           metric.kind != MetricKind::EarthMover;
  }
};

void write_trace(std::ostream& out, const TraceHeader& header, const Trace& trace);
// Throws std::runtime_error naming the offending line.
std::pair<TraceHeader, Trace> read_trace(std::istream& in);

struct TraceAudit {
  std::string file;
  bool audited = false;
  std::string note;  // why the file was skipped
  std::vector<std::string> violations;
};

// Audits every *.jsonl file in `dir`, sorted by name. Unreadable files are
// reported as audited with a violation.
std::vector<TraceAudit> verify_trace_dir(const std::string& dir);

}  // namespace ldv
