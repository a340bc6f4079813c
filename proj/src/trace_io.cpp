#include "ldv/trace_io.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>

#include <fmt/format.h>
#include <json.hpp>

namespace ldv {

namespace {

using nlohmann::json;

json ballots_json(const BallotProfile& b) {
  json out = json::array();
  for (const Action& a : b.votes) out.push_back(a.raw());
  return out;
}

BallotProfile ballots_from(const json& j) {
  BallotProfile b;
  for (const auto& v : j) b.votes.push_back(Action::from_raw(v.get<int>()));
  return b;
}

json scores_json(const ScoreVector& s) { return json(std::vector<int>(s.counts().begin(), s.counts().end())); }

ScoreVector scores_from(const json& j) { return ScoreVector(j.get<std::vector<int>>()); }

StepType step_type_from(const std::string& s) {
  for (StepType t : {StepType::Type1, StepType::Type2, StepType::BiasMove}) {
    if (s == to_string(t)) return t;
  }
  throw std::runtime_error(fmt::format("unknown step type '{}'", s));
}

}  // namespace

void write_trace(std::ostream& out, const TraceHeader& h, const Trace& trace) {
  json head = {{"record", "header"},
               {"n", h.n},
               {"m", h.m},
               {"metric", to_string(h.metric.kind)},
               {"r", to_string(h.metric.radius)},
               {"bias", to_string(h.bias)},
               {"homogeneous", h.homogeneous},
               {"truthful_start", h.truthful_start},
               {"singleton_scheduler", h.singleton_scheduler},
               {"initial", ballots_json(trace.initial)}};
  out << head.dump() << '\n';
  for (const StepRecord& st : trace.steps) {
    json j = {{"record", "step"},
              {"time", st.time},
              {"voter", st.voter},
              {"from", st.from.raw()},
              {"to", st.to.raw()},
              {"type", to_string(st.type)},
              {"before", scores_json(st.scores_before)},
              {"after", scores_json(st.scores_after)}};
    out << j.dump() << '\n';
  }
  json fin = {{"record", "final"},
              {"converged", trace.converged},
              {"ticks", trace.ticks},
              {"singleton_ticks", trace.singleton_ticks},
              {"ballots", ballots_json(trace.final_state)}};
  out << fin.dump() << '\n';
}

std::pair<TraceHeader, Trace> read_trace(std::istream& in) {
  TraceHeader h;
  Trace trace;
  bool have_header = false;
  bool have_final = false;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      const std::string kind = j.at("record").get<std::string>();
      if (kind == "header") {
        h.n = j.at("n").get<int>();
        h.m = j.at("m").get<int>();
        h.metric = {parse_metric(j.at("metric").get<std::string>()), Radius::parse(j.at("r").get<std::string>())};
        h.bias = parse_bias(j.at("bias").get<std::string>());
        h.homogeneous = j.at("homogeneous").get<bool>();
        h.truthful_start = j.at("truthful_start").get<bool>();
        h.singleton_scheduler = j.at("singleton_scheduler").get<bool>();
        trace.initial = ballots_from(j.at("initial"));
        have_header = true;
      } else if (kind == "step") {
        trace.steps.push_back({j.at("time").get<int>(), j.at("voter").get<int>(),
                               Action::from_raw(j.at("from").get<int>()), Action::from_raw(j.at("to").get<int>()),
                               step_type_from(j.at("type").get<std::string>()), scores_from(j.at("before")),
                               scores_from(j.at("after"))});
      } else if (kind == "final") {
        trace.converged = j.at("converged").get<bool>();
        trace.ticks = j.at("ticks").get<int>();
        trace.singleton_ticks = j.at("singleton_ticks").get<int>();
        trace.final_state = ballots_from(j.at("ballots"));
        have_final = true;
      } else {
        throw std::runtime_error(fmt::format("unknown record '{}'", kind));
      }
    } catch (const std::exception& e) {
      throw std::runtime_error(fmt::format("line {}: {}", line_no, e.what()));
    }
  }
  if (!have_header) throw std::runtime_error("trace has no header record");
  if (!have_final) throw std::runtime_error("trace has no final record");
  return {h, trace};
}

std::vector<TraceAudit> verify_trace_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw std::runtime_error(fmt::format("'{}' is not a directory", dir));
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  std::vector<TraceAudit> out;
  for (const fs::path& p : files) {
    TraceAudit audit;
    audit.file = p.filename().string();
    try {
      std::ifstream in(p);
      auto [header, trace] = read_trace(in);
      if (!header.auditable()) {
        audit.note = header.metric.kind == MetricKind::EarthMover
                         ? "no invariants for earth-mover voters"
                         : "not a homogeneous truthful-start singleton run without bias";
      } else {
        audit.audited = true;
        audit.violations = verify_trace_invariants(trace, header.metric);
      }
    } catch (const std::exception& e) {
      audit.audited = true;
      audit.violations.push_back(fmt::format("unreadable trace: {}", e.what()));
    }
    out.push_back(std::move(audit));
  }
  return out;
}

}  // namespace ldv
