// Batch simulator for iterative Plurality voting with local-dominance voters.

#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "ldv/config.hpp"
#include "ldv/experiment.hpp"
#include "ldv/prefgen.hpp"
#include "ldv/trace_io.hpp"

namespace {

constexpr int kExitError = 1;
constexpr int kExitNonConvergence = 2;
constexpr int kExitViolations = 3;

int cmd_run(const std::string& config_path) {
  const ldv::ExperimentConfig cfg = ldv::load_config(config_path);
  const ldv::ExperimentOutput out = ldv::run_experiment(cfg);
  ldv::write_csv_file(cfg, out);
  std::cerr << fmt::format("wrote {} cells to {}\n", out.cells.size(), cfg.output_path);
  return 0;
}

int cmd_preflib(const std::string& config_path, const std::string& profile_path) {
  const ldv::ExperimentConfig cfg = ldv::load_config(config_path, ldv::ConfigMode::Preflib);
  const ldv::PreflibData data = ldv::load_preflib(profile_path);
  const std::string label = std::filesystem::path(profile_path).filename().string();
  const ldv::ExperimentOutput out = ldv::run_preflib(cfg, data, label);
  ldv::write_csv_file(cfg, out);
  std::cerr << fmt::format("{}: {} voters, {} candidates; wrote {} cells to {}\n", label,
                           data.profile.num_voters(), data.profile.num_candidates(), out.cells.size(),
                           cfg.output_path);
  return 0;
}

int cmd_verify(const std::string& dir) {
  const auto audits = ldv::verify_trace_dir(dir);
  int audited = 0;
  int failed = 0;
  for (const auto& a : audits) {
    if (!a.audited) {
      std::cout << fmt::format("SKIP {}: {}\n", a.file, a.note);
      continue;
    }
    ++audited;
    if (a.violations.empty()) {
      std::cout << fmt::format("OK   {}\n", a.file);
      continue;
    }
    ++failed;
    std::cout << fmt::format("FAIL {}\n", a.file);
    for (const auto& v : a.violations) std::cout << "     " << v << '\n';
  }
  std::cout << fmt::format("{} traces, {} audited, {} with violations\n", audits.size(), audited, failed);
  return failed == 0 ? 0 : kExitViolations;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Iterative Plurality voting simulator with local-dominance voters"};
  app.require_subcommand(1);

  std::string config_path;
  std::string profile_path;
  std::string trace_dir;

  auto* run = app.add_subcommand("run", "Run the configured experiment grid and write CSV");
  run->add_option("config", config_path, "YAML experiment configuration")->required()->check(CLI::ExistingFile);

  auto* preflib = app.add_subcommand("preflib", "Run the configured radius sweep on a PrefLib strict-order profile");
  preflib->add_option("config", config_path, "YAML experiment configuration")->required()->check(CLI::ExistingFile);
  preflib->add_option("profile", profile_path, "PrefLib .soc file")->required()->check(CLI::ExistingFile);

  auto* verify = app.add_subcommand("verify", "Audit dumped traces against the convergence invariants");
  verify->add_option("trace-dir", trace_dir, "Directory of .jsonl traces")->required()->check(CLI::ExistingDirectory);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config_path);
    if (*preflib) return cmd_preflib(config_path, profile_path);
    if (*verify) return cmd_verify(trace_dir);
  } catch (const ldv::NonConvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNonConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
