#pragma once

// Seeded experiment suites with machine-readable reports. Reports are
// deterministic: the same config yields byte-identical output regardless of
// the job count.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "otpsim/qsim.hpp"

namespace otpsim {

struct ExperimentConfig {
  std::string suite = "all";
  std::uint64_t seed = 0;
  std::string out_path;  // empty writes to stdout
  std::string format = "json";
  int jobs = 1;
  int n = 0;       // per-suite width override, 0 keeps the default
  int trials = 0;  // per-suite trial override, 0 keeps the default
};

struct ResultRecord {
  std::string suite;
  std::string check_name;
  std::string paper_anchor;
  double measured = 0.0;
  double bound = 0.0;
  bool pass = false;
  long long runtime_ms = 0;  // serialized as 0 to keep reports deterministic
};

struct CheckOutcome {
  double measured = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct CheckDef {
  std::string suite;
  std::string name;
  std::string anchor;
  std::function<CheckOutcome(Rng&, const ExperimentConfig&)> fn;
};

const std::vector<CheckDef>& check_registry();

// Deterministic per-check stream: FNV-1a over "suite/check" mixed with the
// seed.
std::uint64_t check_seed(const std::string& suite, const std::string& name,
                         std::uint64_t seed);

// Runs the configured suite ("all" for every suite); records are sorted by
// (suite, check_name) independent of scheduling.
std::vector<ResultRecord> run_suite(const ExperimentConfig& config);

std::string render_json(const std::vector<ResultRecord>& records);
std::string render_csv(const std::vector<ResultRecord>& records);

// Full command-line entry point. Returns 0 when all checks pass, 1 when any
// fails, 2 on configuration errors.
int cli_main(int argc, char** argv);

}  // namespace otpsim
