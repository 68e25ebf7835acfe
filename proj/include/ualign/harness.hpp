// Experiment orchestration: run solvers over (instance, k, l) grids, certify
// the resulting policies, and emit JSON reports and RFC-4180 CSV tables.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ualign/instances.hpp"
#include "ualign/solvers.hpp"

namespace ualign {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr const char* kCapEnvVar = "UALIGN_CAP";

struct ExperimentConfig {
  InstanceSpec instance;
  std::vector<int> k_values;
  std::vector<int> l_values = {1};
  SolverConfig solver;
  std::string out_path;  // JSON report; empty = don't write
  std::string csv_path;  // CSV table; empty = don't write
  std::uint64_t seed = 0;
  long long cap = kDefaultEnumerationCap;
};

struct ReportRow {
  std::string instance;
  int k = 0;
  int l = 0;
  std::string algorithm;
  double certified_rate = 0.0;
  double threshold = 0.0;
  double regret_per_t = 0.0;
  std::string witness;
  bool pass = false;
  std::uint64_t seed = 0;
  double wall_time_s = 0.0;
};

struct Report {
  int schema_version = kReportSchemaVersion;
  std::vector<ReportRow> rows;

  bool all_pass() const;
  std::string to_json_text() const;
  std::string to_csv_text() const;
  // Atomic: written to a temp file in the same directory, then renamed.
  void write_json(const std::string& path) const;
  void write_csv(const std::string& path) const;
};

const char* algorithm_name(Algorithm a);
Algorithm parse_algorithm(const std::string& name);

// Runs the configured solver for each (k, l) grid point, certifies, and
// writes the report files named in the config.
Report cmd_solve(const ExperimentConfig& config);

// Certifies an externally supplied policy file ({"probs": [...]}) as a k-fold
// product against size-l opponents.
Report cmd_certify(const std::string& policy_file, const InstanceSpec& instance,
                   int k, int l, long long cap = kDefaultEnumerationCap,
                   const std::string& out_path = "",
                   const std::string& csv_path = "");

// Fixed desk-scale verification presets. Valid targets: prop-2.2, prop-3.2,
// prop-3.3, prop-4.1, thm-4.3, prop-4.3, thm-4.4. Each writes
// <out_dir>/<target>.csv and <out_dir>/<target>.json.
Report cmd_reproduce(const std::string& target, const std::string& out_dir,
                     long long cap = kDefaultEnumerationCap);

// Certified-rate curves over the k grid and, when t_grid is nonempty, over
// iteration counts; CSV goes to config.csv_path.
Report cmd_sweep(const ExperimentConfig& config,
                 const std::vector<int>& t_grid = {});

}  // namespace ualign
