// Command-line front end: solve / certify / reproduce / sweep.
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ualign/harness.hpp"

namespace {

long long default_cap() {
  if (const char* env = std::getenv(ualign::kCapEnvVar)) {
    try {
      return std::stoll(env);
    } catch (const std::exception&) {
      std::cerr << "warning: ignoring invalid " << ualign::kCapEnvVar << "="
                << env << "\n";
    }
  }
  return ualign::kDefaultEnumerationCap;
}

void print_summary(const ualign::Report& report) {
  for (const auto& row : report.rows) {
    std::cout << (row.pass ? "[PASS] " : "[FAIL] ") << row.instance
              << " k=" << row.k << " l=" << row.l << " algo=" << row.algorithm
              << " rate=" << row.certified_rate
              << " threshold=" << row.threshold;
    if (row.regret_per_t != 0.0) std::cout << " reg/T=" << row.regret_per_t;
    if (!row.witness.empty()) std::cout << " witness=" << row.witness;
    std::cout << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"alignment-game solver and win-rate certifier"};
  app.require_subcommand(1);

  ualign::ExperimentConfig config;
  config.cap = default_cap();
  std::string instance_text = "condorcet-cycle";
  std::string algo_text = "mwu";
  std::vector<int> iters_grid;
  std::string policy_file;
  std::string target;
  std::string out_path;
  std::string csv_path;
  int certify_k = 1, certify_l = 1;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--instance", instance_text,
                    "instance spec, e.g. majority:0.1, uniform-pl:2, "
                    "uniform-rankings:4, condorcet-cycle, custom:model.json");
    cmd->add_option("--seed", config.seed, "base RNG seed");
    cmd->add_option("--cap", config.cap, "enumeration term cap");
    cmd->add_option("--out", out_path, "JSON report output path");
    cmd->add_option("--csv", csv_path, "CSV table output path");
  };

  CLI::App* solve = app.add_subcommand("solve", "solve and certify per (k, l)");
  add_common(solve);
  solve->add_option("--k", config.k_values, "model sample counts")->delimiter(',');
  solve->add_option("--l", config.l_values, "opponent sample counts")->delimiter(',');
  solve->add_option("--algo", algo_text, "mwu | projected-gradient | lp-nlhf");
  solve->add_option("--iters", config.solver.iterations, "solver iterations");
  solve->add_option("--eta", config.solver.eta, "step size (<= 0 = auto)");

  CLI::App* certify = app.add_subcommand("certify", "certify a policy file");
  add_common(certify);
  certify->add_option("--policy", policy_file, "policy JSON ({\"probs\": [...]})")
      ->required();
  certify->add_option("--k", certify_k, "model sample count");
  certify->add_option("--l", certify_l, "opponent sample count");

  CLI::App* reproduce =
      app.add_subcommand("reproduce", "run a built-in verification preset");
  reproduce->add_option("--target", target,
                        "prop-2.2 | prop-3.2 | prop-3.3 | prop-4.1 | thm-4.3 | "
                        "prop-4.3 | thm-4.4")
      ->required();
  reproduce->add_option("--out", out_path, "output directory for CSV + JSON");
  reproduce->add_option("--cap", config.cap, "enumeration term cap");

  CLI::App* sweep = app.add_subcommand("sweep", "certified-rate curves as CSV");
  add_common(sweep);
  sweep->add_option("--k", config.k_values, "model sample counts")->delimiter(',');
  sweep->add_option("--l", config.l_values, "opponent sample counts")->delimiter(',');
  sweep->add_option("--algo", algo_text, "mwu | projected-gradient | lp-nlhf");
  sweep->add_option("--iters", iters_grid, "iteration grid")->delimiter(',');
  sweep->add_option("--eta", config.solver.eta, "step size (<= 0 = auto)");

  CLI11_PARSE(app, argc, argv);

  try {
    ualign::Report report;
    if (solve->parsed()) {
      config.instance = ualign::InstanceSpec::parse(instance_text);
      config.solver.algorithm = ualign::parse_algorithm(algo_text);
      config.out_path = out_path;
      config.csv_path = csv_path;
      report = ualign::cmd_solve(config);
    } else if (certify->parsed()) {
      report = ualign::cmd_certify(policy_file,
                                   ualign::InstanceSpec::parse(instance_text),
                                   certify_k, certify_l, config.cap, out_path,
                                   csv_path);
    } else if (reproduce->parsed()) {
      report = ualign::cmd_reproduce(target, out_path, config.cap);
    } else {
      config.instance = ualign::InstanceSpec::parse(instance_text);
      config.solver.algorithm = ualign::parse_algorithm(algo_text);
      config.out_path = out_path;
      config.csv_path = csv_path;
      report = ualign::cmd_sweep(config, iters_grid);
    }
    print_summary(report);
    return report.all_pass() ? 0 : 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
