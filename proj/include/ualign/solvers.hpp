// Equilibrium solvers for the alignment games: multiplicative-weights
// self-play and projected gradient ascent on the (k+1)-player game, an exact
// LP route for the two-player (k=1) game, the KL-regularized closed form,
// and win-rate certification of the resulting policies.
#pragma once

#include <cstdint>
#include <vector>

#include "ualign/preference.hpp"
#include "ualign/types.hpp"
#include "ualign/winrate.hpp"

namespace ualign {

enum class Algorithm { mwu, projected_gradient, lp_nlhf };

struct SolverConfig {
  Algorithm algorithm = Algorithm::mwu;
  int iterations = 10000;
  double eta = 0.0;  // <= 0 selects the automatic step size
  std::uint64_t seed = 0;
  double tolerance = 1e-9;  // fixed-point residual
  long long cap = kDefaultEnumerationCap;
};

// Record of symmetric self-play: the shared iterate sequence, the exact
// utility gradients g^t[y] = P[y beats (pi^t)^(x)k strictly], and the regret
// against the best fixed pure comparator.
struct SelfPlayTrace {
  std::vector<Policy> iterates;
  std::vector<std::vector<double>> gradients;
  double cumulative_regret = 0.0;
  int k = 1;
  double eta = 0.0;

  int num_iterations() const { return static_cast<int>(iterates.size()); }
  double regret_per_iteration() const {
    return cumulative_regret / num_iterations();
  }
  const Policy& final_iterate() const { return iterates.back(); }
  // Uniform mixture over the k-fold products of the iterates.
  MixtureOfProducts mixture() const;
};

struct CertificationReport {
  int k = 1;
  int l = 1;
  double certified_rate = 0.0;  // min weak win rate over all size-l opponents
  double threshold = 0.0;       // (k+1-l)/(k+1)
  Multiset witness;             // worst-case opponent
  double regret_slack = 0.0;    // Reg^T/T when certified from a trace
  bool pass = false;
  double tolerance = 1e-9;
};

// g[y] = exact strict win rate of the pure response y against pi^(x)k.
// Player utility against the product is <pi', g> by linearity.
std::vector<double> utility_gradient(const Policy& pi, int k,
                                     const PreferenceModel& model,
                                     long long cap = kDefaultEnumerationCap);

// Euclidean projection onto the probability simplex (sort-based threshold).
Policy simplex_project(const std::vector<double>& v);

// One application of pi -> project(pi + eta * g).
Policy pga_step(const Policy& pi, int k, const PreferenceModel& model,
                double eta, long long cap = kDefaultEnumerationCap);

struct PgaResult {
  Policy policy;
  double residual = 0.0;  // ||F(pi) - pi||_2 at the returned iterate
  int iterations = 0;
  bool converged = false;
};

// Iterates pga_step until the fixed-point residual drops below
// config.tolerance or config.iterations is exhausted.
PgaResult pga_solve(const PreferenceModel& model, int k,
                    const SolverConfig& config);

// Symmetric self-play with multiplicative weights; automatic step size
// sqrt(8 ln|Y| / T).
SelfPlayTrace mwu_selfplay(const PreferenceModel& model, int k,
                           const SolverConfig& config);

// Certified rate = 1 - max over size-l pure opponents of the strict win rate
// against sigma; valid against all mixed opponents by linearity.
CertificationReport certify(const SelfPlayTrace& trace, int l,
                            const PreferenceModel& model,
                            long long cap = kDefaultEnumerationCap,
                            double tolerance = 1e-9);
CertificationReport certify(const Policy& pi, int k, int l,
                            const PreferenceModel& model,
                            long long cap = kDefaultEnumerationCap,
                            double tolerance = 1e-9);

// Pairwise matrix with symmetrized ties: M[y][y'] = (weak + strict) / 2.
// M + M^T = 1, so the two-player game over it is constant-sum with value 1/2.
std::vector<std::vector<double>> pairwise_matrix(const PreferenceModel& model);

struct MatrixGameSolution {
  std::vector<double> row_strategy;
  std::vector<double> col_strategy;
  double value = 0.0;
};

// Maximin solution of a finite two-player zero-sum matrix game (row payoff),
// via the standard LP reduction and a dense simplex method.
MatrixGameSolution solve_matrix_game(const std::vector<std::vector<double>>& payoff);

// Maximal-lottery policy: equilibrium of the two-player game over
// pairwise_matrix(model). The one-argument form always takes the exact LP
// route; with a config, Algorithm::mwu runs k=1 self-play and returns the
// iterate average instead.
Policy nlhf_solve(const PreferenceModel& model);
Policy nlhf_solve(const PreferenceModel& model, const SolverConfig& config);

// Gibbs closed form pi(y) proportional to pi_ref(y) * exp(reward[y] / eta_kl).
Policy rlhf_solve(const std::vector<double>& reward, const Policy& pi_ref,
                  double eta_kl);

}  // namespace ualign
