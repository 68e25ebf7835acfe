#include "ualign/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ualign/numeric.hpp"

namespace ualign {

MixtureOfProducts SelfPlayTrace::mixture() const {
  const int t_count = num_iterations();
  std::vector<double> weights(t_count, 1.0 / t_count);
  std::vector<ProductPolicy> components;
  components.reserve(t_count);
  for (const Policy& pi : iterates) components.emplace_back(pi, k);
  return MixtureOfProducts(std::move(weights), std::move(components));
}

std::vector<double> utility_gradient(const Policy& pi, int k,
                                     const PreferenceModel& model,
                                     long long cap) {
  const int n = model.num_responses();
  const long long terms = count_multisets(n, k);
  if (terms > cap) throw EnumerationCapError(terms, cap);
  std::vector<Multiset> singletons;
  singletons.reserve(n);
  for (ResponseId y = 0; y < n; ++y) singletons.push_back(Multiset::single(y));
  std::vector<KahanSum> g(n);
  for_each_product_multiset(pi, k, [&](const Multiset& s, double prob) {
    for (ResponseId y = 0; y < n; ++y)
      g[y].add(prob * model_winrate(singletons[y], s, model, CompareMode::strict));
  });
  std::vector<double> out(n);
  for (ResponseId y = 0; y < n; ++y) out[y] = std::clamp(g[y].value(), 0.0, 1.0);
  return out;
}

Policy simplex_project(const std::vector<double>& v) {
  const int n = static_cast<int>(v.size());
  if (n == 0) throw std::invalid_argument("simplex_project: empty vector");
  for (double x : v)
    if (!std::isfinite(x))
      throw std::invalid_argument("simplex_project: non-finite entry");
  std::vector<double> u = v;
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumsum = 0.0;
  double tau = 0.0;
  for (int j = 0; j < n; ++j) {
    cumsum += u[j];
    const double candidate = (cumsum - 1.0) / (j + 1);
    if (u[j] - candidate > 0.0) tau = candidate;
  }
  std::vector<double> p(n);
  for (int i = 0; i < n; ++i) p[i] = std::max(v[i] - tau, 0.0);
  return Policy(std::move(p));
}

Policy pga_step(const Policy& pi, int k, const PreferenceModel& model,
                double eta, long long cap) {
  if (eta < 0.0) throw std::invalid_argument("pga_step: eta must be >= 0");
  const auto g = utility_gradient(pi, k, model, cap);
  std::vector<double> v(pi.probs());
  for (int y = 0; y < pi.num_responses(); ++y) v[y] += eta * g[y];
  return simplex_project(v);
}

PgaResult pga_solve(const PreferenceModel& model, int k,
                    const SolverConfig& config) {
  const double eta = config.eta > 0.0 ? config.eta : 0.1;
  Policy pi = Policy::uniform(model.num_responses());
  PgaResult result{pi, std::numeric_limits<double>::infinity(), 0, false};
  for (int t = 0; t < config.iterations; ++t) {
    const Policy next = pga_step(pi, k, model, eta, config.cap);
    double res_sq = 0.0;
    for (int y = 0; y < pi.num_responses(); ++y) {
      const double d = next[y] - pi[y];
      res_sq += d * d;
    }
    result.residual = std::sqrt(res_sq);
    result.iterations = t + 1;
    pi = next;
    if (result.residual <= config.tolerance) {
      result.converged = true;
      break;
    }
  }
  result.policy = pi;
  return result;
}

SelfPlayTrace mwu_selfplay(const PreferenceModel& model, int k,
                           const SolverConfig& config) {
  if (config.iterations < 1)
    throw std::invalid_argument("mwu_selfplay: iterations must be >= 1");
  const int n = model.num_responses();
  const int t_count = config.iterations;
  const double eta =
      config.eta > 0.0 ? config.eta
                       : std::sqrt(8.0 * std::log(static_cast<double>(n)) /
                                   static_cast<double>(t_count));

  SelfPlayTrace trace;
  trace.k = k;
  trace.eta = eta;
  trace.iterates.reserve(t_count);
  trace.gradients.reserve(t_count);

  // pi^t proportional to exp(eta * sum of past gradients); uniform start
  std::vector<double> score(n, 0.0);
  std::vector<KahanSum> grad_sum(n);
  KahanSum played_value;
  for (int t = 0; t < t_count; ++t) {
    const double shift = *std::max_element(score.begin(), score.end());
    std::vector<double> p(n);
    double z = 0.0;
    for (int y = 0; y < n; ++y) {
      p[y] = std::exp(score[y] - shift);
      z += p[y];
    }
    for (double& x : p) x /= z;
    Policy pi(std::move(p));

    const auto g = utility_gradient(pi, k, model, config.cap);
    double inner = 0.0;
    for (int y = 0; y < n; ++y) {
      inner += pi[y] * g[y];
      grad_sum[y].add(g[y]);
      score[y] += eta * g[y];
    }
    played_value.add(inner);
    trace.iterates.push_back(std::move(pi));
    trace.gradients.push_back(g);
  }

  double best_fixed = -std::numeric_limits<double>::infinity();
  for (int y = 0; y < n; ++y) best_fixed = std::max(best_fixed, grad_sum[y].value());
  trace.cumulative_regret = best_fixed - played_value.value();
  return trace;
}

namespace {

CertificationReport certify_mixture(const MixtureOfProducts& sigma, int l,
                                    const PreferenceModel& model,
                                    double regret_slack, long long cap,
                                    double tolerance) {
  const int k = sigma.k();
  CertificationReport report;
  report.k = k;
  report.l = l;
  report.tolerance = tolerance;
  report.regret_slack = regret_slack;
  report.threshold = static_cast<double>(k + 1 - l) / (k + 1);
  const auto worst = best_pure_opponent(sigma, l, model, cap);
  report.certified_rate = 1.0 - worst.value;
  report.witness = worst.witness;
  report.pass =
      report.certified_rate >= report.threshold - regret_slack - tolerance;
  return report;
}

}  // namespace

CertificationReport certify(const SelfPlayTrace& trace, int l,
                            const PreferenceModel& model, long long cap,
                            double tolerance) {
  return certify_mixture(trace.mixture(), l, model,
                         trace.regret_per_iteration(), cap, tolerance);
}

CertificationReport certify(const Policy& pi, int k, int l,
                            const PreferenceModel& model, long long cap,
                            double tolerance) {
  return certify_mixture(MixtureOfProducts(ProductPolicy(pi, k)), l, model,
                         0.0, cap, tolerance);
}

std::vector<std::vector<double>> pairwise_matrix(const PreferenceModel& model) {
  const int n = model.num_responses();
  std::vector<std::vector<double>> m(n, std::vector<double>(n));
  for (ResponseId y = 0; y < n; ++y) {
    const Multiset sy = Multiset::single(y);
    for (ResponseId yp = 0; yp < n; ++yp) {
      const Multiset syp = Multiset::single(yp);
      m[y][yp] = 0.5 * (model_winrate(sy, syp, model, CompareMode::weak) +
                        model_winrate(sy, syp, model, CompareMode::strict));
    }
  }
  return m;
}

MatrixGameSolution solve_matrix_game(
    const std::vector<std::vector<double>>& payoff) {
  const int m = static_cast<int>(payoff.size());
  if (m == 0) throw std::invalid_argument("solve_matrix_game: empty matrix");
  const int n = static_cast<int>(payoff[0].size());
  for (const auto& row : payoff)
    if (static_cast<int>(row.size()) != n)
      throw std::invalid_argument("solve_matrix_game: ragged matrix");

  // Shift payoffs positive so the game value is > 0 and the standard LP
  // reduction applies: maximize sum(w) s.t. B w <= 1, w >= 0 (column player's
  // LP); the row strategy comes out of the slack duals.
  double min_entry = payoff[0][0];
  for (const auto& row : payoff)
    for (double x : row) min_entry = std::min(min_entry, x);
  const double shift = 1.0 - min_entry;

  const int cols = n + m + 1;  // w vars, slacks, rhs
  std::vector<std::vector<double>> tab(m, std::vector<double>(cols, 0.0));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) tab[i][j] = payoff[i][j] + shift;
    tab[i][n + i] = 1.0;
    tab[i][cols - 1] = 1.0;
  }
  std::vector<double> z(cols, 0.0);  // reduced costs; z[cols-1] = objective
  for (int j = 0; j < n; ++j) z[j] = -1.0;
  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) basis[i] = n + i;

  constexpr double kEps = 1e-12;
  for (;;) {
    // Bland's rule: smallest-index entering column
    int enter = -1;
    for (int j = 0; j < cols - 1; ++j) {
      if (z[j] < -kEps) {
        enter = j;
        break;
      }
    }
    if (enter < 0) break;
    int leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      if (tab[i][enter] > kEps) {
        const double ratio = tab[i][cols - 1] / tab[i][enter];
        if (ratio < best_ratio - kEps ||
            (ratio < best_ratio + kEps &&
             (leave < 0 || basis[i] < basis[leave]))) {
          best_ratio = ratio;
          leave = i;
        }
      }
    }
    if (leave < 0)
      throw std::runtime_error("solve_matrix_game: LP unbounded (invalid payoffs)");
    const double pivot = tab[leave][enter];
    for (double& x : tab[leave]) x /= pivot;
    for (int i = 0; i < m; ++i) {
      if (i == leave || std::abs(tab[i][enter]) < 1e-15) continue;
      const double f = tab[i][enter];
      for (int j = 0; j < cols; ++j) tab[i][j] -= f * tab[leave][j];
    }
    const double fz = z[enter];
    for (int j = 0; j < cols; ++j) z[j] -= fz * tab[leave][j];
    basis[leave] = enter;
  }

  const double objective = z[cols - 1];  // = 1 / shifted value
  if (objective <= 0.0)
    throw std::runtime_error("solve_matrix_game: degenerate objective");
  const double value_shifted = 1.0 / objective;

  std::vector<double> w(n, 0.0);
  for (int i = 0; i < m; ++i)
    if (basis[i] < n) w[basis[i]] = tab[i][cols - 1];
  std::vector<double> col_strategy(n), row_strategy(m);
  for (int j = 0; j < n; ++j) col_strategy[j] = w[j] * value_shifted;
  for (int i = 0; i < m; ++i) row_strategy[i] = z[n + i] * value_shifted;

  MatrixGameSolution sol;
  sol.value = value_shifted - shift;
  sol.row_strategy = std::move(row_strategy);
  sol.col_strategy = std::move(col_strategy);
  return sol;
}

Policy nlhf_solve(const PreferenceModel& model) {
  SolverConfig lp;
  lp.algorithm = Algorithm::lp_nlhf;
  return nlhf_solve(model, lp);
}

Policy nlhf_solve(const PreferenceModel& model, const SolverConfig& config) {
  const int n = model.num_responses();
  if (n == 1) return Policy::point_mass(1, 0);
  if (config.algorithm == Algorithm::mwu) {
    const auto trace = mwu_selfplay(model, /*k=*/1, config);
    std::vector<KahanSum> avg(n);
    for (const Policy& pi : trace.iterates)
      for (int y = 0; y < n; ++y) avg[y].add(pi[y]);
    std::vector<double> p(n);
    for (int y = 0; y < n; ++y) p[y] = avg[y].value() / trace.num_iterations();
    return Policy(std::move(p));
  }
  auto sol = solve_matrix_game(pairwise_matrix(model));
  // clean tiny simplex residue before the Policy constructor rescales
  for (double& x : sol.row_strategy) x = std::max(x, 0.0);
  return Policy(std::move(sol.row_strategy));
}

Policy rlhf_solve(const std::vector<double>& reward, const Policy& pi_ref,
                  double eta_kl) {
  if (!(eta_kl > 0.0))
    throw std::invalid_argument("rlhf_solve: eta_kl must be > 0");
  const int n = pi_ref.num_responses();
  if (static_cast<int>(reward.size()) != n)
    throw std::invalid_argument("rlhf_solve: reward length mismatch");
  for (int y = 0; y < n; ++y)
    if (!(pi_ref[y] > 0.0))
      throw std::invalid_argument("rlhf_solve: reference policy must have full support");
  std::vector<double> logit(n);
  for (int y = 0; y < n; ++y) logit[y] = std::log(pi_ref[y]) + reward[y] / eta_kl;
  const double shift = *std::max_element(logit.begin(), logit.end());
  std::vector<double> p(n);
  double z = 0.0;
  for (int y = 0; y < n; ++y) {
    p[y] = std::exp(logit[y] - shift);
    z += p[y];
  }
  for (double& x : p) x /= z;
  return Policy(std::move(p));
}

}  // namespace ualign
