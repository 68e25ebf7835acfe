#include "ualign/winrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "ualign/numeric.hpp"

namespace ualign {

void for_each_product_multiset(
    const Policy& base, int k,
    const std::function<void(const Multiset&, double)>& visit) {
  const auto& p = base.probs();
  const int n = base.num_responses();
  std::vector<int> counts(n, 0);
  std::function<void(int, int, double)> rec = [&](int y, int rem, double w) {
    if (w == 0.0) return;
    if (y == n - 1) {
      if (rem > 0 && p[y] == 0.0) return;
      counts[y] = rem;
      visit(Multiset::from_counts(counts), w * std::pow(p[y], rem));
      counts[y] = 0;
      return;
    }
    double factor = 1.0;  // C(rem, c) * p[y]^c, built incrementally
    for (int c = 0; c <= rem; ++c) {
      if (c > 0) {
        if (p[y] == 0.0) break;
        factor *= p[y] * (rem - c + 1) / c;
      }
      counts[y] = c;
      rec(y + 1, rem - c, w * factor);
    }
    counts[y] = 0;
  };
  rec(0, k, 1.0);
}

void for_each_counts_vector(
    int n, int k, const std::function<void(const std::vector<int>&)>& visit) {
  std::vector<int> counts(n, 0);
  std::function<void(int, int)> rec = [&](int i, int rem) {
    if (i == n - 1) {
      counts[i] = rem;
      visit(counts);
      counts[i] = 0;
      return;
    }
    for (int c = 0; c <= rem; ++c) {
      counts[i] = c;
      rec(i + 1, rem - c);
    }
    counts[i] = 0;
  };
  rec(0, k);
}

namespace {

// Distribution over support multisets of sigma, with duplicate multisets
// across mixture components collapsed. Result size is at most C(n+k-1, k).
std::vector<std::pair<Multiset, double>> aggregate_support(
    const MixtureOfProducts& sigma, long long cap) {
  const long long terms = count_multisets(sigma.num_responses(), sigma.k());
  if (terms > cap) throw EnumerationCapError(terms, cap);
  std::map<std::vector<int>, double> acc;
  const int n = sigma.num_responses();
  for (int t = 0; t < sigma.num_components(); ++t) {
    const double w = sigma.weights()[t];
    if (w == 0.0) continue;
    for_each_product_multiset(
        sigma.component(t).base, sigma.k(),
        [&](const Multiset& s, double prob) {
          acc[s.counts_vector(n)] += w * prob;
        });
  }
  std::vector<std::pair<Multiset, double>> out;
  out.reserve(acc.size());
  for (const auto& [counts, prob] : acc)
    out.emplace_back(Multiset::from_counts(counts), prob);
  return out;
}

std::vector<std::pair<Multiset, double>> rhs_support(
    const std::variant<Multiset, ProductPolicy>& rhs, long long cap) {
  if (std::holds_alternative<Multiset>(rhs)) {
    const auto& s = std::get<Multiset>(rhs);
    if (s.empty()) throw std::invalid_argument("exact_winrate: empty rhs multiset");
    return {{s, 1.0}};
  }
  const auto& pp = std::get<ProductPolicy>(rhs);
  return aggregate_support(MixtureOfProducts(pp), cap);
}

MixtureOfProducts as_mixture(
    const std::variant<ProductPolicy, MixtureOfProducts>& lhs) {
  if (std::holds_alternative<ProductPolicy>(lhs))
    return MixtureOfProducts(std::get<ProductPolicy>(lhs));
  return std::get<MixtureOfProducts>(lhs);
}

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

Estimate exact_winrate(const WinrateQuery& q, long long cap) {
  const PreferenceModel& model = q.model.get();
  const MixtureOfProducts lhs = as_mixture(q.lhs);

  const long long lhs_terms = count_multisets(lhs.num_responses(), lhs.k());
  long long rhs_terms = 1;
  if (std::holds_alternative<ProductPolicy>(q.rhs)) {
    const auto& pp = std::get<ProductPolicy>(q.rhs);
    rhs_terms = count_multisets(pp.base.num_responses(), pp.k);
  }
  if (lhs_terms > cap / std::max(1LL, rhs_terms))
    throw EnumerationCapError(lhs_terms * rhs_terms, cap);

  const auto lhs_sup = aggregate_support(lhs, cap);
  const auto rhs_sup = rhs_support(q.rhs, cap);

  KahanSum acc;
  for (const auto& [s, ps] : lhs_sup)
    for (const auto& [sp, psp] : rhs_sup)
      acc.add(ps * psp * model_winrate(s, sp, model, q.mode));
  return Estimate{clamp01(acc.value()), 0.0, 0, Backend::enumeration};
}

Estimate ranking_pure_closed_form(const Policy& base, int k, ResponseId y,
                                  const PreferenceModel& model) {
  if (model.kind() != PreferenceKind::ranking)
    throw std::invalid_argument("ranking_pure_closed_form: model kind must be ranking");
  if (y < 0 || y >= model.num_responses())
    throw std::invalid_argument("ranking_pure_closed_form: response id out of range");
  KahanSum acc;
  for (int i = 0; i < model.num_components(); ++i) {
    const auto& comp = model.ranking_component(i);
    const int rank_y = comp.rank_of[y];
    double below = 0.0;  // base mass strictly less preferred than y
    for (ResponseId z = 0; z < base.num_responses(); ++z)
      if (comp.rank_of[z] > rank_y) below += base[z];
    acc.add(model.weights()[i] * (1.0 - std::pow(below, k)));
  }
  return Estimate{clamp01(acc.value()), 0.0, 0, Backend::closed_form};
}

Estimate mc_winrate(const WinrateQuery& q, long long n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("mc_winrate: n must be >= 1");
  const PreferenceModel& model = q.model.get();
  const MixtureOfProducts lhs = as_mixture(q.lhs);
  const int k = lhs.k();

  const bool rhs_is_product = std::holds_alternative<ProductPolicy>(q.rhs);
  std::vector<std::pair<ResponseId, int>> rhs_fixed;
  int l = 0;
  if (rhs_is_product) {
    l = std::get<ProductPolicy>(q.rhs).k;
  } else {
    const auto& s = std::get<Multiset>(q.rhs);
    if (s.empty()) throw std::invalid_argument("mc_winrate: empty rhs multiset");
    rhs_fixed.assign(s.counts().begin(), s.counts().end());
  }

  Rng rng(seed);
  std::vector<ResponseId> lhs_ids(k), rhs_ids(l);
  KahanSum sum, sumsq;
  for (long long trial = 0; trial < n; ++trial) {
    const int comp = rng.categorical(model.weights());
    const int t = lhs.num_components() == 1 ? 0 : rng.categorical(lhs.weights());
    const auto& base = lhs.component(t).base.probs();
    for (int j = 0; j < k; ++j) lhs_ids[j] = rng.categorical(base);
    if (rhs_is_product) {
      const auto& rbase = std::get<ProductPolicy>(q.rhs).base.probs();
      for (int j = 0; j < l; ++j) rhs_ids[j] = rng.categorical(rbase);
    }

    double x;
    if (model.kind() == PreferenceKind::pl) {
      const auto& r = model.pl_component(comp).rewards;
      double max_r = -std::numeric_limits<double>::infinity();
      for (ResponseId y : lhs_ids) max_r = std::max(max_r, r[y]);
      if (rhs_is_product)
        for (ResponseId y : rhs_ids) max_r = std::max(max_r, r[y]);
      else
        for (const auto& [y, c] : rhs_fixed) max_r = std::max(max_r, r[y]);
      double mass = 0.0, mass_p = 0.0;
      for (ResponseId y : lhs_ids) mass += std::exp(r[y] - max_r);
      if (rhs_is_product)
        for (ResponseId y : rhs_ids) mass_p += std::exp(r[y] - max_r);
      else
        for (const auto& [y, c] : rhs_fixed) mass_p += c * std::exp(r[y] - max_r);
      x = mass / (mass + mass_p);
    } else {
      const auto& rank_of = model.ranking_component(comp).rank_of;
      int best = std::numeric_limits<int>::max();
      for (ResponseId y : lhs_ids) best = std::min(best, rank_of[y]);
      int best_p = std::numeric_limits<int>::max();
      if (rhs_is_product)
        for (ResponseId y : rhs_ids) best_p = std::min(best_p, rank_of[y]);
      else
        for (const auto& [y, c] : rhs_fixed) best_p = std::min(best_p, rank_of[y]);
      x = q.mode == CompareMode::weak ? (best <= best_p ? 1.0 : 0.0)
                                      : (best < best_p ? 1.0 : 0.0);
    }
    sum.add(x);
    sumsq.add(x * x);
  }

  const double mean = sum.value() / static_cast<double>(n);
  double stderr_value = 0.0;
  if (n > 1) {
    const double var =
        std::max(0.0, (sumsq.value() - n * mean * mean) / static_cast<double>(n - 1));
    stderr_value = std::sqrt(var / static_cast<double>(n));
  }
  return Estimate{clamp01(mean), stderr_value, n, Backend::monte_carlo};
}

double opponent_strict_winrate(const Multiset& s, const MixtureOfProducts& sigma,
                               const PreferenceModel& model, long long cap) {
  const auto support = aggregate_support(sigma, cap);
  KahanSum acc;
  for (const auto& [sp, prob] : support)
    acc.add(prob * model_winrate(s, sp, model, CompareMode::strict));
  return std::clamp(acc.value(), 0.0, 1.0);
}

OpponentSearchResult best_pure_opponent(const MixtureOfProducts& sigma, int l,
                                        const PreferenceModel& model,
                                        long long cap) {
  if (l < 1) throw std::invalid_argument("best_pure_opponent: l must be >= 1");
  const int n = model.num_responses();
  const long long opp_terms = count_multisets(n, l);
  if (opp_terms > cap) throw EnumerationCapError(opp_terms, cap);

  const auto support = aggregate_support(sigma, cap);

  OpponentSearchResult best;
  best.value = -1.0;
  std::vector<int> best_counts;
  for_each_counts_vector(n, l, [&](const std::vector<int>& counts) {
    const Multiset s = Multiset::from_counts(counts);
    KahanSum acc;
    for (const auto& [sp, prob] : support)
      acc.add(prob * model_winrate(s, sp, model, CompareMode::strict));
    const double value = std::clamp(acc.value(), 0.0, 1.0);
    // exact ties break toward the witness on the smallest response ids,
    // which is the lexicographically greatest counts vector
    if (value > best.value || (value == best.value && counts > best_counts)) {
      best.value = value;
      best.witness = s;
      best_counts = counts;
    }
  });
  return best;
}

OpponentSearchResult best_pure_opponent(const ProductPolicy& pi, int l,
                                        const PreferenceModel& model,
                                        long long cap) {
  return best_pure_opponent(MixtureOfProducts(pi), l, model, cap);
}

}  // namespace ualign
