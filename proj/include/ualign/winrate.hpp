// Population win rates of product policies and mixtures of product policies
// against pure multisets or product opponents.
//
// Three backends cross-validate each other: exact multiset enumeration with
// multinomial weights, a closed form for ranking models against pure
// opponents, and seeded Monte Carlo.
#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <variant>

#include "ualign/preference.hpp"
#include "ualign/types.hpp"

namespace ualign {

inline constexpr long long kDefaultEnumerationCap = 10'000'000;

class EnumerationCapError : public std::runtime_error {
 public:
  EnumerationCapError(long long terms_, long long cap_)
      : std::runtime_error("enumeration would need " + std::to_string(terms_) +
                           " terms, cap is " + std::to_string(cap_)),
        terms(terms_),
        cap(cap_) {}
  long long terms;
  long long cap;
};

enum class Backend { enumeration, closed_form, monte_carlo };

struct Estimate {
  double value = 0.0;
  double stderr_value = 0.0;  // 0 for exact backends
  long long n_samples = 0;    // 0 for exact backends
  Backend backend = Backend::enumeration;
};

struct WinrateQuery {
  std::variant<ProductPolicy, MixtureOfProducts> lhs;
  std::variant<Multiset, ProductPolicy> rhs;
  std::reference_wrapper<const PreferenceModel> model;
  CompareMode mode = CompareMode::weak;
};

// Visits every support multiset of base^(x)k with its multinomial probability.
// Terms with zero base probability are skipped.
void for_each_product_multiset(
    const Policy& base, int k,
    const std::function<void(const Multiset&, double)>& visit);

// Visits every length-n counts vector summing to k, in lexicographic order.
void for_each_counts_vector(
    int n, int k, const std::function<void(const std::vector<int>&)>& visit);

// Exact expectation by enumeration; mixtures expand linearly over components.
// Throws EnumerationCapError when the term count exceeds the cap.
Estimate exact_winrate(const WinrateQuery& q,
                       long long cap = kDefaultEnumerationCap);

// Weak win rate of base^(x)k against the pure response y under a ranking
// population: sum_i w_i * (1 - q_i^k) with q_i the base mass strictly below y
// in order i. Independent of the enumeration path.
Estimate ranking_pure_closed_form(const Policy& base, int k, ResponseId y,
                                  const PreferenceModel& model);

// Seeded i.i.d. sampling; stderr is sqrt(unbiased variance / n).
Estimate mc_winrate(const WinrateQuery& q, long long n, std::uint64_t seed);

// Exact strict win rate of the pure multiset s against sigma.
double opponent_strict_winrate(const Multiset& s, const MixtureOfProducts& sigma,
                               const PreferenceModel& model,
                               long long cap = kDefaultEnumerationCap);

// Exhaustive search over size-l opponent multisets for the strict-win
// maximizer against sigma. Ties break toward the witness supported on the
// smallest response ids; pure multisets realize the max over all mixed
// opponents by linearity.
struct OpponentSearchResult {
  Multiset witness;
  double value = 0.0;
};

OpponentSearchResult best_pure_opponent(const MixtureOfProducts& sigma, int l,
                                        const PreferenceModel& model,
                                        long long cap = kDefaultEnumerationCap);
OpponentSearchResult best_pure_opponent(const ProductPolicy& pi, int l,
                                        const PreferenceModel& model,
                                        long long cap = kDefaultEnumerationCap);

}  // namespace ualign
