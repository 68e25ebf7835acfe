// Small numeric helpers shared by the win-rate engine and solvers.
#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace ualign {

// Kahan-compensated accumulator; keeps large enumerations within the 1e-12
// cross-backend tolerance.
class KahanSum {
 public:
  void add(double x) {
    const double y = x - c_;
    const double t = sum_ + y;
    c_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double c_ = 0.0;
};

// Deterministic RNG with explicit categorical sampling so results do not
// depend on library-specific distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform() {  // [0, 1)
    return (eng_() >> 11) * 0x1.0p-53;
  }

  // Index sampled proportionally to probs (probs need not be normalized).
  int categorical(const std::vector<double>& probs) {
    double total = 0.0;
    for (double p : probs) total += p;
    double u = uniform() * total;
    for (int i = 0; i + 1 < static_cast<int>(probs.size()); ++i) {
      u -= probs[i];
      if (u < 0.0) return i;
    }
    return static_cast<int>(probs.size()) - 1;
  }

  std::uint64_t next_seed() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

// Number of size-k multisets over n responses, C(n+k-1, k), saturating at
// the given limit to avoid overflow.
inline long long count_multisets(int n, int k, long long limit = 1LL << 62) {
  long long c = 1;
  for (int i = 1; i <= k; ++i) {
    if (c > limit / (n - 1 + i)) return limit;
    c = c * (n - 1 + i) / i;  // exact: each partial is itself a binomial
  }
  return c;
}

}  // namespace ualign
