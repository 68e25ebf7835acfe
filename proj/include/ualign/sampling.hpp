// Seeded random draws of domain objects, used by property checks and
// randomized experiments.
#pragma once

#include <cmath>

#include "ualign/numeric.hpp"
#include "ualign/types.hpp"

namespace ualign {

// Dirichlet(1,...,1) via normalized exponentials.
inline Policy random_policy(Rng& rng, int n) {
  std::vector<double> p(n);
  double sum = 0.0;
  for (double& x : p) {
    x = -std::log(1.0 - rng.uniform());
    sum += x;
  }
  for (double& x : p) x /= sum;
  return Policy(std::move(p));
}

// Uniform ids, size uniform in [1, max_size].
inline Multiset random_multiset(Rng& rng, int n, int max_size) {
  const int size = 1 + static_cast<int>(rng.uniform() * max_size);
  Multiset s;
  for (int i = 0; i < size; ++i)
    s.add(static_cast<ResponseId>(rng.uniform() * n));
  return s;
}

}  // namespace ualign
