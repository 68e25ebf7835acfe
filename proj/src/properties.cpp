#include <cmath>
#include <sstream>

#include "ualign/numeric.hpp"
#include "ualign/preference.hpp"
#include "ualign/sampling.hpp"
#include "ualign/winrate.hpp"

namespace ualign {

PropertyCheckReport check_properties(const PreferenceModel& m, int trials,
                                     std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("check_properties: trials must be >= 1");
  PropertyCheckReport report;
  report.trials = trials;
  Rng rng(seed);
  const int n = m.num_responses();
  constexpr double kTol = 1e-12;

  for (int t = 0; t < trials; ++t) {
    const Multiset s = random_multiset(rng, n, 4);
    const Multiset sp = random_multiset(rng, n, 4);

    // 1. antisymmetry, exact
    const double weak = model_winrate(s, sp, m, CompareMode::weak);
    const double strict_rev = model_winrate(sp, s, m, CompareMode::strict);
    if (std::abs(weak + strict_rev - 1.0) > kTol) {
      std::ostringstream os;
      os << "S=" << s.to_string() << " S'=" << sp.to_string()
         << " weak(S,S')=" << weak << " strict(S',S)=" << strict_rev;
      report.failures.push_back({"antisymmetry", os.str()});
    }

    // 2. multi-vs-single-copy via the exact engine
    const int k = 1 + static_cast<int>(rng.uniform() * 4);
    const Policy pi = random_policy(rng, n);
    const WinrateQuery q{ProductPolicy(pi, k), ProductPolicy(pi, 1),
                         std::cref(m), CompareMode::weak};
    const double rate = exact_winrate(q).value;
    const double bound = 1.0 - 1.0 / (k + 1);
    if (rate < bound - kTol) {
      std::ostringstream os;
      os << "k=" << k << " P[pi^k >= pi]=" << rate << " bound=" << bound;
      report.failures.push_back({"multi-vs-single-copy", os.str()});
    }

    // 3. subadditivity of strict wins under multiset union
    const Multiset s1 = random_multiset(rng, n, 3);
    const Multiset s2 = random_multiset(rng, n, 3);
    const Multiset s3 = random_multiset(rng, n, 3);
    const double joint = model_winrate(s1 + s2, s3, m, CompareMode::strict);
    const double split = model_winrate(s1, s3, m, CompareMode::strict) +
                         model_winrate(s2, s3, m, CompareMode::strict);
    if (joint > split + kTol) {
      std::ostringstream os;
      os << "S1=" << s1.to_string() << " S2=" << s2.to_string()
         << " S=" << s3.to_string() << " joint=" << joint << " split=" << split;
      report.failures.push_back({"subadditivity", os.str()});
    }
  }
  return report;
}

}  // namespace ualign
