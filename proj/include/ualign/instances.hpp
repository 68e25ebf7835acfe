// Canonical preference-model instances with known analytic behavior, plus a
// parseable spec for selecting them from the CLI or a config document.
#pragma once

#include <string>

#include "ualign/preference.hpp"

namespace ualign {

// k+1 responses, single PL component with identical rewards: every size-k
// multiset beats any single response with probability exactly k/(k+1).
PreferenceModel uniform_pl_instance(int k);

// All m! rankings of m responses with equal weight; m capped at 8.
PreferenceModel uniform_rankings_instance(int m);

// Two responses; the first is preferred by a 1/2 + eps majority.
PreferenceModel majority_instance(double eps);

// Three responses, three cyclic rankings with weight 1/3: no response wins a
// majority against every other.
PreferenceModel condorcet_cycle_instance();

struct InstanceSpec {
  std::string name;  // uniform-pl | uniform-rankings | majority |
                     // condorcet-cycle | custom
  int k = 1;         // uniform-pl parameter
  int m = 3;         // uniform-rankings parameter
  double eps = 0.1;  // majority parameter
  std::string file;  // custom model path
  std::string prompt = "default";

  // Text forms: "majority:0.1", "uniform-pl:2", "uniform-rankings:4",
  // "condorcet-cycle", "custom:path/to/model.json".
  static InstanceSpec parse(const std::string& text);
  std::string to_string() const;
  PreferenceModel build() const;
};

}  // namespace ualign
