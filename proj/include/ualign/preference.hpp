// Preference models over a finite response universe: mixtures of
// Plackett-Luce reward components, and populations of total rankings with
// maximal-element comparison semantics.
//
// Two multisets are compared either by exponentiated-reward mass (PL) or by
// their most-preferred elements under a total order (ranking). Identical
// maximal responses tie: weak = 1, strict = 0.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ualign/types.hpp"

namespace ualign {

enum class PreferenceKind { pl, ranking };
enum class CompareMode { weak, strict };

// One Plackett-Luce user type: a reward per response. Weights exp(r_y) are
// never materialized; all sums go through a max-shifted exponential so reward
// ranges up to +-700 stay finite.
struct PlComponent {
  std::vector<double> rewards;
};

// One total ranking; order[0] is the most preferred response.
struct RankingComponent {
  std::vector<ResponseId> order;
  std::vector<int> rank_of;  // inverse permutation: rank_of[y] = position of y

  explicit RankingComponent(std::vector<ResponseId> order_);
};

class PreferenceModel {
 public:
  static PreferenceModel pl_mixture(std::vector<double> weights,
                                    std::vector<PlComponent> components,
                                    std::vector<std::string> labels = {});
  static PreferenceModel ranking_population(std::vector<double> weights,
                                            std::vector<RankingComponent> components,
                                            std::vector<std::string> labels = {});

  // Document schema:
  //   { "responses": [labels], "kind": "pl"|"ranking",
  //     "components": [ {"weight": w, "rewards": [...]}
  //                   | {"weight": w, "order": [...]} ] }
  static PreferenceModel from_json_text(const std::string& text);
  static PreferenceModel load(const std::string& path);
  std::string to_json_text() const;

  PreferenceKind kind() const { return kind_; }
  int num_responses() const { return num_responses_; }
  int num_components() const { return static_cast<int>(weights_.size()); }
  const std::vector<double>& weights() const { return weights_; }
  const PlComponent& pl_component(int i) const { return pl_[i]; }
  const RankingComponent& ranking_component(int i) const { return rankings_[i]; }
  const std::vector<std::string>& labels() const { return labels_; }

 private:
  PreferenceModel() = default;

  PreferenceKind kind_ = PreferenceKind::pl;
  int num_responses_ = 0;
  std::vector<double> weights_;
  std::vector<PlComponent> pl_;
  std::vector<RankingComponent> rankings_;
  std::vector<std::string> labels_;
};

// P[S beats S'] for one PL component; strict and weak coincide by definition.
double pl_winrate(const Multiset& s, const Multiset& s_prime, const PlComponent& c);

struct RankingResult {
  int weak;    // 1 iff max(S) preferred to max(S') or equal
  int strict;  // 1 iff max(S) strictly preferred to max(S')
};
RankingResult ranking_compare(const Multiset& s, const Multiset& s_prime,
                              const RankingComponent& c);

// Weight-averaged win rate of S over S' across the population.
double model_winrate(const Multiset& s, const Multiset& s_prime,
                     const PreferenceModel& m, CompareMode mode);

// Randomized sanity suite over a model: exact antisymmetry, the
// multi-vs-single-copy lower bound 1 - 1/(k+1), and subadditivity of strict
// wins under multiset union. Failures carry a printable counterexample.
struct PropertyCheckReport {
  struct Failure {
    std::string property;
    std::string detail;
  };
  int trials = 0;
  std::vector<Failure> failures;
  bool passed() const { return failures.empty(); }
};

PropertyCheckReport check_properties(const PreferenceModel& m, int trials,
                                     std::uint64_t seed);

}  // namespace ualign
