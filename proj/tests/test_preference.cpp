#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "ualign/instances.hpp"
#include "ualign/numeric.hpp"
#include "ualign/preference.hpp"
#include "ualign/sampling.hpp"

using namespace ualign;

namespace {

PreferenceModel cyclic3() { return condorcet_cycle_instance(); }

PlComponent pl_rewards(std::vector<double> r) { return PlComponent{std::move(r)}; }

}  // namespace

TEST_CASE("pl_winrate basic values") {
  const auto c = pl_rewards({1.0, 1.0});
  CHECK(pl_winrate(Multiset::single(0), Multiset::single(1), c) ==
        doctest::Approx(0.5).epsilon(1e-15));

  Multiset aa;
  aa.add(0, 2);
  CHECK(pl_winrate(aa, Multiset::single(1), c) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-15));

  const auto c2 = pl_rewards({std::log(3.0), 0.0});
  CHECK(pl_winrate(Multiset::single(0), Multiset::single(1), c2) ==
        doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("pl_winrate survives extreme rewards") {
  const auto c = pl_rewards({700.0, -700.0});
  const double p = pl_winrate(Multiset::single(0), Multiset::single(1), c);
  CHECK(std::isfinite(p));
  CHECK(p > 1.0 - 1e-12);
  const double q = pl_winrate(Multiset::single(1), Multiset::single(0), c);
  CHECK(q < 1e-12);
  CHECK(p + q == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("pl_winrate rejects empty multisets") {
  const auto c = pl_rewards({1.0, 1.0});
  CHECK_THROWS_AS(pl_winrate(Multiset{}, Multiset::single(0), c),
                  std::invalid_argument);
  CHECK_THROWS_AS(pl_winrate(Multiset::single(0), Multiset{}, c),
                  std::invalid_argument);
}

TEST_CASE("ranking_compare maximal-element semantics") {
  const RankingComponent order({0, 1, 2});  // a > b > c

  SUBCASE("identical responses tie") {
    const auto r = ranking_compare(Multiset::single(0), Multiset::single(0), order);
    CHECK(r.weak == 1);
    CHECK(r.strict == 0);
  }
  SUBCASE("{b,c} loses to {a}") {
    Multiset bc;
    bc.add(1);
    bc.add(2);
    const auto r = ranking_compare(bc, Multiset::single(0), order);
    CHECK(r.weak == 0);
    CHECK(r.strict == 0);
  }
  SUBCASE("{a,c} beats {b} strictly") {
    Multiset ac;
    ac.add(0);
    ac.add(2);
    const auto r = ranking_compare(ac, Multiset::single(1), order);
    CHECK(r.weak == 1);
    CHECK(r.strict == 1);
  }
  SUBCASE("shared maximal element ties regardless of multiplicity") {
    Multiset s;
    s.add(0, 3);
    s.add(2);
    Multiset sp;
    sp.add(0);
    sp.add(1);
    const auto r = ranking_compare(s, sp, order);
    CHECK(r.weak == 1);
    CHECK(r.strict == 0);
  }
}

TEST_CASE("RankingComponent validates permutations") {
  CHECK_THROWS_AS(RankingComponent({0, 0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(RankingComponent({0, 3, 1}), std::invalid_argument);
  CHECK_THROWS_AS(RankingComponent({}), std::invalid_argument);
}

TEST_CASE("model_winrate on the majority and cyclic populations") {
  const auto majority = majority_instance(0.1);
  CHECK(model_winrate(Multiset::single(0), Multiset::single(1), majority,
                      CompareMode::weak) == doctest::Approx(0.6).epsilon(1e-15));

  const auto cycle = cyclic3();
  // a beats b in exactly 2 of the 3 cyclic rankings
  CHECK(model_winrate(Multiset::single(0), Multiset::single(1), cycle,
                      CompareMode::weak) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-14));

  // single identical response: weak 1, strict 0
  CHECK(model_winrate(Multiset::single(2), Multiset::single(2), cycle,
                      CompareMode::weak) == 1.0);
  CHECK(model_winrate(Multiset::single(2), Multiset::single(2), cycle,
                      CompareMode::strict) == 0.0);
}

TEST_CASE("PL weak and strict modes agree bitwise") {
  Rng rng(42);
  const auto model = PreferenceModel::pl_mixture(
      {0.3, 0.7}, {pl_rewards({0.5, -1.0, 2.0}), pl_rewards({1.0, 1.0, 0.0})});
  for (int t = 0; t < 50; ++t) {
    const Multiset s = random_multiset(rng, 3, 4);
    const Multiset sp = random_multiset(rng, 3, 4);
    CHECK(model_winrate(s, sp, model, CompareMode::weak) ==
          model_winrate(s, sp, model, CompareMode::strict));
  }
}

TEST_CASE("antisymmetry holds exactly on random pairs") {
  Rng rng(1);
  for (const auto& model : {cyclic3(), uniform_rankings_instance(4),
                            majority_instance(0.25), uniform_pl_instance(3)}) {
    for (int t = 0; t < 100; ++t) {
      const int n = model.num_responses();
      const Multiset s = random_multiset(rng, n, 4);
      const Multiset sp = random_multiset(rng, n, 4);
      const double weak = model_winrate(s, sp, model, CompareMode::weak);
      const double strict_rev = model_winrate(sp, s, model, CompareMode::strict);
      CHECK(std::abs(weak + strict_rev - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("win rates are invariant under consistent relabeling") {
  // swap ids 0 and 2 in both the model and the multisets
  const std::vector<int> perm = {2, 1, 0};
  std::vector<RankingComponent> relabeled;
  const auto cycle = cyclic3();
  for (int i = 0; i < cycle.num_components(); ++i) {
    std::vector<ResponseId> order;
    for (ResponseId y : cycle.ranking_component(i).order)
      order.push_back(perm[y]);
    relabeled.emplace_back(std::move(order));
  }
  const auto cycle_perm = PreferenceModel::ranking_population(
      cycle.weights(), std::move(relabeled));

  Rng rng(9);
  for (int t = 0; t < 60; ++t) {
    const Multiset s = random_multiset(rng, 3, 3);
    const Multiset sp = random_multiset(rng, 3, 3);
    Multiset s2, sp2;
    for (const auto& [y, c] : s.counts()) s2.add(perm[y], c);
    for (const auto& [y, c] : sp.counts()) sp2.add(perm[y], c);
    CHECK(model_winrate(s, sp, cycle, CompareMode::weak) ==
          doctest::Approx(model_winrate(s2, sp2, cycle_perm, CompareMode::weak))
              .epsilon(1e-15));
  }
}

TEST_CASE("model document round trip") {
  const std::string text = R"({
    "responses": ["good", "bad"],
    "kind": "pl",
    "components": [
      {"weight": 0.25, "rewards": [1.0, 0.0]},
      {"weight": 0.75, "rewards": [0.0, 2.0]}
    ]
  })";
  const auto model = PreferenceModel::from_json_text(text);
  CHECK(model.kind() == PreferenceKind::pl);
  CHECK(model.num_responses() == 2);
  CHECK(model.num_components() == 2);
  CHECK(model.labels()[0] == "good");
  CHECK(model.weights()[1] == doctest::Approx(0.75));

  const auto round = PreferenceModel::from_json_text(model.to_json_text());
  CHECK(round.num_components() == 2);
  CHECK(round.pl_component(1).rewards[1] == 2.0);
}

TEST_CASE("model document validation") {
  CHECK_THROWS_AS(PreferenceModel::from_json_text("{not json"),
                  std::invalid_argument);
  CHECK_THROWS_AS(PreferenceModel::from_json_text(
                      R"({"kind":"maybe","components":[]})"),
                  std::invalid_argument);
  // weights well off from 1 are rejected, not silently renormalized
  CHECK_THROWS_AS(PreferenceModel::from_json_text(
                      R"({"kind":"pl","components":[{"weight":0.9,"rewards":[0,1]}]})"),
                  std::invalid_argument);
  // small serialization rounding is tolerated and rescaled once
  const auto ok = PreferenceModel::from_json_text(
      R"({"kind":"ranking","components":[
           {"weight":0.3333333333, "order":[0,1,2]},
           {"weight":0.3333333333, "order":[1,2,0]},
           {"weight":0.3333333334, "order":[2,0,1]}]})");
  double sum = 0.0;
  for (double w : ok.weights()) sum += w;
  CHECK(std::abs(sum - 1.0) <= 1e-12);
}

TEST_CASE("check_properties passes on all canonical instances") {
  for (const auto& model : {majority_instance(0.1), cyclic3(),
                            uniform_pl_instance(2), uniform_rankings_instance(3)}) {
    const auto report = check_properties(model, 60, 123);
    CHECK(report.passed());
    if (!report.passed()) {
      for (const auto& f : report.failures)
        MESSAGE(f.property << ": " << f.detail);
    }
  }
}
