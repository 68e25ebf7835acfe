#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "ualign/instances.hpp"
#include "ualign/numeric.hpp"
#include "ualign/sampling.hpp"
#include "ualign/winrate.hpp"

using namespace ualign;
using test::brute_winrate;
using test::brute_winrate_pp;

TEST_CASE("exact_winrate: deterministic policy is pinned at the majority margin") {
  const auto model = majority_instance(0.1);
  for (int k : {1, 2, 4, 8}) {
    const WinrateQuery q{ProductPolicy(Policy::point_mass(2, 0), k),
                         Multiset::single(1), std::cref(model), CompareMode::weak};
    const auto est = exact_winrate(q);
    CHECK(est.backend == Backend::enumeration);
    CHECK(est.stderr_value == 0.0);
    CHECK(est.value == doctest::Approx(0.6).epsilon(1e-15));
  }
}

TEST_CASE("exact_winrate: uniform-reward PL gives k/(k+1) for any base policy") {
  Rng rng(3);
  for (int k : {1, 2, 3}) {
    const auto model = uniform_pl_instance(k);
    for (int rep = 0; rep < 5; ++rep) {
      const Policy base = random_policy(rng, k + 1);
      const WinrateQuery q{ProductPolicy(base, k), Multiset::single(0),
                           std::cref(model), CompareMode::weak};
      CHECK(std::abs(exact_winrate(q).value - static_cast<double>(k) / (k + 1)) <=
            1e-12);
    }
  }
}

TEST_CASE("exact_winrate: uniform policy on the cyclic population") {
  const auto model = condorcet_cycle_instance();
  const WinrateQuery q{ProductPolicy(Policy::uniform(3), 1), Multiset::single(0),
                       std::cref(model), CompareMode::weak};
  CHECK(exact_winrate(q).value == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("exact_winrate agrees with ordered-tuple brute force") {
  Rng rng(17);
  const auto ranking = uniform_rankings_instance(4);
  const auto pl = PreferenceModel::pl_mixture(
      {0.5, 0.5},
      {PlComponent{{0.2, -1.0, 1.5, 0.0}}, PlComponent{{1.0, 1.0, -2.0, 0.5}}});
  for (const auto* model : {&ranking, &pl}) {
    for (int rep = 0; rep < 8; ++rep) {
      const int k = 1 + static_cast<int>(rng.uniform() * 3);
      const Policy base = random_policy(rng, 4);
      const Multiset rhs = random_multiset(rng, 4, 3);
      for (CompareMode mode : {CompareMode::weak, CompareMode::strict}) {
        const WinrateQuery q{ProductPolicy(base, k), rhs, std::cref(*model), mode};
        CHECK(exact_winrate(q).value ==
              doctest::Approx(brute_winrate(base, k, rhs, *model, mode))
                  .epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("exact_winrate with product opponent matches brute force") {
  Rng rng(23);
  const auto model = uniform_rankings_instance(3);
  for (int rep = 0; rep < 6; ++rep) {
    const Policy lhs = random_policy(rng, 3);
    const Policy rhs = random_policy(rng, 3);
    const int k = 1 + static_cast<int>(rng.uniform() * 3);
    const int l = 1 + static_cast<int>(rng.uniform() * 2);
    const WinrateQuery q{ProductPolicy(lhs, k), ProductPolicy(rhs, l),
                         std::cref(model), CompareMode::weak};
    CHECK(exact_winrate(q).value ==
          doctest::Approx(brute_winrate_pp(lhs, k, rhs, l, model,
                                           CompareMode::weak))
              .epsilon(1e-12));
  }
}

TEST_CASE("mixture queries expand linearly over components") {
  const auto model = condorcet_cycle_instance();
  const Policy a = Policy::point_mass(3, 0);
  const Policy b = Policy::uniform(3);
  const MixtureOfProducts mix({0.25, 0.75}, {ProductPolicy(a, 2), ProductPolicy(b, 2)});
  const Multiset rhs = Multiset::single(1);
  const WinrateQuery qm{mix, rhs, std::cref(model), CompareMode::weak};
  const WinrateQuery qa{ProductPolicy(a, 2), rhs, std::cref(model), CompareMode::weak};
  const WinrateQuery qb{ProductPolicy(b, 2), rhs, std::cref(model), CompareMode::weak};
  CHECK(exact_winrate(qm).value ==
        doctest::Approx(0.25 * exact_winrate(qa).value +
                        0.75 * exact_winrate(qb).value)
            .epsilon(1e-14));
}

TEST_CASE("ranking closed form: reference values") {
  std::vector<RankingComponent> comps;
  comps.emplace_back(std::vector<ResponseId>{0, 1});
  const auto model = PreferenceModel::ranking_population({1.0}, std::move(comps));

  const Policy base({0.55, 0.45});
  const auto est = ranking_pure_closed_form(base, 2, 0, model);
  CHECK(est.backend == Backend::closed_form);
  CHECK(est.value == doctest::Approx(1.0 - 0.45 * 0.45).epsilon(1e-15));

  // point mass on y ties itself
  CHECK(ranking_pure_closed_form(Policy::point_mass(2, 1), 3, 1, model).value ==
        1.0);
  // nothing strictly below y ever sampled
  CHECK(ranking_pure_closed_form(Policy::point_mass(2, 0), 4, 1, model).value ==
        1.0);
}

TEST_CASE("ranking closed form rejects PL models") {
  const auto pl = uniform_pl_instance(2);
  CHECK_THROWS_AS(ranking_pure_closed_form(Policy::uniform(3), 2, 0, pl),
                  std::invalid_argument);
}

TEST_CASE("closed form and enumeration agree on a small grid") {
  Rng rng(5);
  for (int n : {2, 3, 4}) {
    const auto model = uniform_rankings_instance(n);
    for (int rep = 0; rep < 3; ++rep) {
      const Policy base = rep == 0 ? Policy::uniform(n) : random_policy(rng, n);
      for (int k = 1; k <= 4; ++k) {
        for (ResponseId y = 0; y < n; ++y) {
          const WinrateQuery q{ProductPolicy(base, k), Multiset::single(y),
                               std::cref(model), CompareMode::weak};
          CHECK(std::abs(exact_winrate(q).value -
                         ranking_pure_closed_form(base, k, y, model).value) <=
                1e-12);
        }
      }
    }
  }
}

TEST_CASE("closed form is nondecreasing in k against a pure opponent") {
  Rng rng(31);
  const auto model = uniform_rankings_instance(4);
  for (int rep = 0; rep < 5; ++rep) {
    const Policy base = random_policy(rng, 4);
    for (ResponseId y = 0; y < 4; ++y) {
      double prev = 0.0;
      for (int k = 1; k <= 6; ++k) {
        const double v = ranking_pure_closed_form(base, k, y, model).value;
        CHECK(v >= prev - 1e-15);
        prev = v;
      }
    }
  }
}

TEST_CASE("policy-level antisymmetry: weak(lhs,rhs) + strict(rhs,lhs) = 1") {
  Rng rng(77);
  const auto model = uniform_rankings_instance(3);
  for (int rep = 0; rep < 10; ++rep) {
    const Policy a = random_policy(rng, 3);
    const Policy b = random_policy(rng, 3);
    const int k = 1 + static_cast<int>(rng.uniform() * 3);
    const int l = 1 + static_cast<int>(rng.uniform() * 2);
    const WinrateQuery weak{ProductPolicy(a, k), ProductPolicy(b, l),
                            std::cref(model), CompareMode::weak};
    const WinrateQuery strict_rev{ProductPolicy(b, l), ProductPolicy(a, k),
                                  std::cref(model), CompareMode::strict};
    CHECK(std::abs(exact_winrate(weak).value + exact_winrate(strict_rev).value -
                   1.0) <= 1e-12);
  }
}

TEST_CASE("multi-vs-single-copy bound on random policies") {
  Rng rng(101);
  for (const auto& model :
       {condorcet_cycle_instance(), uniform_pl_instance(2)}) {
    const int n = model.num_responses();
    for (int k = 1; k <= 4; ++k) {
      for (int rep = 0; rep < 25; ++rep) {
        const Policy pi = random_policy(rng, n);
        const WinrateQuery q{ProductPolicy(pi, k), ProductPolicy(pi, 1),
                             std::cref(model), CompareMode::weak};
        CHECK(exact_winrate(q).value >= 1.0 - 1.0 / (k + 1) - 1e-12);
      }
    }
  }
}

TEST_CASE("mc_winrate is deterministic and consistent with exact values") {
  const auto model = condorcet_cycle_instance();
  const WinrateQuery q{ProductPolicy(Policy::uniform(3), 2), Multiset::single(0),
                       std::cref(model), CompareMode::weak};
  const auto a = mc_winrate(q, 200000, 99);
  const auto b = mc_winrate(q, 200000, 99);
  CHECK(a.value == b.value);
  CHECK(a.stderr_value == b.stderr_value);
  CHECK(a.backend == Backend::monte_carlo);
  CHECK(a.n_samples == 200000);

  const double exact = exact_winrate(q).value;
  CHECK(std::abs(a.value - exact) <= 5.0 * a.stderr_value);
}

TEST_CASE("mc_winrate single draw on a deterministic tie") {
  const auto model = majority_instance(0.2);
  const WinrateQuery q{ProductPolicy(Policy::point_mass(2, 0), 1),
                       Multiset::single(0), std::cref(model), CompareMode::weak};
  const auto est = mc_winrate(q, 1, 4);
  CHECK(est.value == 1.0);  // same response always ties, weak = 1
  CHECK(est.stderr_value == 0.0);
  const WinrateQuery qs{ProductPolicy(Policy::point_mass(2, 0), 1),
                        Multiset::single(0), std::cref(model), CompareMode::strict};
  CHECK(mc_winrate(qs, 1, 4).value == 0.0);
}

TEST_CASE("mc_winrate handles PL mixtures with product opponents") {
  const auto pl = PreferenceModel::pl_mixture(
      {0.4, 0.6}, {PlComponent{{1.0, 0.0, -1.0}}, PlComponent{{0.0, 0.5, 2.0}}});
  const WinrateQuery q{ProductPolicy(Policy::uniform(3), 2),
                       ProductPolicy(Policy({0.2, 0.5, 0.3}), 2), std::cref(pl),
                       CompareMode::weak};
  const auto mc = mc_winrate(q, 400000, 2024);
  const double exact = exact_winrate(q).value;
  CHECK(std::abs(mc.value - exact) <= 5.0 * mc.stderr_value);
}

TEST_CASE("enumeration cap errors name the term count") {
  const auto model = uniform_rankings_instance(6);
  const WinrateQuery q{ProductPolicy(Policy::uniform(6), 4), Multiset::single(0),
                       std::cref(model), CompareMode::weak};
  try {
    exact_winrate(q, 10);
    FAIL("expected EnumerationCapError");
  } catch (const EnumerationCapError& e) {
    CHECK(e.cap == 10);
    CHECK(e.terms > 10);
    CHECK(std::string(e.what()).find(std::to_string(e.terms)) !=
          std::string::npos);
  }
  CHECK_THROWS_AS(
      best_pure_opponent(ProductPolicy(Policy::uniform(6), 2), 4, model, 20),
      EnumerationCapError);
}

TEST_CASE("best_pure_opponent on the majority instance") {
  const auto model = majority_instance(0.1);
  const auto res =
      best_pure_opponent(ProductPolicy(Policy::point_mass(2, 0), 3), 1, model);
  CHECK(res.witness == Multiset::single(1));
  CHECK(res.value == doctest::Approx(0.4).epsilon(1e-15));
}

TEST_CASE("best_pure_opponent ties break to the lexicographically smallest witness") {
  // uniform-reward PL: every pure opponent wins with exactly 1/(k+1)
  for (int k : {1, 2, 3}) {
    const auto model = uniform_pl_instance(k);
    const auto res =
        best_pure_opponent(ProductPolicy(Policy::uniform(k + 1), k), 1, model);
    CHECK(std::abs(res.value - 1.0 / (k + 1)) <= 1e-12);
    CHECK(res.witness == Multiset::single(0));
  }
}

TEST_CASE("best_pure_opponent value is bounded for equilibrium candidates") {
  // uniform policy on the cyclic population: two-response opponents can take
  // at most l/(k+1) of the weak rate
  const auto model = condorcet_cycle_instance();
  const auto res =
      best_pure_opponent(ProductPolicy(Policy::uniform(3), 4), 2, model);
  CHECK(res.value <= 2.0 / 5.0 + 1e-12);
}
