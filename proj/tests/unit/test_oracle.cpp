#include "doctest.h"
#include "halftsp/error.hpp"
#include "halftsp/oracle.hpp"

using namespace halftsp;

namespace {

Multigraph complete(int n) {
  Multigraph g;
  g.n = n;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) g.add_edge(i, j);
  return g;
}

}  // namespace

TEST_CASE("tree enumeration") {
  const auto k4 = enumerate_trees(complete(4), uniform_weights<Rational>(complete(4)));
  CHECK(k4.trees.size() == 16);
  for (const auto& p : k4.prob) CHECK(p == Rational(1, 16));
  CHECK(enumerate_trees(complete(5), uniform_weights<Rational>(complete(5))).trees.size() == 125);
  CHECK_THROWS_AS(enumerate_trees(complete(5), uniform_weights<Rational>(complete(5)), 100), Error);
}

TEST_CASE("K4 parity census") {
  const auto c = k5_parity_census();
  CHECK(c[0] == 2);
  CHECK(c[1] == 4);
  CHECK(c[2] == 4);
  CHECK(c[3] == 6);
}

TEST_CASE("Hoeffding extremal configurations") {
  const std::vector<Rational> extremal{Rational(1), Rational(1, 3), Rational(1, 3), Rational(1, 3)};
  const auto even = hoeffding_extremal(4, Rational(2), Functional::ParityEven);
  CHECK(even.value == Rational(13, 27));
  CHECK(even.config == extremal);
  const auto delta = hoeffding_extremal(4, Rational(2), Functional::PDeltaBound);
  CHECK(delta.value == Rational(4, 27));
  CHECK(delta.config == extremal);
  const auto w = hoeffding_extremal(4, Rational(2), Functional::PWBound);
  CHECK(w.value == Rational(1, 27));
  CHECK(evaluate_functional(Functional::ParityEven, extremal) == Rational(13, 27));
}

TEST_CASE("random configurations never beat the grid minimum") {
  Rng rng(77);
  for (Functional f : {Functional::ParityEven, Functional::PDeltaBound, Functional::PWBound}) {
    CAPTURE(to_string(f));
    const auto best = hoeffding_extremal(4, Rational(2), f);
    for (int i = 0; i < 1000; ++i) {
      const auto cfg = random_bernoulli_config(4, Rational(2), requires_certain_success(f), rng);
      Rational sum(0);
      for (const auto& p : cfg) sum += p;
      CHECK(sum == 2);
      CHECK(evaluate_functional(f, cfg) >= best.value);
    }
  }
  CHECK(parse_functional("p_W_bound") == Functional::PWBound);
  CHECK_THROWS_AS(parse_functional("nope"), Error);
}

TEST_CASE("tight gadget") { CHECK(tight_gadget_probability() == Rational(1, 4)); }

TEST_CASE("exact pipeline: probabilities agree and cut loads stay below the bound") {
  const auto prepared = prepare_instance(generate_instance("cycle_chain", 2, 0));
  const auto res = exact_pipeline_expectations(prepared, ChargingParams{});
  CHECK(res.p == compute_even_at_last_probs(prepared.model).p);
  CHECK(res.infeasible == 0);
  CHECK(res.feasibility_exhaustive);
  CHECK(res.min_y >= Rational(1, 6));
  int checked = 0;
  for (const auto& c : res.cuts) {
    if (c.kind == CutClass::FinalCycleArc) continue;
    CHECK(c.expected <= ratio(99552, 100000));
    ++checked;
  }
  CHECK(checked > 0);
}

TEST_CASE("tau = 0 gives every cut load exactly 1") {
  const auto prepared = prepare_instance(generate_instance("envelope", 3, 0));
  ChargingParams params;
  params.tau = 0;
  const auto res = exact_pipeline_expectations(prepared, params);
  for (const auto& c : res.cuts) CHECK(c.expected == 1);
}

TEST_CASE("Held-Karp") {
  CHECK(optimal_tour_cost(metric_closure(generate_instance("k5_degree", 5, 0))) == 5);
  CHECK(optimal_tour_cost(metric_closure(generate_instance("k5_degree", 8, 0))) == 8);
}
