#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "halftsp/degreecut.hpp"
#include "halftsp/error.hpp"

using namespace halftsp;

namespace {

ErrorKind failure(const HalfIntegralInstance& inst) {
  try {
    require_degree_cut(inst);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::Internal;
}

}  // namespace

TEST_CASE("degree-cut precondition") {
  for (int n = 5; n <= 9; ++n) CHECK_NOTHROW(require_degree_cut(generate_instance("k5_degree", n, 0)));
  CHECK(failure(generate_instance("cycle_chain", 3, 0)) == ErrorKind::NotDegreeCut);
  CHECK(failure(generate_instance("envelope", 2, 0)) == ErrorKind::NotDegreeCut);
  CHECK(failure(generate_instance("k5_degree", 17, 0)) == ErrorKind::ResourceCap);
}

TEST_CASE("nu scales x for odd and even n") {
  for (const auto& v : degreecut_nu(build_support_graph(generate_instance("k5_degree", 7, 0))))
    CHECK(v == ratio(6, 28));
  for (const auto& v : degreecut_nu(build_support_graph(generate_instance("k5_degree", 8, 0))))
    CHECK(v == Rational(1, 4));
}

TEST_CASE("K5: fifteen maximum matchings, uniform decomposition") {
  const auto g = build_support_graph(generate_instance("k5_degree", 5, 0));
  const auto all = maximum_matchings(g);
  CHECK(all.size() == 15);
  CHECK(std::is_sorted(all.begin(), all.end()));
  const auto dec = decompose_matching(g, degreecut_nu(g));
  CHECK(dec.uniform);
  CHECK(dec.matching_size == 2);
  REQUIRE(dec.matchings.size() == 15);
  std::vector<Rational> marginal(g.m(), Rational(0));
  for (size_t k = 0; k < 15; ++k) {
    CHECK(dec.weights[k] == Rational(1, 15));
    for (int e : dec.matchings[k]) marginal[e] += dec.weights[k];
  }
  for (const auto& v : marginal) CHECK(v == Rational(1, 5));
}

TEST_CASE("decompositions reproduce nu exactly") {
  for (int n = 6; n <= 11; ++n) {
    CAPTURE(n);
    const auto g = build_support_graph(generate_instance("k5_degree", n, 0));
    const auto nu = degreecut_nu(g);
    const auto dec = decompose_matching(g, nu);
    std::vector<Rational> marginal(g.m(), Rational(0));
    Rational total(0);
    for (size_t k = 0; k < dec.matchings.size(); ++k) {
      CHECK(static_cast<int>(dec.matchings[k].size()) == n / 2);
      CHECK(dec.weights[k] > 0);
      total += dec.weights[k];
      for (int e : dec.matchings[k]) marginal[e] += dec.weights[k];
    }
    CHECK(total == 1);
    CHECK(marginal == nu);
  }
}

TEST_CASE("perturbed marginals") {
  for (int n : {5, 6, 7, 8}) {
    CAPTURE(n);
    const auto g = build_support_graph(generate_instance("k5_degree", n, 0));
    const auto dec = decompose_matching(g, degreecut_nu(g));
    const auto pm = perturb(g, dec.matchings.front());
    CHECK(pm.e_plus == pm.matching.front());
    CHECK(pm.zprime[pm.e_plus] == 0);
    Rational total(0);
    for (int e = 0; e < g.m(); ++e) {
      const bool in_m = std::binary_search(pm.matching.begin(), pm.matching.end(), e);
      const bool at_root = pm.root >= 0 && (g.edges[e].u == pm.root || g.edges[e].v == pm.root);
      CHECK(pm.z[e] == (in_m ? Rational(1) : at_root ? Rational(5, 12) : Rational(1, 3)));
      total += pm.zprime[e];
      if (pm.normal[e]) {
        CHECK(in_m);
        CHECK_FALSE(pm.terminal[g.edges[e].u]);
        CHECK_FALSE(pm.terminal[g.edges[e].v]);
      }
    }
    CHECK(total == n - 1);
    CHECK((pm.root >= 0) == (n % 2 == 1));
    CHECK(in_spanning_tree_polytope(g, pm.zprime));
  }
}

TEST_CASE("sampled trees and their O-join vectors") {
  const auto g = build_support_graph(generate_instance("k5_degree", 9, 0));
  const auto dec = decompose_matching(g, degreecut_nu(g));
  const auto model = fit_degreecut_model(g, dec.matchings.front());
  CHECK(model.fit_error <= 1e-8);
  Rng rng(8);
  for (int i = 0; i < 200; ++i) {
    const auto tree = model.sample(rng);
    CHECK(static_cast<int>(tree.size()) == g.n - 1);
    CHECK(std::find(tree.begin(), tree.end(), model.pm.e_plus) == tree.end());
    std::vector<char> in_tree(g.m(), 0);
    for (int e : tree) in_tree[e] = 1;
    in_tree[model.pm.e_plus] = 1;
    const auto y = degreecut_y(g, model.pm, in_tree);
    for (int e = 0; e < g.m(); ++e) {
      CHECK(y[e] >= Rational(1, 6));
      if (model.pm.normal[e] && degreecut_even_at_last(g, in_tree, e)) CHECK(y[e] == Rational(1, 6));
    }
  }
}

TEST_CASE("exact normal-edge probability matches sampling") {
  const auto g = build_support_graph(generate_instance("k5_degree", 7, 0));
  const auto dec = decompose_matching(g, degreecut_nu(g));
  const auto model = fit_degreecut_model(g, dec.matchings.front());
  const auto exact = degreecut_exact<double>(g, model);
  const long samples = 20000;
  std::vector<long> even(g.m(), 0);
  Rng rng(12);
  for (long i = 0; i < samples; ++i) {
    std::vector<char> in_tree(g.m(), 0);
    for (int e : model.sample(rng)) in_tree[e] = 1;
    in_tree[model.pm.e_plus] = 1;
    for (int e = 0; e < g.m(); ++e)
      if (model.pm.normal[e] && degreecut_even_at_last(g, in_tree, e)) ++even[e];
  }
  for (int e = 0; e < g.m(); ++e) {
    if (!model.pm.normal[e]) continue;
    const double p = exact.normal_even[e];
    const double freq = static_cast<double>(even[e]) / samples;
    CHECK(p >= 16.0 / 81);
    CHECK(std::fabs(freq - p) <= 4 * std::sqrt(p * (1 - p) / samples));
  }
}

TEST_CASE("per-vertex bound") {
  CHECK(degree_vertex_bound(6) == Rational(227, 243));
  CHECK(degree_vertex_bound(5) == Rational(227, 243) + Rational(353, 1215));
  // the proof's expression: 227/243 + (17/n)(16/243) + 1/(3n)
  for (int n : {5, 7, 9, 21})
    CHECK(degree_vertex_bound(n) == Rational(227, 243) + ratio(17 * 16, 243 * n) + ratio(1, 3 * n));
}
