#include <cmath>
#include <map>

#include "doctest.h"
#include "halftsp/error.hpp"
#include "halftsp/maxent.hpp"
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

TEST_CASE("matrix-tree counts") {
  CHECK(weighted_tree_count(complete(3), uniform_weights<Rational>(complete(3))) == 3);
  CHECK(weighted_tree_count(complete(4), uniform_weights<Rational>(complete(4))) == 16);
  CHECK(weighted_tree_count(complete(5), uniform_weights<Rational>(complete(5))) == 125);
}

TEST_CASE("enumeration agrees with the determinant") {
  const auto tri = enumerate_trees(complete(3), uniform_weights<Rational>(complete(3)));
  REQUIRE(tri.trees.size() == 3);
  for (const auto& p : tri.prob) CHECK(p == Rational(1, 3));

  Multigraph g = complete(4);
  g.add_edge(0, 1);
  Weights<Rational> w = uniform_weights<Rational>(g);
  for (int e = 0; e < g.m(); ++e) w.lambda[e] = Rational(e + 1, 3);
  const auto en = enumerate_trees(g, w);
  CHECK(en.total_weight == weighted_tree_count(g, w));
  Rational total(0);
  for (const auto& p : en.prob) total += p;
  CHECK(total == 1);
  const auto marg = tree_marginals(g, w);
  std::vector<Rational> from_enum(g.m(), Rational(0));
  for (size_t t = 0; t < en.trees.size(); ++t)
    for (int e : en.trees[t]) from_enum[e] += en.prob[t];
  CHECK(marg == from_enum);
}

TEST_CASE("K4 uniform target fits to constant lambda") {
  const auto g = complete(4);
  const auto fit = fit_lambda(g, std::vector<double>(6, 0.5));
  const auto m = tree_marginals(g, fit.weights);
  for (double v : m) CHECK(std::fabs(v - 0.5) <= 1e-8);
  for (double l : fit.weights.lambda) CHECK(std::fabs(l / fit.weights.lambda[0] - 1) <= 1e-6);
  const auto ex = exact_lambda(g, fit.weights, std::vector<Rational>(6, Rational(1, 2)));
  CHECK(ex.exact);
}

TEST_CASE("refit reproduces the generating lambda up to scale") {
  Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    Multigraph g = complete(4 + trial % 3);
    g.add_edge(0, 1);
    LambdaWeights w = uniform_weights<double>(g);
    for (auto& l : w.lambda) l = 0.25 + 2 * uniform01(rng);
    const auto target = tree_marginals(g, w);
    const auto fit = fit_lambda(g, target, FitOptions{1e-11, 200000});
    const auto m = tree_marginals(g, fit.weights);
    for (int e = 0; e < g.m(); ++e) CHECK(std::fabs(m[e] - target[e]) <= 1e-9);
    for (int e = 0; e < g.m(); ++e)
      CHECK(std::fabs(fit.weights.lambda[e] / fit.weights.lambda[0] - w.lambda[e] / w.lambda[0]) <= 1e-6);
  }
}

TEST_CASE("forced and excluded targets") {
  Multigraph g = complete(4);
  std::vector<double> target{1, 0.5, 0.5, 0.5, 0.5, 0};
  // edge 0 = 01 forced, edge 5 = 23 excluded: contracted graph is a triangle with a doubled side
  const auto fit = fit_lambda(g, target);
  CHECK(fit.weights.state[0] == EdgeState::Forced);
  CHECK(fit.weights.state[5] == EdgeState::Excluded);
  const auto m = tree_marginals(g, fit.weights);
  for (int e = 1; e < 5; ++e) CHECK(std::fabs(m[e] - 0.5) <= 1e-8);
}

TEST_CASE("targets off the polytope are rejected") {
  const auto g = complete(4);
  CHECK_THROWS_AS(fit_lambda(g, std::vector<double>(6, 0.4)), Error);
}

TEST_CASE("Wilson sampler matches the uniform law on K4") {
  const auto g = complete(4);
  const LambdaWeights w = uniform_weights<double>(g);
  TreeSampler sampler(g, w);
  Rng rng(5);
  std::map<std::vector<int>, long> freq;
  const long samples = 40000;
  for (long i = 0; i < samples; ++i) ++freq[sampler(rng)];
  CHECK(freq.size() == 16);
  double tv = 0;
  for (const auto& [tree, c] : freq) tv += std::fabs(static_cast<double>(c) / samples - 1.0 / 16);
  CHECK(tv / 2 <= 0.02);
}

TEST_CASE("joint law and parity of a cut") {
  const auto g = complete(4);
  const auto joint = joint_distribution(g, uniform_weights<Rational>(g), {0, 1, 2});
  Rational total(0);
  for (const auto& p : joint.prob) total += p;
  CHECK(total == 1);
  CHECK(joint.marginal(0) == Rational(1, 2));
  const auto [even, odd] = parity_distribution(joint, {0, 1, 2});
  CHECK(even + odd == 1);
  // vertex 0 has degree 1 in 9 trees, 2 in 6, 3 in 1
  CHECK(even == Rational(3, 8));
}
