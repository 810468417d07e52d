#pragma once

#include <cstdint>
#include <vector>

#include "halftsp/instance.hpp"
#include "halftsp/maxent.hpp"
#include "halftsp/ojoin.hpp"
#include "halftsp/rational.hpp"

namespace halftsp {

inline constexpr int kMaxDegreeCutVertices = 16;

/// Throws NotDegreeCut naming a proper tight set (or an x = 1 edge) when one exists.
void require_degree_cut(const HalfIntegralInstance& inst);

/// (n-1)/(2n) x for odd n, x/2 for even n.
std::vector<Rational> degreecut_nu(const SupportGraph& g);

/// Every maximum matching of g as sorted edge lists, in lexicographic order.
std::vector<std::vector<int>> maximum_matchings(const SupportGraph& g);

struct MatchingDecomposition {
  std::vector<std::vector<int>> matchings;  // sorted edge ids
  std::vector<Rational> weights;
  int matching_size = 0;
  bool uniform = false;  // uniform over all maximum matchings
};

/// Exact convex decomposition of nu into maximum matchings.
MatchingDecomposition decompose_matching(const SupportGraph& g, const std::vector<Rational>& nu);

struct PerturbedMarginals {
  std::vector<int> matching;
  std::vector<Rational> z;
  std::vector<Rational> zprime;  // z with z'_{e+} = 0
  int root = -1;                 // -1 for even n
  int e_plus = -1;               // lowest edge of the matching
  std::vector<char> terminal;    // per vertex
  std::vector<char> normal;      // per edge
};

PerturbedMarginals perturb(const SupportGraph& g, const std::vector<int>& matching);

/// z'(E) = n - 1 and z'(E(S)) <= |S| - 1 for every proper S (exhaustive).
bool in_spanning_tree_polytope(const SupportGraph& g, const std::vector<Rational>& zprime);

/// Sets S with z'(E(S)) = |S| - 1, |S| >= 2, as vertex masks (exhaustive).
std::vector<std::uint64_t> tight_tree_sets(const SupportGraph& g, const std::vector<Rational>& zprime);

/// One set of a maximal laminar family of tight sets, its children contracted.
struct LaminarNode {
  std::uint64_t vertices = 0;
  Multigraph graph;        // children and uncovered vertices as vertices
  std::vector<int> edges;  // local edge -> support edge
  LambdaWeights lambda;
  double fit_error = 0;
  TreeSampler sampler;
};

/// Max-entropy tree distribution with marginals z' on g (e+ excluded). z' lies
/// on a face of the spanning tree polytope, so the law is a product of
/// lambda-uniform distributions over the contracted laminar nodes.
struct DegreeCutModel {
  PerturbedMarginals pm;
  std::vector<LaminarNode> nodes;  // children before parents
  std::vector<int> node_of_edge;   // -1 when the edge lies in no node graph
  std::vector<int> local_edge;
  double fit_error = 0;

  /// Sorted support edges of a tree (e+ not included).
  std::vector<int> sample(Rng& rng) const;
};

DegreeCutModel fit_degreecut_model(const SupportGraph& g, const std::vector<int>& matching, const FitOptions& fit = {});

/// O-join vector of the perturbed construction given T + e+.
std::vector<Rational> degreecut_y(const SupportGraph& g, const PerturbedMarginals& pm, const std::vector<char>& in_tree);

/// Both endpoints even in T + e+.
bool degreecut_even_at_last(const SupportGraph& g, const std::vector<char>& in_tree, int e);

/// Exact per-model quantities under the fitted lambda (taken as exact dyadic rationals in rational mode).
template <class S>
struct DegreeCutExact {
  std::vector<S> normal_even;   // P[e even at last] for normal edges, else 0
  std::vector<S> expected_y;    // per edge
  std::vector<S> vertex_load;   // E[y(delta(u))]
};

template <class S>
DegreeCutExact<S> degreecut_exact(const SupportGraph& g, const DegreeCutModel& model);

/// 227/243 + 353/(243 n) for odd n, 227/243 for even n.
Rational degree_vertex_bound(int n);

}  // namespace halftsp
