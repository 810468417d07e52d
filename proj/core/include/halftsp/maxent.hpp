#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "halftsp/graph.hpp"
#include "halftsp/random.hpp"
#include "halftsp/rational.hpp"

namespace halftsp {

enum class EdgeState : std::uint8_t { Free, Forced, Excluded };

/// Weights of a lambda-uniform spanning tree distribution. Forced edges are in
/// every tree (target marginal 1), excluded edges in none (target 0).
template <class S>
struct Weights {
  std::vector<S> lambda;
  std::vector<EdgeState> state;
};

using LambdaWeights = Weights<double>;
using ExactWeights = Weights<Rational>;

template <class S>
Weights<S> uniform_weights(const Multigraph& g) {
  return {std::vector<S>(g.m(), S(1)), std::vector<EdgeState>(g.m(), EdgeState::Free)};
}

/// Weighted number of spanning trees that contain every forced edge.
template <class S>
S weighted_tree_count(const Multigraph& g, const Weights<S>& w);

/// P[e in T] for every edge under the lambda-uniform distribution.
template <class S>
std::vector<S> tree_marginals(const Multigraph& g, const Weights<S>& w);

struct FitOptions {
  double tol = 1e-8;  // max relative marginal error
  int max_iterations = 100000;
};

struct FitResult {
  LambdaWeights weights;
  double max_rel_error = 0;
  int iterations = 0;
};

/// Multiplicative updates lambda_e *= (z_e / m_e)^eta with eta halved whenever
/// the error grows. Targets equal to 1 or 0 become forced or excluded edges.
FitResult fit_lambda(const Multigraph& g, const std::vector<double>& target, const FitOptions& opts = {});

struct ExactFit {
  ExactWeights weights;
  bool exact = false;  // the rational weights reproduce the targets exactly
};

/// Rational weights for a fitted lambda: small-denominator snap when it
/// reproduces the targets exactly, else the exact dyadic value of each double.
ExactFit exact_lambda(const Multigraph& g, const LambdaWeights& fitted, const std::vector<Rational>& target);

/// Exact sampler for the lambda-uniform distribution (Wilson's algorithm on
/// the graph with forced edges contracted).
class TreeSampler {
 public:
  TreeSampler() = default;
  TreeSampler(const Multigraph& g, const LambdaWeights& w);

  /// Edge ids of a spanning tree, forced edges included, sorted.
  std::vector<int> operator()(Rng& rng) const;

 private:
  struct Arc {
    int to;
    int edge;
    double cumulative;
  };
  int reduced_n_ = 0;
  std::vector<int> forced_;
  std::vector<std::vector<Arc>> arcs_;
};

std::vector<int> sample_tree(const Multigraph& g, const LambdaWeights& w, Rng& rng);

/// Joint law of the indicators (1{e in T})_{e in F}; bit i of a pattern is F[i].
template <class S>
struct JointDistribution {
  std::vector<int> edges;
  std::vector<S> prob;

  S marginal(size_t i) const {
    S out(0);
    for (size_t p = 0; p < prob.size(); ++p)
      if ((p >> i) & 1) out += prob[p];
    return out;
  }
};

inline constexpr int kMaxJointEdges = 10;

template <class S>
JointDistribution<S> joint_distribution(const Multigraph& g, const Weights<S>& w, const std::vector<int>& F);

/// (P[even], P[odd]) of the number of cut_edges in T; cut_edges must be a subset of joint.edges.
template <class S>
std::pair<S, S> parity_distribution(const JointDistribution<S>& joint, const std::vector<int>& cut_edges);

}  // namespace halftsp
