#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "halftsp/cuts.hpp"
#include "halftsp/instance.hpp"
#include "halftsp/maxent.hpp"
#include "halftsp/random.hpp"
#include "halftsp/rational.hpp"

namespace halftsp {

struct ChargingParams {
  Rational alpha{1129032, 10000000};
  Rational beta{1, 4};
  Rational tau{1, 12};

  /// Accepts 0 <= alpha, beta <= 1/4 and 0 <= tau <= 1/4; throws InvalidArgument otherwise.
  void validate() const;
  /// 0 < alpha <= beta <= 1/4 and 0 < tau <= 1/12.
  bool in_proven_range() const;
};

/// Max-entropy fit of the interior of one degree node, on its contracted children.
struct NodeModel {
  int node = 0;
  Multigraph graph;        // vertex i = children[i] of the node
  std::vector<int> edges;  // local edge -> support edge
  LambdaWeights lambda;
  ExactWeights exact;
  bool lambda_exact = false;
  double fit_error = 0;
  int fit_iterations = 0;
  TreeSampler sampler;
};

/// Support graph, hierarchy and per-node fitted distributions.
struct HierarchyModel {
  SupportGraph g;
  CutHierarchy h;
  std::vector<NodeModel> degree;  // one per degree node
  std::vector<int> model_of;      // node id -> index into degree, or -1
  std::vector<int> local_edge;    // support edge -> local id inside its owner's model, or -1
  std::vector<MinCut> min_cuts;

  int n() const { return g.n; }
  int m() const { return g.m(); }
};

struct ModelOptions {
  FitOptions fit;
  double polish_tol = 1e-13;  // refit target when lambda has no exact rational form
  CutEnumerationOptions cuts;
};

/// Builds the hierarchy for e+ and fits every degree node to x restricted to its interior.
HierarchyModel fit_hierarchy(const SupportGraph& g, int e_plus, const ModelOptions& opts = {});

/// Support graph, e+ (splitting a vertex when needed) and fitted model of an instance.
struct PreparedInstance {
  HalfIntegralInstance original;
  EPlusResult eplus;
  HierarchyModel model;
  Metric metric;
};

PreparedInstance prepare_instance(const HalfIntegralInstance& inst, const ModelOptions& opts = {});

/// Parity of every last cut and even-at-last flag of every edge, from the odd-degree vertex set.
struct ParityState {
  std::uint64_t odd = 0;
  std::vector<char> last_odd;      // per last cut
  std::vector<char> even_at_last;  // per edge
};

ParityState parity_state(const CutHierarchy& h, std::uint64_t odd);

struct TreeSample {
  std::vector<int> edges;   // sorted support edge ids: trees of all levels plus the final cycle
  std::vector<char> in_tree;
  ParityState parity;
  std::vector<char> bernoulli;  // per Bernoulli group
};

/// One draw of the hierarchical sampler. Bernoullis are left empty.
TreeSample sample_hierarchical_tree(const HierarchyModel& model, Rng& rng);

bool even_at_last(const TreeSample& ts, int e);

/// Exact joint law of (1{e in T})_{e in F}, composed from independent per-level factors.
template <class S>
JointDistribution<S> edge_law(const HierarchyModel& model, const std::vector<int>& F, bool exact_lambda = true);

/// P[every cut in `cuts` has even tree degree], exact.
template <class S>
S prob_all_even(const HierarchyModel& model, const std::vector<std::vector<int>>& cuts);

enum class StatsMethod { Exact, MonteCarlo };

struct EvenAtLastStats {
  StatsMethod method = StatsMethod::Exact;
  long samples = 0;
  std::vector<Rational> p;
  std::vector<double> ci_half_width;  // 99% for Monte Carlo, zero when exact
};

struct StatsOptions {
  StatsMethod method = StatsMethod::Exact;
  long samples = 100000;
  std::uint64_t seed = 1;
};

/// p_e for every support edge. Exact mode throws ResourceCap when a factor spans too many edges.
EvenAtLastStats compute_even_at_last_probs(const HierarchyModel& model, const StatsOptions& opts = {});

/// Truncations, Bernoulli success probabilities and responsibilities derived from p_e.
template <class S>
struct ChargingPlan {
  std::vector<S> ptilde;                 // per edge
  std::vector<S> success;                // per group: ptilde / p, or 0
  std::vector<S> across_mass;            // per last cut: ptilde(across)
  std::vector<std::array<S, 2>> resp;    // per edge: r_L(e) for its two last cuts
  S base;
  S tau;
};

template <class S>
ChargingPlan<S> make_plan(const CutHierarchy& h, const EvenAtLastStats& stats, const ChargingParams& params);

template <class S>
void draw_bernoullis(const CutHierarchy& h, const ChargingPlan<S>& plan, TreeSample& ts, Rng& rng);

template <class S>
struct OJoinVector {
  std::vector<S> y;
  std::vector<char> reduced;
  std::vector<S> increase;
};

/// The three-step charging construction for one outcome.
template <class S>
OJoinVector<S> build_ojoin(const CutHierarchy& h, const ChargingPlan<S>& plan, const ParityState& parity,
                           const std::vector<char>& bernoulli);

template <class S>
OJoinVector<S> build_ojoin(const CutHierarchy& h, const ChargingPlan<S>& plan, const TreeSample& ts) {
  return build_ojoin(h, plan, ts.parity, ts.bernoulli);
}

struct FeasibilityOptions {
  int exhaustive_limit = 12;
  double float_tolerance = 1e-9;
};

struct Feasibility {
  bool ok = true;
  bool exhaustive = false;
  VertexSet witness;
  double value = 0;  // y(delta(witness))
};

/// y(delta(S)) >= 1 for every odd S: exhaustive at small n, else min cuts plus the 6-edge floor.
template <class S>
Feasibility check_feasible(const SupportGraph& g, const std::vector<S>& y, std::uint64_t odd,
                           const std::vector<MinCut>& min_cuts, const FeasibilityOptions& opts = {});

/// Integer-scaled metric for fast exact T-join and tour pricing.
struct ScaledMetric {
  int n = 0;
  Rational unit;  // dist = scaled * unit
  std::vector<std::int64_t> d;

  std::int64_t operator()(int u, int v) const { return d[static_cast<size_t>(u) * n + v]; }
};

ScaledMetric scale_metric(const Metric& metric);

struct TJoin {
  std::int64_t cost = 0;  // in units of ScaledMetric::unit
  std::vector<std::array<int, 2>> pairs;
};

/// Exact minimum-cost perfect matching on the odd set (bitmask DP, at most 20 vertices).
TJoin min_tjoin(std::uint64_t odd, const ScaledMetric& metric);
Rational min_tjoin_cost(const VertexSet& odd, const Metric& metric);

struct Tour {
  std::vector<int> order;
  std::int64_t cost = 0;
  std::int64_t euler_cost = 0;
};

/// Euler circuit of T plus the join pairs (as metric edges), shortcut to a Hamiltonian cycle.
Tour tour_from_join(int n, const std::vector<std::array<int, 2>>& tree_edges, const std::vector<std::array<int, 2>>& pairs,
                    const ScaledMetric& metric);

struct TourCost {
  Rational cost;
  Rational euler_cost;
  std::vector<int> order;
};

TourCost tour_cost(int n, const std::vector<std::array<int, 2>>& tree_edges, const std::vector<std::array<int, 2>>& join,
                   const Metric& metric);

}  // namespace halftsp
