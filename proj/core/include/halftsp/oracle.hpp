#pragma once

#include <array>
#include <string>
#include <vector>

#include "halftsp/cuts.hpp"
#include "halftsp/maxent.hpp"
#include "halftsp/ojoin.hpp"
#include "halftsp/rational.hpp"

namespace halftsp {

inline constexpr long kOracleCap = 10000000;

template <class S>
struct TreeEnumeration {
  std::vector<std::vector<int>> trees;  // sorted edge ids
  std::vector<S> prob;
  S total_weight;
};

/// Every spanning tree (forced edges in, excluded out) with probability proportional to its weight.
template <class S>
TreeEnumeration<S> enumerate_trees(const Multigraph& g, const Weights<S>& w, long cap = kOracleCap);

struct ExactOptions {
  long cap = kOracleCap;
  bool check_feasibility = true;
  long feasibility_budget = 1L << 16;  // outcomes checked one by one
  FeasibilityOptions feasibility;
};

struct CutExpectation {
  VertexSet side;
  CutClass kind = CutClass::Unclassified;
  Rational expected;  // E[y(delta(S))]
};

struct ExactPipelineResult {
  std::vector<Rational> p;           // even-at-last probabilities from the outcome enumeration
  std::vector<Rational> expected_y;  // per edge
  std::vector<Rational> tree_marginal;
  std::vector<CutExpectation> cuts;  // every min cut
  Rational expected_tree_cost;
  Rational expected_join_cost;
  Rational expected_y_cost;
  Rational lp_cost;
  Rational min_y;
  long tree_outcomes = 0;  // sum of per-level outcome counts
  long odd_sets = 0;       // distinct odd-vertex sets
  long bernoulli_patterns = 0;
  long outcomes = 0;  // odd_sets * bernoulli_patterns, saturating
  long infeasible = 0;
  bool feasibility_exhaustive = true;  // false when the outcome space exceeded the budget
  Feasibility first_failure;
};

/// Exact expectations of the charging construction by enumerating (odd set, Bernoulli) outcomes.
ExactPipelineResult exact_pipeline_expectations(const PreparedInstance& prepared, const ChargingParams& params,
                                                const ExactOptions& opts = {});

/// Tree counts on K4 (uniform) by the parities of the endpoints of edge 01:
/// {even-even, even-odd, odd-even, odd-odd}.
std::array<int, 4> k5_parity_census();

enum class Functional { ParityEven, PDeltaBound, PWBound };

const char* to_string(Functional f);
Functional parse_functional(const std::string& name);

/// Value of the functional on independent Bernoullis with the given success probabilities.
Rational evaluate_functional(Functional f, const std::vector<Rational>& p);

/// PDeltaBound and PWBound are minimised subject to some p_i = 1.
bool requires_certain_success(Functional f);

struct HoeffdingResult {
  Rational value;
  std::vector<Rational> config;  // sorted descending
};

/// Minimum over configurations with entries in {0, x, 1} summing to q (m <= 6).
HoeffdingResult hoeffding_extremal(int m, const Rational& q, Functional f);

/// Random configuration of m success probabilities (denominator 1000) summing to q.
std::vector<Rational> random_bernoulli_config(int m, const Rational& q, bool certain_success, Rng& rng);

/// P[A_T = B_T = 1] for A = {a, b}, B = {c, d} under (x_a/2 + x_c/2)(1/2 + x_b/2)(1/2 + x_d/2).
Rational tight_gadget_probability();

/// Optimal tour length by Held-Karp (n <= 16).
Rational optimal_tour_cost(const Metric& metric);

}  // namespace halftsp
