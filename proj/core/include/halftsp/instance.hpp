#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "halftsp/graph.hpp"
#include "halftsp/rational.hpp"

namespace halftsp {

struct InstanceEdge {
  int u = 0;
  int v = 0;
  Rational x;
  Rational cost;
};

/// Dual value z_S of the subtour LP on vertex set S.
struct DualValue {
  VertexSet set;
  Rational z;
};

/// Half-integral point of the subtour LP with its cost function.
struct HalfIntegralInstance {
  std::string name;
  int n = 0;
  std::vector<InstanceEdge> edges;
  std::optional<int> e_plus;
  std::vector<DualValue> duals;
};

/// Parses the instance JSON format and validates it.
HalfIntegralInstance parse_instance(std::string_view json);
/// Canonical JSON (sorted keys, integer costs as numbers, others as "p/q").
std::string serialize_instance(const HalfIntegralInstance& inst);
/// Throws Error with a kind naming the violated constraint.
void validate_instance(const HalfIntegralInstance& inst);

/// c(x) = sum of c_e x_e.
Rational lp_cost(const HalfIntegralInstance& inst);

struct SupportEdge {
  int id = 0;
  int u = 0;
  int v = 0;
  int origin = 0;
};

/// 4-regular multigraph of x: x = 1 edges doubled, x = 1/2 edges single.
struct SupportGraph {
  int n = 0;
  std::vector<SupportEdge> edges;
  std::vector<Rational> cost;
  std::map<std::pair<int, int>, std::vector<int>> parallel;
  std::vector<std::vector<int>> incident;

  int m() const { return static_cast<int>(edges.size()); }
  int other(int e, int v) const { return edges[e].u == v ? edges[e].v : edges[e].u; }
  Multigraph multigraph() const;
  std::vector<int> boundary(const VertexSet& side) const;
  std::vector<int> boundary(std::uint64_t mask) const;
};

SupportGraph build_support_graph(const HalfIntegralInstance& inst);

struct EPlusResult {
  HalfIntegralInstance instance;
  int e_plus = 0;          // instance edge index
  int support_e_plus = 0;  // first support copy of that edge
  bool split = false;
  int split_vertex = -1;
};

/// Returns an x = 1 edge as e+, splitting one vertex when none exists.
EPlusResult split_vertex_for_eplus(const HalfIntegralInstance& inst);

/// All-pairs shortest paths of c over the instance edges.
struct Metric {
  int n = 0;
  std::vector<Rational> dist;

  const Rational& operator()(int u, int v) const { return dist[static_cast<size_t>(u) * n + v]; }
};

Metric metric_closure(const HalfIntegralInstance& inst);

/// Families: envelope, k5_degree, cycle_chain, random_half_integral,
/// plus the gadgets definitions_a, definitions_b and nested_degree.
HalfIntegralInstance generate_instance(std::string_view family, int size, std::uint64_t seed);

/// Parses "family:size".
std::pair<std::string, int> parse_generator_spec(std::string_view spec);

}  // namespace halftsp
