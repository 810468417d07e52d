#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "halftsp/graph.hpp"
#include "halftsp/instance.hpp"

namespace halftsp {

struct MinCut {
  VertexSet side;  // canonical side: does not contain vertex 0
  std::vector<int> boundary;
  int universe = 0;
};

struct CutEnumerationOptions {
  int exhaustive_limit = 16;  // exhaustive bipartitions up to this many vertices
  double karger_constant = 3.0;
  std::uint64_t seed = 0x6b61726765ULL;
};

/// Sides (as vertex masks not containing vertex 0) of every cut of g with
/// exactly `value` edges. Throws CutViolation if a smaller cut exists.
std::vector<std::uint64_t> cuts_of_value(const Multigraph& g, int value, const CutEnumerationOptions& opts = {});

/// All 4-edge cuts of the support graph.
std::vector<MinCut> enumerate_min_cuts(const SupportGraph& g, const CutEnumerationOptions& opts = {});

bool crossing(std::uint64_t a, std::uint64_t b, int n);
bool crossing(const MinCut& a, const MinCut& b);

enum class NodeKind { Singleton, Degree, Cycle };
const char* to_string(NodeKind kind);

inline constexpr int kRoot = -1;

struct CutNode {
  int id = 0;
  VertexSet vertices;
  int parent = kRoot;
  std::vector<int> children;  // for cycle nodes: in path order
  NodeKind kind = NodeKind::Singleton;
  std::vector<int> boundary;
  std::vector<int> up;      // delta-up: boundary edges that are also boundary edges of the parent
  std::vector<int> across;  // delta-right: the rest
  std::vector<int> interior;  // edges whose lowest containing node is this one
  std::vector<std::array<int, 2>> companions;  // cycle: pair between children[i], children[i+1]
  std::array<std::array<int, 2>, 2> end_pairs{};  // cycle: boundary pairs at the two path ends
};

/// Cycle of doubled edges left when the contraction loop stops.
struct FinalCycle {
  std::vector<int> order;  // top-level node ids
  std::vector<std::array<int, 2>> pairs;  // pairs[i] joins order[i] and order[i+1 mod k]; last holds e+
};

/// A critical cut (node id), or the union of children lo..hi of a cycle node,
/// or (node == kRoot) a cyclic arc lo..hi of the final cycle.
struct CutRef {
  int node = kRoot;
  int lo = -1;
  int hi = -1;

  bool is_interval() const { return lo >= 0; }
  auto operator<=>(const CutRef&) const = default;
};

struct LastCut {
  CutRef ref;
  VertexSet vertices;
  std::uint64_t mask = 0;
  std::vector<int> boundary;
  std::vector<int> across;  // boundary edges interior to the node the cut lives in
};

struct EdgeInfo {
  int owner = kRoot;  // S_e, or kRoot for final-cycle edges
  bool top = false;
  bool final_cycle = false;
  std::array<int, 2> last{};  // indices into CutHierarchy::last_cuts
  int companion = -1;
  int group = 0;  // edges sharing one Bernoulli
};

struct CutHierarchy {
  int n = 0;
  int e_plus = 0;
  std::vector<std::array<int, 2>> ends;  // support edge endpoints
  std::vector<CutNode> nodes;            // nodes[v] is the singleton {v}
  std::vector<int> created;              // non-singleton nodes in contraction order
  FinalCycle root;
  std::vector<EdgeInfo> edges;
  std::vector<LastCut> last_cuts;
  int num_groups = 0;
  std::map<VertexSet, CutRef> known_cuts;  // nodes, cycle intervals, final-cycle arcs

  int m() const { return static_cast<int>(ends.size()); }
  VertexSet vertices(const CutRef& ref) const;
  std::vector<int> boundary(const CutRef& ref) const;
  bool goes_higher(int node, int edge) const;
  bool is_bottom(int edge) const { return !edges[edge].top; }
};

/// Replays the contraction loop of the algorithm on the support graph.
CutHierarchy build_hierarchy(const SupportGraph& g, int e_plus, const CutEnumerationOptions& opts = {});

std::array<CutRef, 2> last_cuts(const CutHierarchy& h, int e);

enum class CutClass { CriticalNode, CycleInterval, FinalCycleArc, Unclassified };

struct CutClassification {
  CutClass kind = CutClass::Unclassified;
  CutRef ref;
};

/// Locates a vertex set (or its complement) in the hierarchy.
CutClassification classify_cut(const CutHierarchy& h, const VertexSet& side);

std::string hierarchy_json(const CutHierarchy& h);
std::string hierarchy_dot(const CutHierarchy& h);

}  // namespace halftsp
