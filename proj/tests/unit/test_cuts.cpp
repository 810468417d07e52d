#include <algorithm>
#include <set>

#include "doctest.h"
#include "halftsp/cuts.hpp"
#include "halftsp/ojoin.hpp"
#include "json.hpp"

using namespace halftsp;

namespace {

std::vector<HalfIntegralInstance> corpus() {
  std::vector<HalfIntegralInstance> out;
  out.push_back(generate_instance("k5_degree", 5, 0));
  out.push_back(generate_instance("k5_degree", 7, 0));
  for (int k = 2; k <= 5; ++k) out.push_back(generate_instance("cycle_chain", k, 0));
  for (int k = 2; k <= 4; ++k) out.push_back(generate_instance("envelope", k, 0));
  out.push_back(generate_instance("definitions_a", 0, 0));
  out.push_back(generate_instance("nested_degree", 0, 0));
  for (int s = 1; s <= 4; ++s) out.push_back(generate_instance("random_half_integral", 10, s));
  return out;
}

bool subset(const VertexSet& a, const VertexSet& b) { return std::includes(b.begin(), b.end(), a.begin(), a.end()); }

}  // namespace

TEST_CASE("K5 all-half has exactly the five singleton min cuts") {
  const auto g = build_support_graph(generate_instance("k5_degree", 5, 0));
  const auto cuts = enumerate_min_cuts(g);
  CHECK(cuts.size() == 5);
  for (const auto& c : cuts) {
    CHECK(c.boundary.size() == 4);
    CHECK((c.side.size() == 1 || c.side.size() == 4));
  }
}

TEST_CASE("crossing") {
  const int n = 8;
  CHECK_FALSE(crossing(0b10, 0b100, n));
  CHECK_FALSE(crossing(0b110, 0b1110, n));
  CHECK(crossing(0b0110, 0b1100, n));
  CHECK_FALSE(crossing(0b0110, 0xF9, n));  // complement
}

TEST_CASE("cycle chain: one cycle node holding the chain") {
  for (int k = 2; k <= 6; ++k) {
    CAPTURE(k);
    const auto p = prepare_instance(generate_instance("cycle_chain", k, 0));
    const auto& h = p.model.h;
    int cycles = 0;
    for (int id : h.created) {
      const auto& node = h.nodes[id];
      if (node.kind != NodeKind::Cycle) continue;
      ++cycles;
      CHECK(static_cast<int>(node.children.size()) == k);
      CHECK(static_cast<int>(node.companions.size()) == k - 1);
      for (const auto& [a, b] : node.companions) {
        auto ea = h.ends[a], eb = h.ends[b];
        std::sort(ea.begin(), ea.end());
        std::sort(eb.begin(), eb.end());
        CHECK(ea == eb);
      }
    }
    CHECK(cycles == 1);
  }
}

TEST_CASE("gadget: degree cut over four top cuts with one up edge each") {
  const auto p = prepare_instance(generate_instance("definitions_a", 0, 0));
  const auto& h = p.model.h;
  const auto it = std::find_if(h.created.begin(), h.created.end(), [&](int id) {
    return h.nodes[id].kind == NodeKind::Degree && h.nodes[id].children.size() == 4;
  });
  REQUIRE(it != h.created.end());
  for (int c : h.nodes[*it].children) {
    CHECK(h.nodes[c].up.size() == 1);
    CHECK(h.nodes[c].across.size() == 3);
  }
}

TEST_CASE("every min cut is a hierarchy node or an interval of a cycle") {
  for (const auto& inst : corpus()) {
    CAPTURE(inst.name);
    const auto p = prepare_instance(inst);
    for (const auto& c : p.model.min_cuts) CHECK(classify_cut(p.model.h, c.side).kind != CutClass::Unclassified);
  }
}

TEST_CASE("min cut pairs share at most two boundary edges") {
  for (const auto& inst : corpus()) {
    CAPTURE(inst.name);
    const auto p = prepare_instance(inst);
    const auto& cuts = p.model.min_cuts;
    for (size_t i = 0; i < cuts.size(); ++i)
      for (size_t j = i + 1; j < cuts.size(); ++j) {
        std::vector<int> common;
        std::set_intersection(cuts[i].boundary.begin(), cuts[i].boundary.end(), cuts[j].boundary.begin(),
                              cuts[j].boundary.end(), std::back_inserter(common));
        CHECK(common.size() <= 2);
      }
  }
}

TEST_CASE("hierarchy invariants") {
  for (const auto& inst : corpus()) {
    CAPTURE(inst.name);
    const auto p = prepare_instance(inst);
    const auto& h = p.model.h;
    for (size_t a = 0; a < h.nodes.size(); ++a)
      for (size_t b = a + 1; b < h.nodes.size(); ++b) {
        const auto& x = h.nodes[a].vertices;
        const auto& y = h.nodes[b].vertices;
        std::vector<int> common;
        std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(common));
        CHECK((common.empty() || subset(x, y) || subset(y, x)));
      }
    for (const auto& node : h.nodes) {
      std::set<int> parts(node.up.begin(), node.up.end());
      parts.insert(node.across.begin(), node.across.end());
      CHECK(parts.size() == node.up.size() + node.across.size());
      CHECK(parts == std::set<int>(node.boundary.begin(), node.boundary.end()));
      if (node.parent == kRoot) continue;
      CHECK(node.boundary.size() == 4);
      if (h.nodes[node.parent].kind == NodeKind::Degree) CHECK(node.up.size() <= 1);
      if (h.nodes[node.parent].kind == NodeKind::Cycle) CHECK((node.up.empty() || node.up.size() == 2));
    }
  }
}

TEST_CASE("last cuts of a top edge are the children holding its endpoints") {
  const auto p = prepare_instance(generate_instance("definitions_a", 0, 0));
  const auto& h = p.model.h;
  int checked = 0;
  for (int e = 0; e < h.m(); ++e) {
    if (!h.edges[e].top || h.edges[e].final_cycle) continue;
    const auto refs = last_cuts(h, e);
    const auto& owner = h.nodes[h.edges[e].owner];
    for (const auto& r : refs) {
      CHECK_FALSE(r.is_interval());
      CHECK(std::find(owner.children.begin(), owner.children.end(), r.node) != owner.children.end());
    }
    const auto a = h.vertices(refs[0]);
    const auto b = h.vertices(refs[1]);
    const auto [u, v] = h.ends[e];
    CHECK(((std::binary_search(a.begin(), a.end(), u) && std::binary_search(b.begin(), b.end(), v)) ||
           (std::binary_search(a.begin(), a.end(), v) && std::binary_search(b.begin(), b.end(), u))));
    ++checked;
  }
  CHECK(checked > 0);
}

TEST_CASE("last cuts of a bottom edge split its cycle into a prefix and a suffix") {
  const auto p = prepare_instance(generate_instance("cycle_chain", 4, 0));
  const auto& h = p.model.h;
  int checked = 0;
  for (int e = 0; e < h.m(); ++e) {
    if (h.edges[e].top || h.edges[e].final_cycle) continue;
    const auto& owner = h.nodes[h.edges[e].owner];
    REQUIRE(owner.kind == NodeKind::Cycle);
    const auto refs = last_cuts(h, e);
    auto a = h.vertices(refs[0]);
    const auto b = h.vertices(refs[1]);
    std::vector<int> common;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
    CHECK(common.empty());
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    CHECK(a == owner.vertices);
    const auto first = h.nodes[owner.children.front()].vertices;
    const auto last = h.nodes[owner.children.back()].vertices;
    const auto lo = h.vertices(refs[0]);
    CHECK(((subset(first, lo) && subset(last, b)) || (subset(last, lo) && subset(first, b))));
    ++checked;
  }
  CHECK(checked == 2 * 3);
}

TEST_CASE("hierarchy dumps") {
  const auto p = prepare_instance(generate_instance("cycle_chain", 3, 0));
  const auto j = nlohmann::json::parse(hierarchy_json(p.model.h));
  CHECK(j.contains("nodes"));
  CHECK(hierarchy_dot(p.model.h).find("graph") != std::string::npos);
}
