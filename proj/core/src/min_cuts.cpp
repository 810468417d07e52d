#include <algorithm>
#include <bit>
#include <cmath>
#include <set>

#include "halftsp/cuts.hpp"
#include "halftsp/error.hpp"
#include "halftsp/random.hpp"

namespace halftsp {

namespace {

[[noreturn]] void too_small(int value, int found, std::uint64_t side) {
  std::string s;
  for (int v : set_of(side)) s += (s.empty() ? "" : ",") + std::to_string(v);
  throw Error(ErrorKind::CutViolation, "cut with " + std::to_string(found) + " < " + std::to_string(value) +
                                           " edges: S = {" + s + "}");
}

std::vector<std::uint64_t> exhaustive(const Multigraph& g, int value) {
  const int n = g.n;
  std::vector<std::uint64_t> adj(n * n, 0);
  std::vector<int> deg(n, 0);
  std::vector<std::vector<int>> mult(n, std::vector<int>(n, 0));
  for (const auto& e : g.edges) {
    if (e[0] == e[1]) continue;
    ++deg[e[0]];
    ++deg[e[1]];
    ++mult[e[0]][e[1]];
    ++mult[e[1]][e[0]];
  }
  std::vector<std::uint64_t> out;
  // Gray-code walk over subsets of {1..n-1}; cut value updated per toggle.
  const std::uint64_t count = std::uint64_t{1} << (n - 1);
  std::uint64_t mask = 0;
  int cut = 0;
  for (std::uint64_t i = 1; i < count; ++i) {
    const int bit = std::countr_zero(i) + 1;
    const std::uint64_t b = std::uint64_t{1} << bit;
    int inside = 0;
    for (int u = 0; u < n; ++u)
      if ((mask >> u) & 1) inside += mult[bit][u];
    if (mask & b) {
      mask &= ~b;
      cut += 2 * inside - deg[bit];
    } else {
      mask |= b;
      cut += deg[bit] - 2 * inside;
    }
    if (cut < value) too_small(value, cut, mask);
    if (cut == value) out.push_back(mask);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::uint64_t> karger(const Multigraph& g, int value, const CutEnumerationOptions& opts) {
  const int n = g.n;
  const auto reps = static_cast<long>(std::ceil(opts.karger_constant * n * n * std::log(static_cast<double>(n))));
  Rng rng(opts.seed);
  std::set<std::uint64_t> found;
  std::vector<int> order(g.m());
  for (int i = 0; i < g.m(); ++i) order[i] = i;
  for (long r = 0; r < reps; ++r) {
    for (int i = g.m() - 1; i > 0; --i) std::swap(order[i], order[rng() % (i + 1)]);
    DisjointSets ds(n);
    int comps = n;
    for (int idx : order) {
      if (comps == 2) break;
      if (ds.unite(g.edges[idx][0], g.edges[idx][1])) --comps;
    }
    if (comps != 2) continue;
    const int root0 = ds.find(0);
    std::uint64_t side = 0;
    for (int v = 0; v < n; ++v)
      if (ds.find(v) != root0) side |= std::uint64_t{1} << v;
    int cut = 0;
    for (const auto& e : g.edges)
      if (((side >> e[0]) ^ (side >> e[1])) & 1) ++cut;
    if (cut < value) too_small(value, cut, side);
    if (cut == value) found.insert(side);
  }
  return {found.begin(), found.end()};
}

}  // namespace

std::vector<std::uint64_t> cuts_of_value(const Multigraph& g, int value, const CutEnumerationOptions& opts) {
  if (g.n > 62) throw Error(ErrorKind::ResourceCap, "cut enumeration limited to 62 vertices");
  if (g.n < 2) return {};
  if (!is_connected(g)) throw Error(ErrorKind::CutViolation, "graph is disconnected");
  if (g.n <= opts.exhaustive_limit) return exhaustive(g, value);
  return karger(g, value, opts);
}

std::vector<MinCut> enumerate_min_cuts(const SupportGraph& g, const CutEnumerationOptions& opts) {
  std::vector<MinCut> out;
  for (std::uint64_t side : cuts_of_value(g.multigraph(), 4, opts)) {
    MinCut c;
    c.side = set_of(side);
    c.boundary = g.boundary(side);
    c.universe = g.n;
    out.push_back(std::move(c));
  }
  return out;
}

bool crossing(std::uint64_t a, std::uint64_t b, int n) {
  const std::uint64_t full = n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
  return (a & b) != 0 && (a & ~b) != 0 && (b & ~a) != 0 && (full & ~(a | b)) != 0;
}

bool crossing(const MinCut& a, const MinCut& b) {
  return crossing(mask_of(a.side), mask_of(b.side), std::max(a.universe, b.universe));
}

}  // namespace halftsp
