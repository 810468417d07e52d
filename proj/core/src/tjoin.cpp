#include <algorithm>
#include <bit>
#include <limits>

#include "halftsp/error.hpp"
#include "halftsp/ojoin.hpp"

namespace halftsp {

ScaledMetric scale_metric(const Metric& metric) {
  ScaledMetric s;
  s.n = metric.n;
  mpz_class den = 1;
  for (const auto& d : metric.dist) den = lcm(den, mpz_class(d.get_den()));
  s.unit = Rational(mpz_class(1), den);
  const mpz_class cap = mpz_class(std::numeric_limits<std::int64_t>::max() / 64);
  for (const auto& d : metric.dist) {
    const mpz_class v = d.get_num() * (den / d.get_den());
    if (v > cap) throw Error(ErrorKind::ResourceCap, "metric does not fit 64-bit scaled integers");
    s.d.push_back(v.get_si());
  }
  return s;
}

TJoin min_tjoin(std::uint64_t odd, const ScaledMetric& metric) {
  const VertexSet vs = set_of(odd);
  const int k = static_cast<int>(vs.size());
  if (k % 2 != 0) throw Error(ErrorKind::InvalidArgument, "odd vertex set has odd size");
  if (k > 20) throw Error(ErrorKind::ResourceCap, "T-join limited to 20 odd vertices");
  TJoin out;
  if (k == 0) return out;
  const std::uint32_t full = (std::uint32_t{1} << k) - 1;
  constexpr std::int64_t inf = std::numeric_limits<std::int64_t>::max();
  // best[mask]: cheapest perfect matching of the vertices not in mask.
  std::vector<std::int64_t> best(size_t{1} << k, inf);
  std::vector<std::uint8_t> partner(size_t{1} << k, 0);
  best[full] = 0;
  for (std::uint32_t mask = full; mask-- > 0;) {
    if (std::popcount(mask) % 2 != 0) continue;
    const int i = std::countr_one(mask);
    std::int64_t b = inf;
    for (int j = i + 1; j < k; ++j) {
      if ((mask >> j) & 1) continue;
      const std::int64_t rest = best[mask | (1u << i) | (1u << j)];
      if (rest == inf) continue;
      const std::int64_t c = rest + metric(vs[i], vs[j]);
      if (c < b) {
        b = c;
        partner[mask] = static_cast<std::uint8_t>(j);
      }
    }
    best[mask] = b;
  }
  out.cost = best[0];
  for (std::uint32_t mask = 0; mask != full;) {
    const int i = std::countr_one(mask);
    const int j = partner[mask];
    out.pairs.push_back({vs[i], vs[j]});
    mask |= (1u << i) | (1u << j);
  }
  return out;
}

Rational min_tjoin_cost(const VertexSet& odd, const Metric& metric) {
  const ScaledMetric s = scale_metric(metric);
  return Rational(min_tjoin(mask_of(odd), s).cost) * s.unit;
}

Tour tour_from_join(int n, const std::vector<std::array<int, 2>>& tree_edges, const std::vector<std::array<int, 2>>& pairs,
                    const ScaledMetric& metric) {
  std::vector<std::array<int, 2>> edges = tree_edges;
  edges.insert(edges.end(), pairs.begin(), pairs.end());
  std::vector<std::vector<std::pair<int, int>>> adj(n);
  Tour t;
  for (int i = 0; i < static_cast<int>(edges.size()); ++i) {
    const auto [u, v] = edges[i];
    adj[u].push_back({v, i});
    adj[v].push_back({u, i});
    t.euler_cost += metric(u, v);
  }
  for (int v = 0; v < n; ++v)
    if (adj[v].size() % 2 != 0) throw Error(ErrorKind::InvalidArgument, "tree plus join is not Eulerian");
  std::vector<char> used(edges.size(), 0);
  std::vector<size_t> next(n, 0);
  std::vector<int> stack{0}, circuit;
  while (!stack.empty()) {
    const int v = stack.back();
    auto& it = next[v];
    while (it < adj[v].size() && used[adj[v][it].second]) ++it;
    if (it == adj[v].size()) {
      circuit.push_back(v);
      stack.pop_back();
    } else {
      used[adj[v][it].second] = 1;
      stack.push_back(adj[v][it].first);
    }
  }
  if (static_cast<int>(circuit.size()) != static_cast<int>(edges.size()) + 1)
    throw Error(ErrorKind::InvalidArgument, "tree plus join is not connected");
  std::vector<char> seen(n, 0);
  for (int v : circuit)
    if (!seen[v]) {
      seen[v] = 1;
      t.order.push_back(v);
    }
  if (static_cast<int>(t.order.size()) != n) throw Error(ErrorKind::InvalidArgument, "tree plus join is not spanning");
  for (int i = 0; i < n; ++i) t.cost += metric(t.order[i], t.order[(i + 1) % n]);
  return t;
}

TourCost tour_cost(int n, const std::vector<std::array<int, 2>>& tree_edges, const std::vector<std::array<int, 2>>& join,
                   const Metric& metric) {
  const ScaledMetric s = scale_metric(metric);
  const Tour t = tour_from_join(n, tree_edges, join, s);
  return {Rational(t.cost) * s.unit, Rational(t.euler_cost) * s.unit, t.order};
}

}  // namespace halftsp
