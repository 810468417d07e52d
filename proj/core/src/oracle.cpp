#include "halftsp/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <map>

#include "halftsp/error.hpp"

namespace halftsp {

template <class S>
TreeEnumeration<S> enumerate_trees(const Multigraph& g, const Weights<S>& w, long cap) {
  TreeEnumeration<S> out;
  out.total_weight = S(0);
  if (g.n == 0) return out;
  std::vector<int> chosen;
  std::function<void(int, const DisjointSets&, int, const S&)> rec = [&](int i, const DisjointSets& ds, int comps,
                                                                          const S& weight) {
    if (comps == 1) {
      for (int j = i; j < g.m(); ++j)
        if (w.state[j] == EdgeState::Forced) return;
      if (static_cast<long>(out.trees.size()) >= cap) throw Error(ErrorKind::ResourceCap, "tree enumeration cap exceeded");
      out.trees.push_back(chosen);
      out.prob.push_back(weight);
      out.total_weight += weight;
      return;
    }
    if (i == g.m()) return;
    {
      DisjointSets reach = ds;
      int c = comps;
      for (int j = i; j < g.m() && c > 1; ++j)
        if (w.state[j] != EdgeState::Excluded && reach.unite(g.edges[j][0], g.edges[j][1])) --c;
      if (c > 1) return;
    }
    const int a = g.edges[i][0], b = g.edges[i][1];
    DisjointSets joined = ds;
    const bool joins = joined.unite(a, b);
    if (w.state[i] != EdgeState::Excluded && joins) {
      chosen.push_back(i);
      rec(i + 1, joined, comps - 1, weight * w.lambda[i]);
      chosen.pop_back();
    }
    if (w.state[i] != EdgeState::Forced) rec(i + 1, ds, comps, weight);
  };
  rec(0, DisjointSets(g.n), g.n, S(1));
  for (auto& p : out.prob) p /= out.total_weight;
  return out;
}

template TreeEnumeration<double> enumerate_trees(const Multigraph&, const Weights<double>&, long);
template TreeEnumeration<Rational> enumerate_trees(const Multigraph&, const Weights<Rational>&, long);

ExactPipelineResult exact_pipeline_expectations(const PreparedInstance& prepared, const ChargingParams& params,
                                                const ExactOptions& opts) {
  const HierarchyModel& model = prepared.model;
  const CutHierarchy& h = model.h;
  const SupportGraph& g = model.g;
  const int m = g.m();
  ExactPipelineResult res;
  res.tree_marginal.assign(m, Rational(0));

  using Dist = std::map<std::uint64_t, Rational>;
  auto endpoints = [&h](int e) { return (std::uint64_t{1} << h.ends[e][0]) ^ (std::uint64_t{1} << h.ends[e][1]); };
  Dist dist{{0, Rational(1)}};
  auto convolve = [&](const Dist& f) {
    Dist next;
    for (const auto& [a, pa] : dist)
      for (const auto& [b, pb] : f) next[a ^ b] += pa * pb;
    if (static_cast<long>(next.size()) > opts.cap) throw Error(ErrorKind::ResourceCap, "odd-set outcome cap exceeded");
    dist = std::move(next);
  };
  auto pair_factor = [&](const std::array<int, 2>& pair) {
    Dist f;
    f[endpoints(pair[0])] += Rational(1, 2);
    f[endpoints(pair[1])] += Rational(1, 2);
    res.tree_marginal[pair[0]] = res.tree_marginal[pair[1]] = Rational(1, 2);
    res.tree_outcomes += 2;
    convolve(f);
  };
  for (int id : h.created) {
    const CutNode& node = h.nodes[id];
    if (node.kind == NodeKind::Degree) {
      const NodeModel& nm = model.degree[model.model_of[id]];
      const auto trees = enumerate_trees(nm.graph, nm.exact, opts.cap - res.tree_outcomes);
      res.tree_outcomes += static_cast<long>(trees.trees.size());
      Dist f;
      for (size_t t = 0; t < trees.trees.size(); ++t) {
        std::uint64_t mask = 0;
        for (int local : trees.trees[t]) {
          mask ^= endpoints(nm.edges[local]);
          res.tree_marginal[nm.edges[local]] += trees.prob[t];
        }
        f[mask] += trees.prob[t];
      }
      convolve(f);
    } else {
      for (const auto& pair : node.companions) pair_factor(pair);
    }
  }
  for (const auto& pair : h.root.pairs) pair_factor(pair);
  res.odd_sets = static_cast<long>(dist.size());

  const EvenAtLastStats stats = compute_even_at_last_probs(model);
  const ChargingPlan<Rational> plan = make_plan<Rational>(h, stats, params);
  std::vector<char> fixed(h.num_groups, 0), active(h.num_groups, 0);
  int num_active = 0;
  for (int grp = 0; grp < h.num_groups; ++grp) {
    if (plan.success[grp] >= 1)
      fixed[grp] = 1;
    else if (plan.success[grp] > 0)
      active[grp] = 1, ++num_active;
  }
  res.bernoulli_patterns = num_active >= 62 ? std::numeric_limits<long>::max() : 1L << num_active;
  const double total = static_cast<double>(res.odd_sets) * std::ldexp(1.0, num_active);
  res.outcomes = total > 9e18 ? std::numeric_limits<long>::max() : res.odd_sets * res.bernoulli_patterns;

  const ScaledMetric metric = scale_metric(prepared.metric);
  res.p.assign(m, Rational(0));
  Rational join(0);
  for (const auto& [odd, po] : dist) {
    const ParityState ps = parity_state(h, odd);
    for (int e = 0; e < m; ++e)
      if (ps.even_at_last[e]) res.p[e] += po;
    join += po * Rational(min_tjoin(odd, metric).cost);
  }
  res.expected_join_cost = join * metric.unit;

  // y_e depends only on the parities of a few last cuts and the Bernoullis of
  // the edges on the boundaries of its two last cuts, so expectations factor.
  res.expected_y.assign(m, Rational(0));
  res.min_y = Rational(1);
  for (int e = 0; e < m; ++e) {
    const auto& last = h.edges[e].last;
    std::vector<int> edges{e};
    for (int l : last) edges.insert(edges.end(), h.last_cuts[l].boundary.begin(), h.last_cuts[l].boundary.end());
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    std::vector<int> cuts{last[0], last[1]}, groups;
    for (int f : edges) {
      cuts.insert(cuts.end(), h.edges[f].last.begin(), h.edges[f].last.end());
      if (active[h.edges[f].group]) groups.push_back(h.edges[f].group);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::sort(groups.begin(), groups.end());
    groups.erase(std::unique(groups.begin(), groups.end()), groups.end());
    if (cuts.size() > 62 || groups.size() > 24) throw Error(ErrorKind::ResourceCap, "edge depends on too many outcomes");
    auto pos = [&cuts](int l) { return static_cast<int>(std::lower_bound(cuts.begin(), cuts.end(), l) - cuts.begin()); };

    std::map<std::uint64_t, Rational> by_key;  // parities of `cuts`
    for (const auto& [odd, po] : dist) {
      std::uint64_t key = 0;
      for (size_t i = 0; i < cuts.size(); ++i)
        if (std::popcount(h.last_cuts[cuts[i]].mask & odd) & 1) key |= std::uint64_t{1} << i;
      by_key[key] += po;
    }
    std::vector<Rational> pattern_prob;
    for (std::uint32_t b = 0; b < (std::uint32_t{1} << groups.size()); ++b) {
      Rational pr(1);
      for (size_t i = 0; i < groups.size(); ++i)
        pr *= ((b >> i) & 1) ? plan.success[groups[i]] : Rational(1) - plan.success[groups[i]];
      pattern_prob.push_back(pr);
    }
    auto bern_of = [&](int f, std::uint32_t b) {
      const int grp = h.edges[f].group;
      if (!active[grp]) return fixed[grp] != 0;
      const int i = static_cast<int>(std::lower_bound(groups.begin(), groups.end(), grp) - groups.begin());
      return ((b >> i) & 1) != 0;
    };
    for (const auto& [key, pk] : by_key) {
      auto odd_cut = [&](int l) { return ((key >> pos(l)) & 1) != 0; };
      auto step2 = [&](int f, std::uint32_t b) {
        const bool eal = !odd_cut(h.edges[f].last[0]) && !odd_cut(h.edges[f].last[1]);
        return eal && bern_of(f, b) ? plan.base - plan.tau : plan.base;
      };
      for (std::uint32_t b = 0; b < pattern_prob.size(); ++b) {
        if (pattern_prob[b] == 0) continue;
        Rational inc(0);
        for (int j = 0; j < 2; ++j) {
          if (!odd_cut(last[j])) continue;
          Rational load(0);
          for (int f : h.last_cuts[last[j]].boundary) load += step2(f, b);
          if (load < 1) {
            const Rational v = plan.resp[e][j] * (Rational(1) - load);
            if (v > inc) inc = v;
          }
        }
        const Rational y = step2(e, b) + inc;
        res.expected_y[e] += pk * pattern_prob[b] * y;
        if (y < res.min_y) res.min_y = y;
      }
    }
  }

  if (opts.check_feasibility) {
    if (num_active > 40 || total > static_cast<double>(opts.feasibility_budget)) {
      res.feasibility_exhaustive = false;
    } else {
      std::vector<int> act;
      for (int grp = 0; grp < h.num_groups; ++grp)
        if (active[grp]) act.push_back(grp);
      for (const auto& [odd, po] : dist) {
        const ParityState ps = parity_state(h, odd);
        for (long b = 0; b < res.bernoulli_patterns; ++b) {
          std::vector<char> bern = fixed;
          for (size_t i = 0; i < act.size(); ++i) bern[act[i]] = (b >> i) & 1;
          const OJoinVector<Rational> y = build_ojoin(h, plan, ps, bern);
          const Feasibility f = check_feasible(g, y.y, odd, model.min_cuts, opts.feasibility);
          if (!f.ok) {
            if (res.infeasible == 0) res.first_failure = f;
            ++res.infeasible;
          }
        }
      }
    }
  }
  res.expected_tree_cost = 0;
  res.expected_y_cost = 0;
  for (int e = 0; e < m; ++e) {
    res.expected_tree_cost += g.cost[e] * res.tree_marginal[e];
    res.expected_y_cost += g.cost[e] * res.expected_y[e];
  }
  res.lp_cost = lp_cost(prepared.eplus.instance);
  for (const auto& cut : model.min_cuts) {
    CutExpectation ce;
    ce.side = cut.side;
    ce.kind = classify_cut(h, cut.side).kind;
    ce.expected = 0;
    for (int e : cut.boundary) ce.expected += res.expected_y[e];
    res.cuts.push_back(std::move(ce));
  }
  return res;
}

std::array<int, 4> k5_parity_census() {
  Multigraph k4;
  k4.n = 4;
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b) k4.add_edge(a, b);
  const auto trees = enumerate_trees(k4, uniform_weights<Rational>(k4));
  std::array<int, 4> census{};
  for (const auto& t : trees.trees) {
    int du = 0, dv = 0;
    for (int e : t) {
      du += k4.edges[e][0] == 0 || k4.edges[e][1] == 0;
      dv += k4.edges[e][0] == 1 || k4.edges[e][1] == 1;
    }
    ++census[(du % 2) * 2 + (dv % 2)];
  }
  return census;
}

Rational tight_gadget_probability() {
  // Variables a, b, c, d at bits 0..3; three independent factors.
  const Rational half(1, 2);
  std::vector<Rational> law(16, Rational(0));
  for (int ac = 0; ac < 2; ++ac)
    for (int b = 0; b < 2; ++b)
      for (int d = 0; d < 2; ++d) {
        const int a = ac == 0, c = ac == 1;
        law[a | (b << 1) | (c << 2) | (d << 3)] += half * half * half;
      }
  Rational p(0);
  for (int s = 0; s < 16; ++s) {
    const int A = (s & 1) + ((s >> 1) & 1), B = ((s >> 2) & 1) + ((s >> 3) & 1);
    if (A == 1 && B == 1) p += law[s];
  }
  return p;
}

Rational optimal_tour_cost(const Metric& metric) {
  const int n = metric.n;
  if (n > 16) throw Error(ErrorKind::ResourceCap, "exact tour limited to 16 vertices");
  if (n <= 1) return 0;
  const ScaledMetric d = scale_metric(metric);
  if (n == 2) return Rational(2 * d(0, 1)) * d.unit;
  // Paths from vertex n-1 through the subset `mask` of {0..n-2}, ending at j.
  const int k = n - 1;
  constexpr std::int64_t inf = std::numeric_limits<std::int64_t>::max() / 4;
  std::vector<std::int64_t> dp((size_t{1} << k) * k, inf);
  for (int j = 0; j < k; ++j) dp[(size_t{1} << j) * k + j] = d(n - 1, j);
  for (size_t mask = 1; mask < (size_t{1} << k); ++mask)
    for (int j = 0; j < k; ++j) {
      const std::int64_t cur = dp[mask * k + j];
      if (cur >= inf || !((mask >> j) & 1)) continue;
      for (int t = 0; t < k; ++t) {
        if ((mask >> t) & 1) continue;
        auto& cell = dp[(mask | (size_t{1} << t)) * k + t];
        cell = std::min(cell, cur + d(j, t));
      }
    }
  std::int64_t best = inf;
  const size_t full = (size_t{1} << k) - 1;
  for (int j = 0; j < k; ++j) best = std::min(best, dp[full * k + j] + d(j, n - 1));
  return Rational(best) * d.unit;
}

}  // namespace halftsp
