#include "halftsp/degreecut.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <type_traits>

#include "halftsp/cuts.hpp"
#include "halftsp/error.hpp"

namespace halftsp {

namespace {

std::string format_set(const VertexSet& s) {
  std::string out = "{";
  for (size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out + "}";
}

std::uint64_t matching_edges(const std::vector<int>& matching) {
  std::uint64_t mask = 0;
  for (int e : matching) mask |= std::uint64_t{1} << e;
  return mask;
}

}  // namespace

void require_degree_cut(const HalfIntegralInstance& inst) {
  validate_instance(inst);
  for (const auto& e : inst.edges)
    if (e.x == 1)
      throw Error(ErrorKind::NotDegreeCut, "not a degree-cut instance: tight set " + format_set({std::min(e.u, e.v), std::max(e.u, e.v)}));
  const SupportGraph g = build_support_graph(inst);
  if (g.n > kMaxDegreeCutVertices)
    throw Error(ErrorKind::ResourceCap, "degree-cut pipeline limited to " + std::to_string(kMaxDegreeCutVertices) + " vertices");
  for (std::uint64_t side : cuts_of_value(g.multigraph(), 4)) {
    const int size = std::popcount(side);
    if (size >= 2 && size <= g.n - 2)
      throw Error(ErrorKind::NotDegreeCut, "not a degree-cut instance: tight set " + format_set(set_of(side)));
  }
}

std::vector<Rational> degreecut_nu(const SupportGraph& g) {
  const Rational scale = g.n % 2 ? ratio(g.n - 1, 4 * g.n) : Rational(1, 4);
  return std::vector<Rational>(g.m(), scale);
}

std::vector<std::vector<int>> maximum_matchings(const SupportGraph& g) {
  const int n = g.n;
  if (n > kMaxDegreeCutVertices || g.m() > 64)
    throw Error(ErrorKind::ResourceCap, "matching enumeration limited to 16 vertices");
  const int unmatched = n % 2;
  std::vector<std::vector<int>> out;
  std::vector<int> chosen;
  std::uint64_t used = 0;
  std::function<void(int)> rec = [&](int skipped) {
    int v = 0;
    while (v < n && ((used >> v) & 1)) ++v;
    if (v == n) {
      if (skipped == unmatched) {
        std::vector<int> m = chosen;
        std::sort(m.begin(), m.end());
        out.push_back(std::move(m));
      }
      return;
    }
    for (int e : g.incident[v]) {
      const int w = g.other(e, v);
      if (w == v || ((used >> w) & 1)) continue;
      used |= (std::uint64_t{1} << v) | (std::uint64_t{1} << w);
      chosen.push_back(e);
      rec(skipped);
      chosen.pop_back();
      used &= ~((std::uint64_t{1} << v) | (std::uint64_t{1} << w));
    }
    if (skipped < unmatched) {
      used |= std::uint64_t{1} << v;
      rec(skipped + 1);
      used &= ~(std::uint64_t{1} << v);
    }
  };
  rec(0);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

MatchingDecomposition decompose_matching(const SupportGraph& g, const std::vector<Rational>& nu) {
  const int n = g.n, m = g.m();
  if (static_cast<int>(nu.size()) != m) throw Error(ErrorKind::InvalidArgument, "nu has the wrong length");
  const auto all = maximum_matchings(g);
  if (all.empty()) throw Error(ErrorKind::OutsidePolytope, "graph has no maximum matching");
  MatchingDecomposition out;
  out.matching_size = static_cast<int>(all.front().size());

  Rational total(0);
  for (const auto& v : nu) {
    if (v < 0) throw Error(ErrorKind::OutsidePolytope, "nu has a negative entry");
    total += v;
  }
  if (total != out.matching_size)
    throw Error(ErrorKind::OutsidePolytope, "nu does not sum to the maximum matching size");

  std::vector<std::uint64_t> odd_sets;
  for (std::uint64_t s = 1; s < (std::uint64_t{1} << n); ++s)
    if (std::popcount(s) >= 3 && std::popcount(s) % 2) odd_sets.push_back(s);
  std::vector<std::uint64_t> inside(odd_sets.size(), 0);  // edge masks of E(U)
  for (size_t i = 0; i < odd_sets.size(); ++i)
    for (int e = 0; e < m; ++e)
      if (((odd_sets[i] >> g.edges[e].u) & 1) && ((odd_sets[i] >> g.edges[e].v) & 1)) inside[i] |= std::uint64_t{1} << e;
  auto sum_over = [&](const std::vector<Rational>& x, std::uint64_t edges) {
    Rational s(0);
    for (; edges; edges &= edges - 1) s += x[std::countr_zero(edges)];
    return s;
  };
  auto vertex_load = [&](const std::vector<Rational>& x, int v) {
    Rational s(0);
    for (int e : g.incident[v]) s += x[e];
    return s;
  };
  for (int v = 0; v < n; ++v)
    if (vertex_load(nu, v) > 1) throw Error(ErrorKind::OutsidePolytope, "nu exceeds 1 at vertex " + std::to_string(v));
  for (size_t i = 0; i < odd_sets.size(); ++i)
    if (sum_over(nu, inside[i]) > ratio(std::popcount(odd_sets[i]) - 1, 2))
      throw Error(ErrorKind::OutsidePolytope, "nu violates the odd-set constraint on " + format_set(set_of(odd_sets[i])));

  // Uniform weights over all maximum matchings when they reproduce nu.
  {
    std::vector<long> count(m, 0);
    for (const auto& mt : all)
      for (int e : mt) ++count[e];
    bool uniform = true;
    for (int e = 0; e < m && uniform; ++e) uniform = ratio(count[e], static_cast<long>(all.size())) == nu[e];
    if (uniform) {
      out.matchings = all;
      out.weights.assign(all.size(), ratio(1, static_cast<long>(all.size())));
      out.uniform = true;
      return out;
    }
  }

  std::vector<Rational> rest = nu;
  Rational w(1);
  while (w > 0) {
    if (static_cast<int>(out.matchings.size()) > m + 1) throw Error(ErrorKind::Internal, "decomposition exceeded m + 1 terms");
    std::uint64_t support = 0;
    for (int e = 0; e < m; ++e)
      if (rest[e] > 0) support |= std::uint64_t{1} << e;
    std::uint64_t tight_vertices = 0;
    for (int v = 0; v < n; ++v)
      if (vertex_load(rest, v) == w) tight_vertices |= std::uint64_t{1} << v;
    std::vector<size_t> tight_sets;
    for (size_t i = 0; i < odd_sets.size(); ++i)
      if (sum_over(rest, inside[i]) == w * ratio(std::popcount(odd_sets[i]) - 1, 2)) tight_sets.push_back(i);

    const std::vector<int>* pick = nullptr;
    for (const auto& mt : all) {
      const std::uint64_t edges = matching_edges(mt);
      if ((edges & ~support) != 0) continue;
      std::uint64_t covered = 0;
      for (int e : mt) covered |= (std::uint64_t{1} << g.edges[e].u) | (std::uint64_t{1} << g.edges[e].v);
      if ((tight_vertices & ~covered) != 0) continue;
      bool ok = true;
      for (size_t i : tight_sets)
        if (2 * std::popcount(edges & inside[i]) != std::popcount(odd_sets[i]) - 1) {
          ok = false;
          break;
        }
      if (ok) {
        pick = &mt;
        break;
      }
    }
    if (!pick) throw Error(ErrorKind::Internal, "no maximum matching fits the residual face");
    const std::uint64_t edges = matching_edges(*pick);
    std::uint64_t covered = 0;
    for (int e : *pick) covered |= (std::uint64_t{1} << g.edges[e].u) | (std::uint64_t{1} << g.edges[e].v);

    Rational theta = w;
    for (int e : *pick) theta = std::min(theta, rest[e]);
    for (int v = 0; v < n; ++v)
      if (!((covered >> v) & 1)) theta = std::min(theta, Rational(w - vertex_load(rest, v)));
    for (size_t i = 0; i < odd_sets.size(); ++i) {
      const int deficit = (std::popcount(odd_sets[i]) - 1) / 2 - std::popcount(edges & inside[i]);
      if (deficit <= 0) continue;
      const Rational slack = w * ratio(std::popcount(odd_sets[i]) - 1, 2) - sum_over(rest, inside[i]);
      theta = std::min(theta, Rational(slack / deficit));
    }
    if (theta <= 0) throw Error(ErrorKind::Internal, "decomposition step made no progress");
    for (int e : *pick) rest[e] -= theta;
    w -= theta;
    out.matchings.push_back(*pick);
    out.weights.push_back(theta);
  }
  for (int e = 0; e < m; ++e)
    if (rest[e] != 0) throw Error(ErrorKind::Internal, "decomposition residual is nonzero");
  return out;
}

PerturbedMarginals perturb(const SupportGraph& g, const std::vector<int>& matching) {
  const int n = g.n, m = g.m();
  PerturbedMarginals pm;
  pm.matching = matching;
  std::sort(pm.matching.begin(), pm.matching.end());
  std::vector<char> saturated(n, 0);
  for (int e : pm.matching) {
    if (e < 0 || e >= m) throw Error(ErrorKind::InvalidArgument, "matching edge out of range");
    for (int v : {g.edges[e].u, g.edges[e].v}) {
      if (saturated[v]) throw Error(ErrorKind::InvalidArgument, "not a matching");
      saturated[v] = 1;
    }
  }
  if (static_cast<int>(pm.matching.size()) != n / 2) throw Error(ErrorKind::InvalidArgument, "matching is not maximum");
  pm.terminal.assign(n, 0);
  for (int v = 0; v < n; ++v)
    if (!saturated[v]) pm.root = v;
  if (pm.root >= 0)
    for (int e : g.incident[pm.root]) pm.terminal[g.other(e, pm.root)] = 1;
  const std::uint64_t in_m = matching_edges(pm.matching);
  pm.z.assign(m, Rational(1, 3));
  pm.normal.assign(m, 0);
  for (int e = 0; e < m; ++e) {
    const int u = g.edges[e].u, v = g.edges[e].v;
    if ((in_m >> e) & 1) {
      pm.z[e] = 1;
      pm.normal[e] = !pm.terminal[u] && !pm.terminal[v];
    } else if (u == pm.root || v == pm.root) {
      pm.z[e] = Rational(5, 12);
    }
  }
  pm.e_plus = pm.matching.front();
  pm.zprime = pm.z;
  pm.zprime[pm.e_plus] = 0;
  return pm;
}

bool in_spanning_tree_polytope(const SupportGraph& g, const std::vector<Rational>& zprime) {
  const int n = g.n;
  if (n > 20) throw Error(ErrorKind::ResourceCap, "spanning tree polytope check limited to 20 vertices");
  Rational total(0);
  for (const auto& v : zprime) {
    if (v < 0 || v > 1) return false;
    total += v;
  }
  if (total != n - 1) return false;
  const std::uint64_t full = (std::uint64_t{1} << n) - 1;
  for (std::uint64_t s = 1; s < full; ++s) {
    if (std::popcount(s) < 2) continue;
    Rational inside(0);
    for (int e = 0; e < g.m(); ++e)
      if (((s >> g.edges[e].u) & 1) && ((s >> g.edges[e].v) & 1)) inside += zprime[e];
    if (inside > std::popcount(s) - 1) return false;
  }
  return true;
}

std::vector<std::uint64_t> tight_tree_sets(const SupportGraph& g, const std::vector<Rational>& zprime) {
  const int n = g.n;
  if (n > 24) throw Error(ErrorKind::ResourceCap, "tight set enumeration limited to 24 vertices");
  mpz_class den = 1;
  for (const auto& z : zprime) den = lcm(den, mpz_class(z.get_den()));
  if (!den.fits_slong_p()) throw Error(ErrorKind::ResourceCap, "marginal denominators too large");
  const long d = den.get_si();
  std::vector<long> scaled;
  for (const auto& z : zprime) scaled.push_back(mpz_class(z.get_num() * (den / z.get_den())).get_si());
  std::vector<std::uint64_t> out;
  for (std::uint64_t s = 1; s < (std::uint64_t{1} << n); ++s) {
    if (std::popcount(s) < 2) continue;
    long inside = 0;
    for (int e = 0; e < g.m(); ++e)
      if (((s >> g.edges[e].u) & 1) && ((s >> g.edges[e].v) & 1)) inside += scaled[e];
    if (inside == d * (std::popcount(s) - 1)) out.push_back(s);
  }
  return out;
}

DegreeCutModel fit_degreecut_model(const SupportGraph& g, const std::vector<int>& matching, const FitOptions& fit) {
  DegreeCutModel model;
  model.pm = perturb(g, matching);
  std::vector<std::uint64_t> tight = tight_tree_sets(g, model.pm.zprime);
  const std::uint64_t full = (std::uint64_t{1} << g.n) - 1;
  if (tight.empty() || tight.back() != full) throw Error(ErrorKind::OutsidePolytope, "z'(E) differs from n - 1");
  std::stable_sort(tight.begin(), tight.end(),
                   [](std::uint64_t a, std::uint64_t b) { return std::popcount(a) < std::popcount(b); });
  std::vector<std::uint64_t> family;
  for (std::uint64_t s : tight) {
    bool laminar = true;
    for (std::uint64_t a : family) {
      const std::uint64_t both = a & s;
      if (both != 0 && both != a && both != s) {
        laminar = false;
        break;
      }
    }
    if (laminar) family.push_back(s);
  }
  model.node_of_edge.assign(g.m(), -1);
  model.local_edge.assign(g.m(), -1);
  for (size_t i = 0; i < family.size(); ++i) {
    LaminarNode node;
    node.vertices = family[i];
    std::vector<std::uint64_t> children;
    for (size_t j = i; j-- > 0;) {
      if ((family[j] & ~family[i]) != 0 || family[j] == family[i]) continue;
      bool maximal = true;
      for (std::uint64_t c : children)
        if ((family[j] & ~c) == 0) maximal = false;
      if (maximal) children.push_back(family[j]);
    }
    std::vector<int> local(g.n, -1);
    for (size_t c = 0; c < children.size(); ++c)
      for (int v : set_of(children[c])) local[v] = static_cast<int>(c);
    node.graph.n = static_cast<int>(children.size());
    for (int v : set_of(family[i]))
      if (local[v] < 0) local[v] = node.graph.n++;
    std::vector<double> target;
    for (int e = 0; e < g.m(); ++e) {
      const int u = g.edges[e].u, v = g.edges[e].v;
      if (!((family[i] >> u) & 1) || !((family[i] >> v) & 1) || local[u] == local[v]) continue;
      model.node_of_edge[e] = static_cast<int>(i);
      model.local_edge[e] = node.graph.add_edge(local[u], local[v]);
      node.edges.push_back(e);
      target.push_back(to_double(model.pm.zprime[e]));
    }
    FitResult res = fit_lambda(node.graph, target, fit);
    node.lambda = std::move(res.weights);
    node.fit_error = res.max_rel_error;
    model.fit_error = std::max(model.fit_error, node.fit_error);
    node.sampler = TreeSampler(node.graph, node.lambda);
    model.nodes.push_back(std::move(node));
  }
  return model;
}

std::vector<int> DegreeCutModel::sample(Rng& rng) const {
  std::vector<int> out;
  for (const auto& node : nodes)
    for (int local : node.sampler(rng)) out.push_back(node.edges[local]);
  std::sort(out.begin(), out.end());
  return out;
}

bool degreecut_even_at_last(const SupportGraph& g, const std::vector<char>& in_tree, int e) {
  for (int v : {g.edges[e].u, g.edges[e].v}) {
    int degree = 0;
    for (int f : g.incident[v]) degree += in_tree[f];
    if (degree % 2) return false;
  }
  return true;
}

std::vector<Rational> degreecut_y(const SupportGraph& g, const PerturbedMarginals& pm, const std::vector<char>& in_tree) {
  std::vector<Rational> y(g.m());
  for (int e = 0; e < g.m(); ++e) {
    y[e] = pm.z[e] / 2;
    if (pm.normal[e] && degreecut_even_at_last(g, in_tree, e)) y[e] = Rational(1, 6);
    if (g.edges[e].u == pm.root || g.edges[e].v == pm.root) y[e] = Rational(1, 4);
  }
  return y;
}

template <class S>
DegreeCutExact<S> degreecut_exact(const SupportGraph& g, const DegreeCutModel& model) {
  const auto& pm = model.pm;
  std::vector<Weights<S>> weights;
  for (const auto& node : model.nodes) {
    Weights<S> w;
    w.state = node.lambda.state;
    for (double l : node.lambda.lambda) {
      if constexpr (std::is_same_v<S, Rational>)
        w.lambda.push_back(from_double(l));
      else
        w.lambda.push_back(l);
    }
    weights.push_back(std::move(w));
  }
  DegreeCutExact<S> out;
  out.normal_even.assign(g.m(), S(0));
  out.expected_y.assign(g.m(), S(0));
  out.vertex_load.assign(g.n, S(0));
  for (int e = 0; e < g.m(); ++e) {
    const int u = g.edges[e].u, v = g.edges[e].v;
    if (u == pm.root || v == pm.root) {
      out.expected_y[e] = S(1) / S(4);
      continue;
    }
    if constexpr (std::is_same_v<S, Rational>)
      out.expected_y[e] = pm.z[e] / 2;
    else
      out.expected_y[e] = to_double(pm.z[e]) / 2;
    if (!pm.normal[e]) continue;
    std::vector<int> F;
    int fixed_u = 0, fixed_v = 0;  // e+ is in every T + e+
    for (int f : g.incident[u]) {
      if (f == pm.e_plus)
        ++fixed_u;
      else
        F.push_back(f);
    }
    for (int f : g.incident[v]) {
      if (f == pm.e_plus)
        ++fixed_v;
      else if (std::find(F.begin(), F.end(), f) == F.end())
        F.push_back(f);
    }
    std::uint64_t mu = 0, mv = 0;
    for (size_t i = 0; i < F.size(); ++i) {
      const auto& ed = g.edges[F[i]];
      if (ed.u == u || ed.v == u) mu |= std::uint64_t{1} << i;
      if (ed.u == v || ed.v == v) mv |= std::uint64_t{1} << i;
    }
    std::vector<S> law(size_t{1} << F.size(), S(0));
    law[0] = S(1);
    for (size_t k = 0; k < model.nodes.size(); ++k) {
      std::vector<int> bits, locals;
      for (size_t i = 0; i < F.size(); ++i)
        if (model.node_of_edge[F[i]] == static_cast<int>(k)) {
          bits.push_back(static_cast<int>(i));
          locals.push_back(model.local_edge[F[i]]);
        }
      if (bits.empty()) continue;
      const auto joint = joint_distribution(model.nodes[k].graph, weights[k], locals);
      std::vector<S> next(law.size(), S(0));
      for (size_t p = 0; p < law.size(); ++p) {
        if (law[p] == S(0)) continue;
        for (size_t q = 0; q < joint.prob.size(); ++q) {
          size_t r = p;
          for (size_t i = 0; i < bits.size(); ++i)
            if ((q >> i) & 1) r |= size_t{1} << bits[i];
          next[r] += law[p] * joint.prob[q];
        }
      }
      law = std::move(next);
    }
    S even(0);
    for (size_t p = 0; p < law.size(); ++p)
      if ((std::popcount(p & mu) + fixed_u) % 2 == 0 && (std::popcount(p & mv) + fixed_v) % 2 == 0) even += law[p];
    out.normal_even[e] = even;
    out.expected_y[e] -= even / S(3);
  }
  for (int e = 0; e < g.m(); ++e) {
    out.vertex_load[g.edges[e].u] += out.expected_y[e];
    out.vertex_load[g.edges[e].v] += out.expected_y[e];
  }
  return out;
}

template DegreeCutExact<double> degreecut_exact(const SupportGraph&, const DegreeCutModel&);
template DegreeCutExact<Rational> degreecut_exact(const SupportGraph&, const DegreeCutModel&);

Rational degree_vertex_bound(int n) {
  const Rational base(227, 243);
  return n % 2 ? base + ratio(353, 243 * n) : base;
}

}  // namespace halftsp
