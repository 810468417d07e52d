#include <algorithm>
#include <bit>
#include <map>
#include <type_traits>

#include "halftsp/error.hpp"
#include "halftsp/ojoin.hpp"

namespace halftsp {

HierarchyModel fit_hierarchy(const SupportGraph& g, int e_plus, const ModelOptions& opts) {
  HierarchyModel model;
  model.g = g;
  model.h = build_hierarchy(g, e_plus, opts.cuts);
  model.min_cuts = enumerate_min_cuts(g, opts.cuts);
  const auto& h = model.h;
  model.model_of.assign(h.nodes.size(), -1);
  model.local_edge.assign(g.m(), -1);
  for (int id : h.created) {
    const CutNode& node = h.nodes[id];
    if (node.kind != NodeKind::Degree) continue;
    NodeModel nm;
    nm.node = id;
    std::vector<int> child(g.n, -1);
    for (int i = 0; i < static_cast<int>(node.children.size()); ++i)
      for (int v : h.nodes[node.children[i]].vertices) child[v] = i;
    nm.graph.n = static_cast<int>(node.children.size());
    for (int e : node.interior) {
      model.local_edge[e] = nm.graph.add_edge(child[g.edges[e].u], child[g.edges[e].v]);
      nm.edges.push_back(e);
    }
    const std::vector<double> target(nm.graph.m(), 0.5);
    FitResult fit = fit_lambda(nm.graph, target, opts.fit);
    nm.lambda = std::move(fit.weights);
    nm.fit_error = fit.max_rel_error;
    nm.fit_iterations = fit.iterations;
    ExactFit ex = exact_lambda(nm.graph, nm.lambda, std::vector<Rational>(nm.graph.m(), Rational(1, 2)));
    if (!ex.exact && opts.polish_tol < opts.fit.tol) {
      // no rational lambda: tighten the float fit before taking its dyadic value
      FitOptions polish = opts.fit;
      polish.tol = opts.polish_tol;
      try {
        FitResult fine = fit_lambda(nm.graph, target, polish);
        nm.lambda = std::move(fine.weights);
        nm.fit_error = fine.max_rel_error;
        nm.fit_iterations = fine.iterations;
        ex = exact_lambda(nm.graph, nm.lambda, std::vector<Rational>(nm.graph.m(), Rational(1, 2)));
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::NonConvergence) throw;
      }
    }
    nm.exact = std::move(ex.weights);
    nm.lambda_exact = ex.exact;
    nm.sampler = TreeSampler(nm.graph, nm.lambda);
    model.model_of[id] = static_cast<int>(model.degree.size());
    model.degree.push_back(std::move(nm));
  }
  return model;
}

PreparedInstance prepare_instance(const HalfIntegralInstance& inst, const ModelOptions& opts) {
  validate_instance(inst);
  PreparedInstance p;
  p.original = inst;
  p.eplus = split_vertex_for_eplus(inst);
  const SupportGraph g = build_support_graph(p.eplus.instance);
  p.model = fit_hierarchy(g, p.eplus.support_e_plus, opts);
  p.metric = metric_closure(p.eplus.instance);
  return p;
}

ParityState parity_state(const CutHierarchy& h, std::uint64_t odd) {
  ParityState s;
  s.odd = odd;
  s.last_odd.resize(h.last_cuts.size());
  for (size_t i = 0; i < h.last_cuts.size(); ++i) s.last_odd[i] = std::popcount(h.last_cuts[i].mask & odd) & 1;
  s.even_at_last.resize(h.m());
  for (int e = 0; e < h.m(); ++e) {
    const auto& last = h.edges[e].last;
    s.even_at_last[e] = !s.last_odd[last[0]] && !s.last_odd[last[1]];
  }
  return s;
}

TreeSample sample_hierarchical_tree(const HierarchyModel& model, Rng& rng) {
  const auto& h = model.h;
  TreeSample ts;
  ts.in_tree.assign(h.m(), 0);
  auto take = [&](int e) {
    ts.in_tree[e] = 1;
    ts.edges.push_back(e);
  };
  for (int id : h.created) {
    const CutNode& node = h.nodes[id];
    if (node.kind == NodeKind::Degree) {
      const NodeModel& nm = model.degree[model.model_of[id]];
      for (int local : nm.sampler(rng)) take(nm.edges[local]);
    } else {
      for (const auto& pair : node.companions) take(pair[coin(rng) ? 1 : 0]);
    }
  }
  for (const auto& pair : h.root.pairs) take(pair[coin(rng) ? 1 : 0]);
  std::sort(ts.edges.begin(), ts.edges.end());
  std::uint64_t odd = 0;
  for (int e : ts.edges) odd ^= (std::uint64_t{1} << h.ends[e][0]) ^ (std::uint64_t{1} << h.ends[e][1]);
  ts.parity = parity_state(h, odd);
  return ts;
}

bool even_at_last(const TreeSample& ts, int e) { return ts.parity.even_at_last.at(e) != 0; }

template <class S>
JointDistribution<S> edge_law(const HierarchyModel& model, const std::vector<int>& F, bool exact_lambda) {
  const auto& h = model.h;
  if (F.size() > 20) throw Error(ErrorKind::ResourceCap, "edge law limited to 20 edges");
  for (size_t i = 0; i < F.size(); ++i)
    for (size_t j = i + 1; j < F.size(); ++j)
      if (F[i] == F[j]) throw Error(ErrorKind::InvalidArgument, "edge law over a repeated edge");
  JointDistribution<S> out;
  out.edges = F;
  out.prob.assign(size_t{1} << F.size(), S(0));
  out.prob[0] = S(1);

  // Factor: distribution over the bits `bits` (positions in F).
  auto apply = [&](const std::vector<int>& bits, const std::vector<S>& dist) {
    std::vector<S> next(out.prob.size(), S(0));
    for (size_t p = 0; p < out.prob.size(); ++p) {
      if (out.prob[p] == S(0)) continue;
      for (size_t q = 0; q < dist.size(); ++q) {
        if (dist[q] == S(0)) continue;
        size_t r = p;
        for (size_t i = 0; i < bits.size(); ++i)
          if ((q >> i) & 1) r |= size_t{1} << bits[i];
        next[r] += out.prob[p] * dist[q];
      }
    }
    out.prob = std::move(next);
  };

  std::map<int, std::vector<int>> by_owner;  // degree node id -> positions
  std::map<int, std::vector<int>> by_pair;   // smaller edge of a companion pair -> positions
  for (size_t i = 0; i < F.size(); ++i) {
    const int e = F[i];
    if (e < 0 || e >= h.m()) throw Error(ErrorKind::InvalidArgument, "edge out of range");
    const auto& info = h.edges[e];
    if (info.owner != kRoot && h.nodes[info.owner].kind == NodeKind::Degree)
      by_owner[info.owner].push_back(static_cast<int>(i));
    else
      by_pair[std::min(e, info.companion)].push_back(static_cast<int>(i));
  }
  for (const auto& [owner, positions] : by_owner) {
    const NodeModel& nm = model.degree[model.model_of[owner]];
    std::vector<int> local;
    for (int i : positions) local.push_back(model.local_edge[F[i]]);
    JointDistribution<S> joint;
    if constexpr (std::is_same_v<S, Rational>) {
      if (exact_lambda)
        joint = joint_distribution(nm.graph, nm.exact, local);
      else {
        ExactWeights w{{}, nm.lambda.state};
        for (double l : nm.lambda.lambda) w.lambda.push_back(from_double(l));
        joint = joint_distribution(nm.graph, w, local);
      }
    } else {
      joint = joint_distribution(nm.graph, nm.lambda, local);
    }
    apply(positions, joint.prob);
  }
  for (const auto& [first, positions] : by_pair) {
    const S half = S(1) / S(2);
    if (positions.size() == 1)
      apply(positions, {half, half});
    else
      apply(positions, {S(0), half, half, S(0)});
  }
  return out;
}

template <class S>
S prob_all_even(const HierarchyModel& model, const std::vector<std::vector<int>>& cuts) {
  std::vector<int> F;
  for (const auto& c : cuts) F.insert(F.end(), c.begin(), c.end());
  std::sort(F.begin(), F.end());
  F.erase(std::unique(F.begin(), F.end()), F.end());
  const auto law = edge_law<S>(model, F);
  std::vector<size_t> masks;
  for (const auto& c : cuts) {
    size_t m = 0;
    for (int e : c) m |= size_t{1} << (std::lower_bound(F.begin(), F.end(), e) - F.begin());
    masks.push_back(m);
  }
  S total(0);
  for (size_t p = 0; p < law.prob.size(); ++p) {
    bool even = true;
    for (size_t m : masks)
      if (std::popcount(p & m) & 1) even = false;
    if (even) total += law.prob[p];
  }
  return total;
}

template JointDistribution<double> edge_law(const HierarchyModel&, const std::vector<int>&, bool);
template JointDistribution<Rational> edge_law(const HierarchyModel&, const std::vector<int>&, bool);
template double prob_all_even(const HierarchyModel&, const std::vector<std::vector<int>>&);
template Rational prob_all_even(const HierarchyModel&, const std::vector<std::vector<int>>&);

}  // namespace halftsp
