#include "halftsp/maxent.hpp"

#include <algorithm>
#include <cmath>

#include "halftsp/error.hpp"
#include "halftsp/linalg.hpp"

namespace halftsp {

namespace {

// Graph with forced edges contracted; free non-loop edges kept.
struct Reduced {
  int n = 0;
  std::vector<int> comp;
  std::vector<int> free_edges;
};

Reduced reduce(const Multigraph& g, const std::vector<EdgeState>& state) {
  DisjointSets ds(g.n);
  for (int e = 0; e < g.m(); ++e)
    if (state[e] == EdgeState::Forced && !ds.unite(g.edges[e][0], g.edges[e][1]))
      throw Error(ErrorKind::OutsidePolytope, "forced edges contain a cycle");
  Reduced r;
  r.comp.assign(g.n, -1);
  std::vector<int> id(g.n, -1);
  for (int v = 0; v < g.n; ++v) {
    const int root = ds.find(v);
    if (id[root] < 0) id[root] = r.n++;
    r.comp[v] = id[root];
  }
  for (int e = 0; e < g.m(); ++e)
    if (state[e] == EdgeState::Free && r.comp[g.edges[e][0]] != r.comp[g.edges[e][1]]) r.free_edges.push_back(e);
  return r;
}

// Laplacian with the row and column of reduced vertex 0 removed.
template <class S>
std::vector<S> laplacian_minor(const Multigraph& g, const Reduced& r, const std::vector<S>& lambda,
                               const std::vector<int>& edges, const std::vector<int>& comp, int n) {
  const int k = n - 1;
  std::vector<S> L(static_cast<size_t>(k) * k, S(0));
  for (int e : edges) {
    const int a = comp[g.edges[e][0]] - 1, b = comp[g.edges[e][1]] - 1;
    if (a == b) continue;
    const S& w = lambda[e];
    if (a >= 0) L[a * k + a] += w;
    if (b >= 0) L[b * k + b] += w;
    if (a >= 0 && b >= 0) {
      L[a * k + b] -= w;
      L[b * k + a] -= w;
    }
  }
  (void)r;
  return L;
}

template <class S>
S forced_product(const Weights<S>& w) {
  S p(1);
  for (size_t e = 0; e < w.state.size(); ++e)
    if (w.state[e] == EdgeState::Forced) p *= w.lambda[e];
  return p;
}

}  // namespace

template <class S>
S weighted_tree_count(const Multigraph& g, const Weights<S>& w) {
  const Reduced r = reduce(g, w.state);
  if (r.n == 1) return forced_product(w);
  auto L = laplacian_minor(g, r, w.lambda, r.free_edges, r.comp, r.n);
  return linalg::determinant(std::move(L), r.n - 1) * forced_product(w);
}

template <class S>
std::vector<S> tree_marginals(const Multigraph& g, const Weights<S>& w) {
  const Reduced r = reduce(g, w.state);
  std::vector<S> out(g.m(), S(0));
  for (int e = 0; e < g.m(); ++e)
    if (w.state[e] == EdgeState::Forced) out[e] = 1;
  if (r.n == 1) return out;
  const int k = r.n - 1;
  auto L = laplacian_minor(g, r, w.lambda, r.free_edges, r.comp, r.n);
  std::vector<S> inv;
  if (!linalg::invert(std::move(L), k, inv))
    throw Error(ErrorKind::Disconnected, "weighted Laplacian is singular (disconnected graph or degenerate weights)");
  auto entry = [&](int a, int b) -> S {
    if (a < 0 || b < 0) return S(0);
    return inv[a * k + b];
  };
  for (int e : r.free_edges) {
    const int a = r.comp[g.edges[e][0]] - 1, b = r.comp[g.edges[e][1]] - 1;
    S res = entry(a, a) + entry(b, b) - entry(a, b) - entry(b, a);
    out[e] = w.lambda[e] * res;
  }
  return out;
}

FitResult fit_lambda(const Multigraph& g, const std::vector<double>& target, const FitOptions& opts) {
  if (static_cast<int>(target.size()) != g.m()) throw Error(ErrorKind::InvalidArgument, "target size mismatch");
  FitResult res;
  res.weights = uniform_weights<double>(g);
  auto& w = res.weights;
  for (int e = 0; e < g.m(); ++e) {
    if (target[e] < -1e-12 || target[e] > 1 + 1e-12)
      throw Error(ErrorKind::OutsidePolytope, "target marginal outside [0, 1]");
    if (target[e] >= 1 - 1e-12)
      w.state[e] = EdgeState::Forced;
    else if (target[e] <= 1e-12)
      w.state[e] = EdgeState::Excluded;
  }
  const Reduced r = reduce(g, w.state);
  double sum = 0;
  for (int e = 0; e < g.m(); ++e) {
    if (w.state[e] != EdgeState::Free) continue;
    if (r.comp[g.edges[e][0]] == r.comp[g.edges[e][1]])
      throw Error(ErrorKind::OutsidePolytope, "positive target on an edge closing a cycle of forced edges");
    sum += target[e];
  }
  if (std::fabs(sum - (r.n - 1)) > 1e-9 * std::max(1, r.n))
    throw Error(ErrorKind::OutsidePolytope, "target marginals must sum to (vertices - 1) after contracting forced edges");
  if (r.free_edges.empty()) return res;
  const int first = r.free_edges.front();
  double eta = 1.0, prev = INFINITY;
  for (int it = 0; it <= opts.max_iterations; ++it) {
    const auto m = tree_marginals(g, w);
    double err = 0;
    for (int e : r.free_edges) err = std::max(err, std::fabs(m[e] - target[e]) / target[e]);
    res.max_rel_error = err;
    res.iterations = it;
    if (err <= opts.tol) return res;
    if (err > prev) eta = std::max(eta * 0.5, 1.0 / 1024);
    prev = err;
    for (int e : r.free_edges) w.lambda[e] *= std::pow(target[e] / m[e], eta);
    const double scale = w.lambda[first];
    for (int e : r.free_edges) w.lambda[e] /= scale;
  }
  throw Error(ErrorKind::NonConvergence,
              "lambda fitting did not converge; achieved relative error " + std::to_string(res.max_rel_error));
}

ExactFit exact_lambda(const Multigraph& g, const LambdaWeights& fitted, const std::vector<Rational>& target) {
  ExactFit out;
  out.weights.state = fitted.state;
  out.weights.lambda.assign(g.m(), Rational(1));
  bool snapped = true;
  for (int e = 0; e < g.m(); ++e) {
    if (fitted.state[e] != EdgeState::Free) continue;
    const Rational s = approximate(fitted.lambda[e], 1000);
    if (sgn(s) <= 0 || std::fabs(to_double(s) - fitted.lambda[e]) > 1e-6 * fitted.lambda[e]) snapped = false;
    out.weights.lambda[e] = s;
  }
  if (snapped) {
    const auto m = tree_marginals(g, out.weights);
    bool equal = true;
    for (int e = 0; e < g.m(); ++e)
      if (fitted.state[e] == EdgeState::Free && m[e] != target[e]) equal = false;
    if (equal) {
      out.exact = true;
      return out;
    }
  }
  for (int e = 0; e < g.m(); ++e)
    if (fitted.state[e] == EdgeState::Free) out.weights.lambda[e] = from_double(fitted.lambda[e]);
  return out;
}

TreeSampler::TreeSampler(const Multigraph& g, const LambdaWeights& w) {
  const Reduced r = reduce(g, w.state);
  reduced_n_ = r.n;
  for (int e = 0; e < g.m(); ++e)
    if (w.state[e] == EdgeState::Forced) forced_.push_back(e);
  arcs_.resize(r.n);
  for (int e : r.free_edges) {
    const int a = r.comp[g.edges[e][0]], b = r.comp[g.edges[e][1]];
    arcs_[a].push_back({b, e, w.lambda[e]});
    arcs_[b].push_back({a, e, w.lambda[e]});
  }
  for (auto& list : arcs_) {
    double acc = 0;
    for (auto& arc : list) {
      acc += arc.cumulative;
      arc.cumulative = acc;
    }
    if (r.n > 1 && list.empty()) throw Error(ErrorKind::Disconnected, "sampler graph is disconnected");
  }
}

std::vector<int> TreeSampler::operator()(Rng& rng) const {
  std::vector<int> tree = forced_;
  std::vector<char> in_tree(reduced_n_, 0);
  std::vector<int> next(reduced_n_, -1), next_edge(reduced_n_, -1);
  if (reduced_n_ > 0) in_tree[0] = 1;
  for (int i = 0; i < reduced_n_; ++i) {
    int u = i;
    while (!in_tree[u]) {
      const auto& list = arcs_[u];
      const double x = uniform01(rng) * list.back().cumulative;
      size_t j = 0;
      while (j + 1 < list.size() && list[j].cumulative <= x) ++j;
      next[u] = list[j].to;
      next_edge[u] = list[j].edge;
      u = next[u];
    }
    u = i;
    while (!in_tree[u]) {
      in_tree[u] = 1;
      tree.push_back(next_edge[u]);
      u = next[u];
    }
  }
  std::sort(tree.begin(), tree.end());
  return tree;
}

std::vector<int> sample_tree(const Multigraph& g, const LambdaWeights& w, Rng& rng) { return TreeSampler(g, w)(rng); }

template <class S>
JointDistribution<S> joint_distribution(const Multigraph& g, const Weights<S>& w, const std::vector<int>& F) {
  if (static_cast<int>(F.size()) > kMaxJointEdges)
    throw Error(ErrorKind::ResourceCap, "joint distribution limited to 10 edges");
  const Reduced r = reduce(g, w.state);
  JointDistribution<S> out;
  out.edges = F;
  const size_t patterns = size_t{1} << F.size();
  out.prob.assign(patterns, S(0));
  S total(0);
  for (size_t p = 0; p < patterns; ++p) {
    bool possible = true;
    std::vector<char> drop(g.m(), 0);
    DisjointSets ds(r.n);
    S weight(1);
    for (size_t i = 0; i < F.size() && possible; ++i) {
      const int e = F[i];
      const bool in = (p >> i) & 1;
      const auto st = w.state[e];
      if (st == EdgeState::Forced) {
        possible = in;
        continue;
      }
      if (st == EdgeState::Excluded) {
        possible = !in;
        continue;
      }
      const int a = r.comp[g.edges[e][0]], b = r.comp[g.edges[e][1]];
      if (in) {
        if (!ds.unite(a, b)) possible = false;
        weight *= w.lambda[e];
      }
      drop[e] = 1;
    }
    if (!possible) continue;
    // Contract the included edges, delete the excluded ones.
    std::vector<int> comp(g.n), id(r.n, -1);
    int n2 = 0;
    for (int v = 0; v < r.n; ++v) {
      const int root = ds.find(v);
      if (id[root] < 0) id[root] = n2++;
    }
    for (int v = 0; v < g.n; ++v) comp[v] = id[ds.find(r.comp[v])];
    std::vector<int> edges;
    for (int e : r.free_edges)
      if (!drop[e]) edges.push_back(e);
    S count(1);
    if (n2 > 1) count = linalg::determinant(laplacian_minor(g, r, w.lambda, edges, comp, n2), n2 - 1);
    out.prob[p] = weight * count;
    total += out.prob[p];
  }
  if (linalg::is_zero(total)) throw Error(ErrorKind::Disconnected, "graph has no spanning tree");
  for (auto& v : out.prob) v /= total;
  return out;
}

template <class S>
std::pair<S, S> parity_distribution(const JointDistribution<S>& joint, const std::vector<int>& cut_edges) {
  std::size_t mask = 0;
  for (int e : cut_edges) {
    auto it = std::find(joint.edges.begin(), joint.edges.end(), e);
    if (it == joint.edges.end()) throw Error(ErrorKind::InvalidArgument, "cut edge outside the joint distribution");
    mask |= std::size_t{1} << (it - joint.edges.begin());
  }
  S even(0), odd(0);
  for (size_t p = 0; p < joint.prob.size(); ++p) {
    if (__builtin_popcountll(p & mask) % 2 == 0)
      even += joint.prob[p];
    else
      odd += joint.prob[p];
  }
  return {even, odd};
}

template double weighted_tree_count(const Multigraph&, const Weights<double>&);
template Rational weighted_tree_count(const Multigraph&, const Weights<Rational>&);
template std::vector<double> tree_marginals(const Multigraph&, const Weights<double>&);
template std::vector<Rational> tree_marginals(const Multigraph&, const Weights<Rational>&);
template JointDistribution<double> joint_distribution(const Multigraph&, const Weights<double>&, const std::vector<int>&);
template JointDistribution<Rational> joint_distribution(const Multigraph&, const Weights<Rational>&,
                                                        const std::vector<int>&);
template std::pair<double, double> parity_distribution(const JointDistribution<double>&, const std::vector<int>&);
template std::pair<Rational, Rational> parity_distribution(const JointDistribution<Rational>&, const std::vector<int>&);

}  // namespace halftsp
