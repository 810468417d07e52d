#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <type_traits>

#include "halftsp/error.hpp"
#include "halftsp/ojoin.hpp"

namespace halftsp {

namespace {

template <class S>
S convert(const Rational& r) {
  if constexpr (std::is_same_v<S, Rational>)
    return r;
  else
    return to_double(r);
}

template <class S>
double as_double(const S& v) {
  if constexpr (std::is_same_v<S, Rational>)
    return to_double(v);
  else
    return v;
}

}  // namespace

void ChargingParams::validate() const {
  const Rational quarter(1, 4);
  if (alpha < 0 || alpha > quarter) throw Error(ErrorKind::InvalidArgument, "alpha must lie in [0, 1/4]");
  if (beta < 0 || beta > quarter) throw Error(ErrorKind::InvalidArgument, "beta must lie in [0, 1/4]");
  if (tau < 0 || tau > quarter) throw Error(ErrorKind::InvalidArgument, "tau must lie in [0, 1/4]");
}

bool ChargingParams::in_proven_range() const {
  return alpha > 0 && alpha <= beta && beta <= Rational(1, 4) && tau > 0 && tau <= Rational(1, 12);
}

EvenAtLastStats compute_even_at_last_probs(const HierarchyModel& model, const StatsOptions& opts) {
  const auto& h = model.h;
  EvenAtLastStats st;
  st.method = opts.method;
  st.p.assign(h.m(), Rational(0));
  st.ci_half_width.assign(h.m(), 0.0);
  if (opts.method == StatsMethod::Exact) {
    std::map<std::pair<int, int>, Rational> memo;
    for (int e = 0; e < h.m(); ++e) {
      auto key = std::minmax(h.edges[e].last[0], h.edges[e].last[1]);
      auto it = memo.find(key);
      if (it == memo.end()) {
        const Rational v = prob_all_even<Rational>(
            model, {h.last_cuts[key.first].boundary, h.last_cuts[key.second].boundary});
        it = memo.emplace(key, v).first;
      }
      st.p[e] = it->second;
    }
    return st;
  }
  if (opts.samples < 1) throw Error(ErrorKind::InvalidArgument, "sample count must be positive");
  st.samples = opts.samples;
  std::vector<long> count(h.m(), 0);
  for (long i = 0; i < opts.samples; ++i) {
    Rng rng = make_stream(opts.seed, static_cast<std::uint64_t>(i));
    const TreeSample ts = sample_hierarchical_tree(model, rng);
    for (int e = 0; e < h.m(); ++e) count[e] += ts.parity.even_at_last[e];
  }
  for (int e = 0; e < h.m(); ++e) {
    st.p[e] = ratio(count[e], opts.samples);
    const double q = static_cast<double>(count[e]) / opts.samples;
    st.ci_half_width[e] = 2.5758293035489 * std::sqrt(q * (1 - q) / opts.samples);
  }
  return st;
}

template <class S>
ChargingPlan<S> make_plan(const CutHierarchy& h, const EvenAtLastStats& stats, const ChargingParams& params) {
  params.validate();
  if (static_cast<int>(stats.p.size()) != h.m()) throw Error(ErrorKind::InvalidArgument, "stats missing an edge");
  ChargingPlan<S> plan;
  plan.base = S(1) / S(4);
  plan.tau = convert<S>(params.tau);
  std::vector<Rational> pt(h.m());
  for (int e = 0; e < h.m(); ++e) {
    const Rational& cap = h.edges[e].top ? params.alpha : params.beta;
    pt[e] = std::min(cap, stats.p[e]);
    plan.ptilde.push_back(convert<S>(pt[e]));
  }
  std::vector<int> rep(h.num_groups, -1);
  plan.success.assign(h.num_groups, S(0));
  for (int e = 0; e < h.m(); ++e) {
    const int grp = h.edges[e].group;
    if (rep[grp] < 0) {
      rep[grp] = e;
      if (stats.p[e] > 0) plan.success[grp] = convert<S>(pt[e] / stats.p[e]);
    } else if (stats.p[e] != stats.p[rep[grp]]) {
      throw Error(ErrorKind::Internal, "edges sharing a Bernoulli have different even-at-last probabilities");
    }
  }
  std::vector<Rational> mass(h.last_cuts.size(), Rational(0));
  for (size_t l = 0; l < h.last_cuts.size(); ++l) {
    for (int f : h.last_cuts[l].across) mass[l] += pt[f];
    plan.across_mass.push_back(convert<S>(mass[l]));
  }
  for (int e = 0; e < h.m(); ++e) {
    std::array<S, 2> r{S(0), S(0)};
    for (int j = 0; j < 2; ++j) {
      const int l = h.edges[e].last[j];
      if (mass[l] > 0) r[j] = convert<S>(pt[e] / mass[l]);
    }
    plan.resp.push_back(r);
  }
  return plan;
}

template <class S>
void draw_bernoullis(const CutHierarchy& h, const ChargingPlan<S>& plan, TreeSample& ts, Rng& rng) {
  ts.bernoulli.assign(h.num_groups, 0);
  for (int g = 0; g < h.num_groups; ++g) {
    const double q = as_double(plan.success[g]);
    const double u = uniform01(rng);
    if (q >= 1)
      ts.bernoulli[g] = 1;
    else if (q > 0)
      ts.bernoulli[g] = u < q;
  }
}

template <class S>
OJoinVector<S> build_ojoin(const CutHierarchy& h, const ChargingPlan<S>& plan, const ParityState& parity,
                           const std::vector<char>& bernoulli) {
  const int m = h.m();
  if (static_cast<int>(bernoulli.size()) != h.num_groups)
    throw Error(ErrorKind::InvalidArgument, "Bernoulli outcomes missing");
  OJoinVector<S> out;
  out.y.assign(m, plan.base);
  out.reduced.assign(m, 0);
  out.increase.assign(m, S(0));
  for (int e = 0; e < m; ++e)
    if (parity.even_at_last[e] && bernoulli[h.edges[e].group]) {
      out.reduced[e] = 1;
      out.y[e] -= plan.tau;
    }
  std::vector<S> deficit(h.last_cuts.size(), S(0));
  for (size_t l = 0; l < h.last_cuts.size(); ++l) {
    if (!parity.last_odd[l]) continue;
    S load(0);
    for (int f : h.last_cuts[l].boundary) load += out.y[f];
    if (load < S(1)) deficit[l] = S(1) - load;
  }
  for (int e = 0; e < m; ++e) {
    const auto& last = h.edges[e].last;
    S a = plan.resp[e][0] * deficit[last[0]];
    S b = plan.resp[e][1] * deficit[last[1]];
    out.increase[e] = a < b ? b : a;
  }
  for (int e = 0; e < m; ++e) out.y[e] += out.increase[e];
  return out;
}

template <class S>
Feasibility check_feasible(const SupportGraph& g, const std::vector<S>& y, std::uint64_t odd,
                           const std::vector<MinCut>& min_cuts, const FeasibilityOptions& opts) {
  constexpr bool exact = std::is_same_v<S, Rational>;
  const double tol = exact ? 0.0 : opts.float_tolerance;
  Feasibility res;
  auto exact_load = [&](std::uint64_t side) {
    S load(0);
    for (int e : g.boundary(side)) load += y[e];
    return load;
  };
  auto fails = [&](const S& load) {
    if constexpr (exact)
      return load < 1;
    else
      return load < 1 - tol;
  };
  const int n = g.n;
  if (n <= opts.exhaustive_limit) {
    res.exhaustive = true;
    std::vector<double> yd(y.size());
    for (size_t e = 0; e < y.size(); ++e) yd[e] = as_double(y[e]);
    // Gray code over subsets of {0..n-2}; vertex n-1 stays outside.
    std::uint64_t side = 0;
    double load = 0;
    int parity = 0;
    const std::uint64_t limit = std::uint64_t{1} << (n - 1);
    for (std::uint64_t i = 1; i < limit; ++i) {
      const int v = std::countr_zero(i);
      const bool entering = !((side >> v) & 1);
      for (int e : g.incident[v]) {
        const int w = g.other(e, v);
        const bool w_in = (side >> w) & 1;
        load += (entering != w_in) ? yd[e] : -yd[e];
      }
      side ^= std::uint64_t{1} << v;
      parity ^= static_cast<int>((odd >> v) & 1);
      if (parity && load < 1 + 1e-6) {
        const S exact_value = exact_load(side);
        if (fails(exact_value)) {
          res.ok = false;
          res.witness = set_of(side);
          res.value = as_double(exact_value);
          return res;
        }
      }
    }
    return res;
  }
  for (const auto& cut : min_cuts) {
    const std::uint64_t side = mask_of(cut.side);
    if (!(std::popcount(side & odd) & 1)) continue;
    const S load = exact_load(side);
    if (fails(load)) {
      res.ok = false;
      res.witness = cut.side;
      res.value = as_double(load);
      return res;
    }
  }
  S low = y.empty() ? S(0) : y[0];
  for (const auto& v : y)
    if (v < low) low = v;
  const S floor = low * S(6);
  if (fails(floor)) {
    res.ok = false;
    res.value = as_double(floor);
  }
  return res;
}

template ChargingPlan<double> make_plan(const CutHierarchy&, const EvenAtLastStats&, const ChargingParams&);
template ChargingPlan<Rational> make_plan(const CutHierarchy&, const EvenAtLastStats&, const ChargingParams&);
template void draw_bernoullis(const CutHierarchy&, const ChargingPlan<double>&, TreeSample&, Rng&);
template void draw_bernoullis(const CutHierarchy&, const ChargingPlan<Rational>&, TreeSample&, Rng&);
template OJoinVector<double> build_ojoin(const CutHierarchy&, const ChargingPlan<double>&, const ParityState&,
                                         const std::vector<char>&);
template OJoinVector<Rational> build_ojoin(const CutHierarchy&, const ChargingPlan<Rational>&, const ParityState&,
                                           const std::vector<char>&);
template Feasibility check_feasible(const SupportGraph&, const std::vector<double>&, std::uint64_t,
                                    const std::vector<MinCut>&, const FeasibilityOptions&);
template Feasibility check_feasible(const SupportGraph&, const std::vector<Rational>&, std::uint64_t,
                                    const std::vector<MinCut>&, const FeasibilityOptions&);

}  // namespace halftsp
