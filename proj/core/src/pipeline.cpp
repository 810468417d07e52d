#include "halftsp/pipeline.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>
#include <type_traits>

#include "halftsp/error.hpp"

namespace halftsp {

namespace {

constexpr double kZ99 = 2.5758293035489;

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

Rational mean_of(const std::vector<SampleRecord>& samples, Rational SampleRecord::*field) {
  Rational total(0);
  for (const auto& s : samples) total += s.*field;
  return samples.empty() ? total : Rational(total / static_cast<long>(samples.size()));
}

std::vector<std::array<int, 2>> endpoints(const std::vector<int>& edges, const std::vector<std::array<int, 2>>& ends) {
  std::vector<std::array<int, 2>> out;
  for (int e : edges) out.push_back(ends[e]);
  return out;
}

}  // namespace

const char* to_string(NumberMode mode) { return mode == NumberMode::Rational ? "rational" : "float"; }

NumberMode parse_number_mode(const std::string& text) {
  if (text == "rational") return NumberMode::Rational;
  if (text == "float") return NumberMode::Float;
  throw Error(ErrorKind::InvalidArgument, "mode must be rational or float");
}

void RunConfig::validate() const {
  if (samples < 1) throw Error(ErrorKind::InvalidArgument, "samples must be at least 1");
  if (jobs < 1) throw Error(ErrorKind::InvalidArgument, "jobs must be at least 1");
  if (instance_path.empty() == generator.empty())
    throw Error(ErrorKind::InvalidArgument, "give exactly one of --instance and --gen");
  params.validate();
}

HalfIntegralInstance load_instance(const RunConfig& config) {
  if (!config.instance_path.empty()) {
    std::ifstream in(config.instance_path);
    if (!in) throw Error(ErrorKind::MalformedInput, "cannot read " + config.instance_path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_instance(buf.str());
  }
  const auto [family, size] = parse_generator_spec(config.generator);
  return generate_instance(family, size, config.seed);
}

MeanStat mean_stat(const std::vector<double>& values) {
  MeanStat s;
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  double sum = 0;
  for (double v : values) sum += v;
  s.mean = sum / n;
  double sq = 0;
  for (double v : values) sq += (v - s.mean) * (v - s.mean);
  s.stddev = values.size() > 1 ? std::sqrt(sq / (n - 1)) : 0.0;
  s.stderr_ = s.stddev / std::sqrt(n);
  s.ci_low = s.mean - kZ99 * s.stderr_;
  s.ci_high = s.mean + kZ99 * s.stderr_;
  return s;
}

void parallel_for(long count, int jobs, const std::function<void(long)>& f) {
  if (jobs <= 1 || count <= 1) {
    for (long i = 0; i < count; ++i) f(i);
    return;
  }
  const long workers = std::min<long>(jobs, count);
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(workers);
  for (long w = 0; w < workers; ++w)
    threads.emplace_back([&, w] {
      try {
        for (long i = w; i < count; i += workers) f(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

namespace {

template <class S>
void sample_ojoin(const PreparedInstance& prepared, const ChargingPlan<S>& plan, const ScaledMetric& metric,
                  const RunConfig& config, RunResult& res, std::vector<std::vector<double>>& loads) {
  const HierarchyModel& model = prepared.model;
  const CutHierarchy& h = model.h;
  const SupportGraph& g = model.g;
  res.samples.assign(config.samples, SampleRecord{});
  loads.assign(config.samples, {});
  parallel_for(config.samples, config.jobs, [&](long i) {
    SampleRecord rec;
    rec.index = i;
    rec.seed = stream_seed(config.seed, static_cast<std::uint64_t>(i));
    Rng rng(rec.seed);
    TreeSample ts = sample_hierarchical_tree(model, rng);
    draw_bernoullis(h, plan, ts, rng);
    const OJoinVector<S> y = build_ojoin(h, plan, ts.parity, ts.bernoulli);
    const Feasibility feas = check_feasible(g, y.y, ts.parity.odd, model.min_cuts);
    rec.feasible = feas.ok;
    rec.witness = feas.witness;
    rec.tree_cost = 0;
    for (int e : ts.edges) rec.tree_cost += g.cost[e];
    const TJoin join = min_tjoin(ts.parity.odd, metric);
    rec.join_cost = Rational(join.cost) * metric.unit;
    const Tour tour = tour_from_join(g.n, endpoints(ts.edges, h.ends), join.pairs, metric);
    rec.tour_cost = Rational(tour.cost) * metric.unit;
    rec.odd_vertices = std::popcount(ts.parity.odd);
    S ycost(0);
    S low = y.y.empty() ? S(0) : y.y[0];
    for (int e = 0; e < g.m(); ++e) {
      ycost += convert<S>(g.cost[e]) * y.y[e];
      if (y.y[e] < low) low = y.y[e];
    }
    rec.y_cost = as_double(ycost);
    rec.min_y = as_double(low);
    std::vector<double> row;
    for (const auto& cut : model.min_cuts) {
      S load(0);
      for (int e : cut.boundary) load += y.y[e];
      row.push_back(as_double(load));
    }
    loads[i] = std::move(row);
    res.samples[i] = std::move(rec);
  });
}

}  // namespace

RunResult run_ojoin(const HalfIntegralInstance& inst, const RunConfig& config) {
  config.validate();
  RunResult res;
  res.config = config;
  res.instance = inst.name;
  res.n = inst.n;
  const PreparedInstance prepared = prepare_instance(inst);
  const HierarchyModel& model = prepared.model;
  res.support_n = model.n();
  res.lp_cost = lp_cost(inst);
  if (res.lp_cost <= 0) throw Error(ErrorKind::InvalidArgument, "LP cost must be positive");
  StatsOptions so;
  so.method = config.stats;
  so.samples = config.stats_samples;
  so.seed = stream_seed(config.seed, 0x7374617473ULL);
  res.stats = compute_even_at_last_probs(model, so);
  const ScaledMetric metric = scale_metric(prepared.metric);
  std::vector<std::vector<double>> loads;
  if (config.mode == NumberMode::Rational)
    sample_ojoin(prepared, make_plan<Rational>(model.h, res.stats, config.params), metric, config, res, loads);
  else
    sample_ojoin(prepared, make_plan<double>(model.h, res.stats, config.params), metric, config, res, loads);

  const double lp = to_double(res.lp_cost);
  std::vector<double> ratio, tour_ratio, y_ratio;
  for (const auto& s : res.samples) {
    ratio.push_back(to_double(s.tree_cost + s.join_cost) / lp);
    tour_ratio.push_back(to_double(s.tour_cost) / lp);
    y_ratio.push_back((to_double(s.tree_cost) + s.y_cost) / lp);
    res.min_y = std::min(res.min_y, s.min_y);
    if (!s.feasible) ++res.infeasible;
  }
  res.ratio = mean_stat(ratio);
  res.tour_ratio = mean_stat(tour_ratio);
  res.y_ratio = mean_stat(y_ratio);
  res.mean_tree_cost = mean_of(res.samples, &SampleRecord::tree_cost);
  res.mean_join_cost = mean_of(res.samples, &SampleRecord::join_cost);
  res.mean_tour_cost = mean_of(res.samples, &SampleRecord::tour_cost);
  for (size_t c = 0; c < model.min_cuts.size(); ++c) {
    CutLoad cl;
    cl.side = model.min_cuts[c].side;
    cl.kind = classify_cut(model.h, cl.side).kind;
    std::vector<double> col;
    for (const auto& row : loads) col.push_back(row[c]);
    cl.load = mean_stat(col);
    res.cuts.push_back(std::move(cl));
  }
  for (const auto& s : res.samples)
    if (!s.feasible) {
      res.first_failure_index = s.index;
      res.first_failure = s.witness;
      break;
    }
  return res;
}

namespace {

template <class S>
std::vector<S> convert_all(const std::vector<Rational>& v) {
  std::vector<S> out;
  for (const auto& x : v) out.push_back(convert<S>(x));
  return out;
}

}  // namespace

DegreeCutRunResult run_degreecut(const HalfIntegralInstance& inst, const RunConfig& config) {
  config.validate();
  require_degree_cut(inst);
  DegreeCutRunResult res;
  res.config = config;
  res.instance = inst.name;
  res.n = inst.n;
  res.lp_cost = lp_cost(inst);
  if (res.lp_cost <= 0) throw Error(ErrorKind::InvalidArgument, "LP cost must be positive");
  res.vertex_bound = degree_vertex_bound(inst.n);
  const SupportGraph g = build_support_graph(inst);
  const ScaledMetric metric = scale_metric(metric_closure(inst));
  const std::vector<MinCut> min_cuts = enumerate_min_cuts(g);
  res.decomposition = decompose_matching(g, degreecut_nu(g));
  const auto& dec = res.decomposition;
  std::vector<DegreeCutModel> models;
  for (const auto& mt : dec.matchings) {
    models.push_back(fit_degreecut_model(g, mt));
    res.fit_error = std::max(res.fit_error, models.back().fit_error);
  }
  std::vector<double> cumulative;
  double acc = 0;
  for (const auto& w : dec.weights) cumulative.push_back(acc += to_double(w));

  res.vertex_load_exact.assign(g.n, 0.0);
  if (config.mode == NumberMode::Rational) {
    std::vector<Rational> load(g.n, Rational(0));
    for (size_t k = 0; k < models.size(); ++k) {
      const auto ex = degreecut_exact<Rational>(g, models[k]);
      for (int v = 0; v < g.n; ++v) load[v] += dec.weights[k] * ex.vertex_load[v];
      for (int e = 0; e < g.m(); ++e)
        if (models[k].pm.normal[e]) res.min_normal_exact = std::min(res.min_normal_exact, to_double(ex.normal_even[e]));
    }
    for (int v = 0; v < g.n; ++v) {
      res.vertex_load_exact[v] = to_double(load[v]);
      res.vertex_load_rational.push_back(format_rational(load[v]));
    }
  } else {
    for (size_t k = 0; k < models.size(); ++k) {
      const auto ex = degreecut_exact<double>(g, models[k]);
      for (int v = 0; v < g.n; ++v) res.vertex_load_exact[v] += to_double(dec.weights[k]) * ex.vertex_load[v];
      for (int e = 0; e < g.m(); ++e)
        if (models[k].pm.normal[e]) res.min_normal_exact = std::min(res.min_normal_exact, ex.normal_even[e]);
    }
  }

  struct Extra {
    int term = 0;
    std::vector<double> vertex;
    std::vector<char> normal, even;
  };
  std::vector<Extra> extra(config.samples);
  res.samples.assign(config.samples, SampleRecord{});
  parallel_for(config.samples, config.jobs, [&](long i) {
    SampleRecord rec;
    rec.index = i;
    rec.seed = stream_seed(config.seed, static_cast<std::uint64_t>(i));
    Rng rng(rec.seed);
    const double u = uniform01(rng) * cumulative.back();
    const int k = std::min<int>(static_cast<int>(std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin()),
                                static_cast<int>(models.size()) - 1);
    const DegreeCutModel& model = models[k];
    std::vector<int> tree = model.sample(rng);
    tree.push_back(model.pm.e_plus);
    std::sort(tree.begin(), tree.end());
    std::vector<char> in_tree(g.m(), 0);
    std::uint64_t odd = 0;
    std::vector<std::array<int, 2>> tree_ends;
    rec.tree_cost = 0;
    for (int e : tree) {
      in_tree[e] = 1;
      odd ^= (std::uint64_t{1} << g.edges[e].u) ^ (std::uint64_t{1} << g.edges[e].v);
      tree_ends.push_back({g.edges[e].u, g.edges[e].v});
      rec.tree_cost += g.cost[e];
    }
    const std::vector<Rational> y = degreecut_y(g, model.pm, in_tree);
    Feasibility feas;
    if (config.mode == NumberMode::Rational)
      feas = check_feasible(g, y, odd, min_cuts);
    else
      feas = check_feasible(g, convert_all<double>(y), odd, min_cuts);
    rec.feasible = feas.ok;
    rec.witness = feas.witness;
    const TJoin join = min_tjoin(odd, metric);
    rec.join_cost = Rational(join.cost) * metric.unit;
    const Tour tour = tour_from_join(g.n, tree_ends, join.pairs, metric);
    rec.tour_cost = Rational(tour.cost) * metric.unit;
    rec.odd_vertices = std::popcount(odd);
    Rational ycost(0), low = y.empty() ? Rational(0) : y[0];
    Extra ex;
    ex.term = k;
    ex.vertex.assign(g.n, 0.0);
    ex.normal.assign(g.m(), 0);
    ex.even.assign(g.m(), 0);
    for (int e = 0; e < g.m(); ++e) {
      ycost += g.cost[e] * y[e];
      if (y[e] < low) low = y[e];
      ex.vertex[g.edges[e].u] += to_double(y[e]);
      ex.vertex[g.edges[e].v] += to_double(y[e]);
      if (model.pm.normal[e]) {
        ex.normal[e] = 1;
        ex.even[e] = degreecut_even_at_last(g, in_tree, e);
      }
    }
    rec.y_cost = to_double(ycost);
    rec.min_y = to_double(low);
    extra[i] = std::move(ex);
    res.samples[i] = std::move(rec);
  });

  const double lp = to_double(res.lp_cost);
  std::vector<double> ratio, tour_ratio;
  res.matching_draws.assign(models.size(), 0);
  res.normal_count.assign(g.m(), 0);
  res.normal_even.assign(g.m(), 0);
  std::vector<std::vector<double>> per_vertex(g.n);
  for (long i = 0; i < config.samples; ++i) {
    const auto& s = res.samples[i];
    ratio.push_back(to_double(s.tree_cost + s.join_cost) / lp);
    tour_ratio.push_back(to_double(s.tour_cost) / lp);
    res.min_y = std::min(res.min_y, s.min_y);
    if (!s.feasible && res.infeasible++ == 0) {
      res.first_failure_index = s.index;
      res.first_failure = s.witness;
    }
    ++res.matching_draws[extra[i].term];
    for (int v = 0; v < g.n; ++v) per_vertex[v].push_back(extra[i].vertex[v]);
    for (int e = 0; e < g.m(); ++e) {
      res.normal_count[e] += extra[i].normal[e];
      res.normal_even[e] += extra[i].even[e];
    }
  }
  res.ratio = mean_stat(ratio);
  res.tour_ratio = mean_stat(tour_ratio);
  for (auto& col : per_vertex) res.vertex_load.push_back(mean_stat(col));
  res.mean_tree_cost = mean_of(res.samples, &SampleRecord::tree_cost);
  res.mean_join_cost = mean_of(res.samples, &SampleRecord::join_cost);
  res.mean_tour_cost = mean_of(res.samples, &SampleRecord::tour_cost);
  return res;
}

}  // namespace halftsp
