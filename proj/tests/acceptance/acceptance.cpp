// One line per acceptance criterion; exit status 1 if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "halftsp/degreecut.hpp"
#include "halftsp/error.hpp"
#include "halftsp/oracle.hpp"
#include "halftsp/pipeline.hpp"
#include "halftsp/verify.hpp"

using namespace halftsp;

namespace {

constexpr long kRatioSamples = 50000;
constexpr long kDegreeSamples = 100000;
constexpr long kSamplerSamples = 100000;
constexpr std::uint64_t kSeed = 20240601;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Feasibility bookkeeping shared by criteria 1, 2 and 7, reported by 8.
struct FeasibilityLedger {
  long samples = 0;
  long infeasible = 0;
  double min_y = 1;
  long exact_instances = 0;
  long exact_infeasible = 0;
  long exact_not_exhaustive = 0;
  Rational exact_min_y{1};
};
FeasibilityLedger ledger;

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::vector<HalfIntegralInstance> exact_set() {
  std::vector<HalfIntegralInstance> out;
  for (int k = 2; k <= 4; ++k) out.push_back(generate_instance("cycle_chain", k, 0));
  for (int k = 2; k <= 5; ++k) out.push_back(generate_instance("envelope", k, 0));
  out.push_back(generate_instance("definitions_a", 0, 0));
  out.push_back(generate_instance("definitions_b", 0, 0));
  out.push_back(generate_instance("k5_degree", 5, 0));
  return out;
}

RunConfig config_for(const HalfIntegralInstance& inst, long samples, int jobs = 2) {
  RunConfig c;
  c.generator = inst.name;
  c.samples = samples;
  c.seed = kSeed;
  c.jobs = jobs;
  return c;
}

void record_samples(const std::vector<SampleRecord>& samples) {
  for (const auto& s : samples) {
    ++ledger.samples;
    if (!s.feasible) ++ledger.infeasible;
    ledger.min_y = std::min(ledger.min_y, s.min_y);
  }
}

Outcome criterion1() {
  Outcome o;
  Rational worst(0);
  std::string worst_at;
  long cuts = 0;
  for (const auto& inst : exact_set()) {
    const auto prepared = prepare_instance(inst);
    const auto res = exact_pipeline_expectations(prepared, ChargingParams{});
    if (res.outcomes > kOracleCap || res.tree_outcomes > kOracleCap) {
      o.pass = false;
      o.detail += inst.name + " exceeds the outcome cap; ";
    }
    for (const auto& c : res.cuts) {
      if (c.kind == CutClass::FinalCycleArc) continue;
      ++cuts;
      if (c.expected > worst) {
        worst = c.expected;
        worst_at = inst.name;
      }
    }
    ++ledger.exact_instances;
    ledger.exact_infeasible += res.infeasible;
    if (!res.feasibility_exhaustive) ++ledger.exact_not_exhaustive;
    if (res.min_y < ledger.exact_min_y) ledger.exact_min_y = res.min_y;
  }
  const Rational bound = ratio(99552, 100000);
  o.pass = o.pass && worst <= bound;
  o.detail += "max E[y(delta(S))] = " + format_rational(worst) + " (" + fmt("%.6f", to_double(worst)) + ", " +
              worst_at + ") <= 0.99552 over " + std::to_string(cuts) + " cuts";
  return o;
}

Outcome criterion2() {
  Outcome o;
  auto instances = exact_set();
  instances.push_back(generate_instance("nested_degree", 0, 0));
  for (std::uint64_t s = 1; s <= 3; ++s) instances.push_back(generate_instance("random_half_integral", 10, s));
  double worst_margin = -1e9;
  std::string worst;
  for (const auto& inst : instances) {
    const auto r = run_ojoin(inst, config_for(inst, kRatioSamples));
    record_samples(r.samples);
    const double limit = 1.49776 + 3 * r.ratio.stderr_;
    if (r.ratio.mean > limit) o.pass = false;
    const double margin = r.ratio.mean - limit;
    if (margin > worst_margin) {
      worst_margin = margin;
      worst = inst.name + " mean " + fmt("%.5f", r.ratio.mean) + " +- " + fmt("%.5f", r.ratio.stderr_);
    }
  }
  o.detail = std::to_string(instances.size()) + " instances x " + std::to_string(kRatioSamples) +
             " samples; closest: " + worst + " vs 1.49776 + 3 sigma";
  return o;
}

bool exact_pass(const LemmaCheck& c) {
  if (c.relation == ">=") return c.value >= c.bound;
  if (c.relation == "<=") return c.value <= c.bound;
  return c.value == c.bound;
}

Outcome criterion3() {
  Outcome o;
  VerifyOptions opts;
  opts.instances = exact_set();
  opts.degree_sizes.clear();
  opts.random_configs = 0;
  const auto report = verify_lemmas(opts);
  const std::vector<std::string> required{"cut_even",        "p_delta_4/27", "p_W_1/27",   "p_pair_7/32",
                                          "edge_13/54",      "bottom_edge_1/4", "k5_edge_1/4", "gadget_1/4"};
  std::map<std::string, std::pair<long, long>> tally;  // checks, failures at zero tolerance
  for (const auto& c : report.checks) {
    auto& t = tally[c.lemma];
    ++t.first;
    if (!exact_pass(c)) ++t.second;
  }
  for (const auto& name : required) {
    const auto& t = tally[name];
    if (t.first == 0 || t.second > 0) o.pass = false;
    o.detail += name + " " + std::to_string(t.first - t.second) + "/" + std::to_string(t.first) + "; ";
  }
  o.detail.resize(o.detail.size() - 2);
  return o;
}

Outcome criterion4() {
  Outcome o;
  const std::vector<Rational> extremal{Rational(1), Rational(1, 3), Rational(1, 3), Rational(1, 3)};
  const std::pair<Functional, Rational> targets[] = {{Functional::ParityEven, Rational(13, 27)},
                                                     {Functional::PDeltaBound, Rational(4, 27)},
                                                     {Functional::PWBound, Rational(1, 27)}};
  Rng rng(kSeed);
  for (const auto& [f, value] : targets) {
    const auto r = hoeffding_extremal(4, Rational(2), f);
    const bool at_value = r.value == value && r.config == extremal;
    long below = 0;
    for (int i = 0; i < 10000; ++i) {
      const auto cfg = random_bernoulli_config(4, Rational(2), requires_certain_success(f), rng);
      if (evaluate_functional(f, cfg) < r.value) ++below;
    }
    if (!at_value || below > 0) o.pass = false;
    o.detail += std::string(to_string(f)) + " = " + format_rational(r.value) + (at_value ? " at {1,1/3,1/3,1/3}" : " MISMATCH") +
                ", " + std::to_string(below) + "/10000 below; ";
  }
  o.detail.resize(o.detail.size() - 2);
  return o;
}

Outcome criterion5() {
  Outcome o;
  const auto census = k5_parity_census();
  const bool census_ok = census == std::array<int, 4>{2, 4, 4, 6};
  Multigraph k4;
  k4.n = 4;
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b) k4.add_edge(a, b);
  TreeSampler sampler(k4, uniform_weights<double>(k4));
  Rng rng(kSeed);
  std::map<std::vector<int>, long> freq;
  for (long i = 0; i < kSamplerSamples; ++i) ++freq[sampler(rng)];
  double tv = 0;
  for (const auto& [tree, c] : freq) tv += std::fabs(static_cast<double>(c) / kSamplerSamples - 1.0 / 16);
  tv /= 2;
  o.pass = census_ok && freq.size() == 16 && tv <= 0.02;
  o.detail = "census " + std::to_string(census[0]) + "/" + std::to_string(census[1]) + "/" + std::to_string(census[2]) +
             "/" + std::to_string(census[3]) + ", " + std::to_string(freq.size()) + " distinct trees, TV " +
             fmt("%.5f", tv) + " <= 0.02 at 1e5 samples";
  return o;
}

Outcome criterion6() {
  Outcome o;
  Multigraph k4;
  k4.n = 4;
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b) k4.add_edge(a, b);
  const auto fit = fit_lambda(k4, std::vector<double>(6, 0.5));
  const auto m = tree_marginals(k4, fit.weights);
  double marg_err = 0, lambda_err = 0;
  for (int e = 0; e < 6; ++e) {
    marg_err = std::max(marg_err, std::fabs(m[e] - 0.5));
    lambda_err = std::max(lambda_err, std::fabs(fit.weights.lambda[e] / fit.weights.lambda[0] - 1));
  }
  if (marg_err > 1e-8 || lambda_err > 1e-6) o.pass = false;

  Rng rng(kSeed);
  double worst_refit = 0, worst_marg = 0;
  for (int trial = 0; trial < 20; ++trial) {
    Multigraph g;
    g.n = 4 + trial % 4;
    for (int a = 0; a < g.n; ++a)
      for (int b = a + 1; b < g.n; ++b)
        if (uniform01(rng) < 0.8 || b == a + 1) g.add_edge(a, b);
    g.add_edge(0, g.n - 1);
    LambdaWeights w = uniform_weights<double>(g);
    for (auto& l : w.lambda) l = 0.2 + 3 * uniform01(rng);
    const auto target = tree_marginals(g, w);
    const auto first = fit_lambda(g, target, FitOptions{1e-11, 200000});
    const auto achieved = tree_marginals(g, first.weights);
    const auto second = fit_lambda(g, achieved, FitOptions{1e-11, 200000});
    const auto again = tree_marginals(g, second.weights);
    for (int e = 0; e < g.m(); ++e) {
      worst_marg = std::max(worst_marg, std::fabs(again[e] - target[e]));
      worst_refit = std::max(worst_refit, std::fabs(second.weights.lambda[e] / second.weights.lambda[0] -
                                                    first.weights.lambda[e] / first.weights.lambda[0]));
    }
  }
  if (worst_marg > 1e-8 || worst_refit > 1e-6) o.pass = false;
  o.detail = "K4: marginal error " + fmt("%.1e", marg_err) + ", lambda spread " + fmt("%.1e", lambda_err) +
             "; 20 random targets: refit lambda drift " + fmt("%.1e", worst_refit) + ", marginal error " +
             fmt("%.1e", worst_marg);
  return o;
}

Outcome criterion7() {
  Outcome o;
  // K5 decomposition
  {
    const auto g = build_support_graph(generate_instance("k5_degree", 5, 0));
    const auto dec = decompose_matching(g, degreecut_nu(g));
    bool ok = dec.matchings.size() == 15;
    std::vector<Rational> marginal(g.m(), Rational(0));
    for (size_t k = 0; k < dec.matchings.size(); ++k) {
      ok = ok && dec.weights[k] == Rational(1, 15);
      for (int e : dec.matchings[k]) marginal[e] += dec.weights[k];
    }
    for (const auto& v : marginal) ok = ok && v == Rational(1, 5);
    if (!ok) o.pass = false;
    o.detail += std::string("K5 15 x 1/15, marginal 1/5 ") + (ok ? "exact" : "MISMATCH") + "; ";
  }
  bool ez_ok = true, vertex_ok = true, normal_ok = true, ratio_ok = true;
  double worst_normal_margin = 1, worst_even_ratio = 0, worst_vertex_slack = 1;
  for (int n : {5, 6, 7, 8, 9, 10, 11, 12}) {
    const auto inst = generate_instance("k5_degree", n, 0);
    const auto g = build_support_graph(inst);
    const auto dec = decompose_matching(g, degreecut_nu(g));
    std::vector<Rational> ez(g.m(), Rational(0));
    for (size_t k = 0; k < dec.matchings.size(); ++k) {
      const auto pm = perturb(g, dec.matchings[k]);
      for (int e = 0; e < g.m(); ++e) ez[e] += dec.weights[k] * pm.z[e];
    }
    for (const auto& v : ez) ez_ok = ez_ok && v == Rational(1, 2);

    const auto r = run_degreecut(inst, config_for(inst, kDegreeSamples));
    record_samples(r.samples);
    for (int v = 0; v < r.n; ++v) {
      const Rational exact = parse_rational(r.vertex_load_rational[v]);
      if (exact > r.vertex_bound) vertex_ok = false;
      if (r.vertex_load[v].mean > to_double(r.vertex_bound) + 3 * r.vertex_load[v].stderr_) vertex_ok = false;
      worst_vertex_slack = std::min(worst_vertex_slack, to_double(r.vertex_bound - exact));
    }
    long normal = 0, even = 0;
    for (size_t e = 0; e < r.normal_count.size(); ++e) {
      normal += r.normal_count[e];
      even += r.normal_even[e];
    }
    if (normal > 0) {
      const double p = static_cast<double>(even) / normal;
      const double sigma = std::sqrt(p * (1 - p) / normal);
      if (p < 16.0 / 81 - 3 * sigma) normal_ok = false;
      worst_normal_margin = std::min(worst_normal_margin, p - 16.0 / 81);
    }
    if (n % 2 == 0) {
      if (r.ratio.mean > 1.4671 + 3 * r.ratio.stderr_) ratio_ok = false;
      worst_even_ratio = std::max(worst_even_ratio, r.ratio.mean);
    }
  }
  o.pass = o.pass && ez_ok && vertex_ok && normal_ok && ratio_ok;
  o.detail += std::string("E[z] = 1/2 ") + (ez_ok ? "exact" : "MISMATCH") + "; normal even-at-last freq - 16/81 >= " +
              fmt("%.4f", worst_normal_margin) + "; per-vertex slack to B(n) >= " + fmt("%.4f", worst_vertex_slack) +
              "; even-n ratio max " + fmt("%.4f", worst_even_ratio) + " vs 1.4671 + 3 sigma";
  return o;
}

Outcome criterion8() {
  Outcome o;
  o.pass = ledger.infeasible == 0 && ledger.min_y >= 1.0 / 6 - 1e-15 && ledger.exact_infeasible == 0 &&
           ledger.exact_min_y >= Rational(1, 6) && ledger.exact_not_exhaustive == 0 && ledger.samples > 0;
  o.detail = std::to_string(ledger.samples) + " sampled y: " + std::to_string(ledger.infeasible) +
             " infeasible, min y_e " + fmt("%.6f", ledger.min_y) + "; exact oracle on " +
             std::to_string(ledger.exact_instances) + " instances: " + std::to_string(ledger.exact_infeasible) +
             " infeasible outcomes, min y_e " + format_rational(ledger.exact_min_y);
  return o;
}

Outcome criterion9() {
  Outcome o;
  const auto chain = generate_instance("cycle_chain", 4, 0);
  const auto a = report_json(run_ojoin(chain, config_for(chain, 5000, 1)));
  const auto b = report_json(run_ojoin(chain, config_for(chain, 5000, 1)));
  const auto c = report_json(run_ojoin(chain, config_for(chain, 5000, 4)));
  const auto deg = generate_instance("k5_degree", 9, 0);
  const auto d1 = report_json(run_degreecut(deg, config_for(deg, 5000, 1)));
  const auto d2 = report_json(run_degreecut(deg, config_for(deg, 5000, 3)));
  o.pass = a == b && a == c && d1 == d2;
  o.detail = std::string("run jobs 1 vs 1: ") + (a == b ? "identical" : "DIFFER") + ", jobs 1 vs 4: " +
             (a == c ? "identical" : "DIFFER") + ", degreecut jobs 1 vs 3: " + (d1 == d2 ? "identical" : "DIFFER") +
             " (" + std::to_string(a.size()) + " bytes)";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {1, "per-cut load bound", criterion1},       {2, "ratio bound", criterion2},
      {3, "probability battery", criterion3},      {4, "Hoeffding extremizer", criterion4},
      {5, "K4 census and sampler", criterion5},    {6, "lambda fitting", criterion6},
      {7, "degree-cut suite", criterion7},         {8, "feasibility", criterion8},
      {9, "determinism", criterion9},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const Error& e) {
      out = {false, std::string("error: ") + to_string(e.kind()) + ": " + e.what()};
    } catch (const std::exception& e) {
      out = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!out.pass) ++failures;
    std::printf("[%s] criterion %d %s: %s (%.1fs)\n", out.pass ? "PASS" : "FAIL", c.id, c.name, out.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
