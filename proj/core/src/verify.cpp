#include "halftsp/verify.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <sstream>

#include "halftsp/degreecut.hpp"
#include "halftsp/error.hpp"
#include "halftsp/oracle.hpp"
#include "halftsp/version.hpp"
#include "json.hpp"

namespace halftsp {

namespace {

std::string format_set(const std::vector<int>& s) {
  std::string out = "{";
  for (size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out + "}";
}

class Recorder {
 public:
  explicit Recorder(VerifyReport& report) : report_(report) {}

  Rational tolerance;

  void at_least(const std::string& lemma, const std::string& inst, const std::string& subject, const Rational& value,
                const Rational& bound) {
    add(lemma, inst, subject, value, bound, ">=", value >= bound - tolerance);
  }
  void at_most(const std::string& lemma, const std::string& inst, const std::string& subject, const Rational& value,
               const Rational& bound) {
    add(lemma, inst, subject, value, bound, "<=", value <= bound + tolerance);
  }
  void equals(const std::string& lemma, const std::string& inst, const std::string& subject, const Rational& value,
              const Rational& bound) {
    add(lemma, inst, subject, value, bound, "==", abs(value - bound) <= tolerance);
  }

 private:
  void add(const std::string& lemma, const std::string& inst, const std::string& subject, const Rational& value,
           const Rational& bound, const char* rel, bool pass) {
    report_.checks.push_back({lemma, inst, subject, value, bound, rel, tolerance, pass});
    auto it = index_.find(lemma);
    if (it == index_.end()) {
      it = index_.emplace(lemma, report_.summary.size()).first;
      report_.summary.push_back({lemma, 0, 0, value, bound, rel});
    }
    auto& s = report_.summary[it->second];
    ++s.checks;
    if (!pass) ++s.failures;
    const std::string r = rel;
    if ((r == ">=" && value < s.worst) || (r == "<=" && value > s.worst) || (r == "==" && !pass)) s.worst = value;
  }

  VerifyReport& report_;
  std::map<std::string, size_t> index_;
};

// P[|F cap T| = k] for k = 0..|F|.
std::vector<Rational> count_law(const HierarchyModel& model, const std::vector<int>& F) {
  const auto law = edge_law<Rational>(model, F);
  std::vector<Rational> out(F.size() + 1, Rational(0));
  for (size_t p = 0; p < law.prob.size(); ++p) out[std::popcount(p)] += law.prob[p];
  return out;
}

// G_S is K5: four children forming a simple K4, each with one boundary edge of S.
bool contracted_is_k5(const CutHierarchy& h, const NodeModel& nm) {
  const Multigraph& g = nm.graph;
  if (g.n != 4 || g.m() != 6) return false;
  std::vector<char> seen(16, 0);
  for (const auto& [u, v] : g.edges) {
    if (u == v || seen[u * 4 + v]) return false;
    seen[u * 4 + v] = seen[v * 4 + u] = 1;
  }
  const auto& node = h.nodes[nm.node];
  if (node.boundary.size() != 4) return false;
  for (int c : node.children) {
    const auto& b = h.nodes[c].boundary;
    const long outside = std::count_if(b.begin(), b.end(), [&](int e) {
      return std::find(node.boundary.begin(), node.boundary.end(), e) != node.boundary.end();
    });
    if (outside != 1) return false;
  }
  return true;
}

void check_instance(const HalfIntegralInstance& inst, const VerifyOptions& opts, Recorder& rec, VerifyReport& report) {
  const std::string name = inst.name;
  const PreparedInstance prepared = prepare_instance(inst);
  const HierarchyModel& model = prepared.model;
  const CutHierarchy& h = model.h;
  const EvenAtLastStats stats = compute_even_at_last_probs(model);
  const auto& p = stats.p;
  const bool exact = std::all_of(model.degree.begin(), model.degree.end(), [](const NodeModel& nm) { return nm.lambda_exact; });
  rec.tolerance = exact ? Rational(0) : ratio(1, 1000000000000L);
  if (!exact) report.notes.push_back(name + ": fitted lambda is not exactly rational; comparisons use tolerance 1e-12");

  for (const auto& cut : model.min_cuts)
    rec.at_least("cut_even", name, format_set(cut.side), prob_all_even<Rational>(model, {cut.boundary}),
                 Rational(13, 27));

  auto is_top_cut = [&](int id) {
    const int parent = h.nodes[id].parent;
    return parent != kRoot && h.nodes[parent].kind == NodeKind::Degree;
  };
  for (const auto& node : h.nodes) {
    if (!is_top_cut(node.id)) continue;
    const std::string subject = format_set(node.vertices);
    if (node.up.empty()) {
      Rational total(0);
      for (int e : node.across) total += p[e];
      rec.at_least("p_delta_4/27", name, subject, total, Rational(4, 27));
      const auto& d = node.across;
      for (size_t a = 0; a < d.size(); ++a)
        for (size_t b = a + 1; b < d.size(); ++b)
          for (size_t c = b + 1; c < d.size(); ++c)
            rec.at_least("p_W_1/27", name, subject + " W=" + format_set({d[a], d[b], d[c]}), p[d[a]] + p[d[b]] + p[d[c]],
                         Rational(1, 27));
    } else {
      const auto& d = node.across;
      if (d.size() == 3) {
        const auto law = count_law(model, d);
        rec.equals("three_edge_support", name, subject, Rational(1) - law[0], Rational(1));
        rec.at_least("three_edge_one", name, subject, law[1], Rational(1, 2));
        rec.at_least("three_edge_two", name, subject, law[2], Rational(3, 8));
      }
      for (size_t a = 0; a < d.size(); ++a)
        for (size_t b = a + 1; b < d.size(); ++b)
          rec.at_least("p_pair_7/32", name, subject + " W=" + format_set({d[a], d[b]}), p[d[a]] + p[d[b]],
                       Rational(7, 32));
    }
  }

  for (int e = 0; e < h.m(); ++e) {
    const auto& info = h.edges[e];
    if (info.final_cycle) continue;
    const std::string subject = "edge " + std::to_string(e);
    if (info.top) {
      const int u = h.last_cuts[info.last[0]].ref.node;
      const int v = h.last_cuts[info.last[1]].ref.node;
      if (u == kRoot || v == kRoot) continue;
      if (h.nodes[u].up.empty() != h.nodes[v].up.empty()) rec.at_least("edge_13/54", name, subject, p[e], Rational(13, 54));
    } else if (info.owner != kRoot && h.nodes[info.owner].kind == NodeKind::Cycle) {
      rec.at_least("bottom_edge_1/4", name, subject, p[e], Rational(1, 4));
    }
  }
  for (const auto& nm : model.degree)
    if (contracted_is_k5(h, nm))
      for (int e : nm.edges) rec.at_least("k5_edge_1/4", name, "edge " + std::to_string(e), p[e], Rational(1, 4));

  ExactOptions ex;
  ex.cap = opts.cap;
  const auto res = exact_pipeline_expectations(prepared, opts.params, ex);
  const Rational main_bound = ratio(99552, 100000);
  const bool alpha_zero = opts.params.alpha == 0;
  for (const auto& c : res.cuts) {
    if (c.kind == CutClass::FinalCycleArc) continue;
    if (alpha_zero) {
      const auto b = h.boundary(classify_cut(h, c.side).ref);
      const bool all_top = std::all_of(b.begin(), b.end(), [&](int e) { return h.edges[e].top; });
      if (all_top) rec.equals("alpha0_top_cut_load", name, format_set(c.side), c.expected, Rational(1));
    } else {
      rec.at_most("main_cut_load", name, format_set(c.side), c.expected, main_bound);
    }
  }
  rec.equals("feasibility", name, res.feasibility_exhaustive ? "exhaustive" : "within budget",
             Rational(res.infeasible), Rational(0));
  if (res.infeasible > 0)
    report.notes.push_back(name + ": violated odd cut " + format_set(res.first_failure.witness) + " with y(delta) = " +
                           std::to_string(res.first_failure.value));
  if (!res.feasibility_exhaustive)
    report.notes.push_back(name + ": " + std::to_string(res.outcomes) +
                           " outcomes exceed the feasibility budget; per-outcome check skipped");
  rec.at_least("y_floor_1/6", name, "min y", res.min_y, Rational(1, 6));
  rec.tolerance = 0;
}

void check_fixed(const VerifyOptions& opts, Recorder& rec) {
  rec.equals("gadget_1/4", "gadget", "P[A=B=1]", tight_gadget_probability(), Rational(1, 4));
  const auto census = k5_parity_census();
  const char* cls[4] = {"even-even", "even-odd", "odd-even", "odd-odd"};
  const int want[4] = {2, 4, 4, 6};
  for (int i = 0; i < 4; ++i) rec.equals("k4_census", "K4", cls[i], Rational(census[i]), Rational(want[i]));

  struct Target {
    Functional f;
    Rational value;
  };
  const Target targets[] = {{Functional::ParityEven, Rational(13, 27)},
                            {Functional::PDeltaBound, Rational(4, 27)},
                            {Functional::PWBound, Rational(1, 27)}};
  const std::vector<Rational> extremal{Rational(1), Rational(1, 3), Rational(1, 3), Rational(1, 3)};
  Rng rng(stream_seed(opts.seed, 0x686f6566));
  for (const auto& t : targets) {
    const auto r = hoeffding_extremal(4, Rational(2), t.f);
    const std::string fname = to_string(t.f);
    rec.equals("hoeffding_value_" + fname, "m=4 q=2", fname, r.value, t.value);
    rec.equals("hoeffding_config_" + fname, "m=4 q=2", fname, Rational(r.config == extremal ? 1 : 0), Rational(1));
    Rational worst = r.value + 1;
    for (long i = 0; i < opts.random_configs; ++i) {
      const auto cfg = random_bernoulli_config(4, Rational(2), requires_certain_success(t.f), rng);
      const Rational v = evaluate_functional(t.f, cfg);
      if (v < worst) worst = v;
    }
    if (opts.random_configs > 0)
      rec.at_least("hoeffding_random_" + fname, "m=4 q=2", fname + " x" + std::to_string(opts.random_configs), worst, r.value);
  }
}

void check_degree_cut(int n, const VerifyOptions& opts, Recorder& rec) {
  const auto inst = generate_instance("k5_degree", n, opts.seed);
  const std::string name = inst.name;
  require_degree_cut(inst);
  const SupportGraph g = build_support_graph(inst);
  const auto nu = degreecut_nu(g);
  const auto dec = decompose_matching(g, nu);

  std::vector<Rational> marginal(g.m(), Rational(0)), ez(g.m(), Rational(0)), load(g.n, Rational(0));
  Rational total(0);
  Rational min_normal(1);
  bool any_normal = false;
  for (size_t k = 0; k < dec.matchings.size(); ++k) {
    total += dec.weights[k];
    for (int e : dec.matchings[k]) marginal[e] += dec.weights[k];
    const auto model = fit_degreecut_model(g, dec.matchings[k]);
    for (int e = 0; e < g.m(); ++e) ez[e] += dec.weights[k] * model.pm.z[e];
    const auto exact = degreecut_exact<Rational>(g, model);
    for (int v = 0; v < g.n; ++v) load[v] += dec.weights[k] * exact.vertex_load[v];
    for (int e = 0; e < g.m(); ++e)
      if (model.pm.normal[e]) {
        any_normal = true;
        if (exact.normal_even[e] < min_normal) min_normal = exact.normal_even[e];
      }
  }
  rec.equals("nu_decomposition_total", name, "sum of weights", total, Rational(1));
  for (int e = 0; e < g.m(); ++e) {
    rec.equals("nu_decomposition_marginal", name, "edge " + std::to_string(e), marginal[e], nu[e]);
    rec.equals("z_expectation_1/2", name, "edge " + std::to_string(e), ez[e], Rational(1, 2));
  }
  if (n == 5) {
    rec.equals("k5_matchings_15", name, "terms", Rational(static_cast<long>(dec.matchings.size())), Rational(15));
    for (size_t k = 0; k < dec.weights.size(); ++k)
      rec.equals("k5_matching_weight_1/15", name, format_set(dec.matchings[k]), dec.weights[k], Rational(1, 15));
    for (int e = 0; e < g.m(); ++e)
      rec.equals("k5_edge_marginal_1/5", name, "edge " + std::to_string(e), marginal[e], Rational(1, 5));
  }
  if (any_normal) rec.at_least("normal_even_16/81", name, "min over normal edges", min_normal, Rational(16, 81));
  const Rational bound = degree_vertex_bound(n);
  for (int v = 0; v < g.n; ++v)
    rec.at_most("degree_vertex_load", name, "vertex " + std::to_string(v), load[v], bound);
}

}  // namespace

bool VerifyReport::passed() const {
  return std::all_of(summary.begin(), summary.end(), [](const LemmaSummary& s) { return s.failures == 0; });
}

std::vector<HalfIntegralInstance> default_battery() {
  std::vector<HalfIntegralInstance> out;
  out.push_back(generate_instance("k5_degree", 5, 0));
  for (int k = 2; k <= 4; ++k) out.push_back(generate_instance("cycle_chain", k, 0));
  for (int k = 2; k <= 5; ++k) out.push_back(generate_instance("envelope", k, 0));
  out.push_back(generate_instance("definitions_a", 0, 0));
  out.push_back(generate_instance("definitions_b", 0, 0));
  out.push_back(generate_instance("nested_degree", 0, 0));
  return out;
}

VerifyReport verify_lemmas(const VerifyOptions& opts) {
  opts.params.validate();
  VerifyReport report;
  Recorder rec(report);
  const auto instances = opts.instances.empty() ? default_battery() : opts.instances;
  for (const auto& inst : instances) check_instance(inst, opts, rec, report);
  if (opts.fixed_values) check_fixed(opts, rec);
  for (int n : opts.degree_sizes) check_degree_cut(n, opts, rec);
  return report;
}

std::string verify_json(const VerifyReport& report, const VerifyOptions& opts) {
  using json = nlohmann::json;
  json j;
  j["version"] = kVersion;
  j["params"] = {{"alpha", format_rational(opts.params.alpha)},
                 {"beta", format_rational(opts.params.beta)},
                 {"tau", format_rational(opts.params.tau)},
                 {"proven_range", opts.params.in_proven_range()}};
  j["passed"] = report.passed();
  json summary = json::array();
  for (const auto& s : report.summary)
    summary.push_back({{"lemma", s.lemma},
                       {"checks", s.checks},
                       {"failures", s.failures},
                       {"worst", format_rational(s.worst)},
                       {"bound", format_rational(s.bound)},
                       {"relation", s.relation}});
  j["summary"] = std::move(summary);
  json checks = json::array();
  for (const auto& c : report.checks)
    checks.push_back({{"lemma", c.lemma},
                      {"instance", c.instance},
                      {"subject", c.subject},
                      {"value", format_rational(c.value)},
                      {"bound", format_rational(c.bound)},
                      {"relation", c.relation},
                      {"tolerance", format_rational(c.tolerance)},
                      {"pass", c.pass}});
  j["checks"] = std::move(checks);
  j["notes"] = report.notes;
  return j.dump(2) + "\n";
}

std::string verify_table(const VerifyReport& report) {
  std::ostringstream out;
  out << "lemma                       checks  fail  worst                 bound\n";
  for (const auto& s : report.summary) {
    std::string worst = format_rational(s.worst);
    if (worst.size() > 20) worst = std::to_string(to_double(s.worst));
    out << (s.failures == 0 ? "PASS " : "FAIL ");
    out.width(23);
    out << std::left << s.lemma;
    out.width(8);
    out << std::right << s.checks;
    out.width(6);
    out << s.failures << "  ";
    out.width(20);
    out << std::left << worst << "  " << s.relation << ' ' << format_rational(s.bound) << '\n';
  }
  for (const auto& note : report.notes) out << "note: " << note << '\n';
  return out.str();
}

}  // namespace halftsp
