#include <sstream>
#include <string>

#include "halftsp/pipeline.hpp"
#include "halftsp/version.hpp"
#include "json.hpp"

namespace halftsp {

namespace {

using json = nlohmann::json;

const char* to_string(CutClass kind) {
  switch (kind) {
    case CutClass::CriticalNode: return "critical";
    case CutClass::CycleInterval: return "cycle_interval";
    case CutClass::FinalCycleArc: return "final_cycle_arc";
    case CutClass::Unclassified: return "unclassified";
  }
  return "unclassified";
}

json stat_json(const MeanStat& s) {
  return json{{"mean", s.mean}, {"stddev", s.stddev}, {"stderr", s.stderr_}, {"ci99", {s.ci_low, s.ci_high}}};
}

json config_json(const RunConfig& c) {
  json j;
  j["command"] = c.command;
  j["instance"] = c.instance_path;
  j["generator"] = c.generator;
  j["samples"] = c.samples;
  j["seed"] = c.seed;
  j["mode"] = to_string(c.mode);
  j["params"] = {{"alpha", format_rational(c.params.alpha)},
                 {"beta", format_rational(c.params.beta)},
                 {"tau", format_rational(c.params.tau)},
                 {"proven_range", c.params.in_proven_range()}};
  j["stats"] = c.stats == StatsMethod::Exact ? "exact" : "monte_carlo";
  j["stats_samples"] = c.stats_samples;
  return j;
}

json samples_json(const std::vector<SampleRecord>& samples) {
  json arr = json::array();
  for (const auto& s : samples) {
    json j;
    j["index"] = s.index;
    j["seed"] = s.seed;
    j["tree_cost"] = format_rational(s.tree_cost);
    j["join_cost"] = format_rational(s.join_cost);
    j["tour_cost"] = format_rational(s.tour_cost);
    j["y_cost"] = s.y_cost;
    j["odd_vertices"] = s.odd_vertices;
    j["feasible"] = s.feasible;
    j["min_y"] = s.min_y;
    if (!s.feasible) j["witness"] = s.witness;
    arr.push_back(std::move(j));
  }
  return arr;
}

json failure_json(long index, const VertexSet& side) {
  if (index < 0) return nullptr;
  return json{{"sample", index}, {"side", side}};
}

}  // namespace

std::string report_json(const RunResult& r) {
  json j;
  j["version"] = kVersion;
  j["config"] = config_json(r.config);
  j["instance"] = {{"name", r.instance}, {"n", r.n}, {"support_n", r.support_n}, {"lp_cost", format_rational(r.lp_cost)}};

  json p = json::array();
  for (std::size_t e = 0; e < r.stats.p.size(); ++e) {
    json pe{{"edge", e}, {"p", format_rational(r.stats.p[e])}};
    if (r.stats.method == StatsMethod::MonteCarlo) pe["ci99_half_width"] = r.stats.ci_half_width[e];
    p.push_back(std::move(pe));
  }
  j["even_at_last"] = {{"method", r.stats.method == StatsMethod::Exact ? "exact" : "monte_carlo"},
                       {"samples", r.stats.samples},
                       {"p", std::move(p)}};

  json cuts = json::array();
  for (const auto& c : r.cuts)
    cuts.push_back({{"side", c.side}, {"kind", to_string(c.kind)}, {"load", stat_json(c.load)}});
  j["cuts"] = std::move(cuts);

  j["summary"] = {{"ratio", stat_json(r.ratio)},
                  {"tour_ratio", stat_json(r.tour_ratio)},
                  {"y_ratio", stat_json(r.y_ratio)},
                  {"mean_tree_cost", format_rational(r.mean_tree_cost)},
                  {"mean_join_cost", format_rational(r.mean_join_cost)},
                  {"mean_tour_cost", format_rational(r.mean_tour_cost)},
                  {"infeasible", r.infeasible},
                  {"min_y", r.min_y},
                  {"first_failure", failure_json(r.first_failure_index, r.first_failure)}};
  j["samples"] = samples_json(r.samples);
  return j.dump(2) + "\n";
}

std::string report_json(const DegreeCutRunResult& r) {
  json j;
  j["version"] = kVersion;
  j["config"] = config_json(r.config);
  j["instance"] = {{"name", r.instance}, {"n", r.n}, {"lp_cost", format_rational(r.lp_cost)}};

  json terms = json::array();
  for (std::size_t i = 0; i < r.decomposition.matchings.size(); ++i)
    terms.push_back({{"matching", r.decomposition.matchings[i]},
                     {"weight", format_rational(r.decomposition.weights[i])},
                     {"draws", i < r.matching_draws.size() ? r.matching_draws[i] : 0}});
  j["decomposition"] = {{"uniform", r.decomposition.uniform},
                        {"matching_size", r.decomposition.matching_size},
                        {"terms", std::move(terms)}};

  json vertices = json::array();
  for (std::size_t u = 0; u < r.vertex_load.size(); ++u) {
    json v{{"vertex", u}, {"load", stat_json(r.vertex_load[u])}, {"exact", r.vertex_load_exact[u]}};
    if (u < r.vertex_load_rational.size()) v["exact_rational"] = r.vertex_load_rational[u];
    vertices.push_back(std::move(v));
  }
  j["vertices"] = std::move(vertices);
  j["vertex_bound"] = format_rational(r.vertex_bound);

  json normal = json::array();
  for (std::size_t e = 0; e < r.normal_count.size(); ++e)
    if (r.normal_count[e] > 0)
      normal.push_back({{"edge", e}, {"normal", r.normal_count[e]}, {"even_at_last", r.normal_even[e]}});
  j["normal_edges"] = {{"edges", std::move(normal)}, {"min_exact", r.min_normal_exact}};

  j["summary"] = {{"ratio", stat_json(r.ratio)},
                  {"tour_ratio", stat_json(r.tour_ratio)},
                  {"mean_tree_cost", format_rational(r.mean_tree_cost)},
                  {"mean_join_cost", format_rational(r.mean_join_cost)},
                  {"mean_tour_cost", format_rational(r.mean_tour_cost)},
                  {"infeasible", r.infeasible},
                  {"min_y", r.min_y},
                  {"fit_error", r.fit_error},
                  {"first_failure", failure_json(r.first_failure_index, r.first_failure)}};
  j["samples"] = samples_json(r.samples);
  return j.dump(2) + "\n";
}

std::string report_csv(const std::vector<SampleRecord>& samples) {
  std::ostringstream out;
  out << "index,seed,tree_cost,join_cost,tour_cost,y_cost,odd_vertices,feasible,min_y\n";
  for (const auto& s : samples) {
    out << s.index << ',' << s.seed << ',' << format_rational(s.tree_cost) << ',' << format_rational(s.join_cost)
        << ',' << format_rational(s.tour_cost) << ',' << json(s.y_cost).dump() << ',' << s.odd_vertices << ','
        << (s.feasible ? 1 : 0) << ',' << json(s.min_y).dump() << '\n';
  }
  return out.str();
}

}  // namespace halftsp
