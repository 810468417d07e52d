#include "halftsp/instance.hpp"

#include <algorithm>
#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/one_bit_color_map.hpp>
#include <boost/graph/stoer_wagner_min_cut.hpp>
#include <boost/property_map/property_map.hpp>
#include <set>

#include "halftsp/error.hpp"
#include "json.hpp"

namespace halftsp {

using json = nlohmann::json;

namespace {

const Rational kHalf(1, 2);

Rational cost_from_json(const json& j) {
  if (j.is_number_integer()) return Rational(mpz_class(j.dump(), 10));
  if (j.is_string()) return parse_rational(j.get<std::string>());
  throw Error(ErrorKind::MalformedInput, "cost must be an integer or a \"p/q\" string");
}

Rational x_from_json(const json& j) {
  Rational x;
  if (j.is_string()) {
    x = parse_rational(j.get<std::string>());
  } else if (j.is_number_integer()) {
    x = Rational(j.get<long>());
  } else if (j.is_number_float()) {
    x = from_double(j.get<double>());
  } else {
    throw Error(ErrorKind::MalformedInput, "x must be \"1/2\" or \"1\"");
  }
  if (x != kHalf && x != 1) throw Error(ErrorKind::InvalidX, "x value " + format_rational(x) + " not in {1/2, 1}");
  return x;
}

json rational_json(const Rational& r) {
  if (r.get_den() == 1 && r.get_num().fits_slong_p()) return json(r.get_num().get_si());
  return json(format_rational(r));
}

int get_int(const json& obj, const char* key) {
  if (!obj.contains(key) || !obj[key].is_number_integer())
    throw Error(ErrorKind::MalformedInput, std::string("missing integer field '") + key + "'");
  return obj[key].get<int>();
}

}  // namespace

HalfIntegralInstance parse_instance(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::MalformedInput, std::string("JSON syntax error: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::MalformedInput, "instance must be a JSON object");
  HalfIntegralInstance inst;
  if (j.contains("name")) {
    if (!j["name"].is_string()) throw Error(ErrorKind::MalformedInput, "name must be a string");
    inst.name = j["name"].get<std::string>();
  }
  inst.n = get_int(j, "n");
  if (!j.contains("edges") || !j["edges"].is_array()) throw Error(ErrorKind::MalformedInput, "missing array 'edges'");
  for (const auto& e : j["edges"]) {
    if (!e.is_object()) throw Error(ErrorKind::MalformedInput, "edge must be an object");
    InstanceEdge edge;
    edge.u = get_int(e, "u");
    edge.v = get_int(e, "v");
    if (!e.contains("x")) throw Error(ErrorKind::MalformedInput, "edge without x");
    edge.x = x_from_json(e["x"]);
    if (!e.contains("cost")) throw Error(ErrorKind::MalformedInput, "edge without cost");
    edge.cost = cost_from_json(e["cost"]);
    inst.edges.push_back(std::move(edge));
  }
  if (j.contains("e_plus") && !j["e_plus"].is_null()) inst.e_plus = get_int(j, "e_plus");
  if (j.contains("duals")) {
    if (!j["duals"].is_array()) throw Error(ErrorKind::MalformedInput, "duals must be an array");
    for (const auto& d : j["duals"]) {
      DualValue dv;
      if (!d.contains("set") || !d["set"].is_array() || !d.contains("z"))
        throw Error(ErrorKind::MalformedInput, "dual entries need 'set' and 'z'");
      for (const auto& v : d["set"]) {
        if (!v.is_number_integer()) throw Error(ErrorKind::MalformedInput, "dual set entries must be integers");
        dv.set.push_back(v.get<int>());
      }
      std::sort(dv.set.begin(), dv.set.end());
      dv.z = cost_from_json(d["z"]);
      inst.duals.push_back(std::move(dv));
    }
  }
  validate_instance(inst);
  return inst;
}

std::string serialize_instance(const HalfIntegralInstance& inst) {
  json j;
  j["name"] = inst.name;
  j["n"] = inst.n;
  json edges = json::array();
  for (const auto& e : inst.edges) {
    json je;
    je["u"] = e.u;
    je["v"] = e.v;
    je["x"] = format_rational(e.x);
    je["cost"] = rational_json(e.cost);
    edges.push_back(std::move(je));
  }
  j["edges"] = std::move(edges);
  if (inst.e_plus) j["e_plus"] = *inst.e_plus;
  if (!inst.duals.empty()) {
    json duals = json::array();
    for (const auto& d : inst.duals) duals.push_back({{"set", d.set}, {"z", rational_json(d.z)}});
    j["duals"] = std::move(duals);
  }
  return j.dump();
}

void validate_instance(const HalfIntegralInstance& inst) {
  if (inst.n < 3) throw Error(ErrorKind::MalformedInput, "instance needs at least 3 vertices");
  if (inst.n > 62) throw Error(ErrorKind::ResourceCap, "instances are limited to 62 vertices");
  std::set<std::tuple<int, int, bool>> seen;
  std::vector<Rational> degree(inst.n);
  for (size_t i = 0; i < inst.edges.size(); ++i) {
    const auto& e = inst.edges[i];
    if (e.u < 0 || e.u >= inst.n || e.v < 0 || e.v >= inst.n)
      throw Error(ErrorKind::MalformedInput, "edge " + std::to_string(i) + " has a vertex outside [0, n)");
    if (e.u == e.v) throw Error(ErrorKind::MalformedInput, "edge " + std::to_string(i) + " is a loop");
    if (e.x != kHalf && e.x != 1)
      throw Error(ErrorKind::InvalidX, "edge " + std::to_string(i) + " has x = " + format_rational(e.x));
    if (sgn(e.cost) < 0) throw Error(ErrorKind::NegativeCost, "edge " + std::to_string(i) + " has negative cost");
    auto key = std::make_tuple(std::min(e.u, e.v), std::max(e.u, e.v), e.x == 1);
    if (!seen.insert(key).second)
      throw Error(ErrorKind::MalformedInput, "duplicate edge {" + std::to_string(e.u) + "," + std::to_string(e.v) + "}");
    degree[e.u] += e.x;
    degree[e.v] += e.x;
  }
  for (int v = 0; v < inst.n; ++v)
    if (degree[v] != 2)
      throw Error(ErrorKind::DegreeViolation,
                  "vertex " + std::to_string(v) + " has x(delta(v)) = " + format_rational(degree[v]));
  if (inst.e_plus) {
    const int ep = *inst.e_plus;
    if (ep < 0 || ep >= static_cast<int>(inst.edges.size()) || inst.edges[ep].x != 1)
      throw Error(ErrorKind::InvalidArgument, "e_plus must name an edge with x = 1");
  }
  for (const auto& d : inst.duals)
    for (int v : d.set)
      if (v < 0 || v >= inst.n) throw Error(ErrorKind::MalformedInput, "dual set vertex outside [0, n)");

  using Graph = boost::adjacency_list<boost::vecS, boost::vecS, boost::undirectedS, boost::no_property,
                                      boost::property<boost::edge_weight_t, int>>;
  Graph g(inst.n);
  for (const auto& e : inst.edges) boost::add_edge(e.u, e.v, e.x == 1 ? 2 : 1, g);
  DisjointSets ds(inst.n);
  int comps = inst.n;
  for (const auto& e : inst.edges)
    if (ds.unite(e.u, e.v)) --comps;
  if (comps != 1) throw Error(ErrorKind::CutViolation, "support graph is disconnected: x(delta(S)) = 0 for a component S");
  auto parities = boost::make_one_bit_color_map(boost::num_vertices(g), boost::get(boost::vertex_index, g));
  const int w = boost::stoer_wagner_min_cut(g, boost::get(boost::edge_weight, g), boost::parity_map(parities));
  if (w < 4) {
    VertexSet side;
    for (int v = 0; v < inst.n; ++v)
      if (boost::get(parities, v)) side.push_back(v);
    std::string s;
    for (int v : side) s += (s.empty() ? "" : ",") + std::to_string(v);
    throw Error(ErrorKind::CutViolation,
                "cut constraint violated: x(delta(S)) = " + format_rational(ratio(w, 2)) + " < 2 for S = {" + s + "}");
  }
}

Rational lp_cost(const HalfIntegralInstance& inst) {
  Rational c = 0;
  for (const auto& e : inst.edges) c += e.x * e.cost;
  return c;
}

Multigraph SupportGraph::multigraph() const {
  Multigraph g;
  g.n = n;
  for (const auto& e : edges) g.add_edge(e.u, e.v);
  return g;
}

std::vector<int> SupportGraph::boundary(const VertexSet& side) const { return boundary(mask_of(side)); }

std::vector<int> SupportGraph::boundary(std::uint64_t mask) const {
  std::vector<int> out;
  for (const auto& e : edges)
    if (((mask >> e.u) ^ (mask >> e.v)) & 1) out.push_back(e.id);
  return out;
}

SupportGraph build_support_graph(const HalfIntegralInstance& inst) {
  SupportGraph g;
  g.n = inst.n;
  g.incident.resize(inst.n);
  for (size_t i = 0; i < inst.edges.size(); ++i) {
    const auto& e = inst.edges[i];
    const int copies = e.x == 1 ? 2 : 1;
    for (int c = 0; c < copies; ++c) {
      const int id = g.m();
      g.edges.push_back({id, e.u, e.v, static_cast<int>(i)});
      g.cost.push_back(e.cost);
      g.parallel[{std::min(e.u, e.v), std::max(e.u, e.v)}].push_back(id);
      g.incident[e.u].push_back(id);
      g.incident[e.v].push_back(id);
    }
  }
  return g;
}

EPlusResult split_vertex_for_eplus(const HalfIntegralInstance& inst) {
  auto first_copy = [](const HalfIntegralInstance& in, int edge) {
    int id = 0;
    for (int i = 0; i < edge; ++i) id += in.edges[i].x == 1 ? 2 : 1;
    return id;
  };
  EPlusResult res;
  if (inst.e_plus) {
    res.instance = inst;
    res.e_plus = *inst.e_plus;
    res.support_e_plus = first_copy(inst, res.e_plus);
    return res;
  }
  for (size_t i = 0; i < inst.edges.size(); ++i) {
    if (inst.edges[i].x == 1) {
      res.instance = inst;
      res.e_plus = static_cast<int>(i);
      res.instance.e_plus = res.e_plus;
      res.support_e_plus = first_copy(inst, res.e_plus);
      return res;
    }
  }
  static constexpr int kPartitions[3][2][2] = {{{0, 1}, {2, 3}}, {{0, 2}, {1, 3}}, {{0, 3}, {1, 2}}};
  for (int v = 0; v < inst.n; ++v) {
    std::vector<int> inc;
    for (size_t i = 0; i < inst.edges.size(); ++i)
      if (inst.edges[i].u == v || inst.edges[i].v == v) inc.push_back(static_cast<int>(i));
    if (inc.size() != 4) continue;
    for (const auto& part : kPartitions) {
      HalfIntegralInstance out = inst;
      const int v2 = inst.n;
      out.n = inst.n + 1;
      for (int idx : part[1]) {
        auto& e = out.edges[inc[idx]];
        (e.u == v ? e.u : e.v) = v2;
      }
      out.edges.push_back({v, v2, Rational(1), Rational(0)});
      out.e_plus = static_cast<int>(out.edges.size()) - 1;
      for (auto& d : out.duals) {
        if (std::binary_search(d.set.begin(), d.set.end(), v)) {
          d.set.push_back(v2);
          std::sort(d.set.begin(), d.set.end());
        }
      }
      try {
        validate_instance(out);
      } catch (const Error& err) {
        if (err.kind() == ErrorKind::CutViolation || err.kind() == ErrorKind::MalformedInput) continue;
        throw;
      }
      res.instance = std::move(out);
      res.e_plus = *res.instance.e_plus;
      res.support_e_plus = first_copy(res.instance, res.e_plus);
      res.split = true;
      res.split_vertex = v;
      if (!res.instance.name.empty()) res.instance.name += "+split";
      return res;
    }
  }
  throw Error(ErrorKind::CutViolation, "no vertex split preserves 4-edge-connectivity");
}

Metric metric_closure(const HalfIntegralInstance& inst) {
  const int n = inst.n;
  Metric m;
  m.n = n;
  std::vector<std::optional<Rational>> d(static_cast<size_t>(n) * n);
  for (int v = 0; v < n; ++v) d[static_cast<size_t>(v) * n + v] = Rational(0);
  for (const auto& e : inst.edges) {
    for (auto [a, b] : {std::pair{e.u, e.v}, std::pair{e.v, e.u}}) {
      auto& cell = d[static_cast<size_t>(a) * n + b];
      if (!cell || e.cost < *cell) cell = e.cost;
    }
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i) {
      const auto& ik = d[static_cast<size_t>(i) * n + k];
      if (!ik) continue;
      for (int j = 0; j < n; ++j) {
        const auto& kj = d[static_cast<size_t>(k) * n + j];
        if (!kj) continue;
        auto& ij = d[static_cast<size_t>(i) * n + j];
        Rational via = *ik + *kj;
        if (!ij || via < *ij) ij = via;
      }
    }
  m.dist.reserve(d.size());
  for (auto& cell : d) {
    if (!cell) throw Error(ErrorKind::Disconnected, "metric closure of a disconnected instance");
    m.dist.push_back(*cell);
  }
  return m;
}

std::pair<std::string, int> parse_generator_spec(std::string_view spec) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos || colon + 1 >= spec.size())
    throw Error(ErrorKind::InvalidArgument, "generator spec must be family:size");
  const std::string size_text(spec.substr(colon + 1));
  int size = 0;
  try {
    size_t used = 0;
    size = std::stoi(size_text, &used);
    if (used != size_text.size()) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw Error(ErrorKind::InvalidArgument, "generator size must be an integer");
  }
  return {std::string(spec.substr(0, colon)), size};
}

}  // namespace halftsp
