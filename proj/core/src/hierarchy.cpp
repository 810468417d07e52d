#include <algorithm>
#include <bit>
#include <functional>
#include <set>

#include "halftsp/cuts.hpp"
#include "halftsp/error.hpp"
#include "json.hpp"

namespace halftsp {

namespace {

VertexSet merge(const VertexSet& a, const VertexSet& b) {
  VertexSet out;
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool contains(const std::vector<int>& v, int x) { return std::find(v.begin(), v.end(), x) != v.end(); }

[[noreturn]] void internal(const std::string& what) { throw Error(ErrorKind::Internal, what); }

// Neighbour multiplicities of a contracted graph on k vertices, optionally with
// an extra vertex k standing for everything outside.
struct Contracted {
  int k = 0;
  std::vector<std::map<int, std::vector<int>>> nbr;  // vertex -> neighbour -> support edges
};

// Doubled cycle test: every vertex has two distinct neighbours, two edges each.
bool is_doubled_cycle(const Contracted& c) {
  if (c.k < 3) return false;
  for (const auto& adj : c.nbr) {
    if (adj.size() != 2) return false;
    for (const auto& [w, es] : adj)
      if (es.size() != 2) return false;
  }
  std::vector<char> seen(c.k, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (const auto& [w, es] : c.nbr[v])
      if (!seen[w]) {
        seen[w] = 1;
        ++count;
        stack.push_back(w);
      }
  }
  return count == c.k;
}

// Walks a doubled cycle from `start` away from `prev` until `stop` is reached
// (exclusive of stop).
std::vector<int> walk(const Contracted& c, int start, int prev, int stop) {
  std::vector<int> path;
  int cur = start;
  while (cur != stop) {
    path.push_back(cur);
    int next = -1;
    for (const auto& [w, es] : c.nbr[cur])
      if (w != prev) next = w;
    prev = cur;
    cur = next;
    if (static_cast<int>(path.size()) > c.k) internal("cycle walk did not terminate");
  }
  return path;
}

}  // namespace

const char* to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::Singleton: return "singleton";
    case NodeKind::Degree: return "degree";
    case NodeKind::Cycle: return "cycle";
  }
  return "unknown";
}

VertexSet CutHierarchy::vertices(const CutRef& ref) const {
  if (!ref.is_interval()) {
    if (ref.node == kRoot) {
      VertexSet all(n);
      for (int v = 0; v < n; ++v) all[v] = v;
      return all;
    }
    return nodes[ref.node].vertices;
  }
  const std::vector<int>& seq = ref.node == kRoot ? root.order : nodes[ref.node].children;
  const int k = static_cast<int>(seq.size());
  VertexSet out;
  for (int i = ref.lo;; i = (i + 1) % k) {
    out = merge(out, nodes[seq[i]].vertices);
    if (i == ref.hi) break;
  }
  return out;
}

std::vector<int> CutHierarchy::boundary(const CutRef& ref) const {
  const std::uint64_t mask = mask_of(vertices(ref));
  std::vector<int> out;
  for (int e = 0; e < m(); ++e)
    if (((mask >> ends[e][0]) ^ (mask >> ends[e][1])) & 1) out.push_back(e);
  return out;
}

bool CutHierarchy::goes_higher(int node, int edge) const { return contains(nodes[node].up, edge); }

CutHierarchy build_hierarchy(const SupportGraph& g, int e_plus, const CutEnumerationOptions& opts) {
  if (e_plus < 0 || e_plus >= g.m()) throw Error(ErrorKind::InvalidArgument, "e+ is not a support edge");
  {
    const auto& ep = g.edges[e_plus];
    if (g.parallel.at({std::min(ep.u, ep.v), std::max(ep.u, ep.v)}).size() != 2)
      throw Error(ErrorKind::InvalidArgument, "e+ must be one of a doubled pair");
  }
  CutHierarchy h;
  h.n = g.n;
  h.e_plus = e_plus;
  for (const auto& e : g.edges) h.ends.push_back({e.u, e.v});
  h.edges.resize(g.m());
  for (int v = 0; v < g.n; ++v) {
    CutNode node;
    node.id = v;
    node.vertices = {v};
    node.kind = NodeKind::Singleton;
    node.boundary = g.incident[v];
    std::sort(node.boundary.begin(), node.boundary.end());
    h.nodes.push_back(std::move(node));
  }

  std::vector<int> current(g.n);  // current vertex -> node id
  for (int v = 0; v < g.n; ++v) current[v] = v;
  // Provisional last cuts, resolved to LastCut indices at the end.
  std::vector<std::array<CutRef, 2>> last(g.m());

  while (true) {
    const int N = static_cast<int>(current.size());
    std::vector<int> where(g.n);
    for (int i = 0; i < N; ++i)
      for (int v : h.nodes[current[i]].vertices) where[v] = i;
    Multigraph mg;
    mg.n = N;
    std::vector<int> live;
    for (const auto& e : g.edges)
      if (where[e.u] != where[e.v]) {
        mg.add_edge(where[e.u], where[e.v]);
        live.push_back(e.id);
      }
    const int pu = where[g.edges[e_plus].u], pv = where[g.edges[e_plus].v];
    const std::uint64_t full = (std::uint64_t{1} << N) - 1;

    std::vector<std::uint64_t> masks = cuts_of_value(mg, 4, opts);
    std::vector<char> crossed(masks.size(), 0);
    for (size_t a = 0; a < masks.size(); ++a)
      for (size_t b = a + 1; b < masks.size(); ++b)
        if (crossing(masks[a], masks[b], N)) crossed[a] = crossed[b] = 1;
    std::vector<std::uint64_t> candidates;
    for (size_t a = 0; a < masks.size(); ++a) {
      if (crossed[a]) continue;
      for (std::uint64_t s : {masks[a], full & ~masks[a]}) {
        const int size = std::popcount(s);
        if (size < 2 || size > N - 2) continue;
        if (((s >> pu) & 1) && ((s >> pv) & 1)) continue;
        candidates.push_back(s);
      }
    }
    std::uint64_t chosen = 0;
    VertexSet chosen_vertices;
    for (std::uint64_t s : candidates) {
      bool minimal = true;
      for (std::uint64_t t : candidates)
        if (t != s && (t & s) == t) minimal = false;
      if (!minimal) continue;
      VertexSet verts;
      for (int i : set_of(s)) verts = merge(verts, h.nodes[current[i]].vertices);
      if (chosen == 0 || verts < chosen_vertices) {
        chosen = s;
        chosen_vertices = std::move(verts);
      }
    }
    if (chosen == 0) break;

    // Contracted interior G_S: children 0..k-1 plus w = k.
    const std::vector<int> members = set_of(chosen);
    const int k = static_cast<int>(members.size());
    std::vector<int> local(N, k);
    for (int i = 0; i < k; ++i) local[members[i]] = i;
    Contracted gs;
    gs.k = k + 1;
    gs.nbr.resize(k + 1);
    CutNode node;
    node.id = static_cast<int>(h.nodes.size());
    node.vertices = chosen_vertices;
    for (int idx = 0; idx < mg.m(); ++idx) {
      const int a = local[mg.edges[idx][0]], b = local[mg.edges[idx][1]];
      if (a == k && b == k) continue;
      gs.nbr[a][b].push_back(live[idx]);
      gs.nbr[b][a].push_back(live[idx]);
      if (a != k && b != k)
        node.interior.push_back(live[idx]);
      else
        node.boundary.push_back(live[idx]);
    }
    std::sort(node.interior.begin(), node.interior.end());
    std::sort(node.boundary.begin(), node.boundary.end());
    if (node.boundary.size() != 4) internal("selected tight set does not have 4 boundary edges");

    if (is_doubled_cycle(gs)) {
      node.kind = NodeKind::Cycle;
      int a = -1, b = -1;
      for (const auto& [w, es] : gs.nbr[k]) (a < 0 ? a : b) = w;
      // Start the path at the end child holding the smaller vertex.
      if (h.nodes[current[members[b]]].vertices.front() < h.nodes[current[members[a]]].vertices.front()) std::swap(a, b);
      const std::vector<int> path = walk(gs, a, k, k);
      if (static_cast<int>(path.size()) != k) internal("cycle node path does not cover all children");
      for (int i = 0; i < k; ++i) node.children.push_back(current[members[path[i]]]);
      for (int i = 0; i + 1 < k; ++i) {
        const auto& es = gs.nbr[path[i]].at(path[i + 1]);
        node.companions.push_back({es[0], es[1]});
      }
      const auto& front = gs.nbr[path[0]].at(k);
      const auto& back = gs.nbr[path[k - 1]].at(k);
      node.end_pairs = {{{front[0], front[1]}, {back[0], back[1]}}};
    } else {
      node.kind = NodeKind::Degree;
      for (int i = 0; i < k; ++i) {
        auto it = gs.nbr[i].find(k);
        if (it != gs.nbr[i].end() && it->second.size() >= 2)
          internal("degree node child with two edges to the outside (must be a cycle cut)");
      }
      for (int i = 0; i < k; ++i) node.children.push_back(current[members[i]]);
      std::sort(node.children.begin(), node.children.end(), [&h](int x, int y) {
        return h.nodes[x].vertices.front() < h.nodes[y].vertices.front();
      });
    }

    // Edge annotations for edges whose lowest containing node is this one.
    const int id = node.id;
    std::map<int, int> pos;
    for (int i = 0; i < k; ++i) pos[node.children[i]] = i;
    for (int e : node.interior) {
      auto& info = h.edges[e];
      info.owner = id;
      info.top = node.kind == NodeKind::Degree;
      const int cu = current[where[g.edges[e].u]], cv = current[where[g.edges[e].v]];
      if (node.kind == NodeKind::Degree) {
        last[e] = {CutRef{cu}, CutRef{cv}};
      } else {
        const int i = std::min(pos[cu], pos[cv]);
        last[e] = {CutRef{id, 0, i}, CutRef{id, i + 1, k - 1}};
        const auto& pair = node.companions[i];
        info.companion = pair[0] == e ? pair[1] : pair[0];
      }
    }
    for (int c : node.children) h.nodes[c].parent = id;
    h.created.push_back(id);
    h.nodes.push_back(std::move(node));

    std::vector<int> next;
    for (int i = 0; i < N; ++i)
      if (!((chosen >> i) & 1)) next.push_back(current[i]);
    next.push_back(id);
    current = std::move(next);
  }

  // Final cycle.
  {
    const int N = static_cast<int>(current.size());
    std::vector<int> where(g.n);
    for (int i = 0; i < N; ++i)
      for (int v : h.nodes[current[i]].vertices) where[v] = i;
    Contracted fc;
    fc.k = N;
    fc.nbr.resize(N);
    for (const auto& e : g.edges) {
      const int a = where[e.u], b = where[e.v];
      if (a == b) continue;
      fc.nbr[a][b].push_back(e.id);
      fc.nbr[b][a].push_back(e.id);
    }
    if (!is_doubled_cycle(fc)) internal("contracted graph at loop exit is not a cycle of doubled edges");
    const int a = where[g.edges[e_plus].u], b = where[g.edges[e_plus].v];
    // order[0] = b, walk away from a; a ends up last so the e+ pair closes the cycle.
    std::vector<int> order = walk(fc, b, a, a);
    order.push_back(a);
    if (static_cast<int>(order.size()) != N) internal("final cycle walk does not cover all vertices");
    for (int i = 0; i < N; ++i) {
      const auto& es = fc.nbr[order[i]].at(order[(i + 1) % N]);
      h.root.order.push_back(current[order[i]]);
      h.root.pairs.push_back({es[0], es[1]});
    }
    for (int i = 0; i < N; ++i) {
      const auto& pair = h.root.pairs[i];
      for (int j = 0; j < 2; ++j) {
        auto& info = h.edges[pair[j]];
        info.owner = kRoot;
        info.top = false;
        info.final_cycle = true;
        info.companion = pair[1 - j];
        last[pair[j]] = {CutRef{h.root.order[i]}, CutRef{h.root.order[(i + 1) % N]}};
      }
    }
    for (int c : h.root.order) h.nodes[c].parent = kRoot;
  }

  // Up / across edges.
  for (auto& node : h.nodes) {
    node.up.clear();
    node.across.clear();
    for (int e : node.boundary) {
      if (node.parent != kRoot && contains(h.nodes[node.parent].boundary, e))
        node.up.push_back(e);
      else
        node.across.push_back(e);
    }
  }

  // Canonical last-cut references and their registry.
  auto canonical = [&h](CutRef r) {
    if (!r.is_interval()) return r;
    const auto& kids = h.nodes[r.node].children;
    if (r.lo == r.hi) return CutRef{kids[r.lo]};
    if (r.lo == 0 && r.hi == static_cast<int>(kids.size()) - 1) return CutRef{r.node};
    return r;
  };
  std::map<CutRef, int> index;
  for (int e = 0; e < g.m(); ++e) {
    for (int j = 0; j < 2; ++j) {
      const CutRef r = canonical(last[e][j]);
      auto [it, fresh] = index.emplace(r, static_cast<int>(h.last_cuts.size()));
      if (fresh) {
        LastCut lc;
        lc.ref = r;
        lc.vertices = h.vertices(r);
        lc.mask = mask_of(lc.vertices);
        lc.boundary = h.boundary(r);
        if (r.is_interval()) {
          for (int f : lc.boundary)
            if (contains(h.nodes[r.node].interior, f)) lc.across.push_back(f);
        } else {
          lc.across = h.nodes[r.node].across;
        }
        h.last_cuts.push_back(std::move(lc));
      }
      h.edges[e].last[j] = it->second;
    }
  }

  // Bernoulli groups: one per top edge, one per cycle node, one for the final cycle.
  std::map<int, int> node_group;
  for (int e = 0; e < g.m(); ++e) {
    auto& info = h.edges[e];
    if (info.top) {
      info.group = h.num_groups++;
    } else {
      auto [it, fresh] = node_group.emplace(info.owner, h.num_groups);
      if (fresh) ++h.num_groups;
      info.group = it->second;
    }
  }

  // Registry of every cut the hierarchy explains.
  for (const auto& node : h.nodes) h.known_cuts.emplace(node.vertices, CutRef{node.id});
  for (int id : h.created) {
    const auto& node = h.nodes[id];
    if (node.kind != NodeKind::Cycle) continue;
    const int k = static_cast<int>(node.children.size());
    for (int lo = 0; lo < k; ++lo)
      for (int hi = lo + 1; hi < k; ++hi)
        if (!(lo == 0 && hi == k - 1)) h.known_cuts.emplace(h.vertices(CutRef{id, lo, hi}), CutRef{id, lo, hi});
  }
  const int K = static_cast<int>(h.root.order.size());
  for (int lo = 0; lo < K; ++lo)
    for (int len = 2; len < K; ++len) {
      const CutRef r{kRoot, lo, (lo + len - 1) % K};
      h.known_cuts.emplace(h.vertices(r), r);
    }
  return h;
}

std::array<CutRef, 2> last_cuts(const CutHierarchy& h, int e) {
  if (e < 0 || e >= h.m()) throw Error(ErrorKind::InvalidArgument, "edge not in hierarchy");
  return {h.last_cuts[h.edges[e].last[0]].ref, h.last_cuts[h.edges[e].last[1]].ref};
}

CutClassification classify_cut(const CutHierarchy& h, const VertexSet& side) {
  VertexSet complement;
  for (int v = 0, i = 0; v < h.n; ++v) {
    if (i < static_cast<int>(side.size()) && side[i] == v)
      ++i;
    else
      complement.push_back(v);
  }
  for (const VertexSet* s : std::array<const VertexSet*, 2>{&side, &complement}) {
    auto it = h.known_cuts.find(*s);
    if (it == h.known_cuts.end()) continue;
    const CutRef& r = it->second;
    if (!r.is_interval()) return {CutClass::CriticalNode, r};
    if (r.node == kRoot) return {CutClass::FinalCycleArc, r};
    return {CutClass::CycleInterval, r};
  }
  return {};
}

std::string hierarchy_json(const CutHierarchy& h) {
  using json = nlohmann::json;
  auto ref_json = [](const CutRef& r) {
    json j;
    j["node"] = r.node;
    if (r.is_interval()) j["interval"] = {r.lo, r.hi};
    return j;
  };
  json j;
  j["n"] = h.n;
  j["e_plus"] = h.e_plus;
  json nodes = json::array();
  for (const auto& node : h.nodes) {
    json jn;
    jn["id"] = node.id;
    jn["kind"] = to_string(node.kind);
    jn["vertices"] = node.vertices;
    jn["parent"] = node.parent;
    jn["children"] = node.children;
    jn["boundary"] = node.boundary;
    jn["up"] = node.up;
    jn["across"] = node.across;
    jn["interior"] = node.interior;
    if (node.kind == NodeKind::Cycle) {
      jn["companions"] = node.companions;
      jn["end_pairs"] = node.end_pairs;
    }
    nodes.push_back(std::move(jn));
  }
  j["nodes"] = std::move(nodes);
  j["final_cycle"] = {{"order", h.root.order}, {"pairs", h.root.pairs}};
  json edges = json::array();
  for (int e = 0; e < h.m(); ++e) {
    const auto& info = h.edges[e];
    json je;
    je["id"] = e;
    je["ends"] = h.ends[e];
    je["owner"] = info.owner;
    je["type"] = info.top ? "top" : "bottom";
    je["final_cycle"] = info.final_cycle;
    je["companion"] = info.companion;
    je["group"] = info.group;
    je["last_cuts"] = {ref_json(h.last_cuts[info.last[0]].ref), ref_json(h.last_cuts[info.last[1]].ref)};
    je["last_cut_vertices"] = {h.last_cuts[info.last[0]].vertices, h.last_cuts[info.last[1]].vertices};
    edges.push_back(std::move(je));
  }
  j["edges"] = std::move(edges);
  return j.dump(2);
}

std::string hierarchy_dot(const CutHierarchy& h) {
  std::string out = "graph hierarchy {\n  node [shape=circle];\n";
  std::function<void(int, int)> emit = [&](int id, int depth) {
    const auto& node = h.nodes[id];
    const std::string pad(2 * depth + 2, ' ');
    if (node.kind == NodeKind::Singleton) {
      out += pad + std::to_string(node.vertices.front()) + ";\n";
      return;
    }
    out += pad + "subgraph cluster_" + std::to_string(id) + " {\n";
    out += pad + "  label=\"" + std::to_string(id) + " " + to_string(node.kind) + "\";\n";
    for (int c : node.children) emit(c, depth + 1);
    out += pad + "}\n";
  };
  for (int id : h.root.order) emit(id, 0);
  for (int e = 0; e < h.m(); ++e) {
    const auto& info = h.edges[e];
    const char* color = info.final_cycle ? "red" : (info.top ? "blue" : "darkgreen");
    out += "  " + std::to_string(h.ends[e][0]) + " -- " + std::to_string(h.ends[e][1]) + " [color=" + color +
           ", label=\"" + std::to_string(e) + "\"];\n";
  }
  out += "}\n";
  return out;
}

}  // namespace halftsp
