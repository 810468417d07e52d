#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace halftsp {

/// Sorted list of vertex ids.
using VertexSet = std::vector<int>;

/// Undirected multigraph on vertices 0..n-1. Edge ids are positions in `edges`.
struct Multigraph {
  int n = 0;
  std::vector<std::array<int, 2>> edges;

  int m() const { return static_cast<int>(edges.size()); }
  int add_edge(int u, int v) {
    edges.push_back({u, v});
    return m() - 1;
  }
};

bool is_connected(const Multigraph& g);

/// Union-find over 0..n-1 with path halving.
class DisjointSets {
 public:
  explicit DisjointSets(int n) : parent_(n) {
    for (int i = 0; i < n; ++i) parent_[i] = i;
  }
  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[b] = a;
    return true;
  }

 private:
  std::vector<int> parent_;
};

inline std::uint64_t mask_of(const VertexSet& s) {
  std::uint64_t m = 0;
  for (int v : s) m |= std::uint64_t{1} << v;
  return m;
}

inline VertexSet set_of(std::uint64_t mask) {
  VertexSet s;
  for (int v = 0; mask != 0; ++v, mask >>= 1)
    if (mask & 1) s.push_back(v);
  return s;
}

}  // namespace halftsp
