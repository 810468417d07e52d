#include <algorithm>
#include <numeric>

#include "halftsp/error.hpp"
#include "halftsp/instance.hpp"
#include "halftsp/random.hpp"

namespace halftsp {

namespace {

const Rational kHalf(1, 2);

struct Builder {
  HalfIntegralInstance inst;

  Builder(std::string name, int n) {
    inst.name = std::move(name);
    inst.n = n;
  }
  int half(int u, int v) { return add(u, v, kHalf); }
  int one(int u, int v) { return add(u, v, Rational(1)); }
  int add(int u, int v, const Rational& x) {
    inst.edges.push_back({u, v, x, Rational(1)});
    return static_cast<int>(inst.edges.size()) - 1;
  }
  // With unit costs, z_v = 1/2 on singletons is dual optimal.
  HalfIntegralInstance finish() {
    for (int v = 0; v < inst.n; ++v) inst.duals.push_back({{v}, kHalf});
    validate_instance(inst);
    return std::move(inst);
  }
};

void require(bool ok, std::string_view family, int minimum) {
  if (!ok)
    throw Error(ErrorKind::SizeTooSmall, std::string(family) + " needs size >= " + std::to_string(minimum));
}

HalfIntegralInstance envelope(int k) {
  require(k >= 2, "envelope", 2);
  Builder b("envelope_" + std::to_string(k), 3 * k);
  auto p = [k](int i, int j) { return i * k + j; };
  for (int i = 0; i < 3; ++i) {
    b.half(p(i, 0), p((i + 1) % 3, 0));
    b.half(p(i, k - 1), p((i + 1) % 3, k - 1));
  }
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j + 1 < k; ++j) b.one(p(i, j), p(i, j + 1));
  return b.finish();
}

HalfIntegralInstance circulant(int n) {
  require(n >= 5, "k5_degree", 5);
  Builder b(n == 5 ? "k5" : "circulant_" + std::to_string(n), n);
  for (int i = 0; i < n; ++i) b.half(i, (i + 1) % n);
  for (int i = 0; i < n; ++i) b.half(i, (i + 2) % n);
  return b.finish();
}

// Doubled path s_0..s_{k-1}, a doubled pair q1q2 holding e+, and a half-edge
// 4-cycle w1..w4 tying them together.
HalfIntegralInstance cycle_chain(int k, std::string name) {
  require(k >= 2, "cycle_chain", 2);
  Builder b(std::move(name), k + 6);
  const int q1 = k, q2 = k + 1, w1 = k + 2, w2 = k + 3, w3 = k + 4, w4 = k + 5;
  for (int i = 0; i + 1 < k; ++i) b.one(i, i + 1);
  b.half(0, w1);
  b.half(0, w2);
  b.half(k - 1, w3);
  b.half(k - 1, w4);
  b.inst.e_plus = b.one(q1, q2);
  b.half(q1, w1);
  b.half(q1, w3);
  b.half(q2, w2);
  b.half(q2, w4);
  b.half(w1, w2);
  b.half(w2, w3);
  b.half(w3, w4);
  b.half(w4, w1);
  return b.finish();
}

// K5 whose vertices 0..3 are blown up into doubled pairs {u_i, w_i}; vertex 8
// stays a singleton. The pair of blob 0 carries e+.
HalfIntegralInstance definitions_a() {
  Builder b("definitions_a", 9);
  const int v = 8;
  auto endpoint = [](int blob, int slot) { return 2 * blob + (slot < 2 ? 0 : 1); };
  auto slot_of = [](int blob, int target) { return target < blob ? target : target - 1; };
  for (int i = 0; i < 4; ++i) {
    const int pair = b.one(2 * i, 2 * i + 1);
    if (i == 0) b.inst.e_plus = pair;
  }
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) b.half(endpoint(i, slot_of(i, j)), endpoint(j, slot_of(j, i)));
  for (int i = 0; i < 4; ++i) b.half(endpoint(i, 3), v);
  return b.finish();
}

// A K4 degree cut nested inside an octahedral degree cut.
HalfIntegralInstance nested_degree() {
  Builder b("nested_degree", 10);
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) b.half(i, j);
  for (int i = 0; i < 4; ++i) b.half(i, 4 + i);
  for (int i = 0; i < 4; ++i) b.half(4 + i, 4 + (i + 1) % 4);
  b.half(8, 4);
  b.half(8, 5);
  b.half(9, 6);
  b.half(9, 7);
  b.inst.e_plus = b.one(8, 9);
  return b.finish();
}

HalfIntegralInstance random_half_integral(int n, std::uint64_t seed) {
  require(n >= 3, "random_half_integral", 3);
  Rng rng = make_stream(seed, 0x7261);
  std::map<std::pair<int, int>, int> count;
  for (int c = 0; c < 2; ++c) {
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng() % (i + 1)]);
    for (int i = 0; i < n; ++i) {
      int a = perm[i], z = perm[(i + 1) % n];
      ++count[{std::min(a, z), std::max(a, z)}];
    }
  }
  HalfIntegralInstance inst;
  inst.name = "random_" + std::to_string(n) + "_" + std::to_string(seed);
  inst.n = n;
  for (const auto& [pair, c] : count) {
    inst.edges.push_back({pair.first, pair.second, c == 2 ? Rational(1) : kHalf, Rational(1 + rng() % 9)});
  }
  validate_instance(inst);
  return inst;
}

}  // namespace

HalfIntegralInstance generate_instance(std::string_view family, int size, std::uint64_t seed) {
  if (family == "envelope") return envelope(size);
  if (family == "k5_degree") return circulant(size);
  if (family == "cycle_chain") return cycle_chain(size, "cycle_chain_" + std::to_string(size));
  if (family == "random_half_integral") return random_half_integral(size, seed);
  if (family == "definitions_a") return definitions_a();
  if (family == "definitions_b") return cycle_chain(3, "definitions_b");
  if (family == "nested_degree") return nested_degree();
  throw Error(ErrorKind::UnknownFamily, "unknown family '" + std::string(family) + "'");
}

}  // namespace halftsp
