#include "doctest.h"
#include "halftsp/error.hpp"
#include "halftsp/instance.hpp"
#include "halftsp/oracle.hpp"

using namespace halftsp;

namespace {

ErrorKind kind_of(const std::string& json) {
  try {
    parse_instance(json);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("instance accepted");
  return ErrorKind::Internal;
}

const char* kTriangle = R"({"name":"tri","n":3,"edges":[{"u":0,"v":1,"x":"1","cost":1},{"u":1,"v":2,"x":"1","cost":2},{"u":0,"v":2,"x":"1","cost":5}]})";

std::string k_n_half(int n) {
  std::string s = R"({"name":"k","n":)" + std::to_string(n) + R"(,"edges":[)";
  bool first = true;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      s += (first ? "" : ",") + std::string(R"({"u":)") + std::to_string(i) + R"(,"v":)" + std::to_string(j) +
           R"(,"x":"1/2","cost":1})";
      first = false;
    }
  return s + "]}";
}

}  // namespace

TEST_CASE("triangle with x = 1 doubles every edge") {
  const auto inst = parse_instance(kTriangle);
  CHECK(inst.n == 3);
  const auto g = build_support_graph(inst);
  CHECK(g.m() == 6);
  CHECK(g.parallel.size() == 3);
  for (const auto& [pair, ids] : g.parallel) CHECK(ids.size() == 2);
}

TEST_CASE("K5 all-half is valid, K4 all-half is not") {
  const auto k5 = parse_instance(k_n_half(5));
  CHECK(build_support_graph(k5).m() == 10);
  CHECK(kind_of(k_n_half(4)) == ErrorKind::DegreeViolation);
}

TEST_CASE("each violation has its own error kind") {
  CHECK(kind_of("{not json") == ErrorKind::MalformedInput);
  CHECK(kind_of(R"({"name":"t","n":3,"edges":[{"u":0,"v":1,"x":"1/3","cost":1}]})") == ErrorKind::InvalidX);
  CHECK(kind_of(R"({"name":"t","n":3,"edges":[{"u":0,"v":1,"x":"0","cost":1}]})") == ErrorKind::InvalidX);
  CHECK(kind_of(R"({"name":"t","n":3,"edges":[{"u":0,"v":1,"x":"1","cost":-1},{"u":1,"v":2,"x":"1","cost":1},{"u":0,"v":2,"x":"1","cost":1}]})") ==
        ErrorKind::NegativeCost);
}

TEST_CASE("two disjoint triangles violate the cut constraint") {
  std::string s = R"({"name":"tt","n":6,"edges":[)";
  for (int t = 0; t < 2; ++t)
    for (int i = 0; i < 3; ++i) {
      const int u = 3 * t + i, v = 3 * t + (i + 1) % 3;
      s += std::string(t || i ? "," : "") + R"({"u":)" + std::to_string(u) + R"(,"v":)" + std::to_string(v) +
           R"(,"x":"1","cost":1})";
    }
  s += "]}";
  const auto k = kind_of(s);
  CHECK((k == ErrorKind::CutViolation || k == ErrorKind::Disconnected));
}

TEST_CASE("serialization round-trips rational costs bit for bit") {
  const char* text = R"({"name":"r","n":3,"edges":[{"u":0,"v":1,"x":"1","cost":"7/3"},{"u":1,"v":2,"x":"1","cost":2},{"u":0,"v":2,"x":"1","cost":"10/4"}]})";
  const auto a = parse_instance(text);
  CHECK(a.edges[2].cost == Rational(5, 2));
  const std::string once = serialize_instance(a);
  const std::string twice = serialize_instance(parse_instance(once));
  CHECK(once == twice);
}

TEST_CASE("vertex split creates a valid zero-cost x = 1 edge") {
  const auto k5 = parse_instance(k_n_half(5));
  const auto r = split_vertex_for_eplus(k5);
  CHECK(r.split);
  CHECK(r.instance.n == 6);
  const auto& e = r.instance.edges[r.e_plus];
  CHECK(e.x == 1);
  CHECK(e.cost == 0);
  CHECK_NOTHROW(validate_instance(r.instance));
}

TEST_CASE("vertex split is the identity when an x = 1 edge exists") {
  const auto tri = parse_instance(kTriangle);
  const auto r = split_vertex_for_eplus(tri);
  CHECK_FALSE(r.split);
  CHECK(r.instance.n == 3);
  auto expected = tri;
  expected.e_plus = r.e_plus;
  CHECK(serialize_instance(r.instance) == serialize_instance(expected));
  const auto again = split_vertex_for_eplus(r.instance);
  CHECK(again.e_plus == r.e_plus);
}

TEST_CASE("metric closure") {
  const auto m = metric_closure(parse_instance(kTriangle));
  CHECK(m(0, 1) == 1);
  CHECK(m(1, 2) == 2);
  CHECK(m(0, 2) == 3);
  const auto k5 = metric_closure(parse_instance(k_n_half(5)));
  for (int u = 0; u < 5; ++u)
    for (int v = 0; v < 5; ++v) CHECK(k5(u, v) == (u == v ? 0 : 1));
}

TEST_CASE("metric closure satisfies the triangle inequality exactly") {
  const auto inst = generate_instance("random_half_integral", 9, 4);
  const auto m = metric_closure(inst);
  for (int a = 0; a < m.n; ++a)
    for (int b = 0; b < m.n; ++b)
      for (int c = 0; c < m.n; ++c) CHECK(m(a, c) <= m(a, b) + m(b, c));
}

TEST_CASE("generated instances are valid and sum x to n") {
  for (const auto& [family, size] : std::vector<std::pair<std::string, int>>{
           {"envelope", 2}, {"envelope", 5}, {"k5_degree", 5}, {"k5_degree", 8}, {"cycle_chain", 3},
           {"random_half_integral", 12}, {"definitions_a", 0}, {"nested_degree", 0}}) {
    CAPTURE(family);
    const auto inst = generate_instance(family, size, 11);
    CHECK_NOTHROW(validate_instance(inst));
    Rational total(0);
    int ones = 0, halves = 0;
    for (const auto& e : inst.edges) {
      total += e.x;
      (e.x == 1 ? ones : halves)++;
    }
    CHECK(total == inst.n);
    CHECK(build_support_graph(inst).m() == 2 * ones + halves);
  }
}

TEST_CASE("generator is deterministic and rejects bad input") {
  CHECK(serialize_instance(generate_instance("random_half_integral", 10, 3)) ==
        serialize_instance(generate_instance("random_half_integral", 10, 3)));
  CHECK_THROWS_AS(generate_instance("nope", 5, 0), Error);
  try {
    generate_instance("k5_degree", 4, 0);
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SizeTooSmall);
  }
  CHECK(parse_generator_spec("envelope:4") == std::pair<std::string, int>{"envelope", 4});
  CHECK_THROWS_AS(parse_generator_spec("envelope"), Error);
}

TEST_CASE("envelope integrality gap grows toward 4/3") {
  // 1, 10/9, 7/6, 6/5 for k = 2..5
  Rational prev(0);
  for (int k = 2; k <= 5; ++k) {
    const auto inst = generate_instance("envelope", k, 0);
    const Rational gap = optimal_tour_cost(metric_closure(inst)) / lp_cost(inst);
    CAPTURE(k);
    CHECK(gap >= prev);
    CHECK(gap <= Rational(4, 3));
    if (k >= 3) CHECK(gap > 1);
    prev = gap;
  }
}
