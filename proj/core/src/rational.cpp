#include "halftsp/rational.hpp"

#include <cctype>
#include <cmath>

#include "halftsp/error.hpp"
#include "halftsp/graph.hpp"

namespace halftsp {

namespace {

bool is_integer_text(std::string_view s) {
  size_t i = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

mpz_class parse_integer(std::string_view s) {
  std::string text(s);
  if (!text.empty() && text[0] == '+') text.erase(0, 1);
  return mpz_class(text, 10);
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const auto slash = text.find('/');
  const auto num = text.substr(0, slash);
  if (!is_integer_text(num)) throw Error(ErrorKind::MalformedInput, "malformed rational '" + std::string(text) + "'");
  if (slash == std::string_view::npos) return Rational(parse_integer(num));
  const auto den = text.substr(slash + 1);
  if (!is_integer_text(den) || den[0] == '-' || den[0] == '+')
    throw Error(ErrorKind::MalformedInput, "malformed rational '" + std::string(text) + "'");
  mpz_class d = parse_integer(den);
  if (d == 0) throw Error(ErrorKind::MalformedInput, "zero denominator in '" + std::string(text) + "'");
  Rational r(parse_integer(num), d);
  r.canonicalize();
  return r;
}

std::string format_rational(const Rational& value) {
  if (value.get_den() == 1) return value.get_num().get_str();
  return value.get_num().get_str() + "/" + value.get_den().get_str();
}

Rational from_double(double value) {
  if (!std::isfinite(value)) throw Error(ErrorKind::InvalidArgument, "non-finite value");
  return Rational(value);
}

Rational approximate(double value, long max_den) {
  if (!std::isfinite(value)) throw Error(ErrorKind::InvalidArgument, "non-finite value");
  const Rational target(value);
  // Convergents h/k of the continued fraction of the exact double.
  mpz_class h_prev = 0, h = 1, k_prev = 1, k = 0;
  mpz_class num = target.get_num(), den = target.get_den();
  Rational best(0);
  bool have = false;
  while (den != 0) {
    mpz_class a;
    mpz_fdiv_q(a.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    mpz_class h_next = a * h + h_prev;
    mpz_class k_next = a * k + k_prev;
    if (k_next > max_den) {
      // Largest admissible semiconvergent.
      mpz_class t = (mpz_class(max_den) - k_prev) / k;
      if (t > 0) {
        Rational semi(t * h + h_prev, t * k + k_prev);
        semi.canonicalize();
        Rational cur(h, k);
        cur.canonicalize();
        if (!have || abs(semi - target) < abs(cur - target)) return semi;
      }
      break;
    }
    h_prev = h;
    h = h_next;
    k_prev = k;
    k = k_next;
    best = Rational(h, k);
    best.canonicalize();
    have = true;
    mpz_class r = num - a * den;
    num = den;
    den = r;
  }
  return best;
}

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedInput: return "malformed_input";
    case ErrorKind::InvalidX: return "invalid_x";
    case ErrorKind::NegativeCost: return "negative_cost";
    case ErrorKind::DegreeViolation: return "degree_violation";
    case ErrorKind::CutViolation: return "cut_violation";
    case ErrorKind::Disconnected: return "disconnected";
    case ErrorKind::UnknownFamily: return "unknown_family";
    case ErrorKind::SizeTooSmall: return "size_too_small";
    case ErrorKind::InvalidArgument: return "invalid_argument";
    case ErrorKind::NotDegreeCut: return "not_degree_cut";
    case ErrorKind::OutsidePolytope: return "outside_polytope";
    case ErrorKind::NonConvergence: return "non_convergence";
    case ErrorKind::Infeasible: return "infeasible";
    case ErrorKind::ResourceCap: return "resource_cap";
    case ErrorKind::Internal: return "internal";
  }
  return "unknown";
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedInput:
    case ErrorKind::InvalidX:
    case ErrorKind::NegativeCost:
    case ErrorKind::DegreeViolation:
    case ErrorKind::CutViolation:
    case ErrorKind::Disconnected:
    case ErrorKind::UnknownFamily:
    case ErrorKind::SizeTooSmall:
    case ErrorKind::InvalidArgument:
    case ErrorKind::NotDegreeCut:
      return 2;
    case ErrorKind::Infeasible:
      return 3;
    case ErrorKind::ResourceCap:
      return 4;
    default:
      return 1;
  }
}

bool is_connected(const Multigraph& g) {
  if (g.n <= 1) return true;
  DisjointSets ds(g.n);
  int comps = g.n;
  for (const auto& e : g.edges)
    if (ds.unite(e[0], e[1])) --comps;
  return comps == 1;
}

}  // namespace halftsp
