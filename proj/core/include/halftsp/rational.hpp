#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace halftsp {

using Rational = mpq_class;

/// Parses "p" or "p/q" (optionally signed) into a canonical rational.
/// Throws Error(MalformedInput) on anything else, including q = 0.
Rational parse_rational(std::string_view text);

/// Canonical text: "p" when the denominator is 1, else "p/q".
std::string format_rational(const Rational& value);

/// num/den in canonical form (the two-argument mpq_class constructor does not reduce).
inline Rational ratio(long num, long den) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

inline double to_double(const Rational& value) { return value.get_d(); }

/// Exact value of a finite double.
Rational from_double(double value);

/// Best rational approximation with denominator at most max_den
/// (continued fraction convergents and semiconvergents).
Rational approximate(double value, long max_den);

}  // namespace halftsp
