#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "halftsp/rational.hpp"

namespace halftsp::linalg {

inline bool is_zero(double v) { return v == 0.0; }
inline bool is_zero(const Rational& v) { return sgn(v) == 0; }

inline double magnitude(double v) { return std::fabs(v); }
inline double magnitude(const Rational& v) { return sgn(v) == 0 ? 0.0 : 1.0; }

/// Determinant of the k×k row-major matrix `a` (destroyed).
/// Doubles use partial pivoting; rationals take the first nonzero pivot.
template <class S>
S determinant(std::vector<S> a, int k) {
  S det = 1;
  for (int c = 0; c < k; ++c) {
    int piv = -1;
    double best = 0;
    for (int r = c; r < k; ++r) {
      double mag = magnitude(a[r * k + c]);
      if (mag > best) {
        best = mag;
        piv = r;
        if constexpr (!std::is_same_v<S, double>) break;
      }
    }
    if (piv < 0) return S(0);
    if (piv != c) {
      for (int j = 0; j < k; ++j) std::swap(a[c * k + j], a[piv * k + j]);
      det = -det;
    }
    const S p = a[c * k + c];
    det *= p;
    for (int r = c + 1; r < k; ++r) {
      if (is_zero(a[r * k + c])) continue;
      const S f = a[r * k + c] / p;
      for (int j = c; j < k; ++j) a[r * k + j] -= f * a[c * k + j];
    }
  }
  return det;
}

/// Inverse of a k×k matrix by Gauss-Jordan. Returns false if singular
/// (for doubles: pivot magnitude below `eps` times the largest entry).
template <class S>
bool invert(std::vector<S> a, int k, std::vector<S>& out, double eps = 1e-13) {
  out.assign(static_cast<size_t>(k) * k, S(0));
  for (int i = 0; i < k; ++i) out[i * k + i] = 1;
  double scale = 0;
  for (const auto& v : a) scale = std::max(scale, magnitude(v));
  for (int c = 0; c < k; ++c) {
    int piv = -1;
    double best = 0;
    for (int r = c; r < k; ++r) {
      double mag = magnitude(a[r * k + c]);
      if (mag > best) {
        best = mag;
        piv = r;
        if constexpr (!std::is_same_v<S, double>) break;
      }
    }
    if (piv < 0) return false;
    if constexpr (std::is_same_v<S, double>) {
      if (best <= eps * scale) return false;
    }
    if (piv != c) {
      for (int j = 0; j < k; ++j) {
        std::swap(a[c * k + j], a[piv * k + j]);
        std::swap(out[c * k + j], out[piv * k + j]);
      }
    }
    const S p = a[c * k + c];
    for (int j = 0; j < k; ++j) {
      a[c * k + j] /= p;
      out[c * k + j] /= p;
    }
    for (int r = 0; r < k; ++r) {
      if (r == c || is_zero(a[r * k + c])) continue;
      const S f = a[r * k + c];
      for (int j = 0; j < k; ++j) {
        a[r * k + j] -= f * a[c * k + j];
        out[r * k + j] -= f * out[c * k + j];
      }
    }
  }
  return true;
}

}  // namespace halftsp::linalg
