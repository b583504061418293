// Copyright (c) gsiplab contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <ostream>

#include "gsiplab/error.hpp"

namespace gsiplab {

/// x^n by repeated squaring. Round-to-nearest is sign symmetric, so for odd n
/// ipow(-x, n) == -ipow(x, n) bit for bit, and ipow is monotone on [0, inf).
inline double ipow(double x, unsigned n) {
  double result = 1.0;
  double base = x;
  while (n != 0) {
    if ((n & 1U) != 0) result *= base;
    n >>= 1U;
    if (n != 0) base *= base;
  }
  return result;
}

/// Closed interval [lo, hi] of doubles, no directed rounding.
///
/// Every operation applies the exact real operation to endpoints and rounds to
/// nearest. Because rounding is monotone, a point computation whose inputs lie
/// in the operand intervals always lands inside the result interval.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  constexpr Interval() = default;
  constexpr Interval(double point) : lo(point), hi(point) {}  // NOLINT(google-explicit-constructor)
  constexpr Interval(double lower, double upper) : lo(lower), hi(upper) {}

  constexpr double width() const { return hi - lo; }
  constexpr double mid() const { return lo + 0.5 * (hi - lo); }
  constexpr bool contains(double x) const { return lo <= x && x <= hi; }
  constexpr bool contains(const Interval& other) const { return lo <= other.lo && other.hi <= hi; }
  constexpr bool contains_zero() const { return lo <= 0.0 && 0.0 <= hi; }

  friend constexpr bool operator==(const Interval&, const Interval&) = default;
};

inline Interval operator-(const Interval& a) { return {-a.hi, -a.lo}; }

inline Interval operator+(const Interval& a, const Interval& b) { return {a.lo + b.lo, a.hi + b.hi}; }

inline Interval operator-(const Interval& a, const Interval& b) { return {a.lo - b.hi, a.hi - b.lo}; }

inline Interval operator*(const Interval& a, const Interval& b) {
  const double p1 = a.lo * b.lo;
  const double p2 = a.lo * b.hi;
  const double p3 = a.hi * b.lo;
  const double p4 = a.hi * b.hi;
  return {std::min({p1, p2, p3, p4}), std::max({p1, p2, p3, p4})};
}

inline Interval operator/(const Interval& a, const Interval& b) {
  if (b.contains_zero()) throw EvalError("division by an interval containing zero");
  const double q1 = a.lo / b.lo;
  const double q2 = a.lo / b.hi;
  const double q3 = a.hi / b.lo;
  const double q4 = a.hi / b.hi;
  return {std::min({q1, q2, q3, q4}), std::max({q1, q2, q3, q4})};
}

/// Integer power with even-power tightening: [0, max(lo^n, hi^n)] when the
/// argument straddles zero.
inline Interval pow(const Interval& a, unsigned n) {
  if (n == 0) return {1.0, 1.0};
  const double l = ipow(a.lo, n);
  const double h = ipow(a.hi, n);
  if ((n & 1U) != 0) return {l, h};
  if (a.lo >= 0.0) return {l, h};
  if (a.hi <= 0.0) return {h, l};
  return {0.0, std::max(l, h)};
}

inline Interval min(const Interval& a, const Interval& b) {
  return {std::min(a.lo, b.lo), std::min(a.hi, b.hi)};
}

inline Interval max(const Interval& a, const Interval& b) {
  return {std::max(a.lo, b.lo), std::max(a.hi, b.hi)};
}

/// Smallest interval containing both.
inline Interval hull(const Interval& a, const Interval& b) {
  return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
}

inline std::ostream& operator<<(std::ostream& os, const Interval& iv) {
  return os << '[' << iv.lo << ", " << iv.hi << ']';
}

}  // namespace gsiplab
