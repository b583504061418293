// Copyright (c) gsiplab contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Test-only oracles. These use plain closed-form lambdas and never touch the
// library's evaluator, so they stay independent of the code they check.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <limits>
#include <utility>

namespace gsiplab::testing {

struct ScanResult {
  double argmin = 0.0;
  double value = std::numeric_limits<double>::infinity();
  bool feasible = false;
};

/// Dense scan of [lo, hi] (endpoints included) for the smallest f among
/// points where feasible(t) holds.
inline ScanResult scan_minimize(
    const std::function<double(double)>& f, double lo, double hi, std::size_t points = 200001,
    const std::function<bool(double)>& feasible = [](double) { return true; }) {
  ScanResult best;
  for (std::size_t i = 0; i < points; ++i) {
    const double t = i + 1 == points ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    if (!feasible(t)) continue;
    const double v = f(t);
    if (v < best.value) best = {t, v, true};
  }
  return best;
}

inline double sq(double v) { return v * v; }

// Counterexample 1 in closed form.
inline double cex1_g(double x, double y) { return sq(x - y) - 10.0; }
inline double cex1_hbar(double x, double y) { return -2.0 * x + y; }
// Counterexample 2 in closed form.
inline double cex2_g(double /*x*/, double y) { return -y - 10.0; }
inline double cex2_hbar(double x, double y) { return std::min(-2.0 * x + y, -x); }

}  // namespace gsiplab::testing
