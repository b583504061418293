// Copyright (c) gsiplab contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gsiplab/box.hpp"
#include "gsiplab/error.hpp"
#include "gsiplab/expr.hpp"
#include "gsiplab/global_opt.hpp"
#include "gsiplab/problem_format.hpp"

namespace gsiplab {

/// A generalized semi-infinite program
///
///   min f(x)  over x in X
///   s.t. g(x, y) >= 0  for every y in Y with h_j(x, y) <= 0 for all j,
///
/// held as a validated ProblemDocument. f depends on outer variables only.
class GsipProblem {
 public:
  explicit GsipProblem(ProblemDocument doc) : doc_(std::move(doc)) { validate(doc_); }

  const std::string& name() const noexcept { return doc_.name; }
  const BoxDomain& outer() const noexcept { return doc_.outer; }
  const BoxDomain& inner() const noexcept { return doc_.inner; }
  const Expr& f() const noexcept { return doc_.objective; }
  const Expr& g() const noexcept { return doc_.g; }
  const std::vector<Expr>& h() const noexcept { return doc_.h; }
  std::optional<double> f_star() const noexcept { return doc_.f_star; }
  std::optional<double> f_L() const noexcept { return doc_.f_L; }
  const ProblemDocument& document() const noexcept { return doc_; }

  friend bool operator==(const GsipProblem&, const GsipProblem&) = default;

 private:
  ProblemDocument doc_;
};

/// Near-optimal point that satisfies one disjunct with margin delta for every
/// y in Y.
struct SlaterCertificate {
  Point x_s;
  double epsilon = 0.0;
  double delta = 0.0;
};

/// Right-folded binary max of the h_j in declared order; a single h_j is
/// returned unchanged.
inline Expr hbar(const GsipProblem& p) {
  const auto& h = p.h();
  if (h.empty()) throw StructuralError("problem '" + p.name() + "' has no lower-level constraint");
  Expr acc = h.back();
  for (auto it = h.rbegin() + 1; it != h.rend(); ++it) acc = max(*it, acc);
  return acc;
}

namespace detail {

inline Assignment bind_outer(const GsipProblem& p, std::span<const double> x) {
  p.outer().require_contains(x, "x");
  return p.outer().assignment(x);
}

inline Assignment bind_inner(const GsipProblem& p, std::span<const double> y) {
  p.inner().require_contains(y, "discretization point");
  return p.inner().assignment(y);
}

}  // namespace detail

/// Discretized relaxation: minimize f over X subject to
/// max(g(x, y), hbar(x, y)) >= 0 for each y of the finite set.
inline MinimizationInstance build_lower_bounding(const GsipProblem& p, std::span<const Point> yset) {
  const Expr hb = hbar(p);
  MinimizationInstance inst{p.f(), {}, p.outer()};
  inst.constraints.reserve(yset.size());
  for (const Point& y : yset) {
    const Assignment at = detail::bind_inner(p, y);
    inst.constraints.push_back(ge_zero(max(substitute(p.g(), at), substitute(hb, at))));
  }
  return inst;
}

/// Original lower-level program at x: minimize g(x, .) over Y subject to
/// hbar(x, .) <= 0.
inline MinimizationInstance build_llp(const GsipProblem& p, std::span<const double> x) {
  const Assignment at = detail::bind_outer(p, x);
  return {substitute(p.g(), at), {le_zero(substitute(hbar(p), at))}, p.inner()};
}

/// Auxiliary lower-level program at x: minimize hbar(x, .) over Y subject to
/// g(x, .) <= alpha * llp_value, with alpha in (0, 1).
inline MinimizationInstance build_aux_llp(const GsipProblem& p, std::span<const double> x, double llp_value,
                                          double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("alpha must lie in (0, 1)");
  const Assignment at = detail::bind_outer(p, x);
  return {substitute(hbar(p), at), {le_zero(substitute(p.g(), at) - Expr::constant(alpha * llp_value))}, p.inner()};
}

/// Lower-level program of the SIP relaxation at x: minimize
/// max(g(x, .), hbar(x, .)) over Y.
inline MinimizationInstance build_sip_llp(const GsipProblem& p, std::span<const double> x) {
  const Assignment at = detail::bind_outer(p, x);
  return {max(substitute(p.g(), at), substitute(hbar(p), at)), {}, p.inner()};
}

/// Whether x is feasible in the SIP relaxation: the SIP-LLP value attained at
/// its certified minimizer is >= -tol_feas.
inline bool check_relaxation_feasible(const GsipProblem& p, std::span<const double> x, double tol_feas,
                                      const MinimizeOptions& options = {}) {
  const MinimizeOutcome out = minimize(build_sip_llp(p, x), options);
  return out.value() >= -tol_feas;
}

/// Checks f(x_s) <= f_star + epsilon and that the certified lower bound of
/// min over Y of max(g(x_s, .), hbar(x_s, .)) is at least delta - tol_feas.
inline bool verify_slater(const GsipProblem& p, const SlaterCertificate& cert, double f_star,
                          const MinimizeOptions& options = {}) {
  if (!(cert.epsilon > 0.0)) throw ParameterError("Slater epsilon must be positive");
  if (!(cert.delta > 0.0)) throw ParameterError("Slater delta must be positive");
  const Assignment at = detail::bind_outer(p, cert.x_s);
  if (!(eval(p.f(), at) <= f_star + cert.epsilon)) return false;
  const MinimizeOutcome out = minimize(build_sip_llp(p, cert.x_s), options);
  return out.value_bounds->lo >= cert.delta - options.tol_feas;
}

/// inf -x  s.t. x in [-1,1],  0 <= (x-y)^2 - 10  for all y in [-1,1] with -2x + y <= 0.
inline GsipProblem cex1() {
  const Expr x = Expr::variable("x");
  const Expr y = Expr::variable("y");
  ProblemDocument doc;
  doc.name = "cex1";
  doc.outer = BoxDomain({{"x", -1.0, 1.0}});
  doc.inner = BoxDomain({{"y", -1.0, 1.0}});
  doc.objective = -x;
  doc.g = pow(x - y, 2) - 10.0;
  doc.h = {-2.0 * x + y};
  doc.f_star = 0.5;
  doc.f_L = 0.5;
  return GsipProblem(std::move(doc));
}

/// inf -x  s.t. x in [-1,1],  0 <= -y - 10  for all y in [-1,1] with min(-2x + y, -x) <= 0.
inline GsipProblem cex2() {
  const Expr x = Expr::variable("x");
  const Expr y = Expr::variable("y");
  ProblemDocument doc;
  doc.name = "cex2";
  doc.outer = BoxDomain({{"x", -1.0, 1.0}});
  doc.inner = BoxDomain({{"y", -1.0, 1.0}});
  doc.objective = -x;
  doc.g = -y - 10.0;
  doc.h = {min(-2.0 * x + y, -x)};
  doc.f_star = 0.5;
  doc.f_L = 0.5;
  return GsipProblem(std::move(doc));
}

inline std::vector<GsipProblem> builtin_problems() { return {cex1(), cex2()}; }

inline std::optional<GsipProblem> find_builtin(std::string_view name) {
  for (auto& p : builtin_problems()) {
    if (p.name() == name) return p;
  }
  return std::nullopt;
}

}  // namespace gsiplab
