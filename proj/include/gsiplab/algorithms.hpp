// Copyright (c) gsiplab contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gsiplab/error.hpp"
#include "gsiplab/global_opt.hpp"
#include "gsiplab/gsip.hpp"

namespace gsiplab {

/// Which lower-level problem supplies the discretization points.
enum class Variant : std::uint8_t {
  LlpOnly,  ///< minimizers of the original LLP
  AuxLlp,   ///< minimizers of the auxiliary LLP
  SipLlp,   ///< minimizers of the SIP-relaxation LLP
};

/// Selection among equally good auxiliary-LLP minimizers.
enum class AuxTieBreak : std::uint8_t {
  SolverDefault,  ///< whatever branch-and-bound finds first
  MinY,           ///< smallest sum of y coordinates
  MaxY,           ///< largest sum of y coordinates
};

enum class RunStatus : std::uint8_t { ConvergedFeasible, InfeasibleDetected, Stalled, IterationCap };

constexpr std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::LlpOnly: return "llp-only";
    case Variant::AuxLlp: return "aux";
    case Variant::SipLlp: return "sip-llp";
  }
  return "?";
}

constexpr std::string_view to_string(AuxTieBreak t) {
  switch (t) {
    case AuxTieBreak::SolverDefault: return "solver";
    case AuxTieBreak::MinY: return "min-y";
    case AuxTieBreak::MaxY: return "max-y";
  }
  return "?";
}

constexpr std::string_view to_string(RunStatus s) {
  switch (s) {
    case RunStatus::ConvergedFeasible: return "converged_feasible";
    case RunStatus::InfeasibleDetected: return "infeasible_detected";
    case RunStatus::Stalled: return "stalled";
    case RunStatus::IterationCap: return "iteration_cap";
  }
  return "?";
}

struct AlgorithmConfig {
  Variant variant = Variant::SipLlp;
  double alpha = 0.95;
  double tol_feas = 1e-9;
  /// Optimality tolerance of the discretized lower-bounding problem.
  double tol_opt = 1e-6;
  /// Optimality tolerance of the lower-level problems. The LLP objective is
  /// typically quadratic near its minimizer, so locating y to within d needs
  /// a value tolerance of about d^2.
  double inner_tol_opt = 1e-12;
  std::size_t max_iter = 50;
  std::vector<Point> initial_yset;
  AuxTieBreak aux_tie_break = AuxTieBreak::SolverDefault;
  /// Stop with RunStatus::Stalled once a repeated cut leaves x unchanged.
  bool stop_on_stall = true;
  std::size_t node_budget = 1'000'000;

  void validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("alpha must lie in (0, 1)");
    if (!(tol_feas >= 0.0)) throw ParameterError("tol_feas must be nonnegative");
    if (!(tol_opt > 0.0)) throw ParameterError("tol_opt must be positive");
    if (!(inner_tol_opt > 0.0)) throw ParameterError("inner_tol_opt must be positive");
    if (max_iter == 0) throw ParameterError("max_iter must be positive");
  }
};

/// Result of the original LLP at x_k. `y` and `value` are meaningful only
/// when the LLP is feasible.
struct LlpRecord {
  bool infeasible = false;
  Point y;
  double value = 0.0;
};

struct SubproblemRecord {
  Point y;
  double value = 0.0;
};

struct IterateRecord {
  std::size_t k = 0;
  Point x;
  /// Lower bound f^{L,k} = f(x_k).
  double lower_bound = 0.0;
  std::optional<LlpRecord> llp;
  std::optional<SubproblemRecord> aux;
  std::optional<SubproblemRecord> sip_llp;
  /// Point proposed for the discretization set (kept even when it was already
  /// a member).
  std::optional<Point> added_point;
  std::size_t yset_size_after = 0;
};

struct RunResult {
  Variant variant = Variant::SipLlp;
  std::vector<IterateRecord> trace;
  RunStatus status = RunStatus::IterationCap;
  /// Last f^{L,k}; +inf once the discretized problem is infeasible.
  double final_lower_bound = -std::numeric_limits<double>::infinity();
  std::vector<Point> yset;
};

namespace detail {

inline bool same_point(std::span<const double> a, std::span<const double> b, double tol) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) > tol) return false;
  }
  return true;
}

inline Expr coordinate_sum(const BoxDomain& box) {
  Expr sum = Expr::variable(box[0].name);
  for (std::size_t i = 1; i < box.size(); ++i) sum = sum + Expr::variable(box[i].name);
  return sum;
}

/// Re-selects among the (inner_tol_opt + tol_feas)-optimal points of the
/// auxiliary LLP according to the tie-break rule.
inline SubproblemRecord break_aux_tie(const MinimizationInstance& aux, const MinimizeOutcome& solved,
                                      const AlgorithmConfig& cfg, const MinimizeOptions& options) {
  SubproblemRecord chosen{*solved.minimizer, solved.value()};
  if (cfg.aux_tie_break == AuxTieBreak::SolverDefault) return chosen;

  Expr secondary = coordinate_sum(aux.box);
  if (cfg.aux_tie_break == AuxTieBreak::MaxY) secondary = -secondary;
  std::vector<ConstraintSpec> constraints = aux.constraints;
  const double window = cfg.inner_tol_opt + cfg.tol_feas;
  constraints.push_back(le_zero(aux.objective - Expr::constant(solved.value() + window)));
  const MinimizeOutcome picked = minimize(secondary, constraints, aux.box, options);
  // The window is a sliver of the feasible set; if bisection cannot resolve
  // it, keep the solver's own choice.
  if (!picked.optimal()) return chosen;
  chosen.y = *picked.minimizer;
  chosen.value = eval(aux.objective, aux.box.assignment(chosen.y));
  return chosen;
}

}  // namespace detail

/// Discretization-based lower bounding for the SIP relaxation of a GSIP.
///
/// Each iteration solves the discretized relaxation for x_k and f^{L,k}, then
/// asks a variant-specific lower-level problem for a new discretization point:
///   - LlpOnly adds the LLP minimizer y_k,
///   - AuxLlp adds the auxiliary-LLP minimizer,
///   - SipLlp adds the SIP-LLP minimizer and stops once its value is
///     >= -tol_feas, i.e. x_k is feasible in the relaxation.
/// For LlpOnly and AuxLlp, an infeasible LLP or an LLP value >= -tol_feas
/// triggers the SIP-LLP check: feasible x_k ends the run as converged,
/// anything else as stalled because the method has no point to add.
inline RunResult run(const GsipProblem& p, const AlgorithmConfig& cfg) {
  cfg.validate();
  hbar(p);  // rejects problems without lower-level constraints up front

  MinimizeOptions outer_opts;
  outer_opts.tol_opt = cfg.tol_opt;
  outer_opts.tol_feas = cfg.tol_feas;
  outer_opts.node_budget = cfg.node_budget;
  MinimizeOptions inner_opts = outer_opts;
  inner_opts.tol_opt = cfg.inner_tol_opt;

  RunResult result;
  result.variant = cfg.variant;
  for (const Point& y : cfg.initial_yset) p.inner().require_contains(y, "initial discretization point");
  result.yset = cfg.initial_yset;

  std::optional<Point> previous_x;
  bool finished = false;

  for (std::size_t k = 1; k <= cfg.max_iter && !finished; ++k) {
    const MinimizeOutcome lower = minimize(build_lower_bounding(p, result.yset), outer_opts);
    if (!lower.optimal()) {
      result.status = RunStatus::InfeasibleDetected;
      result.final_lower_bound = std::numeric_limits<double>::infinity();
      return result;
    }

    IterateRecord rec;
    rec.k = k;
    rec.x = *lower.minimizer;
    rec.lower_bound = lower.value();

    auto relaxation_check = [&] {
      const MinimizeOutcome sip = minimize(build_sip_llp(p, rec.x), inner_opts);
      rec.sip_llp = SubproblemRecord{*sip.minimizer, sip.value()};
      result.status = sip.value() >= -cfg.tol_feas ? RunStatus::ConvergedFeasible : RunStatus::Stalled;
      finished = true;
    };

    std::optional<Point> candidate;
    if (cfg.variant == Variant::SipLlp) {
      const MinimizeOutcome sip = minimize(build_sip_llp(p, rec.x), inner_opts);
      rec.sip_llp = SubproblemRecord{*sip.minimizer, sip.value()};
      if (sip.value() >= -cfg.tol_feas) {
        result.status = RunStatus::ConvergedFeasible;
        finished = true;
      } else {
        candidate = *sip.minimizer;
      }
    } else {
      const MinimizeOutcome llp = minimize(build_llp(p, rec.x), inner_opts);
      if (!llp.optimal()) {
        rec.llp = LlpRecord{true, {}, 0.0};
        relaxation_check();
      } else {
        rec.llp = LlpRecord{false, *llp.minimizer, llp.value()};
        if (llp.value() >= -cfg.tol_feas) {
          relaxation_check();
        } else if (cfg.variant == Variant::LlpOnly) {
          candidate = *llp.minimizer;
        } else {
          const MinimizationInstance aux = build_aux_llp(p, rec.x, llp.value(), cfg.alpha);
          const MinimizeOutcome solved = minimize(aux, inner_opts);
          if (!solved.optimal()) throw ResourceError("auxiliary LLP infeasible although the LLP minimizer satisfies it");
          rec.aux = detail::break_aux_tie(aux, solved, cfg, inner_opts);
          candidate = rec.aux->y;
        }
      }
    }

    if (candidate) {
      bool duplicate = false;
      for (const Point& y : result.yset) duplicate = duplicate || detail::same_point(y, *candidate, 1e-12);
      if (!duplicate) result.yset.push_back(*candidate);
      rec.added_point = std::move(candidate);
      if (duplicate && previous_x && detail::same_point(*previous_x, rec.x, 1e-12) && cfg.stop_on_stall) {
        result.status = RunStatus::Stalled;
        finished = true;
      }
    }
    rec.yset_size_after = result.yset.size();
    previous_x = rec.x;
    result.final_lower_bound = rec.lower_bound;
    result.trace.push_back(std::move(rec));
  }
  if (!finished) result.status = RunStatus::IterationCap;
  return result;
}

/// Index pair (ell, k), ell > k, whose earlier cut y_k is now cut off by the
/// lower-level constraint: hbar(x_ell, y_k) = value > 0.
struct Violation {
  std::size_t ell = 0;
  std::size_t k = 0;
  double value = 0.0;

  friend bool operator==(const Violation&, const Violation&) = default;
};

/// All pairs ell > k with hbar(x_ell, y_k) > tol_feas although
/// hbar(x_k, y_k) < -tol_feas, where y_k are the recorded LLP minimizers.
/// These refute the claim that hbar(x_ell, y_k) stays negative for large k.
inline std::vector<Violation> diagnose_trace(const GsipProblem& p, const RunResult& result, double tol_feas = 1e-9) {
  struct Cut {
    std::size_t k;
    Assignment y;
  };
  std::vector<Cut> cuts;
  for (const auto& rec : result.trace) {
    if (rec.llp && !rec.llp->infeasible) cuts.push_back({rec.k, p.inner().assignment(rec.llp->y)});
  }
  if (cuts.empty()) throw UsageError("trace carries no LLP minimizers to diagnose");

  const Expr hb = hbar(p);
  auto hbar_at = [&](const IterateRecord& rec, const Assignment& y) {
    Assignment point = p.outer().assignment(rec.x);
    point.insert(y.begin(), y.end());
    return eval(hb, point);
  };

  std::vector<Violation> out;
  for (const Cut& cut : cuts) {
    const IterateRecord& own = result.trace[cut.k - 1];
    if (!(hbar_at(own, cut.y) < -tol_feas)) continue;
    for (const auto& later : result.trace) {
      if (later.k <= cut.k) continue;
      const double v = hbar_at(later, cut.y);
      if (v > tol_feas) out.push_back({later.k, cut.k, v});
    }
  }
  return out;
}

/// (k, f^{L,k}) for every recorded iteration.
inline std::vector<std::pair<std::size_t, double>> lower_bound_history(const RunResult& result) {
  std::vector<std::pair<std::size_t, double>> out;
  out.reserve(result.trace.size());
  for (const auto& rec : result.trace) out.emplace_back(rec.k, rec.lower_bound);
  return out;
}

}  // namespace gsiplab
