// Copyright (c) gsiplab contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "gsiplab/box.hpp"
#include "gsiplab/error.hpp"
#include "gsiplab/expr.hpp"
#include "gsiplab/interval.hpp"
#include "gsiplab/tape.hpp"

namespace gsiplab {

enum class Sense : std::uint8_t { LessEqualZero, GreaterEqualZero };

/// `expr <= 0` or `expr >= 0`.
struct ConstraintSpec {
  Expr expr;
  Sense sense = Sense::LessEqualZero;
};

inline ConstraintSpec le_zero(Expr e) { return {std::move(e), Sense::LessEqualZero}; }
inline ConstraintSpec ge_zero(Expr e) { return {std::move(e), Sense::GreaterEqualZero}; }

struct MinimizeOptions {
  double tol_opt = 1e-6;
  double tol_feas = 1e-9;
  /// Boxes narrower than this in every direction are not split further.
  double min_width = 1e-9;
  std::size_t node_budget = 1'000'000;
};

enum class MinimizeStatus : std::uint8_t { Optimal, Infeasible };

struct MinimizeOutcome {
  MinimizeStatus status = MinimizeStatus::Infeasible;
  /// Present iff optimal; coordinates in box order.
  std::optional<Point> minimizer;
  /// Present iff optimal. `hi` is the objective at the minimizer, `lo` a lower
  /// bound on the infimum over the tol_feas-relaxed feasible set.
  std::optional<Interval> value_bounds;
  std::size_t nodes = 0;

  bool optimal() const noexcept { return status == MinimizeStatus::Optimal; }

  double value() const {
    if (!value_bounds) throw UsageError("minimization outcome is infeasible and has no value");
    return value_bounds->hi;
  }
};

/// Objective, constraints and box bundled together, as produced by the GSIP
/// subproblem builders.
struct MinimizationInstance {
  Expr objective;
  std::vector<ConstraintSpec> constraints;
  BoxDomain box;
};

namespace detail {

enum class BoxFeasibility : std::uint8_t { Violated, Undecided, Satisfied };

/// Objective and constraints compiled against a box's variable order.
class CompiledProblem {
 public:
  CompiledProblem(const Expr& objective, std::span<const ConstraintSpec> constraints, const BoxDomain& box,
                  double tol_feas)
      : names_(box.names()), objective_(objective, names_), tol_feas_(tol_feas) {
    constraints_.reserve(constraints.size());
    for (const auto& c : constraints) constraints_.push_back({Tape(c.expr, names_), c.sense});
  }

  double objective(std::span<const double> p) { return objective_.run(p, point_slots_); }
  Interval objective(std::span<const Interval> b) { return objective_.run(b, interval_slots_); }

  /// Natural extension intersected with the mean-value form around the box
  /// centre. The latter is second-order accurate near interior minima.
  Interval objective_enclosure(std::span<const Interval> b) {
    gradient_.resize(b.size());
    const Interval natural = objective_.run_with_gradient(b, gradient_, interval_slots_, partials_);
    centre_.resize(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) centre_[i] = Interval(b[i].mid());
    Interval centred = objective_.run(std::span<const Interval>(centre_), interval_slots_);
    for (std::size_t i = 0; i < b.size(); ++i) centred = centred + gradient_[i] * (b[i] - centre_[i]);
    const double lo = std::max(natural.lo, centred.lo);
    const double hi = std::min(natural.hi, centred.hi);
    return lo <= hi ? Interval(lo, hi) : natural;
  }

  bool feasible(std::span<const double> p) { return feasible(p, tol_feas_); }

  bool feasible(std::span<const double> p, double tol) {
    for (const auto& c : constraints_) {
      const double v = c.tape.run(p, point_slots_);
      if (c.sense == Sense::LessEqualZero ? !(v <= tol) : !(v >= -tol)) return false;
    }
    return true;
  }

  BoxFeasibility classify(std::span<const Interval> b) {
    bool all_satisfied = true;
    for (const auto& c : constraints_) {
      const Interval v = c.tape.run(b, interval_slots_);
      if (c.sense == Sense::LessEqualZero) {
        if (v.lo > tol_feas_) return BoxFeasibility::Violated;
        all_satisfied = all_satisfied && v.hi <= tol_feas_;
      } else {
        if (v.hi < -tol_feas_) return BoxFeasibility::Violated;
        all_satisfied = all_satisfied && v.lo >= -tol_feas_;
      }
    }
    return all_satisfied ? BoxFeasibility::Satisfied : BoxFeasibility::Undecided;
  }

  /// Indices of the constraints neither certified satisfied nor violated on `b`.
  std::vector<std::size_t> undecided(std::span<const Interval> b) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < constraints_.size(); ++i) {
      const Interval v = constraints_[i].tape.run(b, interval_slots_);
      const bool settled = constraints_[i].sense == Sense::LessEqualZero ? v.hi <= tol_feas_ || v.lo > tol_feas_
                                                                         : v.lo >= -tol_feas_ || v.hi < -tol_feas_;
      if (!settled) out.push_back(i);
    }
    return out;
  }

  /// Summed widths of the objective and the listed constraints over `b`.
  double spread(std::span<const Interval> b, std::span<const std::size_t> which) {
    double total = objective(b).width();
    for (std::size_t i : which) total += constraints_[i].tape.run(b, interval_slots_).width();
    return total;
  }

  std::size_t dimension() const noexcept { return names_.size(); }

 private:
  struct CompiledConstraint {
    Tape tape;
    Sense sense;
  };

  std::vector<std::string> names_;
  Tape objective_;
  std::vector<CompiledConstraint> constraints_;
  double tol_feas_;
  std::vector<double> point_slots_;
  std::vector<Interval> interval_slots_;
  std::vector<Interval> partials_;
  std::vector<Interval> gradient_;
  std::vector<Interval> centre_;
};

inline void check_tolerances(double tol_opt, double tol_feas) {
  if (!(tol_opt > 0.0)) throw ParameterError("tol_opt must be positive");
  if (!(tol_feas >= 0.0)) throw ParameterError("tol_feas must be nonnegative");
}

}  // namespace detail

/// Certified global minimization by interval branch-and-bound.
///
/// Nodes are explored best-first on their interval lower bound (ties in
/// creation order) and split at the midpoint of the coordinate whose collapse
/// narrows the objective range most (the widest one in one dimension or when
/// no coordinate narrows it). A
/// node is dropped when a constraint is certified violated by more than
/// tol_feas, or when its lower bound is within tol_opt of the incumbent.
/// Incumbents come from the midpoint and the corners of every box created,
/// plus a segment bisection towards the constraint boundary in boxes whose
/// feasibility is undecided. They are replaced only on strict improvement, so the returned minimizer is
/// the first point found that achieves the final value.
///
/// A box that reaches min_width with undecided feasibility stands for its
/// midpoint: it was already offered as an incumbent, and if the midpoint
/// failed the tol_feas check the box is treated as infeasible.
inline MinimizeOutcome minimize(const Expr& objective, std::span<const ConstraintSpec> constraints,
                                const BoxDomain& box, const MinimizeOptions& options = {}) {
  detail::check_tolerances(options.tol_opt, options.tol_feas);
  if (!(options.min_width > 0.0)) throw ParameterError("min_width must be positive");

  detail::CompiledProblem problem(objective, constraints, box, options.tol_feas);
  const std::size_t dim = box.size();
  constexpr std::size_t kMaxCornerDim = 10;

  struct Node {
    std::vector<Interval> box;
    double lower = 0.0;
    std::uint64_t seq = 0;
    /// Certified feasible, or its midpoint passed the tol_feas check.
    bool has_feasible_point = false;
    bool undecided = false;
  };
  auto worse = [](const Node& a, const Node& b) {
    return a.lower != b.lower ? a.lower > b.lower : a.seq > b.seq;
  };
  std::priority_queue<Node, std::vector<Node>, decltype(worse)> open(worse);

  double best = std::numeric_limits<double>::infinity();
  Point best_point;
  std::uint64_t next_seq = 0;
  Point probe(dim);

  // Best feasible and best infeasible probe of the current box.
  Point good(dim), bad(dim);
  double good_value = 0.0, bad_value = 0.0;
  bool have_good = false, have_bad = false;

  auto offer = [&](std::span<const double> p) {
    const double v = problem.objective(p);
    if (!problem.feasible(p)) {
      if (!have_bad || v < bad_value) {
        bad.assign(p.begin(), p.end());
        bad_value = v;
        have_bad = true;
      }
      return;
    }
    if (!have_good || v < good_value) {
      good.assign(p.begin(), p.end());
      good_value = v;
      have_good = true;
    }
    if (v < best) {
      best = v;
      best_point.assign(p.begin(), p.end());
    }
  };

  // Probes rarely land within tol_feas of an active constraint, so walk from
  // the best feasible probe towards a better infeasible one and keep the last
  // feasible point.
  auto search_boundary = [&] {
    if (!have_good || !have_bad || !(bad_value < std::min(good_value, best))) return;
    Point lo = good;
    Point hi = bad;
    // Aim for the exact boundary when the start point allows it.
    const double tol = problem.feasible(lo, 0.0) ? 0.0 : options.tol_feas;
    for (int step = 0; step < 60; ++step) {
      for (std::size_t i = 0; i < dim; ++i) probe[i] = 0.5 * (lo[i] + hi[i]);
      if (probe == lo || probe == hi) break;
      (problem.feasible(probe, tol) ? lo : hi) = probe;
    }
    const double v = problem.objective(lo);
    if (v < best) {
      best = v;
      best_point = lo;
    }
  };

  auto make_node = [&](std::vector<Interval> b) -> std::optional<Node> {
    const auto feas = problem.classify(b);
    if (feas == detail::BoxFeasibility::Violated) return std::nullopt;
    const Interval range = problem.objective_enclosure(b);
    have_good = have_bad = false;
    for (std::size_t i = 0; i < dim; ++i) probe[i] = b[i].mid();
    offer(probe);
    const bool midpoint_feasible = have_good;
    if (dim <= kMaxCornerDim) {
      for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << dim); ++mask) {
        for (std::size_t i = 0; i < dim; ++i) probe[i] = ((mask >> i) & 1U) != 0 ? b[i].hi : b[i].lo;
        offer(probe);
      }
    }
    if (feas == detail::BoxFeasibility::Undecided) search_boundary();
    return Node{std::move(b), range.lo, next_seq++, feas == detail::BoxFeasibility::Satisfied || midpoint_feasible,
                feas == detail::BoxFeasibility::Undecided};
  };

  // Lower bounds of boxes that left the queue without being proven empty.
  double settled_lower = std::numeric_limits<double>::infinity();
  std::size_t nodes = 0;

  auto push = [&](std::optional<Node> node) {
    if (!node) return;
    if (node->lower < best - options.tol_opt) {
      open.push(std::move(*node));
    } else {
      settled_lower = std::min(settled_lower, node->lower);
    }
  };

  // The coordinate whose collapse to its midpoint narrows the objective (and
  // undecided constraints) the most; the widest one when nothing narrows.
  std::vector<Interval> scratch;
  auto split_axis = [&](const Node& node) {
    std::size_t widest = 0;
    for (std::size_t i = 1; i < dim; ++i) {
      if (node.box[i].width() > node.box[widest].width()) widest = i;
    }
    if (dim < 2) return widest;
    const std::vector<std::size_t> open_constraints =
        node.undecided ? problem.undecided(node.box) : std::vector<std::size_t>{};
    const double base = problem.spread(node.box, open_constraints);
    std::size_t chosen = widest;
    double chosen_gain = 0.0;
    scratch = node.box;
    for (std::size_t i = 0; i < dim; ++i) {
      if (node.box[i].width() < options.min_width) continue;
      scratch[i] = Interval(node.box[i].mid());
      const double gain = base - problem.spread(scratch, open_constraints);
      scratch[i] = node.box[i];
      if (gain > chosen_gain) {
        chosen = i;
        chosen_gain = gain;
      }
    }
    return chosen;
  };

  push(make_node(box.intervals()));

  while (!open.empty()) {
    if (open.top().lower >= best - options.tol_opt) {
      settled_lower = std::min(settled_lower, open.top().lower);
      break;
    }
    Node node = open.top();
    open.pop();
    if (++nodes > options.node_budget) {
      throw ResourceError("branch-and-bound node budget of " + std::to_string(options.node_budget) +
                          " exhausted");
    }

    const std::size_t split = split_axis(node);
    const Interval& axis = node.box[split];
    const double cut = axis.mid();
    if (dim == 0 || axis.width() < options.min_width || !(axis.lo < cut && cut < axis.hi)) {
      if (node.has_feasible_point) settled_lower = std::min(settled_lower, node.lower);
      continue;
    }

    std::vector<Interval> left = node.box;
    std::vector<Interval> right = std::move(node.box);
    left[split].hi = cut;
    right[split].lo = cut;
    push(make_node(std::move(left)));
    push(make_node(std::move(right)));
  }

  MinimizeOutcome out;
  out.nodes = nodes;
  if (!std::isfinite(best)) return out;
  out.status = MinimizeStatus::Optimal;
  out.minimizer = std::move(best_point);
  out.value_bounds = Interval(std::min(settled_lower, best), best);
  return out;
}

inline MinimizeOutcome minimize(const Expr& objective, std::span<const ConstraintSpec> constraints,
                                const BoxDomain& box, double tol_opt, double tol_feas) {
  MinimizeOptions options;
  options.tol_opt = tol_opt;
  options.tol_feas = tol_feas;
  return minimize(objective, constraints, box, options);
}

inline MinimizeOutcome minimize(const MinimizationInstance& instance, const MinimizeOptions& options = {}) {
  return minimize(instance.objective, instance.constraints, instance.box, options);
}

namespace detail {

/// Calls visit(point) for every point of the tensor grid, first axis slowest.
template <class Visit>
void for_each_grid_point(const BoxDomain& box, std::size_t points_per_axis, Visit&& visit) {
  const std::size_t dim = box.size();
  std::vector<std::size_t> index(dim, 0);
  Point p(dim);
  auto coordinate = [&](std::size_t axis, std::size_t j) {
    const Coordinate& c = box[axis];
    if (j + 1 == points_per_axis) return c.hi;
    return c.lo + (c.hi - c.lo) * static_cast<double>(j) / static_cast<double>(points_per_axis - 1);
  };
  while (true) {
    for (std::size_t i = 0; i < dim; ++i) p[i] = coordinate(i, index[i]);
    visit(std::span<const double>(p));
    std::size_t axis = dim;
    while (axis > 0) {
      --axis;
      if (++index[axis] < points_per_axis) break;
      index[axis] = 0;
      if (axis == 0) return;
    }
    if (dim == 0) return;
  }
}

}  // namespace detail

/// Brute-force oracle: evaluates the objective on the full tensor grid
/// (endpoints included) and returns the best tol_feas-feasible point.
inline MinimizeOutcome grid_minimize(const Expr& objective, std::span<const ConstraintSpec> constraints,
                                     const BoxDomain& box, std::size_t points_per_axis,
                                     double tol_feas = 1e-9) {
  if (points_per_axis < 2) throw ParameterError("grid needs at least 2 points per axis");
  if (!(tol_feas >= 0.0)) throw ParameterError("tol_feas must be nonnegative");
  detail::CompiledProblem problem(objective, constraints, box, tol_feas);
  double best = std::numeric_limits<double>::infinity();
  Point best_point;
  std::size_t visited = 0;
  detail::for_each_grid_point(box, points_per_axis, [&](std::span<const double> p) {
    ++visited;
    if (!problem.feasible(p)) return;
    const double v = problem.objective(p);
    if (v < best) {
      best = v;
      best_point.assign(p.begin(), p.end());
    }
  });
  MinimizeOutcome out;
  out.nodes = visited;
  if (!std::isfinite(best)) return out;
  out.status = MinimizeStatus::Optimal;
  out.minimizer = std::move(best_point);
  out.value_bounds = Interval(best, best);
  return out;
}

inline MinimizeOutcome grid_minimize(const MinimizationInstance& instance, std::size_t points_per_axis,
                                     double tol_feas = 1e-9) {
  return grid_minimize(instance.objective, instance.constraints, instance.box, points_per_axis, tol_feas);
}

/// Largest |f(p + h e_i) - f(p)| / h over neighbouring points of the tensor
/// grid. A sampled estimate, not a rigorous bound.
inline double sampled_lipschitz(const Expr& e, const BoxDomain& box, std::size_t points_per_axis) {
  if (points_per_axis < 2) throw ParameterError("grid needs at least 2 points per axis");
  const std::vector<std::string> names = box.names();
  const Tape tape(e, names);
  std::vector<double> slots;
  double lipschitz = 0.0;
  Point neighbour;
  detail::for_each_grid_point(box, points_per_axis, [&](std::span<const double> p) {
    const double here = tape.run(p, slots);
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double step = (box[i].hi - box[i].lo) / static_cast<double>(points_per_axis - 1);
      if (step <= 0.0 || p[i] + step > box[i].hi + 0.5 * step) continue;
      neighbour.assign(p.begin(), p.end());
      neighbour[i] = std::min(p[i] + step, box[i].hi);
      const double there = tape.run(std::span<const double>(neighbour), slots);
      lipschitz = std::max(lipschitz, std::abs(there - here) / (neighbour[i] - p[i]));
    }
  });
  return lipschitz;
}

/// Grid spacing along the widest axis.
inline double grid_mesh(const BoxDomain& box, std::size_t points_per_axis) {
  double mesh = 0.0;
  for (const auto& c : box.coordinates()) {
    mesh = std::max(mesh, (c.hi - c.lo) / static_cast<double>(points_per_axis - 1));
  }
  return mesh;
}

}  // namespace gsiplab
