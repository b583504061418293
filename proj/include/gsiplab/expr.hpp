// Copyright (c) gsiplab contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <utility>

#include "gsiplab/box.hpp"
#include "gsiplab/error.hpp"
#include "gsiplab/interval.hpp"

namespace gsiplab {

enum class Op : std::uint8_t { Constant, Variable, Neg, Add, Sub, Mul, Div, Pow, Min, Max };

constexpr bool is_unary(Op op) { return op == Op::Neg || op == Op::Pow; }
constexpr bool is_binary(Op op) { return op >= Op::Add && op != Op::Pow; }

/// Immutable arithmetic expression tree over named variables.
///
/// Copies share structure. Unary nodes (Neg, Pow) keep their operand in
/// lhs(); Pow carries a nonnegative integer exponent.
class Expr {
 public:
  /// The constant 0.
  Expr() : Expr(constant(0.0)) {}

  static Expr constant(double value) { return Expr(std::make_shared<const Node>(Node{Op::Constant, value, {}, 0, {}, {}})); }
  static Expr variable(std::string name) {
    return Expr(std::make_shared<const Node>(Node{Op::Variable, 0.0, std::move(name), 0, {}, {}}));
  }
  static Expr unary(Op op, Expr operand, unsigned exponent = 0) {
    if (!is_unary(op)) throw StructuralError("not a unary operator");
    return Expr(std::make_shared<const Node>(Node{op, 0.0, {}, exponent, std::move(operand.node_), {}}));
  }
  static Expr binary(Op op, Expr lhs, Expr rhs) {
    if (!is_binary(op)) throw StructuralError("not a binary operator");
    return Expr(std::make_shared<const Node>(Node{op, 0.0, {}, 0, std::move(lhs.node_), std::move(rhs.node_)}));
  }

  Op op() const noexcept { return node_->op; }
  double value() const noexcept { return node_->value; }
  const std::string& name() const noexcept { return node_->name; }
  unsigned exponent() const noexcept { return node_->exponent; }
  Expr lhs() const { return Expr(node_->lhs); }
  Expr rhs() const { return Expr(node_->rhs); }

  bool is_constant() const noexcept { return node_->op == Op::Constant; }

  /// Identity of the shared node; used to memoize shared subtrees.
  const void* id() const noexcept { return node_.get(); }

  /// Structural equality.
  friend bool operator==(const Expr& a, const Expr& b) { return equal(a.node_.get(), b.node_.get()); }

 private:
  struct Node {
    Op op;
    double value;
    std::string name;
    unsigned exponent;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
  };

  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  static bool equal(const Node* a, const Node* b) {
    if (a == b) return true;
    if (a == nullptr || b == nullptr) return false;
    if (a->op != b->op) return false;
    switch (a->op) {
      case Op::Constant:
        return a->value == b->value;
      case Op::Variable:
        return a->name == b->name;
      case Op::Neg:
        return equal(a->lhs.get(), b->lhs.get());
      case Op::Pow:
        return a->exponent == b->exponent && equal(a->lhs.get(), b->lhs.get());
      default:
        return equal(a->lhs.get(), b->lhs.get()) && equal(a->rhs.get(), b->rhs.get());
    }
  }

  std::shared_ptr<const Node> node_;
};

inline Expr operator-(const Expr& a) { return Expr::unary(Op::Neg, a); }
inline Expr operator+(const Expr& a, const Expr& b) { return Expr::binary(Op::Add, a, b); }
inline Expr operator-(const Expr& a, const Expr& b) { return Expr::binary(Op::Sub, a, b); }
inline Expr operator*(const Expr& a, const Expr& b) { return Expr::binary(Op::Mul, a, b); }
inline Expr operator/(const Expr& a, const Expr& b) { return Expr::binary(Op::Div, a, b); }
inline Expr operator+(const Expr& a, double b) { return a + Expr::constant(b); }
inline Expr operator-(const Expr& a, double b) { return a - Expr::constant(b); }
inline Expr operator*(const Expr& a, double b) { return a * Expr::constant(b); }
inline Expr operator/(const Expr& a, double b) { return a / Expr::constant(b); }
inline Expr operator+(double a, const Expr& b) { return Expr::constant(a) + b; }
inline Expr operator-(double a, const Expr& b) { return Expr::constant(a) - b; }
inline Expr operator*(double a, const Expr& b) { return Expr::constant(a) * b; }
inline Expr operator/(double a, const Expr& b) { return Expr::constant(a) / b; }
inline Expr pow(const Expr& base, unsigned exponent) { return Expr::unary(Op::Pow, base, exponent); }
inline Expr min(const Expr& a, const Expr& b) { return Expr::binary(Op::Min, a, b); }
inline Expr max(const Expr& a, const Expr& b) { return Expr::binary(Op::Max, a, b); }

namespace detail {

inline double apply(Op op, double a, double b) {
  switch (op) {
    case Op::Add: return a + b;
    case Op::Sub: return a - b;
    case Op::Mul: return a * b;
    case Op::Div:
      if (b == 0.0) throw EvalError("division by zero");
      return a / b;
    case Op::Min: return std::min(a, b);
    case Op::Max: return std::max(a, b);
    default: throw StructuralError("not a binary operator");
  }
}

inline Interval apply(Op op, const Interval& a, const Interval& b) {
  switch (op) {
    case Op::Add: return a + b;
    case Op::Sub: return a - b;
    case Op::Mul: return a * b;
    case Op::Div: return a / b;
    case Op::Min: return min(a, b);
    case Op::Max: return max(a, b);
    default: throw StructuralError("not a binary operator");
  }
}

inline double apply_pow(double a, unsigned n) { return ipow(a, n); }
inline Interval apply_pow(const Interval& a, unsigned n) { return pow(a, n); }

/// Recursive evaluation; `lookup(name)` supplies variable values.
template <class Value, class Lookup>
Value evaluate(const Expr& e, const Lookup& lookup) {
  switch (e.op()) {
    case Op::Constant: return Value(e.value());
    case Op::Variable: return lookup(e.name());
    case Op::Neg: return -evaluate<Value>(e.lhs(), lookup);
    case Op::Pow: return apply_pow(evaluate<Value>(e.lhs(), lookup), e.exponent());
    default: return apply(e.op(), evaluate<Value>(e.lhs(), lookup), evaluate<Value>(e.rhs(), lookup));
  }
}

}  // namespace detail

/// Exact floating-point evaluation at a point.
inline double eval(const Expr& e, const Assignment& point) {
  return detail::evaluate<double>(e, [&](const std::string& name) {
    auto it = point.find(name);
    if (it == point.end()) throw EvalError("unknown variable '" + name + "'");
    return it->second;
  });
}

/// Natural interval extension over a box.
inline Interval interval_eval(const Expr& e, const BoxDomain& box) {
  return detail::evaluate<Interval>(e, [&](const std::string& name) {
    auto idx = box.index_of(name);
    if (!idx) throw EvalError("unknown variable '" + name + "'");
    const Coordinate& c = box[*idx];
    return Interval(c.lo, c.hi);
  });
}

inline void collect_variables(const Expr& e, std::set<std::string>& out) {
  switch (e.op()) {
    case Op::Constant: return;
    case Op::Variable: out.insert(e.name()); return;
    case Op::Neg:
    case Op::Pow: collect_variables(e.lhs(), out); return;
    default:
      collect_variables(e.lhs(), out);
      collect_variables(e.rhs(), out);
  }
}

inline std::set<std::string> variables(const Expr& e) {
  std::set<std::string> out;
  collect_variables(e, out);
  return out;
}

/// Replaces bound variables by constants and folds every subtree whose
/// operands became constant. A fold that would divide by zero is left in
/// place so the error surfaces at evaluation time.
inline Expr substitute(const Expr& e, const Assignment& values) {
  switch (e.op()) {
    case Op::Constant: return e;
    case Op::Variable: {
      auto it = values.find(e.name());
      return it == values.end() ? e : Expr::constant(it->second);
    }
    case Op::Neg: {
      Expr a = substitute(e.lhs(), values);
      return a.is_constant() ? Expr::constant(-a.value()) : -a;
    }
    case Op::Pow: {
      Expr a = substitute(e.lhs(), values);
      return a.is_constant() ? Expr::constant(ipow(a.value(), e.exponent())) : pow(a, e.exponent());
    }
    default: {
      Expr a = substitute(e.lhs(), values);
      Expr b = substitute(e.rhs(), values);
      if (a.is_constant() && b.is_constant() && !(e.op() == Op::Div && b.value() == 0.0))
        return Expr::constant(detail::apply(e.op(), a.value(), b.value()));
      return Expr::binary(e.op(), std::move(a), std::move(b));
    }
  }
}

/// Counts nodes (shared subtrees counted once per reference).
inline std::size_t node_count(const Expr& e) {
  switch (e.op()) {
    case Op::Constant:
    case Op::Variable: return 1;
    case Op::Neg:
    case Op::Pow: return 1 + node_count(e.lhs());
    default: return 1 + node_count(e.lhs()) + node_count(e.rhs());
  }
}

}  // namespace gsiplab
