// Copyright (c) gsiplab contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "gsiplab/expr.hpp"

namespace gsiplab {

/// An Expr flattened into straight-line code over positional variables.
///
/// Each instruction writes one slot; operands refer to earlier slots, so a
/// single forward pass evaluates the whole expression. Shared subtrees are
/// emitted once. Point and interval evaluation run the same program, which is
/// what the branch-and-bound loop and the grid oracle call millions of times.
class Tape {
 public:
  Tape() = default;

  /// Binds variables by name to positions in `variables`; throws EvalError on
  /// a variable the list does not declare.
  Tape(const Expr& e, std::span<const std::string> variables) {
    std::unordered_map<const void*, std::uint32_t> memo;
    emit(e, variables, memo);
  }

  std::size_t size() const noexcept { return code_.size(); }

  template <class Value>
  Value run(std::span<const Value> args, std::vector<Value>& slots) const {
    slots.resize(code_.size());
    for (std::size_t i = 0; i < code_.size(); ++i) {
      const Instr& in = code_[i];
      switch (in.op) {
        case Op::Constant: slots[i] = Value(in.constant); break;
        case Op::Variable: slots[i] = args[in.a]; break;
        case Op::Neg: slots[i] = -slots[in.a]; break;
        case Op::Pow: slots[i] = detail::apply_pow(slots[in.a], in.b); break;
        default: slots[i] = detail::apply(in.op, slots[in.a], slots[in.b]); break;
      }
    }
    return slots.back();
  }

  /// Interval value over `args` together with interval enclosures of every
  /// partial derivative, written to `grad` (one entry per argument). Where
  /// min or max cannot tell its branches apart the derivative is the hull of
  /// both, which keeps the mean-value form valid across the kink.
  Interval run_with_gradient(std::span<const Interval> args, std::span<Interval> grad, std::vector<Interval>& slots,
                             std::vector<Interval>& partials) const {
    const std::size_t n = args.size();
    slots.resize(code_.size());
    partials.assign(code_.size() * n, Interval(0.0));
    for (std::size_t i = 0; i < code_.size(); ++i) {
      const Instr& in = code_[i];
      Interval* d = partials.data() + i * n;
      const Interval* da = partials.data() + in.a * n;
      const Interval* db = partials.data() + in.b * n;
      switch (in.op) {
        case Op::Constant: slots[i] = Interval(in.constant); break;
        case Op::Variable:
          slots[i] = args[in.a];
          d[in.a] = Interval(1.0);
          break;
        case Op::Neg:
          slots[i] = -slots[in.a];
          for (std::size_t k = 0; k < n; ++k) d[k] = -da[k];
          break;
        case Op::Pow: {
          slots[i] = detail::apply_pow(slots[in.a], in.b);
          if (in.b == 0) break;
          const Interval scale = static_cast<double>(in.b) * detail::apply_pow(slots[in.a], in.b - 1);
          for (std::size_t k = 0; k < n; ++k) d[k] = scale * da[k];
          break;
        }
        default: {
          const Interval& a = slots[in.a];
          const Interval& b = slots[in.b];
          slots[i] = detail::apply(in.op, a, b);
          switch (in.op) {
            case Op::Add:
              for (std::size_t k = 0; k < n; ++k) d[k] = da[k] + db[k];
              break;
            case Op::Sub:
              for (std::size_t k = 0; k < n; ++k) d[k] = da[k] - db[k];
              break;
            case Op::Mul:
              for (std::size_t k = 0; k < n; ++k) d[k] = da[k] * b + a * db[k];
              break;
            case Op::Div:
              for (std::size_t k = 0; k < n; ++k) d[k] = (da[k] - slots[i] * db[k]) / b;
              break;
            default: {
              // Min or Max: a branch that is certainly selected passes its derivative on.
              const bool lhs_wins = in.op == Op::Min ? a.hi < b.lo : a.lo > b.hi;
              const bool rhs_wins = in.op == Op::Min ? b.hi < a.lo : b.lo > a.hi;
              for (std::size_t k = 0; k < n; ++k) d[k] = lhs_wins ? da[k] : rhs_wins ? db[k] : hull(da[k], db[k]);
              break;
            }
          }
          break;
        }
      }
    }
    const Interval* top = partials.data() + (code_.size() - 1) * n;
    for (std::size_t k = 0; k < n; ++k) grad[k] = top[k];
    return slots.back();
  }

  double operator()(std::span<const double> args) const {
    std::vector<double> slots;
    return run(args, slots);
  }

  Interval operator()(std::span<const Interval> args) const {
    std::vector<Interval> slots;
    return run(args, slots);
  }

 private:
  struct Instr {
    Op op;
    std::uint32_t a = 0;  // operand slot, or variable position
    std::uint32_t b = 0;  // operand slot, or Pow exponent
    double constant = 0.0;
  };

  std::uint32_t emit(const Expr& e, std::span<const std::string> variables,
                     std::unordered_map<const void*, std::uint32_t>& memo) {
    if (auto it = memo.find(e.id()); it != memo.end()) return it->second;
    Instr in{e.op()};
    switch (e.op()) {
      case Op::Constant: in.constant = e.value(); break;
      case Op::Variable: {
        std::size_t pos = 0;
        while (pos < variables.size() && variables[pos] != e.name()) ++pos;
        if (pos == variables.size()) throw EvalError("unknown variable '" + e.name() + "'");
        in.a = static_cast<std::uint32_t>(pos);
        break;
      }
      case Op::Neg: in.a = emit(e.lhs(), variables, memo); break;
      case Op::Pow:
        in.a = emit(e.lhs(), variables, memo);
        in.b = e.exponent();
        break;
      default:
        in.a = emit(e.lhs(), variables, memo);
        in.b = emit(e.rhs(), variables, memo);
        break;
    }
    code_.push_back(in);
    const auto slot = static_cast<std::uint32_t>(code_.size() - 1);
    memo.emplace(e.id(), slot);
    return slot;
  }

  std::vector<Instr> code_;
};

}  // namespace gsiplab
