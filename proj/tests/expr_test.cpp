// Copyright (c) gsiplab contributors.
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>

#include "gsiplab/expr.hpp"
#include "gsiplab/problem_format.hpp"
#include "gsiplab/tape.hpp"
#include "support/fuzz.hpp"

namespace gsiplab {
namespace {

const Expr x = Expr::variable("x");
const Expr y = Expr::variable("y");

BoxDomain unit_square() { return BoxDomain({{"x", -1.0, 1.0}, {"y", -1.0, 1.0}}); }

TEST(Eval, Cex1LowerLevelObjective) {
  EXPECT_EQ(eval(pow(x - y, 2) - 10.0, {{"x", 1.0}, {"y", 1.0}}), -10.0);
}

TEST(Eval, Cex1ConstraintAtFirstIterate) {
  EXPECT_EQ(eval(-2.0 * x + y, {{"x", 1.0}, {"y", 1.0}}), -1.0);
}

TEST(Eval, Cex2AuxiliaryValue) {
  EXPECT_DOUBLE_EQ(eval(min(-2.0 * x + y, -x), {{"x", 1.0}, {"y", 0.45}}), -1.55);
}

TEST(Eval, UnknownVariableThrows) { EXPECT_THROW(eval(x + y, {{"x", 1.0}}), EvalError); }

TEST(Eval, DivisionByZeroThrows) { EXPECT_THROW(eval(x / y, {{"x", 1.0}, {"y", 0.0}}), EvalError); }

TEST(Eval, PowerZeroIsOne) { EXPECT_EQ(eval(pow(x, 0), {{"x", 0.0}}), 1.0); }

TEST(IntervalEval, SquareIsTightened) {
  EXPECT_EQ(interval_eval(pow(x - y, 2) - 10.0, unit_square()), Interval(-10.0, -6.0));
}

TEST(IntervalEval, Linear) {
  EXPECT_EQ(interval_eval(-y - 10.0, BoxDomain({{"y", -1.0, 1.0}})), Interval(-11.0, -9.0));
}

TEST(IntervalEval, Constant) { EXPECT_EQ(interval_eval(Expr::constant(3.0), unit_square()), Interval(3.0, 3.0)); }

TEST(IntervalEval, DivisorContainingZeroThrows) {
  EXPECT_THROW(interval_eval(x / y, unit_square()), EvalError);
  EXPECT_NO_THROW(interval_eval(x / (y + 2.0), unit_square()));
}

TEST(IntervalEval, OddAndNegativePowers) {
  const BoxDomain b({{"x", -2.0, -1.0}});
  EXPECT_EQ(interval_eval(pow(x, 3), b), Interval(-8.0, -1.0));
  EXPECT_EQ(interval_eval(pow(x, 2), b), Interval(1.0, 4.0));
}

TEST(Substitute, FoldsBoundVariables) {
  const Expr e = substitute(pow(x - y, 2) - 10.0, {{"x", 3.0}});
  EXPECT_EQ(variables(e), std::set<std::string>{"y"});
  EXPECT_EQ(eval(e, {{"y", 1.0}}), -6.0);
  EXPECT_TRUE(substitute(x * y + 1.0, {{"x", 2.0}, {"y", 3.0}}).is_constant());
}

TEST(Substitute, LeavesDivisionByZeroForEvaluation) {
  const Expr e = substitute(x / y, {{"x", 1.0}, {"y", 0.0}});
  EXPECT_FALSE(e.is_constant());
  EXPECT_THROW(eval(e, {}), EvalError);
}

TEST(Tape, RejectsUndeclaredVariable) {
  const std::vector<std::string> names = {"x"};
  EXPECT_THROW(Tape(x + y, names), EvalError);
}

TEST(Tape, SharedSubtreesEmittedOnce) {
  const Expr s = x + y;
  const std::vector<std::string> names = {"x", "y"};
  EXPECT_EQ(Tape(s * s, names).size(), 4u);
}

TEST(Tape, GradientAtAPoint) {
  // d/dx (x*y + x^3 / (y^2 + 1)) and d/dy at (2, 1).
  const Expr f = x * y + pow(x, 3) / (pow(y, 2) + 1.0);
  const std::vector<std::string> names = {"x", "y"};
  const std::vector<Interval> at = {Interval(2.0), Interval(1.0)};
  std::vector<Interval> grad(2), slots, partials;
  const Interval v = Tape(f, names).run_with_gradient(at, grad, slots, partials);
  EXPECT_EQ(v, Interval(6.0));
  EXPECT_EQ(grad[0], Interval(1.0 + 12.0 / 2.0));
  EXPECT_EQ(grad[1], Interval(2.0 - 8.0 * 2.0 / 4.0));
}

TEST(Tape, GradientOfKinkIsHull) {
  const std::vector<std::string> names = {"x"};
  const std::vector<Interval> box = {Interval(-1.0, 1.0)};
  std::vector<Interval> grad(1), slots, partials;
  Tape(max(x, -x), names).run_with_gradient(box, grad, slots, partials);
  EXPECT_EQ(grad[0], Interval(-1.0, 1.0));
  Tape(min(x, x + 5.0), names).run_with_gradient(box, grad, slots, partials);
  EXPECT_EQ(grad[0], Interval(1.0));
}

// Fuzzed expression/box/point triples.
class ExprProperties : public ::testing::Test {
 protected:
  testing::Fuzzer fuzz{20240611};
  const std::vector<std::string> names{"x", "y"};
};

TEST_F(ExprProperties, InclusionAndAgreementWithTape) {
  for (int i = 0; i < 1000; ++i) {
    const Expr e = fuzz.expr(names, 5);
    const BoxDomain box = fuzz.box(names);
    const Point p = fuzz.point_in(box);
    const double v = eval(e, box.assignment(p));
    const Interval range = interval_eval(e, box);
    ASSERT_TRUE(range.contains(v)) << v << " not in [" << range.lo << ", " << range.hi << "]";

    const Tape tape(e, names);
    EXPECT_EQ(tape(std::span<const double>(p)), v);
    const std::vector<Interval> iv = box.intervals();
    EXPECT_EQ(tape(std::span<const Interval>(iv)), range);
  }
}

TEST_F(ExprProperties, ShrinkingTheBoxShrinksTheEnclosure) {
  for (int i = 0; i < 1000; ++i) {
    const Expr e = fuzz.expr(names, 5);
    const BoxDomain box = fuzz.box(names);
    const BoxDomain inner = fuzz.sub_box(box);
    ASSERT_TRUE(interval_eval(e, box).contains(interval_eval(e, inner)));
  }
}

TEST_F(ExprProperties, GradientEnclosesDifferenceQuotients) {
  // f(q) - f(p) lies in sum_i G_i * (q_i - p_i) for p, q in the box.
  std::vector<Interval> grad(2), slots, partials;
  for (int i = 0; i < 1000; ++i) {
    const Expr e = fuzz.expr(names, 5);
    const BoxDomain box = fuzz.box(names);
    const Point p = fuzz.point_in(box);
    const Point q = fuzz.point_in(box);
    const std::vector<Interval> iv = box.intervals();
    const Tape tape(e, names);
    const Interval range = tape.run_with_gradient(iv, grad, slots, partials);
    EXPECT_EQ(range, tape(std::span<const Interval>(iv)));
    const double fp = tape(std::span<const double>(p));
    const double fq = tape(std::span<const double>(q));
    Interval change(0.0);
    for (std::size_t k = 0; k < 2; ++k) change = change + grad[k] * Interval(q[k] - p[k]);
    const double slack = 1e-9 * (1.0 + std::abs(fp) + std::abs(fq));
    ASSERT_GE(fq - fp, change.lo - slack) << to_string(e);
    ASSERT_LE(fq - fp, change.hi + slack) << to_string(e);
  }
}

TEST_F(ExprProperties, MinMaxArePointwise) {
  for (int i = 0; i < 500; ++i) {
    const Expr a = fuzz.expr(names, 4);
    const Expr b = fuzz.expr(names, 4);
    const BoxDomain box = fuzz.box(names);
    const Assignment at = box.assignment(fuzz.point_in(box));
    EXPECT_EQ(eval(min(a, b), at), std::min(eval(a, at), eval(b, at)));
    EXPECT_EQ(eval(max(a, b), at), std::max(eval(a, at), eval(b, at)));
  }
}

}  // namespace
}  // namespace gsiplab
