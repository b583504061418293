// Copyright (c) gsiplab contributors.
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "gsiplab/algorithms.hpp"

namespace gsiplab {
namespace {

AlgorithmConfig config(Variant v, std::size_t max_iter = 50) {
  AlgorithmConfig cfg;
  cfg.variant = v;
  cfg.max_iter = max_iter;
  return cfg;
}

void expect_monotone_and_valid(const GsipProblem& p, const RunResult& r, double tol_opt) {
  for (std::size_t i = 1; i < r.trace.size(); ++i) {
    EXPECT_GE(r.trace[i].lower_bound, r.trace[i - 1].lower_bound - 1e-12) << p.name() << " k=" << r.trace[i].k;
  }
  for (const auto& rec : r.trace) {
    if (p.f_L()) {
      EXPECT_LE(rec.lower_bound, *p.f_L() + tol_opt) << p.name() << " k=" << rec.k;
    }
    EXPECT_NEAR(rec.lower_bound, eval(p.f(), p.outer().assignment(rec.x)), tol_opt);
    if (rec.added_point) {
      EXPECT_TRUE(p.inner().contains(*rec.added_point, 0.0));
    }
  }
  if (!r.trace.empty() && r.status != RunStatus::InfeasibleDetected) {
    EXPECT_EQ(r.final_lower_bound, r.trace.back().lower_bound);
  }
}

TEST(Config, Validation) {
  AlgorithmConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.alpha = 1.0;
  EXPECT_THROW(run(cex1(), cfg), ParameterError);
  cfg = {};
  cfg.tol_opt = 0.0;
  EXPECT_THROW(cfg.validate(), ParameterError);
  cfg = {};
  cfg.tol_feas = -1.0;
  EXPECT_THROW(cfg.validate(), ParameterError);
  cfg = {};
  cfg.max_iter = 0;
  EXPECT_THROW(cfg.validate(), ParameterError);
  cfg = {};
  cfg.initial_yset = {{3.0}};
  EXPECT_THROW(run(cex1(), cfg), DomainError);
}

TEST(Names, RoundTripThroughStrings) {
  EXPECT_EQ(to_string(Variant::LlpOnly), "llp-only");
  EXPECT_EQ(to_string(Variant::AuxLlp), "aux");
  EXPECT_EQ(to_string(Variant::SipLlp), "sip-llp");
  EXPECT_EQ(to_string(RunStatus::ConvergedFeasible), "converged_feasible");
  EXPECT_EQ(to_string(RunStatus::InfeasibleDetected), "infeasible_detected");
  EXPECT_EQ(to_string(RunStatus::Stalled), "stalled");
  EXPECT_EQ(to_string(RunStatus::IterationCap), "iteration_cap");
}

TEST(VariantA, Cex1HalvingIterates) {
  const RunResult r = run(cex1(), config(Variant::LlpOnly, 20));
  ASSERT_EQ(r.trace.size(), 20u);
  EXPECT_EQ(r.status, RunStatus::IterationCap);
  for (const auto& rec : r.trace) {
    const double expected = std::ldexp(1.0, -static_cast<int>(rec.k - 1));
    EXPECT_NEAR(rec.x[0], expected, 1e-6) << "k=" << rec.k;
    ASSERT_TRUE(rec.llp && !rec.llp->infeasible);
    EXPECT_NEAR(rec.llp->y[0], expected, 1e-6) << "k=" << rec.k;
    EXPECT_NEAR(rec.llp->value, -10.0, 1e-9);
    EXPECT_NEAR(rec.lower_bound, -expected, 1e-6);
    EXPECT_EQ(rec.yset_size_after, rec.k);
  }
  EXPECT_LE(r.final_lower_bound, 1e-6);
  EXPECT_LT(r.final_lower_bound, 0.5);
  expect_monotone_and_valid(cex1(), r, 1e-6);
}

TEST(VariantA, Cex1NeverReachesInfimum) {
  const RunResult r = run(cex1(), config(Variant::LlpOnly));
  EXPECT_EQ(r.status, RunStatus::Stalled);
  EXPECT_LE(r.final_lower_bound, 1e-6);
  expect_monotone_and_valid(cex1(), r, 1e-6);
}

TEST(VariantA, Cex2StallsAtZero) {
  const RunResult r = run(cex2(), config(Variant::LlpOnly));
  EXPECT_EQ(r.status, RunStatus::Stalled);
  EXPECT_NEAR(r.final_lower_bound, 0.0, 1e-6);
  expect_monotone_and_valid(cex2(), r, 1e-6);
}

TEST(VariantA, InfeasibleLlpFallsBackToRelaxationCheck) {
  // Minimizing +x sends x_1 to -1, where no y satisfies -2x + y <= 0.
  ProblemDocument doc = cex1().document();
  doc.objective = Expr::variable("x");
  doc.f_star.reset();
  doc.f_L.reset();
  const RunResult r = run(GsipProblem(doc), config(Variant::LlpOnly));
  ASSERT_EQ(r.trace.size(), 1u);
  ASSERT_TRUE(r.trace[0].llp);
  EXPECT_TRUE(r.trace[0].llp->infeasible);
  ASSERT_TRUE(r.trace[0].sip_llp);
  EXPECT_GE(r.trace[0].sip_llp->value, 0.0);
  EXPECT_EQ(r.status, RunStatus::ConvergedFeasible);
  EXPECT_EQ(r.final_lower_bound, -1.0);
  EXPECT_FALSE(r.trace[0].added_point);
}

TEST(VariantA, InitialSetIsUsed) {
  AlgorithmConfig cfg = config(Variant::LlpOnly);
  cfg.initial_yset = {{-1.0}};
  const RunResult r = run(cex1(), cfg);
  ASSERT_FALSE(r.trace.empty());
  EXPECT_NEAR(r.trace[0].x[0], -0.5, 1e-9);
  EXPECT_NEAR(r.final_lower_bound, 0.5, 1e-6);
}

TEST(VariantA, LlpMinimizersSatisfyConstraint) {
  for (const auto& p : builtin_problems()) {
    const RunResult r = run(p, config(Variant::LlpOnly, 20));
    const Expr hb = hbar(p);
    for (const auto& rec : r.trace) {
      if (!rec.llp || rec.llp->infeasible) continue;
      Assignment at = p.outer().assignment(rec.x);
      at.merge(p.inner().assignment(rec.llp->y));
      EXPECT_LE(eval(hb, at), 1e-9);
    }
  }
}

TEST(VariantB, Cex2Iterates) {
  const RunResult r = run(cex2(), config(Variant::AuxLlp));
  ASSERT_GE(r.trace.size(), 2u);
  const IterateRecord& first = r.trace[0];
  EXPECT_EQ(first.x[0], 1.0);
  EXPECT_NEAR(first.llp->y[0], 1.0, 1e-6);
  EXPECT_NEAR(first.llp->value, -11.0, 1e-9);
  ASSERT_TRUE(first.aux);
  EXPECT_NEAR(first.aux->y[0], 0.45, 1e-6);
  EXPECT_NEAR(r.trace[1].x[0], 0.0, 1e-6);
  EXPECT_TRUE(r.status == RunStatus::Stalled || r.status == RunStatus::IterationCap);
  EXPECT_NEAR(r.final_lower_bound, 0.0, 1e-6);
  expect_monotone_and_valid(cex2(), r, 1e-6);
}

TEST(VariantB, Cex2FailureIndependentOfTieBreak) {
  std::set<double> second_cuts;
  for (AuxTieBreak tb : {AuxTieBreak::SolverDefault, AuxTieBreak::MinY, AuxTieBreak::MaxY}) {
    AlgorithmConfig cfg = config(Variant::AuxLlp, 20);
    cfg.aux_tie_break = tb;
    cfg.stop_on_stall = false;
    const RunResult r = run(cex2(), cfg);
    ASSERT_EQ(r.trace.size(), 20u) << to_string(tb);
    EXPECT_EQ(r.status, RunStatus::IterationCap);
    for (std::size_t i = 1; i < r.trace.size(); ++i) {
      EXPECT_NEAR(r.trace[i].x[0], 0.0, 1e-6) << to_string(tb) << " k=" << r.trace[i].k;
      ASSERT_TRUE(r.trace[i].aux);
      EXPECT_GE(r.trace[i].aux->y[0], 0.45 - 1e-6);
      EXPECT_LE(r.trace[i].aux->y[0], 1.0);
    }
    second_cuts.insert(r.trace[1].aux->y[0]);
    EXPECT_NEAR(r.final_lower_bound, 0.0, 1e-6);
    expect_monotone_and_valid(cex2(), r, 1e-6);
  }
  // Min-y and max-y pick opposite ends of [0.45, 1].
  EXPECT_GE(second_cuts.size(), 2u);
  EXPECT_NEAR(*second_cuts.begin(), 0.45, 1e-6);
  EXPECT_NEAR(*second_cuts.rbegin(), 1.0, 1e-6);
}

TEST(VariantB, AuxMinimizersSatisfyConstraint) {
  for (const auto& p : builtin_problems()) {
    AlgorithmConfig cfg = config(Variant::AuxLlp, 20);
    const RunResult r = run(p, cfg);
    for (const auto& rec : r.trace) {
      if (!rec.aux) continue;
      Assignment at = p.outer().assignment(rec.x);
      at.merge(p.inner().assignment(rec.aux->y));
      EXPECT_LE(eval(p.g(), at), cfg.alpha * rec.llp->value + cfg.tol_feas);
    }
    expect_monotone_and_valid(p, r, cfg.tol_opt);
  }
}

TEST(VariantC, Cex1Converges) {
  const RunResult r = run(cex1(), config(Variant::SipLlp));
  EXPECT_EQ(r.status, RunStatus::ConvergedFeasible);
  ASSERT_EQ(r.trace.size(), 2u);
  EXPECT_EQ(r.trace[0].x[0], 1.0);
  ASSERT_TRUE(r.trace[0].added_point);
  EXPECT_NEAR((*r.trace[0].added_point)[0], -1.0, 1e-6);
  EXPECT_NEAR(r.trace[0].sip_llp->value, -3.0, 1e-9);
  EXPECT_NEAR(r.trace[1].x[0], -0.5, 1e-6);
  EXPECT_NEAR(r.trace[1].sip_llp->value, 0.0, 1e-6);
  EXPECT_NEAR(r.final_lower_bound, 0.5, 1e-6);
  EXPECT_FALSE(r.trace[1].llp);
}

TEST(VariantC, BothBuiltinsWithinFiveIterations) {
  for (const auto& p : builtin_problems()) {
    const RunResult r = run(p, config(Variant::SipLlp, 5));
    EXPECT_EQ(r.status, RunStatus::ConvergedFeasible) << p.name();
    EXPECT_NEAR(r.final_lower_bound, 0.5, 1e-4) << p.name();
    expect_monotone_and_valid(p, r, 1e-6);
  }
}

TEST(Run, InfeasibleDiscretization) {
  // Every y forces max(g, hbar) < 0, so one cut empties X.
  ProblemDocument doc = cex1().document();
  doc.h = {Expr::variable("y") - 5.0};
  doc.f_star.reset();
  doc.f_L.reset();
  const RunResult r = run(GsipProblem(doc), config(Variant::SipLlp));
  EXPECT_EQ(r.status, RunStatus::InfeasibleDetected);
  EXPECT_EQ(r.trace.size(), 1u);
  EXPECT_EQ(r.final_lower_bound, INFINITY);
}

TEST(Run, RejectsProblemWithoutH) {
  ProblemDocument doc = cex1().document();
  doc.h.clear();
  EXPECT_THROW(run(GsipProblem(doc), config(Variant::SipLlp)), StructuralError);
}

TEST(Run, Deterministic) {
  for (Variant v : {Variant::LlpOnly, Variant::AuxLlp, Variant::SipLlp}) {
    const RunResult a = run(cex1(), config(v, 10));
    const RunResult b = run(cex1(), config(v, 10));
    ASSERT_EQ(a.trace.size(), b.trace.size());
    for (std::size_t i = 0; i < a.trace.size(); ++i) {
      EXPECT_EQ(a.trace[i].x, b.trace[i].x);
      EXPECT_EQ(a.trace[i].added_point, b.trace[i].added_point);
    }
  }
}

TEST(Run, AllVariantsMonotoneAndValid) {
  for (const auto& p : builtin_problems()) {
    for (Variant v : {Variant::LlpOnly, Variant::AuxLlp, Variant::SipLlp}) {
      expect_monotone_and_valid(p, run(p, config(v, 25)), 1e-6);
    }
  }
}

TEST(Diagnose, Cex1Violations) {
  const RunResult r = run(cex1(), config(Variant::LlpOnly, 20));
  const std::vector<Violation> v = diagnose_trace(cex1(), r);
  EXPECT_EQ(v.size(), 171u);
  bool saw_4_1 = false;
  for (const auto& item : v) {
    EXPECT_GT(item.ell, item.k + 1);
    EXPECT_FALSE(item.ell == 2 && item.k == 1);
    const double expected = -2.0 * std::ldexp(1.0, -static_cast<int>(item.ell - 1)) +
                            std::ldexp(1.0, -static_cast<int>(item.k - 1));
    EXPECT_NEAR(item.value, expected, 1e-6);
    if (item.ell == 4 && item.k == 1) {
      saw_4_1 = true;
      EXPECT_NEAR(item.value, 0.75, 1e-6);
    }
  }
  EXPECT_TRUE(saw_4_1);
}

TEST(Diagnose, SipTraceHasNoLlpData) {
  EXPECT_THROW(diagnose_trace(cex1(), run(cex1(), config(Variant::SipLlp))), UsageError);
  EXPECT_THROW(diagnose_trace(cex1(), RunResult{}), UsageError);
}

TEST(History, Projections) {
  const auto a = lower_bound_history(run(cex1(), config(Variant::LlpOnly, 3)));
  ASSERT_EQ(a.size(), 3u);
  EXPECT_EQ(a[0].first, 1u);
  EXPECT_NEAR(a[0].second, -1.0, 1e-9);
  EXPECT_NEAR(a[1].second, -0.5, 1e-6);
  EXPECT_NEAR(a[2].second, -0.25, 1e-6);
  const auto c = lower_bound_history(run(cex1(), config(Variant::SipLlp)));
  ASSERT_EQ(c.size(), 2u);
  EXPECT_NEAR(c[0].second, -1.0, 1e-9);
  EXPECT_NEAR(c[1].second, 0.5, 1e-6);
  EXPECT_TRUE(lower_bound_history(RunResult{}).empty());
}

}  // namespace
}  // namespace gsiplab
