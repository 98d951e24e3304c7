#include <gtest/gtest.h>

#include <cmath>

#include "hjlab/error.hpp"
#include "hjlab/experiments.hpp"
#include "oracles.hpp"

using namespace hjlab;

TEST(Experiments, CompareSolutions) {
  SolutionGrid R = make_grid(0.1, {make_axis(0, 1, 0.25)}, Provenance::Variational);
  SolutionGrid V = make_grid(0.1, {make_axis(0, 1, 0.25)}, Provenance::Viscosity);
  R.values = {0, 1, 2, 3, 4};
  V.values = {0, 1.5, 2, 2.75, 4};
  const GapStats g = compare_solutions(R, V);
  EXPECT_DOUBLE_EQ(g.sup_abs_gap, 0.5);
  EXPECT_DOUBLE_EQ(g.min_signed_gap, -0.5);
  EXPECT_DOUBLE_EQ(g.max_signed_gap, 0.25);
  EXPECT_DOUBLE_EQ(g.argmin_point(0), 0.25);
  EXPECT_DOUBLE_EQ(g.argmax_point(0), 0.75);
  SolutionGrid W = make_grid(0.1, {make_axis(0, 1, 0.5)}, Provenance::Viscosity);
  W.values = {0, 0, 0};
  try {
    compare_solutions(R, W);
    FAIL();
  } catch (const HjError& e) {
    EXPECT_EQ(e.code(), ErrorCode::AxisMismatch);
  }
}

TEST(Experiments, ReportJsonRoundTrip) {
  CounterexampleReport r;
  r.scenario = "dim1";
  r.params = {{"h", "cubic_wave"}};
  r.t = 0.05;
  r.shock = {{"q", 0.01}};
  r.lax_margin = -0.2;
  r.entropy_margin = 0.1;
  r.sup_gap = 0.02;
  r.min_signed_gap = -1e-4;
  r.scheme_tolerance = 3e-3;
  r.witness.q = vec1(0.02);
  r.witness.R = 1;
  r.witness.V = 0.9;
  r.witness.gap = 0.1;
  r.witness.strict = true;
  r.artifacts = {"a.csv"};
  const auto j = r.to_json();
  EXPECT_EQ(j.at("version"), kReportVersion);
  const CounterexampleReport s = CounterexampleReport::from_json(j);
  EXPECT_EQ(s.to_json(), j);
  EXPECT_THROW(CounterexampleReport::from_json(nlohmann::json::object()), std::exception);
}

TEST(Experiments, ShockSystemSatisfiesItsEquations) {
  const Hamiltonian H = cubic_wave();
  const InitialCondition u0 = abs_kink_quad();
  for (double t : {0.1, 0.05, 0.025}) {
    const ShockSystemSolution s = solve_shock_system(H, u0, t);
    // Right-piece characteristic through q0 and fan ray with momentum p meet at x with equal action.
    const double r = -1 + s.q0;
    const double xr = s.q0 + t * H.dh(r), xf = t * H.dh(s.p);
    const double Sr = u0.value1(s.q0) + t * (r * H.dh(r) - H.h(r));
    const double Sf = t * (s.p * H.dh(s.p) - H.h(s.p));
    EXPECT_NEAR(xr, xf, 1e-12);
    EXPECT_NEAR(Sr, Sf, 1e-12);
    EXPECT_NEAR(s.x, xf, 1e-12);
    EXPECT_GT(s.q0, 0);
    EXPECT_TRUE(check_lax_condition(H, s.p, r).left_margin < 0 || check_lax_condition(H, s.p, r).right_margin < 0);
  }
}

TEST(Experiments, SaddleResidualMatchesHandComputation) {
  const double a = 0.75, b = 1, t = 0.1;
  for (double q1 : {-0.17, -0.16, -0.155}) {
    EXPECT_NEAR(saddle_residual(a, b, t, q1), oracle::saddle_average_residual(a, b, t, q1), 1e-14);
    EXPECT_NEAR(saddle_residual_formula(a, b, t, q1), oracle::saddle_average_residual(a, b, t, q1), 1e-14);
    EXPECT_GT(saddle_residual(a, b, t, q1), 0);
  }
  EXPECT_NEAR(saddle_parabola(a, b, t, -0.16), 0.0256 - 2 * 1.75 * 0.1 * 0.16 + 0.01 * (0.5625 + 0.75 + 1), 1e-14);
}

TEST(Experiments, ScenarioPreconditions) {
  try {
    run_counterexample_1d(half_square(1), {0.1});
    FAIL();
  } catch (const HjError& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
  }
  try {
    run_counterexample_saddle(0.4, 1, 0.1);
    FAIL();
  } catch (const HjError& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyViolationInterval);
  }
  EXPECT_THROW(run_counterexample_saddle(0.75, 1, 1.0), HjError);
  CounterexampleReport r;
  r.scenario = "saddle";
  r.t = 0.1;
  r.witness.q = vec({-0.16, 0});
  r.witness.gap = 0;
  r.params = {{"initial", saddle_data(0.75, 1).spec()}};
  try {
    run_smoothing_argument(saddle(), r, {0.01});
    FAIL();
  } catch (const HjError& e) {
    EXPECT_EQ(e.code(), ErrorCode::WitnessGapNonpositive);
  }
}

TEST(Experiments, OneDimensionalScenarioShape) {
  const auto reps = run_counterexample_1d(cubic_wave(), {0.05});
  ASSERT_EQ(reps.size(), 1u);
  const auto& r = reps[0];
  EXPECT_EQ(r.scenario, "dim1");
  EXPECT_EQ(r.extra.at("section_count"), 1);
  EXPECT_LT(r.lax_margin, -1e-6);
  EXPECT_GE(r.min_signed_gap, -2e-2);
  EXPECT_GT(r.witness.gap, 0);
  EXPECT_GT(r.scheme_tolerance, 0);
}

TEST(Experiments, EpsSweep) {
  const auto e = default_eps_sweep();
  ASSERT_EQ(e.size(), 11u);
  EXPECT_DOUBLE_EQ(e.front(), 0.1);
  EXPECT_DOUBLE_EQ(e.back(), 0.1 / 1024);
}
