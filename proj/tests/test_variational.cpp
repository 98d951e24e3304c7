#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "hjlab/error.hpp"
#include "hjlab/variational.hpp"
#include "oracles.hpp"

using namespace hjlab;

TEST(Variational, ConvexKinkClosedForm) {
  const auto q = make_axis(-1, 1, 0.01);
  const SolutionGrid R = variational_solve(half_square(1), abs_kink(), 0.5, {q});
  EXPECT_EQ(R.provenance, Provenance::Variational);
  for (std::size_t k = 0; k < q.size(); ++k) EXPECT_NEAR(R.values[k], -std::abs(q[k]) - 0.25, 1e-12);
}

TEST(Variational, SmoothConvexDataIsHopfLax) {
  const double t = 0.4;
  const InitialCondition u0 = min_of_quadratics({{0.0, vec1(0.3), -0.4}}, box1(-5, 5));
  const auto q = make_axis(-1, 1, 0.1);
  const SolutionGrid R = variational_solve(half_square(1), u0, t, {q});
  for (std::size_t k = 0; k < q.size(); ++k) {
    const double ref = oracle::hopf_lax_quadratic([&](double y) { return u0.value1(y); }, 1, t, q[k], -5, 5, 400001);
    EXPECT_NEAR(R.values[k], ref, 1e-8);
  }
}

TEST(Variational, EnvelopeMatchesClosedFormAndScan) {
  const double a = 0.75, b = 1, t = 0.1;
  const auto ax1 = make_axis(-1, -0.16, 0.04), ax2 = make_axis(-0.5, 0.5, 0.05);
  const SolutionGrid E = envelope_solve(saddle(), saddle_family(a, b), t, {ax1, ax2});
  const SolutionGrid S = envelope_solve_scan(saddle(), saddle_family(a, b), t, {ax1, ax2}, 4001);
  for (std::size_t k = 0; k < E.size(); ++k) {
    const Vec q = E.point(k);
    EXPECT_NEAR(E.values[k], saddle_closed_form(a, b, t, q(0), q(1)), 1e-10);
    EXPECT_LE(E.values[k], S.values[k] + 1e-12);
  }
  EXPECT_THROW(saddle_closed_form(a, b, t, 0.0, 0.0), HjError);
}

TEST(Variational, SaddleVariationalMatchesClosedForm) {
  const double a = 0.75, b = 1, t = 0.1;
  const auto ax1 = make_axis(-1, -0.16, 0.06), ax2 = make_axis(-0.5, 0.5, 0.1);
  const SolutionGrid R = variational_solve(saddle(), saddle_data(a, b), t, {ax1, ax2});
  for (std::size_t k = 0; k < R.size(); ++k) {
    const Vec q = R.point(k);
    EXPECT_NEAR(R.values[k], saddle_closed_form(a, b, t, q(0), q(1)), 1e-9);
  }
}

TEST(Variational, HorizonAndShapeErrors) {
  const auto q = make_axis(-1, 1, 0.1);
  try {
    variational_solve(cubic_wave(), abs_kink_quad(), 5.0, {q});
    FAIL();
  } catch (const HjError& e) {
    EXPECT_EQ(e.code(), ErrorCode::HorizonExceeded);
  }
  EXPECT_THROW(variational_solve(half_square(1), abs_kink(), 0.1, {q, q}), HjError);
}

TEST(Variational, AxiomsOnRandomFixtures) {
  std::mt19937_64 rng(3);
  const auto fx = fixtures::axiom_fixtures(rng, 4);
  const AxiomReport rep = check_operator_axioms(variational_grid_solver(), fx, make_axis(-0.5, 0.5, 0.02), 1e-8);
  EXPECT_TRUE(rep.passed(1e-8)) << rep.monotonicity_excess << " " << rep.additivity_error << " "
                                << rep.contraction_excess;
}

TEST(Variational, LocalEstimateOnPerturbedHamiltonian) {
  const Hamiltonian H1 = cubic_wave();
  AffineTransformParams T = AffineTransformParams::identity(1);
  T.n(0) = 0.05;
  T.alpha = 0.01;
  const Hamiltonian H2 = affine_transform(H1, T);
  const double m = check_local_estimate(variational_grid_solver(), H1, H2, abs_kink_quad(), 0.03,
                                        make_axis(-0.5, 0.5, 0.01));
  EXPECT_GE(m, -1e-6);
}

TEST(Variational, ConjugationIdentities) {
  AffineTransformParams T = AffineTransformParams::identity(1);
  T.A(0, 0) = -0.9;
  T.b(0) = 0.2;
  T.n(0) = 0.1;
  T.alpha = 0.05;
  T.lambda = 1.3;
  const auto q = make_axis(-0.5, 0.5, 0.01);
  EXPECT_LE(conjugation_check_affine(variational_grid_solver(), cubic_wave(), abs_kink_quad(), T, 0.03, q), 1e-6);
  T.lambda = 0;
  EXPECT_THROW(conjugation_check_affine(variational_grid_solver(), cubic_wave(), abs_kink_quad(), T, 0.03, q), HjError);
  const GridSolver2D v2 = [](const Hamiltonian& H, const InitialCondition& u, double t,
                             const std::vector<std::vector<double>>& axes) { return variational_solve(H, u, t, axes); };
  EXPECT_LE(conjugation_check_reduction(variational_grid_solver(), v2, saddle(), abs_kink_quad(), 0.4, 0.05, q,
                                        make_axis(-0.2, 0.2, 0.1)),
            1e-6);
}
