#include <gtest/gtest.h>

#include <cmath>

#include "hjlab/error.hpp"
#include "hjlab/viscosity.hpp"

using namespace hjlab;

TEST(Viscosity, LaxFriedrichsCellUpdate) {
  const Hamiltonian H = half_square(1);
  // pm = 1, pp = 3: H(2) = 2, viscosity term theta (3 - 1) / 2.
  const double v = lf_update_1d(H, 5, 0.01, 0.1, 0.0, 0.1, 0.4);
  EXPECT_NEAR(v, 0.1 - 0.01 * (2 - 5), 1e-15);
}

TEST(Viscosity, PlanRespectsCfl) {
  GridScheme s;
  s.axes = {make_axis(-1, 1, 0.01)};
  const SchemePlan p = plan_scheme(half_square(1), abs_kink(), 0.5, s);
  ASSERT_EQ(p.theta.size(), 1u);
  EXPECT_NEAR(p.theta[0], 1.1 * 2, 1e-9);
  EXPECT_LE(p.dt * p.theta[0] / p.dx[0], 0.9 + 1e-12);
  EXPECT_NEAR(p.dt * p.steps, 0.5, 1e-12);
  s.theta = {0.5};
  EXPECT_THROW(plan_scheme(half_square(1), abs_kink(), 0.5, s), HjError);
}

TEST(Viscosity, ConvexKinkFirstOrder) {
  double prev = 0;
  for (double dx : {0.01, 0.005, 0.0025}) {
    GridScheme s;
    s.axes = {make_axis(-1, 1, dx)};
    const SolutionGrid V = viscosity_solve(half_square(1), abs_kink(), 0.5, s);
    double e = 0;
    for (std::size_t k = 0; k < V.size(); ++k) e = std::max(e, std::abs(V.values[k] + std::abs(V.axes[0][k]) + 0.25));
    EXPECT_LT(e, 2e-2);
    if (prev > 0) EXPECT_NEAR(prev / e, 2.0, 0.4);
    prev = e;
  }
}

TEST(Viscosity, LaxOleinikConvexKink) {
  const auto q = make_axis(-1, 1, 0.01);
  const SolutionGrid L = lax_oleinik(half_square(1), abs_kink(), 0.5, q);
  for (std::size_t k = 0; k < q.size(); ++k) EXPECT_NEAR(L.values[k], -std::abs(q[k]) - 0.25, 1e-6);
  try {
    lax_oleinik(cubic_wave(), abs_kink(), 0.1, q);
    FAIL();
  } catch (const HjError& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotConvex);
  }
}

TEST(Viscosity, SaddleSchemeNearClosedForm) {
  const double a = 0.75, b = 1, t = 0.1;
  GridScheme s;
  s.axes = {make_axis(-0.9, -0.3, 0.01), make_axis(-0.3, 0.3, 0.01)};
  const SolutionGrid V = viscosity_solve(saddle(), saddle_data(a, b), t, s);
  double e = 0;
  for (std::size_t k = 0; k < V.size(); ++k) {
    const Vec q = V.point(k);
    e = std::max(e, std::abs(V.values[k] - saddle_closed_form(a, b, t, q(0), q(1))));
  }
  // Away from the violation region the minimal section is the viscosity solution.
  EXPECT_LT(e, 2e-2);
}

TEST(Viscosity, ShockVerdicts) {
  const Hamiltonian C = half_square(1);
  ShockPoint s;
  s.p1 = 1;
  s.p2 = -1;
  EXPECT_TRUE(shock_viscosity_verdict(C, s).is_viscosity);
  EXPECT_TRUE(brute_force_shock_verdict(C, 1, -1).is_viscosity);
  const Hamiltonian K = poly1d({0, 0, -0.5}, 1);
  EXPECT_FALSE(shock_viscosity_verdict(K, s).is_viscosity);
  const auto bf = brute_force_shock_verdict(K, 1, -1);
  EXPECT_FALSE(bf.is_viscosity);
  EXPECT_GT(bf.max_residual, 0);
  EXPECT_GT(bf.admissible, 0);
  EXPECT_DOUBLE_EQ(subsolution_residual(saddle(), 0.5, vec({1, -2})), -1.5);
}

TEST(Viscosity, ConjugationWithMatchedGrids) {
  AffineTransformParams T = AffineTransformParams::identity(1);
  T.A(0, 0) = 1.0;
  T.b(0) = 0.2;
  T.alpha = 0.1;
  T.lambda = 1.5;
  const auto q = make_axis(-0.5, 0.5, 0.01);
  EXPECT_LE(viscosity_conjugation_check_affine(cubic_wave(), abs_kink_quad(), T, 0.03, q), 1e-6);
  EXPECT_LE(viscosity_conjugation_check_reduction(saddle(), abs_kink_quad(), 0.4, 0.05, q, make_axis(-0.1, 0.1, 0.01)),
            1e-6);
}
