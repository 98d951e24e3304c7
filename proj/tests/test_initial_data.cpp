#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hjlab/error.hpp"
#include "hjlab/initial_data.hpp"

using namespace hjlab;

TEST(InitialData, AbsKinkPiecesAndFan) {
  const InitialCondition u = abs_kink();
  EXPECT_DOUBLE_EQ(u.value1(-0.3), -0.3);
  EXPECT_DOUBLE_EQ(u.value1(0.7), -0.7);
  ASSERT_EQ(u.kinks_1d().size(), 1u);
  EXPECT_NEAR(u.kinks_1d()[0].q, 0, 1e-14);
  EXPECT_EQ(u.pieces_1d().size(), 2u);
  const ClarkeFan f = clarke_derivative(u, vec1(0));
  EXPECT_DOUBLE_EQ(f.lo(), -1);
  EXPECT_DOUBLE_EQ(f.hi(), 1);
  EXPECT_DOUBLE_EQ(f.diameter(), 2);
  EXPECT_DOUBLE_EQ(clarke_derivative(u, vec1(0.5)).diameter(), 0);
  EXPECT_THROW(clarke_derivative(u, vec1(6)), HjError);
}

TEST(InitialData, AbsKinkQuadProfile) {
  const InitialCondition u = abs_kink_quad();
  for (double q : {-0.9, -0.4, 0.2, 0.8}) EXPECT_NEAR(u.value1(q), -std::abs(q) + 0.5 * q * q, 1e-14);
  const double e = 1e-6;
  for (double q : {-2.0, -1.1, 1.05, 3.0}) EXPECT_NEAR(u.deriv1(q), (u.value1(q + e) - u.value1(q - e)) / (2 * e), 1e-7);
}

TEST(InitialData, SaddleDataIsMinOfTwoMembers) {
  const double a = 0.75, b = 1;
  const InitialCondition u = saddle_data(a, b);
  for (double q1 : {-0.8, -0.2, 0.5})
    for (double q2 : {-0.3, 0.1, 0.9}) {
      const double f = q1 * q1;
      EXPECT_NEAR(u(vec({q1, q2})), std::min(a * (f - q2), b * (f - q2)), 1e-14);
    }
  EXPECT_THROW(saddle_data(1, 0.75), HjError);
  const ClarkeFan fan = clarke_derivative(u, vec({0.5, 0.25}));
  EXPECT_EQ(fan.vertices.size(), 2u);
}

TEST(InitialData, MinOfQuadraticsAndActiveSets) {
  const InitialCondition u =
      min_of_quadratics({{0.0, vec1(1), -0.5}, {0.0, vec1(-1), -0.5}, {-0.2, vec1(0), 0.0}}, box1(-3, 3));
  EXPECT_NEAR(u.value1(0), -0.2, 1e-15);
  EXPECT_NEAR(u.value1(-1), -1.25, 1e-15);
  EXPECT_EQ(u.argmin(vec1(2)), 1);
  EXPECT_EQ(u.active(vec1(0.2)).size(), 1u);
  EXPECT_GE(u.kinks_1d().size(), 2u);
  for (const auto& k : u.kinks_1d()) {
    const auto& gl = u.members()[k.left_member];
    const auto& gr = u.members()[k.right_member];
    EXPECT_NEAR(gl.value(vec1(k.q)), gr.value(vec1(k.q)), 1e-12);
  }
}

TEST(InitialData, ClosureOperations) {
  const InitialCondition u = abs_kink_quad();
  const InitialCondition s = add_constant(u, 0.3);
  EXPECT_NEAR(s.value1(0.4), u.value1(0.4) + 0.3, 1e-15);
  Mat At(1, 1);
  At(0, 0) = 2.0;
  const InitialCondition pb = pullback(u, At, vec1(0.5));
  EXPECT_NEAR(pb.value1(0.2), u.value1(0.4) + 0.1, 1e-15);
  const InitialCondition ex = extend(u, vec1(-0.7), 4.0);
  EXPECT_EQ(ex.dim(), 2);
  EXPECT_NEAR(ex(vec({0.3, 2.0})), u.value1(0.3) - 1.4, 1e-15);
  const InitialCondition sm = add_smooth(u, affine_fn(vec1(0.25), 1.0), 0.25, 0);
  EXPECT_NEAR(sm.value1(-0.4), u.value1(-0.4) + 0.9, 1e-15);
  EXPECT_NEAR(sm.lipschitz(), u.lipschitz() + 0.25, 1e-15);
}

TEST(InitialData, JsonRoundTrip) {
  const InitialCondition us[] = {abs_kink(), abs_kink_quad(3, 0.5), saddle_data(0.5, 2),
                                 min_of_quadratics({{0, vec1(0.5), -1}, {0.1, vec1(-0.5), 0}}, box1(-2, 2)),
                                 linear_data(vec({0.2, -0.1}), 0.3, box2(-1, 1, -1, 1))};
  for (const auto& u : us) {
    const InitialCondition v = initial_condition_from_json(u.spec());
    const Vec q = u.dim() == 1 ? vec1(0.37) : vec({0.37, -0.21});
    EXPECT_NEAR(v(q), u(q), 1e-14) << u.spec().dump();
    EXPECT_DOUBLE_EQ(v.lipschitz(), u.lipschitz());
  }
  EXPECT_THROW(initial_condition_from_json({{"kind", "nope"}}), HjError);
}

TEST(InitialData, MollifiedKinkMatchesDirectQuadrature) {
  const double eps = 0.1;
  const InitialCondition u = abs_kink();
  const Mollified m(u, eps);
  // Midpoint rule on the bump with a million cells.
  auto bump = [](double y) { return std::abs(y) < 1 ? std::exp(-1 / (1 - y * y)) : 0.0; };
  auto ref = [&](double q) {
    const int n = 1000000;
    double s = 0, z = 0;
    for (int i = 0; i < n; ++i) {
      const double y = -1 + (i + 0.5) * 2.0 / n;
      s += bump(y) * -std::abs(q - eps * y);
      z += bump(y);
    }
    return s / z;
  };
  for (double q : {0.0, 0.03, -0.07, 0.2}) {
    double v;
    m.jet(vec1(q), &v, nullptr, nullptr);
    EXPECT_NEAR(v, ref(q), 1e-9) << q;
  }
  Vec g;
  m.jet(vec1(0.0), nullptr, &g, nullptr);
  EXPECT_NEAR(g(0), 0, 1e-12);
}

TEST(InitialData, MollifiedJetConsistency) {
  const InitialCondition u = saddle_data(0.75, 1);
  const Mollified m(u, 0.05);
  const Vec q = vec({0.4, 0.16});
  double v;
  Vec g;
  Mat h;
  m.jet(q, &v, &g, &h);
  const double e = 1e-4;
  for (int i = 0; i < 2; ++i) {
    Vec qp = q, qm = q;
    qp(i) += e;
    qm(i) -= e;
    double vp, vm;
    Vec gp, gm;
    m.jet(qp, &vp, &gp, nullptr);
    m.jet(qm, &vm, &gm, nullptr);
    EXPECT_NEAR(g(i), (vp - vm) / (2 * e), 1e-6);
    for (int j = 0; j < 2; ++j) EXPECT_NEAR(h(j, i), (gp(j) - gm(j)) / (2 * e), 1e-3);
  }
  // Away from the kink curve the mollified value of a quadratic member differs by O(eps^2).
  const Vec far = vec({0.1, 0.9});
  double vf;
  m.jet(far, &vf, nullptr, nullptr);
  EXPECT_NEAR(vf, u(far), 0.05 * 0.05 * 2);
  EXPECT_GT(bump_gradient_l1(1), 0);
  EXPECT_THROW(Mollified(u, 0), HjError);
}

TEST(InitialData, LinearDataIsFixedByMollification) {
  const InitialCondition u = linear_data(vec({0.3, -0.8}), 0.2, box2(-1, 1, -1, 1));
  const InitialCondition m = mollify(u, 0.1);
  for (double q1 : {-0.5, 0.0, 0.5}) EXPECT_NEAR(m(vec({q1, 0.25})), u(vec({q1, 0.25})), 1e-12);
}

TEST(InitialData, HausdorffMatchesBruteForce) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> N;
  PointSet X, Y;
  for (int i = 0; i < 300; ++i) X.push_back(vec({N(rng), N(rng), N(rng)}));
  for (int i = 0; i < 250; ++i) Y.push_back(vec({N(rng) + 0.3, N(rng), N(rng)}));
  auto directed = [](const PointSet& A, const PointSet& B) {
    double d = 0;
    for (const auto& a : A) {
      double m = 1e300;
      for (const auto& b : B) m = std::min(m, (a - b).norm());
      d = std::max(d, m);
    }
    return d;
  };
  EXPECT_NEAR(directed_hausdorff(X, Y), directed(X, Y), 1e-14);
  EXPECT_NEAR(hausdorff_distance(X, Y), std::max(directed(X, Y), directed(Y, X)), 1e-14);
  EXPECT_NEAR(point_set_distance(X[3], X), 0, 0);
  double slack = -1;
  EXPECT_TRUE(enhanced_triangle_check(X[0], Y[0], X, Y, &slack));
  EXPECT_GE(slack, 0);
  EXPECT_THROW(hausdorff_distance({}, Y), HjError);
}
