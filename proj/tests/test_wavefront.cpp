#include <gtest/gtest.h>

#include <cmath>

#include "hjlab/error.hpp"
#include "hjlab/wavefront.hpp"
#include "oracles.hpp"

using namespace hjlab;

namespace {

// 3.2 p^6 - 4.8 p^4 + 0.05 p^3 + 1.7 p^2 - 0.1.
const std::vector<double> kSextic{-0.1, 0, 1.7, 0.05, -4.8, 0, 3.2};

double poly(const std::vector<double>& c, double p, int der) {
  double s = 0;
  for (std::size_t k = der; k < c.size(); ++k) {
    double f = 1;
    for (int j = 0; j < der; ++j) f *= static_cast<double>(k - j);
    s += c[k] * f * std::pow(p, static_cast<double>(k - der));
  }
  return s;
}

}  // namespace

TEST(Wavefront, ConvexKinkBranches) {
  const Front f = build_front_1d(half_square(1), abs_kink(), 0.5);
  ASSERT_EQ(f.branches.size(), 3u);
  int fans = 0;
  for (std::size_t b = 0; b < f.branches.size(); ++b) {
    if (f.branches[b].source.kind == BranchSource::Kind::Fan) {
      ++fans;
      EXPECT_DOUBLE_EQ(f.branches[b].a, -1);
      EXPECT_DOUBLE_EQ(f.branches[b].b, 1);
      // Fan of p^2/2 from the origin: x = t p, S = t p^2 / 2.
      EXPECT_NEAR(f.x(static_cast<int>(b), 0.6), 0.3, 1e-12);
      EXPECT_NEAR(f.y(static_cast<int>(b), 0.6), 0.09, 1e-12);
    }
  }
  EXPECT_EQ(fans, 1);
  for (const auto& pt : f.sample(33)) EXPECT_LE(membership_residual(f, pt), 1e-12);
}

TEST(Wavefront, MinimalSectionIsHopfLax) {
  const double t = 0.5;
  const Front f = build_front_1d(half_square(1), abs_kink(), t);
  const auto q = make_axis(-1, 1, 0.05);
  const SolutionGrid g = minimal_section(f, q);
  for (std::size_t k = 0; k < q.size(); ++k) {
    const double ref = oracle::hopf_lax_quadratic([](double y) { return -std::abs(y); }, 1, t, q[k], -5, 5, 200001);
    EXPECT_NEAR(g.values[k], ref, 1e-9);
  }
}

TEST(Wavefront, ConvexShockAtOrigin) {
  const Front f = build_front_1d(half_square(1), abs_kink(), 0.5);
  const auto q = make_axis(-1, 1, 0.01);
  const Section s = minimal_section_path(f, q);
  const auto shocks = find_shocks(f, s);
  ASSERT_EQ(shocks.size(), 1u);
  EXPECT_NEAR(shocks[0].q, 0, 1e-9);
  EXPECT_NEAR(shocks[0].S, -0.25, 1e-9);
  EXPECT_NEAR(shocks[0].p1, 1, 1e-9);
  EXPECT_NEAR(shocks[0].p2, -1, 1e-9);
  EXPECT_EQ(enumerate_continuous_sections(f, q).size(), 1u);
}

TEST(Wavefront, BranchSlopeIsMomentum) {
  const Front f = build_front_1d(cubic_wave(), abs_kink_quad(), 0.05);
  for (int b = 0; b < static_cast<int>(f.branches.size()); ++b)
    for (double s : {0.2, 0.5, 0.8}) {
      const double p = f.branches[b].a + s * (f.branches[b].b - f.branches[b].a);
      const double h = 1e-6 * std::max(1.0, std::abs(p));
      const double dx = f.x(b, p + h) - f.x(b, p - h);
      if (std::abs(dx) < 1e-9) continue;
      EXPECT_NEAR(branch_slope(f, b, p), (f.y(b, p + h) - f.y(b, p - h)) / dx, 1e-6);
      EXPECT_NEAR(f.momentum(b, p), branch_slope(f, b, p), 1e-12);
    }
}

class SexticSections : public ::testing::TestWithParam<int> {};

// The reduced front of -|q| under the sextic has five continuous sections; the oracle counts
// selections through sampled polylines at several resolutions.
TEST_P(SexticSections, MatchesPolylineOracle) {
  const int n = GetParam();
  auto h = [](double p) { return poly(kSextic, p, 0); };
  auto dh = [](double p) { return poly(kSextic, p, 1); };
  auto d2h = [](double p) { return poly(kSextic, p, 2); };
  const int expected = oracle::count_sections(oracle::kink_fan_polylines(h, dh, d2h, n));
  EXPECT_EQ(expected, 5);
  const Hamiltonian H = poly1d(kSextic, 50, box1(-1, 1));
  const Front f = reduced_front(H, abs_kink(50), 1.0);
  const auto q = make_axis(-4, 4, 8.0 / n);
  EXPECT_EQ(static_cast<int>(enumerate_continuous_sections(f, q).size()), expected);
}
INSTANTIATE_TEST_SUITE_P(Resolutions, SexticSections, ::testing::Values(300, 1500, 4000));

TEST(Wavefront, CubicWaveSmallTimeHasOneSection) {
  for (double t : {0.1, 0.05}) {
    const Front f = build_front_1d(cubic_wave(), abs_kink_quad(), t);
    EXPECT_EQ(enumerate_continuous_sections(f, make_axis(-1, 1, 1e-3)).size(), 1u) << t;
  }
}

TEST(Wavefront, CloudMinimalSectionMatchesClosedForm) {
  const double a = 0.75, b = 1, t = 0.1;
  const Front f = build_front_cloud(saddle(), saddle_data(a, b), t, CloudSpec{121, 17});
  const auto ax1 = make_axis(-0.9, -0.3, 0.1), ax2 = make_axis(-0.4, 0.4, 0.1);
  const SolutionGrid g = minimal_section_2d(f, ax1, ax2);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Vec q = g.point(k);
    const double ref = std::min(a * ((q(0) + a * t) * (q(0) + a * t) - q(1)), b * ((q(0) + b * t) * (q(0) + b * t) - q(1)));
    EXPECT_NEAR(g.values[k], ref, 1e-9) << q.transpose();
  }
  const FiberSolver fs(f);
  const auto fib = fs.fiber(vec({-0.5, 0.0}));
  ASSERT_FALSE(fib.empty());
  double lo = 1e300;
  for (const auto& p : fib) lo = std::min(lo, p.S);
  EXPECT_NEAR(lo, g.values[g.index(4, 4)], 1e-9);
}

TEST(Wavefront, InvalidInputs) {
  EXPECT_THROW(build_front_1d(half_square(1), abs_kink(), -1), HjError);
  EXPECT_THROW(reduced_front(half_square(1), abs_kink(), 0), HjError);
  EXPECT_THROW(build_front_1d(saddle(), saddle_data(0.5, 1), 0.1), HjError);
}
