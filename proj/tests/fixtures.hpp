#pragma once

#include <random>
#include <vector>

#include "hjlab/characteristics.hpp"
#include "hjlab/hamiltonian.hpp"
#include "hjlab/initial_data.hpp"
#include "hjlab/variational.hpp"

// Seeded random draws from the catalog.
namespace fixtures {

using namespace hjlab;

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Quartic with a bounded second derivative on [-4, 4].
inline Hamiltonian random_quartic(std::mt19937_64& rng) {
  std::vector<double> c{uniform(rng, -0.5, 0.5), uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -0.5, 0.5),
                        uniform(rng, -0.3, 0.3)};
  const double C = 2 * std::abs(c[2]) + 6 * std::abs(c[3]) * 4 + 12 * std::abs(c[4]) * 16;
  return poly1d(c, C, box1(-4, 4));
}

inline Hamiltonian random_hamiltonian_1d(std::mt19937_64& rng) {
  switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
    case 0:
      return cubic_wave();
    case 1:
      return half_square(1, uniform(rng, 0.5, 2));
    case 2: {
      AffineTransformParams T = AffineTransformParams::identity(1);
      T.A(0, 0) = uniform(rng, 0.6, 1.2) * (uniform(rng, 0, 1) < 0.5 ? -1 : 1);
      T.b(0) = uniform(rng, -0.3, 0.3);
      T.n(0) = uniform(rng, -0.5, 0.5);
      T.alpha = uniform(rng, -0.2, 0.2);
      T.lambda = uniform(rng, 0.7, 1.5);
      return affine_transform(cubic_wave(), T);
    }
    default:
      return random_quartic(rng);
  }
}

// Piecewise-quadratic semiconcave data with at least one kink in [-0.5, 0.5].
inline InitialCondition random_data_1d(std::mt19937_64& rng) {
  const int m = std::uniform_int_distribution<int>(2, 3)(rng);
  std::vector<QuadraticMember> ms;
  for (int i = 0; i < m; ++i) {
    const double g = -1 + 2.0 * i / (m - 1) + uniform(rng, -0.2, 0.2);
    ms.push_back({uniform(rng, -0.2, 0.2), vec1(-g), uniform(rng, -0.5, 0.5)});
  }
  return min_of_quadratics(ms, box1(-3, 3));
}

// Time below both horizons, scaled by `fraction`, and short enough that the data domain
// contains the domain of dependence of [-window, window].
inline double safe_time(const Hamiltonian& H, const std::vector<InitialCondition>& us, double fraction, double cap,
                        double window = 0.5) {
  double T = cap;
  for (const auto& u : us) {
    T = std::min(T, fraction * data_horizon(H, u));
    const double speed = max_abs_gradient(H, u.lipschitz(), 2001).norm();
    const double room = std::min(u.domain().hi(0) - window, -window - u.domain().lo(0));
    if (speed > 0) T = std::min(T, fraction * room / speed);
  }
  return T;
}

inline std::vector<AxiomFixture> axiom_fixtures(std::mt19937_64& rng, int n) {
  std::vector<AxiomFixture> out;
  while (static_cast<int>(out.size()) < n) {
    const Hamiltonian H = random_hamiltonian_1d(rng);
    const InitialCondition u = random_data_1d(rng);
    const double c0 = uniform(rng, 0.01, 0.3), c2 = uniform(rng, 0, 0.1);
    const InitialCondition v = add_smooth(u, poly_fn({c0, 0, c2}), 2 * c2 * 3, 2 * c2);
    const InitialCondition w = random_data_1d(rng);
    const double c = uniform(rng, -1, 1);
    out.push_back(AxiomFixture{H, u, v, w, c, safe_time(H, {u, v, w}, 0.5, 0.2)});
  }
  return out;
}

}  // namespace fixtures
