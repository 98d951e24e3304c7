#pragma once

#include <optional>

#include "hjlab/hamiltonian.hpp"
#include "hjlab/initial_data.hpp"
#include "hjlab/types.hpp"

namespace hjlab {

struct PhaseState {
  Vec q;
  Vec p;
};

// (q + t grad H(p), p).
PhaseState flow(const Hamiltonian& H, double t, const PhaseState& s);
// t (p . grad H(p) - H(p)).
double action(const Hamiltonian& H, double t, const Vec& p);

// 1 / (B C); both arguments must be positive.
double validity_time(double B, double C);
// Same formula, +inf when B C = 0.
double horizon(double B, double C);
// Horizon for u0 under H using the Hessian bound on the momenta |p| <= L(u0).
double data_horizon(const Hamiltonian& H, const InitialCondition& u0);

struct ClassicalPoint {
  double value = 0;
  Vec q0;
  Vec p;
};

// Landing point of the characteristic through q for the smooth function g: solves
// q0 + t grad H(grad g(q0)) = q. `guess` seeds Newton in d >= 2.
ClassicalPoint classical_solve_member(const Hamiltonian& H, const SmoothFn& g, double t, const Vec& q,
                                      double pad, const std::optional<Vec>& guess = std::nullopt);

// Classical solution of the Cauchy problem for single-member data, t below the horizon.
ClassicalPoint classical_solve(const Hamiltonian& H, const InitialCondition& u0, double t, const Vec& q,
                               const std::optional<Vec>& guess = std::nullopt);

}  // namespace hjlab
