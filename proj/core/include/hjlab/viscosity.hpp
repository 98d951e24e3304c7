#pragma once

#include <vector>

#include "hjlab/hamiltonian.hpp"
#include "hjlab/initial_data.hpp"
#include "hjlab/solution_grid.hpp"
#include "hjlab/variational.hpp"
#include "hjlab/wavefront.hpp"

namespace hjlab {

// Lax-Friedrichs scheme on uniform axes. Unset fields are derived: theta from the sampled
// |dH/dp_i| over |p| <= L + 1, steps from the CFL number, padding from t max |grad H|.
struct GridScheme {
  std::vector<std::vector<double>> axes;
  std::vector<double> theta;
  int steps = 0;
  double cfl = 0.9;
  int pad_cells = -1;
};

// Numerical Hamiltonian H((p- + p+)/2) - sum theta_i (p+_i - p-_i)/2 for one cell in 1D.
double lf_update_1d(const Hamiltonian& H, double theta, double dt, double dx, double um, double u, double up);

// Resolved scheme parameters for (H, u0, t, scheme).
struct SchemePlan {
  std::vector<double> dx;
  std::vector<double> theta;
  double dt = 0;
  int steps = 0;
  int pad_cells = 0;
  double cfl = 0;
};
SchemePlan plan_scheme(const Hamiltonian& H, const InitialCondition& u0, double t, const GridScheme& scheme);

// theta_i = 1.1 max |dH/dp_i| over |p| <= radius.
std::vector<double> default_theta(const Hamiltonian& H, double radius);

SolutionGrid viscosity_solve(const Hamiltonian& H, const InitialCondition& u0, double t, const GridScheme& scheme);

// 1D solver with automatic scheme on the given uniform grid.
GridSolver viscosity_grid_solver();

// min_y u0(y) + t H*((q - y)/t) with H* from a dense Legendre transform.
SolutionGrid lax_oleinik(const Hamiltonian& H, const InitialCondition& u0, double t, const std::vector<double>& q);

struct ShockVerdict {
  bool is_viscosity = false;
  double entropy_margin = 0;
};
ShockVerdict shock_viscosity_verdict(const Hamiltonian& H, const ShockPoint& shock);

// dphi/dt + H(dphi/dq).
double subsolution_residual(const Hamiltonian& H, double dt_phi, const Vec& dq_phi);

// Test-function search at the shock of u = min(p1 q - (t-1) H(p1), p2 q - (t-1) H(p2)) at (1, 0):
// quadratic test functions over an 11 x 11 (slope, shift) grid; admissibility of each test
// function is checked on a stencil. Returns false when some admissible test function has a
// positive subsolution residual.
struct BruteForceVerdict {
  bool is_viscosity = true;
  int admissible = 0;
  double max_residual = 0;
};
BruteForceVerdict brute_force_shock_verdict(const Hamiltonian& H, double p1, double p2);

// Conjugation identities with matched discretizations on both sides (1D affine, with n = 0
// for an exact grid correspondence; 2D to 1D reduction).
double viscosity_conjugation_check_affine(const Hamiltonian& H, const InitialCondition& u0,
                                          const AffineTransformParams& T, double t, const std::vector<double>& q);
double viscosity_conjugation_check_reduction(const Hamiltonian& H, const InitialCondition& u0, double p2, double t,
                                             const std::vector<double>& q1, const std::vector<double>& q2);

}  // namespace hjlab
