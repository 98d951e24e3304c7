#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hjlab/hamiltonian.hpp"
#include "hjlab/initial_data.hpp"
#include "hjlab/solution_grid.hpp"
#include "hjlab/wavefront.hpp"

namespace hjlab {

// R^t u0 on a 1D grid (axes = {q}) or a 2D grid (axes = {q1, q2}) as the minimal section.
SolutionGrid variational_solve(const Hamiltonian& H, const InitialCondition& u0, double t,
                               const std::vector<std::vector<double>>& axes, const CloudSpec& cloud = {});

// Family c -> f_c of C2 functions with shared constants.
struct EnvelopeFamily {
  std::function<SmoothFn(double)> member;
  double c_lo = 0;
  double c_hi = 0;
  // Finite family when non-empty; otherwise the interval [c_lo, c_hi].
  std::vector<double> values;
  int dim = 1;
  double lipschitz = 0;
  double semiconcavity = 0;
  // Coarse scan size for interval families; each scan bracket is refined by golden section.
  int n_scan = 33;
};

// Family c -> c (f(q1) - q2), c in [a, b], with the blended f used by saddle_data.
EnvelopeFamily saddle_family(double a, double b, double width = 0.25);

// min over the family of the classical solutions u_c(t, q).
SolutionGrid envelope_solve(const Hamiltonian& H, const EnvelopeFamily& F, double t,
                            const std::vector<std::vector<double>>& axes);
// Same with a plain scan over n uniform parameters (no refinement).
SolutionGrid envelope_solve_scan(const Hamiltonian& H, const EnvelopeFamily& F, double t,
                                 const std::vector<std::vector<double>>& axes, int n);

// min(a((q1+at)^2 - q2), b((q1+bt)^2 - q2)) on -1 <= q1 <= -(3b/2) t.
double saddle_closed_form(double a, double b, double t, double q1, double q2);

// Solver used by the axiom checks: returns values on the 1D grid.
using GridSolver =
    std::function<std::vector<double>(const Hamiltonian&, const InitialCondition&, double, const std::vector<double>&)>;

GridSolver variational_grid_solver();

struct AxiomReport {
  double monotonicity_excess = 0;   // max (R u - R v) over pairs u <= v
  double additivity_error = 0;      // max |R(u + c) - R u - c|
  double contraction_excess = 0;    // max (||Ru - Rv|| - ||u - v||)
  std::vector<std::string> violations;

  bool passed(double tol) const {
    return monotonicity_excess <= tol && additivity_error <= tol && contraction_excess <= tol;
  }
};

struct AxiomFixture {
  Hamiltonian H;
  InitialCondition u;
  InitialCondition v;  // u <= v
  InitialCondition w;  // unrelated pair member for the contraction check
  double c = 0;
  double t = 0;
};

// Runs all three checks for every fixture on the grid. The sup norm ||u - w|| is sampled on a
// grid ten times finer than q_grid, widened by the characteristic speed.
AxiomReport check_operator_axioms(const GridSolver& solver, const std::vector<AxiomFixture>& fixtures,
                                  const std::vector<double>& q_grid, double tol);

// t sup_{|p| <= L} |H1 - H2| - ||R_{H1} u - R_{H2} u|| on the grid.
double check_local_estimate(const GridSolver& solver, const Hamiltonian& H1, const Hamiltonian& H2,
                            const InitialCondition& u0, double t, const std::vector<double>& q_grid);

// Affine conjugation identity R_H v0 (q) = R_Hbar^{lambda t} u0(A^T q + lambda t n) + b.q + alpha lambda t
// for H = the transform's source and v0 = u0(A^T q) + b.q. 1D; returns the max residual.
double conjugation_check_affine(const GridSolver& solver, const Hamiltonian& H, const InitialCondition& u0,
                                const AffineTransformParams& T, double t, const std::vector<double>& q_grid);

// Reduction identity R_H v0(q1, q2) = R_Hbar u0(q1) + p2 q2 with v0 = u0(q1) + p2 q2 (H of dim 2).
using GridSolver2D = std::function<SolutionGrid(const Hamiltonian&, const InitialCondition&, double,
                                                const std::vector<std::vector<double>>&)>;
double conjugation_check_reduction(const GridSolver& solver1, const GridSolver2D& solver2, const Hamiltonian& H,
                                   const InitialCondition& u0, double p2, double t, const std::vector<double>& q1_grid,
                                   const std::vector<double>& q2_grid);

}  // namespace hjlab
