#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "hjlab/hamiltonian.hpp"
#include "hjlab/initial_data.hpp"
#include "hjlab/solution_grid.hpp"
#include "hjlab/types.hpp"

namespace hjlab {

inline constexpr int kReportVersion = 1;

struct GapStats {
  double sup_abs_gap = 0;
  double min_signed_gap = 0;  // min (R - V)
  double max_signed_gap = 0;  // max (R - V)
  Vec argmin_point;
  Vec argmax_point;
};
// Elementwise statistics of R - V; the grids must share axes.
GapStats compare_solutions(const SolutionGrid& R, const SolutionGrid& V);

struct Witness {
  Vec q;
  double R = 0;
  double V = 0;
  double gap = 0;
  bool strict = false;
  // Distance from (q, V(q)) to the sampled front; 0 when not measured.
  double alpha = 0;
};

struct CounterexampleReport {
  std::string scenario;
  nlohmann::json params = nlohmann::json::object();
  double t = 0;
  nlohmann::json shock = nlohmann::json::object();
  double lax_margin = 0;
  double entropy_margin = 0;
  double sup_gap = 0;
  double min_signed_gap = 0;
  double scheme_tolerance = 0;
  Witness witness;
  std::vector<std::string> artifacts;
  nlohmann::json extra = nlohmann::json::object();

  nlohmann::json to_json() const;
  static CounterexampleReport from_json(const nlohmann::json& j);
};

// sup |V - exact| for H = p^2/2, u0 = -|q| on the same grid spacing and time.
double convex_scheme_tolerance(double dx, double t);

struct Dim1Options {
  double q_lo = -1;
  double q_hi = 1;
  double dx = 1e-3;
  double half_width = 5;
  // Scan box for the entropy pair when H needs normalization.
  double pair_lo = -3;
  double pair_hi = 3;
  // Witness search radius around the shock.
  double witness_radius = 0.1;
  std::string out_dir;
};

// u0 = -|q| + f(q) under the normalized H (H(-1) = H(1) = H'(1) = 0), one report per t.
std::vector<CounterexampleReport> run_counterexample_1d(const Hamiltonian& H, const std::vector<double>& t_list,
                                                        const Dim1Options& opts = {});

// Solution (q_t, p_t) of the shock system for u0 = -|q| + f, seeded from the limit front.
struct ShockSystemSolution {
  double q0 = 0;  // base point on the right piece
  double p = 0;   // fan momentum
  double x = 0;   // shock position t H'(p)
  int iterations = 0;
};
ShockSystemSolution solve_shock_system(const Hamiltonian& H, const InitialCondition& u0, double t);

struct SaddleOptions {
  double q1_lo = -0.6;
  double q1_hi = 0.2;
  double q2_lo = -0.4;
  double q2_hi = 0.4;
  double dx = 2e-3;
  int residual_samples = 50;
  // Band around the parabola for the witness search.
  double witness_band = 0.05;
  bool cross_check = true;
  std::string out_dir;
};

CounterexampleReport run_counterexample_saddle(double a, double b, double t, const SaddleOptions& opts = {});

// ½(a - b)^2 ((a + b) t + q1).
double saddle_residual_formula(double a, double b, double t, double q1);
// Subsolution residual of phi = (u_a + u_b)/2 at the parabola point above q1.
double saddle_residual(double a, double b, double t, double q1);
double saddle_parabola(double a, double b, double t, double q1);

struct SmoothingOptions {
  double dx = 2e-3;
  double v_radius = 0.02;
  // Cloud spacing relative to alpha and window radius relative to the witness gap.
  double spacing_ratio = 1.0 / 12.0;
  double window_ratio = 2.0;
  int band_points = 65;
  // Mollifier quadrature order.
  int order = 17;
};

struct SmoothingRow {
  double eps = 0;
  double sup_u_change = 0;
  double haus_graph = 0;
  double haus_front = 0;
  double sup_v_change = 0;
  double dist_smoothed = 0;
  double bound = 0;
  bool bound_holds = false;
  bool ete_holds = false;
  double ete_slack = 0;
  double contdh_haus = 0;
  double contdh_bound = 0;
  bool conditions_met = false;
  bool conclusion_holds = false;
};

struct SmoothingReport {
  Vec witness;
  double alpha = 0;
  double v_unsmoothed = 0;
  double spacing = 0;
  double window = 0;
  std::vector<SmoothingRow> rows;

  nlohmann::json to_json() const;
};

std::vector<double> default_eps_sweep();

SmoothingReport run_smoothing_argument(const Hamiltonian& H, const CounterexampleReport& scenario,
                                       const std::vector<double>& eps_list, const SmoothingOptions& opts = {});

}  // namespace hjlab
