// Acceptance suite: one PASS/FAIL line per criterion. Arguments select criteria (default: all).
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "hjlab/error.hpp"
#include "hjlab/experiments.hpp"
#include "hjlab/variational.hpp"
#include "hjlab/viscosity.hpp"
#include "hjlab/wavefront.hpp"
#include "oracles.hpp"

using namespace hjlab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x) {
  char b[32];
  std::snprintf(b, sizeof b, "%.3g", x);
  return b;
}

constexpr double kA = 0.75, kB = 1.0, kT = 0.1;

const CounterexampleReport& saddle_report() {
  static std::optional<CounterexampleReport> rep;
  if (!rep) rep = run_counterexample_saddle(kA, kB, kT);
  return *rep;
}

Outcome saddle_closed_form_grid() {
  const std::vector<std::vector<double>> axes{make_axis(-1, -0.16, 2e-3), make_axis(-0.5, 0.5, 2e-3)};
  const SolutionGrid R = variational_solve(saddle(), saddle_data(kA, kB), kT, axes);
  const SolutionGrid E = envelope_solve(saddle(), saddle_family(kA, kB), kT, axes);
  double re = 0, ee = 0, rc = 0;
  for (std::size_t k = 0; k < R.size(); ++k) {
    const Vec q = R.point(k);
    const double ua = kA * ((q(0) + kA * kT) * (q(0) + kA * kT) - q(1));
    const double ub = kB * ((q(0) + kB * kT) * (q(0) + kB * kT) - q(1));
    const double c = std::min(ua, ub);
    re = std::max(re, std::abs(R.values[k] - E.values[k]));
    ee = std::max(ee, std::abs(E.values[k] - c));
    rc = std::max(rc, std::abs(R.values[k] - c));
  }
  return {re <= 1e-6 && ee <= 1e-6 && rc <= 1e-6,
          std::to_string(R.size()) + " cells; |R-E| " + fmt(re) + ", |E-closed| " + fmt(ee) + ", |R-closed| " + fmt(rc)};
}

Outcome saddle_violation() {
  const auto& rep = saddle_report();
  const double lo = -(kA + kB) * kT, hi = -1.5 * kB * kT;
  double ferr = 0, oerr = 0, rmin = 1e300;
  for (int k = 0; k < 50; ++k) {
    const double q1 = lo + (hi - lo) * (k + 1) / 51.0;
    const double r = saddle_residual(kA, kB, kT, q1);
    ferr = std::max(ferr, std::abs(r - 0.5 * (kA - kB) * (kA - kB) * ((kA + kB) * kT + q1)));
    oerr = std::max(oerr, std::abs(r - oracle::saddle_average_residual(kA, kB, kT, q1)));
    rmin = std::min(rmin, r);
  }
  const bool residual_ok = ferr <= 1e-12 && oerr <= 1e-12 && rmin > 0;
  const bool floor_ok = rep.min_signed_gap >= -2e-2;
  const bool witness_ok = rep.witness.gap >= 5e-2;
  std::ostringstream d;
  d << "residual err " << fmt(ferr) << " (hand " << fmt(oerr) << "), min residual " << fmt(rmin) << "; min(R-V) "
    << fmt(rep.min_signed_gap) << "; witness gap " << fmt(rep.witness.gap) << " (needs >= 5e-2) at ("
    << fmt(rep.witness.q(0)) << ", " << fmt(rep.witness.q(1)) << ")";
  return {residual_ok && floor_ok && witness_ok, d.str()};
}

Outcome dim1_counterexample() {
  const Hamiltonian H = cubic_wave();
  const auto reps = run_counterexample_1d(H, {0.1, 0.05, 0.025});
  bool ok = reps.size() == 3;
  std::ostringstream d;
  for (const auto& r : reps) {
    const int sections = r.extra.at("section_count").get<int>();
    const double p = r.shock.at("p_fan").get<double>(), pr = r.shock.at("p_piece").get<double>();
    const LaxVerdict lax = check_lax_condition(H, p, pr);
    const double margin = std::min(lax.left_margin, lax.right_margin);
    const bool row = sections == 1 && r.lax_margin < -1e-6 && margin < -1e-6 && r.min_signed_gap >= -2e-2 &&
                     r.witness.gap > 6e-2;
    ok = ok && row;
    d << "t=" << r.t << ": sections " << sections << ", lax " << fmt(r.lax_margin) << ", min(R-V) "
      << fmt(r.min_signed_gap) << ", witness gap " << fmt(r.witness.gap) << "; ";
  }
  d << "(witness gap needs > 6e-2)";
  return {ok, d.str()};
}

Outcome convex_coincidence() {
  const Hamiltonian H = half_square(1);
  const InitialCondition u0 = abs_kink();
  const double t = 0.5;
  auto err = [&](const SolutionGrid& g) {
    double e = 0;
    for (std::size_t k = 0; k < g.size(); ++k) e = std::max(e, std::abs(g.values[k] + std::abs(g.axes[0][k]) + 0.25));
    return e;
  };
  const char* names[] = {"minimal_section", "lax_oleinik", "viscosity"};
  double e[3][2];
  const double dxs[2] = {1e-2, 5e-3};
  for (int r = 0; r < 2; ++r) {
    const auto q = make_axis(-1, 1, dxs[r]);
    e[0][r] = err(minimal_section(build_front_1d(H, u0, t), q));
    e[1][r] = err(lax_oleinik(H, u0, t, q));
    GridScheme s;
    s.axes = {q};
    e[2][r] = err(viscosity_solve(H, u0, t, s));
  }
  bool ok = true;
  std::ostringstream d;
  for (int i = 0; i < 3; ++i) {
    ok = ok && e[i][0] <= 2e-2 && e[i][1] <= 2e-2;
    // Solvers exact to rounding have nothing to halve.
    const bool exact = e[i][0] <= 1e-10 && e[i][1] <= 1e-10;
    const double ratio = exact ? 2.0 : e[i][0] / e[i][1];
    ok = ok && ratio >= 1.6 && ratio <= 2.4;
    d << names[i] << " " << fmt(e[i][0]) << " -> " << fmt(e[i][1]) << (exact ? " (exact)" : " ratio " + fmt(ratio))
      << "; ";
  }
  return {ok, d.str()};
}

Outcome axioms_and_estimates() {
  std::mt19937_64 rng(5);
  const auto fx = fixtures::axiom_fixtures(rng, 20);
  const auto q = make_axis(-0.5, 0.5, 1e-2);
  const AxiomReport rv = check_operator_axioms(variational_grid_solver(), fx, q, 1e-8);
  const AxiomReport rs = check_operator_axioms(viscosity_grid_solver(), fx, q, 5e-3);
  double worst = 1e300;
  for (int k = 0; k < 10; ++k) {
    const Hamiltonian H1 = fixtures::random_hamiltonian_1d(rng);
    AffineTransformParams T = AffineTransformParams::identity(1);
    T.b(0) = fixtures::uniform(rng, -0.1, 0.1);
    T.n(0) = fixtures::uniform(rng, -0.1, 0.1);
    T.alpha = fixtures::uniform(rng, -0.05, 0.05);
    const Hamiltonian H2 = affine_transform(H1, T);
    const InitialCondition u0 = fixtures::random_data_1d(rng);
    const double t = std::min(fixtures::safe_time(H1, {u0}, 0.5, 0.2), fixtures::safe_time(H2, {u0}, 0.5, 0.2));
    worst = std::min(worst, check_local_estimate(variational_grid_solver(), H1, H2, u0, t, q));
  }
  std::ostringstream d;
  d << "variational mono/add/contr " << fmt(rv.monotonicity_excess) << "/" << fmt(rv.additivity_error) << "/"
    << fmt(rv.contraction_excess) << "; viscosity " << fmt(rs.monotonicity_excess) << "/" << fmt(rs.additivity_error)
    << "/" << fmt(rs.contraction_excess) << "; min local-estimate margin " << fmt(worst);
  return {rv.passed(1e-8) && rs.passed(5e-3) && worst >= -1e-6, d.str()};
}

Outcome conjugation() {
  std::mt19937_64 rng(6);
  const auto q = make_axis(-0.5, 0.5, 1e-2);
  double av = 0, as = 0, rv = 0, rs = 0;
  for (int k = 0; k < 10; ++k) {
    const Hamiltonian H = fixtures::random_hamiltonian_1d(rng);
    const InitialCondition u0 = fixtures::random_data_1d(rng);
    AffineTransformParams T = AffineTransformParams::identity(1);
    T.A(0, 0) = fixtures::uniform(rng, 0.6, 1.4) * (fixtures::uniform(rng, 0, 1) < 0.5 ? -1 : 1);
    T.b(0) = fixtures::uniform(rng, -0.3, 0.3);
    T.n(0) = fixtures::uniform(rng, -0.3, 0.3);
    T.alpha = fixtures::uniform(rng, -0.3, 0.3);
    T.lambda = fixtures::uniform(rng, 0.5, 2);
    const Hamiltonian Hb = affine_transform(H, T);
    const InitialCondition v0 = pullback(u0, T.A.transpose(), T.b);
    const double t =
        std::min(fixtures::safe_time(H, {v0}, 0.5, 0.2), fixtures::safe_time(Hb, {u0}, 0.5, 0.2) / T.lambda);
    av = std::max(av, conjugation_check_affine(variational_grid_solver(), H, u0, T, t, q));
    AffineTransformParams T0 = T;
    T0.n(0) = 0;
    as = std::max(as, viscosity_conjugation_check_affine(H, u0, T0, t, q));
  }
  const GridSolver2D var2 = [](const Hamiltonian& H, const InitialCondition& u, double t,
                               const std::vector<std::vector<double>>& axes) { return variational_solve(H, u, t, axes); };
  for (int k = 0; k < 10; ++k) {
    Hamiltonian H;
    switch (k % 3) {
      case 0:
        H = saddle();
        break;
      case 1:
        H = half_square(2, fixtures::uniform(rng, 0.5, 1.5));
        break;
      default:
        H = custom_poly(2,
                        {{fixtures::uniform(rng, -0.5, 0.5), {2, 0}},
                         {fixtures::uniform(rng, -0.5, 0.5), {1, 1}},
                         {fixtures::uniform(rng, -0.2, 0.2), {3, 0}},
                         {fixtures::uniform(rng, -0.2, 0.2), {1, 2}}},
                        8, box2(-4, 4, -4, 4));
    }
    const InitialCondition u0 = fixtures::random_data_1d(rng);
    const double p2 = fixtures::uniform(rng, -0.8, 0.8);
    const InitialCondition v0 = extend(u0, vec1(p2), 2.2);
    const double t = std::min(fixtures::safe_time(H, {v0}, 0.5, 0.2),
                              fixtures::safe_time(reduce(H, {1}, {p2}), {u0}, 0.5, 0.2));
    const auto q2 = make_axis(-0.2, 0.2, 0.1);
    rv = std::max(rv, conjugation_check_reduction(variational_grid_solver(), var2, H, u0, p2, t, q, q2));
    rs = std::max(rs, viscosity_conjugation_check_reduction(H, u0, p2, t, q, q2));
  }
  std::ostringstream d;
  d << "affine variational " << fmt(av) << ", viscosity " << fmt(as) << "; reduction variational " << fmt(rv)
    << ", viscosity " << fmt(rs);
  return {av <= 1e-6 && as <= 1e-6 && rv <= 1e-6 && rs <= 1e-6, d.str()};
}

Outcome slopes_and_convexity() {
  std::mt19937_64 rng(7);
  int samples = 0, sign_checks = 0, sign_bad = 0;
  double worst = 0;
  while (samples < 1000) {
    const Hamiltonian H = fixtures::random_hamiltonian_1d(rng);
    const InitialCondition u0 = fixtures::random_data_1d(rng);
    const double t = fixtures::safe_time(H, {u0}, 0.5, 0.2);
    const Front f = build_front_1d(H, u0, t);
    for (int k = 0; k < 50 && samples < 1000; ++k) {
      const int b = std::uniform_int_distribution<int>(0, static_cast<int>(f.branches.size()) - 1)(rng);
      const auto& br = f.branches[b];
      const double a = std::max(br.a, -2.0), c = std::min(br.b, 2.0);
      if (!(c > a)) continue;
      const double p = fixtures::uniform(rng, a + 0.01 * (c - a), c - 0.01 * (c - a));
      const double h = 1e-6 * std::max(1.0, std::abs(p));
      const double dx = f.x(b, p + h) - f.x(b, p - h);
      if (std::abs(dx) < 1e-3 * h) continue;
      ++samples;
      worst = std::max(worst, std::abs((f.y(b, p + h) - f.y(b, p - h)) / dx - branch_slope(f, b, p)));
      if (br.source.kind != BranchSource::Kind::Piece) continue;
      const SmoothFn& g = u0.members()[br.member];
      if (std::abs(g.hess(vec1(p))(0, 0)) < 1e-2) continue;
      const double s = 1e-3;
      const double x0 = f.x(b, p - s), x1 = f.x(b, p), x2 = f.x(b, p + s);
      const double y0 = f.y(b, p - s), y1 = f.y(b, p), y2 = f.y(b, p + s);
      const double dd = ((y2 - y1) / (x2 - x1) - (y1 - y0) / (x1 - x0)) / (x2 - x0);
      ++sign_checks;
      if ((dd > 0 ? 1 : -1) != branch_convexity_sign(f, b, p)) ++sign_bad;
    }
  }
  std::ostringstream d;
  d << samples << " slope samples, max |slope - FD| " << fmt(worst) << "; convexity signs " << sign_checks - sign_bad
    << "/" << sign_checks;
  return {worst <= 1e-6 && sign_bad == 0 && sign_checks > 0, d.str()};
}

Outcome smoothing() {
  const auto& rep = saddle_report();
  const SmoothingReport s = run_smoothing_argument(saddle(), rep, default_eps_sweep());
  bool exists = false, ete = true;
  double best_eps = 0;
  for (const auto& r : s.rows) {
    ete = ete && r.ete_holds;
    if (r.conditions_met && r.conclusion_holds && !exists) {
      exists = true;
      best_eps = r.eps;
    }
  }
  std::ostringstream d;
  d << "alpha " << fmt(s.alpha) << "; first eps meeting both conditions and the conclusion: "
    << (exists ? fmt(best_eps) : std::string("none")) << "; triangle inequality on " << s.rows.size() << " rows "
    << (ete ? "holds" : "fails");
  return {exists && ete, d.str()};
}

Outcome entropy_machinery() {
  std::mt19937_64 rng(9);
  int strict = 0, bad = 0;
  for (int k = 0; k < 1000; ++k) {
    const Hamiltonian H = fixtures::random_hamiltonian_1d(rng);
    const double p1 = fixtures::uniform(rng, -2, 2), p2 = fixtures::uniform(rng, -2, 2);
    if (p1 == p2) continue;
    if (!check_entropy_condition(H, p1, p2).strict) continue;
    ++strict;
    if (!check_lax_condition(H, p1, p2).holds) ++bad;
  }
  int agree = 0, visc = 0, skipped = 0;
  for (int k = 0; k < 50;) {
    const Hamiltonian H = fixtures::random_hamiltonian_1d(rng);
    double p1 = fixtures::uniform(rng, -1.5, 1.5), p2 = fixtures::uniform(rng, -1.5, 1.5);
    if (std::abs(p1 - p2) < 0.2) p2 = p1 + (p1 < 0 ? 0.5 : -0.5);
    ShockPoint s;
    s.p1 = std::max(p1, p2);
    s.p2 = std::min(p1, p2);
    const auto verdict = shock_viscosity_verdict(H, s);
    if (!verdict.is_viscosity && verdict.entropy_margin > -1e-2) {
      ++skipped;
      continue;
    }
    ++k;
    const bool v = verdict.is_viscosity;
    visc += v;
    agree += v == brute_force_shock_verdict(H, p1, p2).is_viscosity;
  }
  std::ostringstream d;
  d << strict << " strict-entropy samples, " << bad << " without Lax; brute force agrees on " << agree
    << "/50 shocks (" << visc << " admissible, " << skipped << " borderline draws skipped)";
  return {bad == 0 && strict > 0 && agree == 50 && visc > 0 && visc < 50, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"saddle closed form", saddle_closed_form_grid},
      {"saddle subsolution violation", saddle_violation},
      {"1D counterexample", dim1_counterexample},
      {"convex coincidence", convex_coincidence},
      {"operator axioms and local estimate", axioms_and_estimates},
      {"conjugation identities", conjugation},
      {"branch slopes and convexity", slopes_and_convexity},
      {"smoothing argument", smoothing},
      {"entropy machinery", entropy_machinery},
  };
  std::vector<int> pick;
  for (int i = 1; i < argc; ++i) pick.push_back(std::stoi(argv[i]));
  if (pick.empty())
    for (int i = 1; i <= static_cast<int>(criteria.size()); ++i) pick.push_back(i);
  int failed = 0;
  for (int i : pick) {
    const auto& [name, run] = criteria.at(i - 1);
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << i << " " << name << ": " << o.detail << " [" << fmt(secs)
              << " s]" << std::endl;
  }
  return failed ? 1 : 0;
}
