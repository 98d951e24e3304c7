#include "hjlab/viscosity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hjlab/error.hpp"
#include "hjlab/numerics.hpp"
#include "hjlab/parallel.hpp"

namespace hjlab {

double lf_update_1d(const Hamiltonian& H, double theta, double dt, double dx, double um, double u, double up) {
  const double pm = (u - um) / dx, pp = (up - u) / dx;
  return u - dt * (H.h(0.5 * (pm + pp)) - 0.5 * theta * (pp - pm));
}

std::vector<double> default_theta(const Hamiltonian& H, double radius) {
  const Vec m = max_abs_gradient(H, radius, H.dim() == 1 ? 2001 : 201);
  std::vector<double> th(H.dim());
  for (int i = 0; i < H.dim(); ++i) th[i] = std::max(1.1 * m(i), 1e-12);
  return th;
}

namespace {

double axis_step(const std::vector<double>& a) {
  require(a.size() >= 3, ErrorCode::InvalidArgument, "scheme axes need at least 3 points");
  const double dx = a[1] - a[0];
  require(dx > 0, ErrorCode::InvalidArgument, "scheme axes must be increasing");
  for (std::size_t k = 1; k < a.size(); ++k)
    require(std::abs(a[k] - a[k - 1] - dx) <= 1e-9 * std::max(1.0, std::abs(dx)) + 1e-12,
            ErrorCode::InvalidArgument, "scheme axes must be uniform");
  return dx;
}

}  // namespace

SchemePlan plan_scheme(const Hamiltonian& H, const InitialCondition& u0, double t, const GridScheme& s) {
  const int d = u0.dim();
  require(H.dim() == d && static_cast<int>(s.axes.size()) == d, ErrorCode::AxisMismatch,
          "scheme axes do not match the dimension");
  require(std::isfinite(t) && t >= 0, ErrorCode::InvalidArgument, "t must be non-negative");
  SchemePlan p;
  for (const auto& a : s.axes) p.dx.push_back(axis_step(a));
  const double radius = u0.lipschitz() + 1;
  const Vec need = max_abs_gradient(H, radius, d == 1 ? 2001 : 201);
  if (s.theta.empty()) {
    p.theta = default_theta(H, radius);
  } else {
    require(static_cast<int>(s.theta.size()) == d, ErrorCode::InvalidArgument, "theta size mismatch");
    for (int i = 0; i < d; ++i)
      require(s.theta[i] >= need(i) * (1 - 1e-9), ErrorCode::CFLViolation,
              "theta below max |dH/dp| on |p| <= L + 1 (scheme not monotone)");
    p.theta = s.theta;
  }
  double rate = 0;
  for (int i = 0; i < d; ++i) rate += p.theta[i] / p.dx[i];
  if (t == 0) {
    p.steps = 0;
  } else if (s.steps > 0) {
    p.steps = s.steps;
  } else {
    require(s.cfl > 0 && s.cfl <= 1, ErrorCode::CFLViolation, "CFL number must be in (0, 1]");
    p.steps = std::max(1, static_cast<int>(std::ceil(t * rate / s.cfl - 1e-12)));
  }
  p.dt = p.steps > 0 ? t / p.steps : 0;
  p.cfl = p.dt * rate;
  require(p.cfl <= 1 + 1e-12, ErrorCode::CFLViolation, "dt * sum(theta / dx) exceeds 1");
  if (s.pad_cells >= 0) {
    p.pad_cells = s.pad_cells;
  } else {
    const double reach = t * need.norm();
    int cells = 0;
    for (int i = 0; i < d; ++i) cells = std::max(cells, static_cast<int>(std::ceil(reach / p.dx[i])) + 10);
    p.pad_cells = cells;
  }
  return p;
}

namespace {

void check_stable(const std::vector<double>& u) {
  for (double v : u)
    require(std::isfinite(v) && std::abs(v) <= 1e6, ErrorCode::UnstableDetected, "scheme values blew up");
}

std::vector<double> run_1d(const Hamiltonian& H, std::vector<double> u, double dx, double theta, double dt,
                           int steps) {
  const std::size_t n = u.size();
  std::vector<double> un(n);
  for (int s = 0; s < steps; ++s) {
    parallel_for(n, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) {
        const double um = i > 0 ? u[i - 1] : 2 * u[0] - u[1];
        const double up = i + 1 < n ? u[i + 1] : 2 * u[n - 1] - u[n - 2];
        un[i] = lf_update_1d(H, theta, dt, dx, um, u[i], up);
      }
    });
    u.swap(un);
    if ((s & 15) == 15 || s + 1 == steps) check_stable(u);
  }
  return u;
}

std::vector<double> run_2d(const Hamiltonian& H, std::vector<double> u, std::size_t n0, std::size_t n1,
                           const std::vector<double>& dx, const std::vector<double>& th, double dt, int steps) {
  std::vector<double> un(u.size());
  const double i0 = 1.0 / dx[0], i1 = 1.0 / dx[1];
  for (int s = 0; s < steps; ++s) {
    parallel_for(n0, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) {
        const double* row = &u[i * n1];
        const double* rm = i > 0 ? &u[(i - 1) * n1] : nullptr;
        const double* rp = i + 1 < n0 ? &u[(i + 1) * n1] : nullptr;
        for (std::size_t j = 0; j < n1; ++j) {
          const double c = row[j];
          const double um0 = rm ? rm[j] : 2 * c - rp[j];
          const double up0 = rp ? rp[j] : 2 * c - rm[j];
          const double um1 = j > 0 ? row[j - 1] : 2 * c - row[j + 1];
          const double up1 = j + 1 < n1 ? row[j + 1] : 2 * c - row[j - 1];
          const double pm0 = (c - um0) * i0, pp0 = (up0 - c) * i0;
          const double pm1 = (c - um1) * i1, pp1 = (up1 - c) * i1;
          const double h = H.h2(0.5 * (pm0 + pp0), 0.5 * (pm1 + pp1));
          un[i * n1 + j] = c - dt * (h - 0.5 * th[0] * (pp0 - pm0) - 0.5 * th[1] * (pp1 - pm1));
        }
      }
    });
    u.swap(un);
    if ((s & 15) == 15 || s + 1 == steps) check_stable(u);
  }
  return u;
}

}  // namespace

SolutionGrid viscosity_solve(const Hamiltonian& H, const InitialCondition& u0, double t, const GridScheme& scheme) {
  const SchemePlan p = plan_scheme(H, u0, t, scheme);
  const int d = u0.dim();
  require(d == 1 || d == 2, ErrorCode::Unsupported, "viscosity_solve supports d = 1, 2");
  SolutionGrid out = make_grid(t, scheme.axes, Provenance::Viscosity);
  const std::size_t pc = static_cast<std::size_t>(p.pad_cells);
  if (d == 1) {
    const auto& a = scheme.axes[0];
    const std::size_t n = a.size() + 2 * pc;
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i)
      u[i] = u0.value1(a[0] + (static_cast<double>(i) - static_cast<double>(pc)) * p.dx[0]);
    u = run_1d(H, std::move(u), p.dx[0], p.theta[0], p.dt, p.steps);
    for (std::size_t i = 0; i < a.size(); ++i) out.values[i] = u[i + pc];
  } else {
    const auto& a0 = scheme.axes[0];
    const auto& a1 = scheme.axes[1];
    const std::size_t n0 = a0.size() + 2 * pc, n1 = a1.size() + 2 * pc;
    std::vector<double> u(n0 * n1);
    parallel_for(n0, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i)
        for (std::size_t j = 0; j < n1; ++j)
          u[i * n1 + j] = u0(vec({a0[0] + (static_cast<double>(i) - static_cast<double>(pc)) * p.dx[0],
                                  a1[0] + (static_cast<double>(j) - static_cast<double>(pc)) * p.dx[1]}));
    });
    u = run_2d(H, std::move(u), n0, n1, p.dx, p.theta, p.dt, p.steps);
    for (std::size_t i = 0; i < a0.size(); ++i)
      for (std::size_t j = 0; j < a1.size(); ++j) out.values[out.index(i, j)] = u[(i + pc) * n1 + j + pc];
  }
  out.meta = {{"dx", p.dx}, {"dt", p.dt}, {"theta", p.theta}, {"cfl", p.cfl},
              {"snapped_t", p.dt * p.steps}, {"steps", p.steps}, {"pad_cells", p.pad_cells}};
  return out;
}

GridSolver viscosity_grid_solver() {
  return [](const Hamiltonian& H, const InitialCondition& u0, double t, const std::vector<double>& q) {
    GridScheme s;
    s.axes = {q};
    return viscosity_solve(H, u0, t, s).values;
  };
}

SolutionGrid lax_oleinik(const Hamiltonian& H, const InitialCondition& u0, double t, const std::vector<double>& q) {
  require(H.dim() == 1 && u0.dim() == 1, ErrorCode::Unsupported, "lax_oleinik is 1D");
  require(std::isfinite(t) && t > 0, ErrorCode::InvalidArgument, "lax_oleinik needs t > 0");
  const double R = u0.lipschitz() + 2;
  const auto verdict = classify_convexity(H, box1(-R, R), 2001);
  require(verdict.kind == Convexity::Convex || verdict.kind == Convexity::Indeterminate, ErrorCode::NotConvex,
          "lax_oleinik needs a convex Hamiltonian on the sampled range");
  const int n = 8193;
  const auto ps = linspace(-R, R, n);
  std::vector<double> vs(n), hs(n);
  for (int k = 0; k < n; ++k) {
    vs[k] = H.dh(ps[k]);
    hs[k] = H.h(ps[k]);
  }
  for (int k = 1; k < n; ++k) vs[k] = std::max(vs[k], vs[k - 1]);
  auto hstar = [&](double v) {
    const auto it = std::upper_bound(vs.begin(), vs.end(), v);
    const int k = static_cast<int>(it - vs.begin());
    if (k == 0) return ps[0] * v - hs[0];
    if (k == n) return ps[n - 1] * v - hs[n - 1];
    double a = ps[k - 1], c = ps[k];
    double p = vs[k] > vs[k - 1] ? a + (c - a) * (v - vs[k - 1]) / (vs[k] - vs[k - 1]) : a;
    for (int it = 0; it < 6; ++it) {
      const double r = H.dh(p) - v;
      if (r > 0) c = p; else a = p;
      const double d = H.d2h(p);
      double next = d > 0 ? p - r / d : 0.5 * (a + c);
      if (!(next > a && next < c)) next = 0.5 * (a + c);
      p = next;
    }
    return std::max({p * v - H.h(p), ps[k - 1] * v - hs[k - 1], ps[k] * v - hs[k]});
  };
  const Box& D = u0.domain();
  SolutionGrid g = make_grid(t, {q}, Provenance::LaxOleinik);
  parallel_for(q.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) {
      const double lo = std::max(D.lo(0), q[k] - t * vs[n - 1] - 1e-9);
      const double hi = std::min(D.hi(0), q[k] - t * vs[0] + 1e-9);
      require(hi > lo, ErrorCode::OutsideDomain, "Lax-Oleinik search interval leaves the data domain");
      auto obj = [&](double y) { return u0.value1(y) + t * hstar((q[k] - y) / t); };
      const int m = 2001;
      const auto ys = linspace(lo, hi, m);
      int best = 0;
      double bv = obj(ys[0]);
      for (int i = 1; i < m; ++i) {
        const double v = obj(ys[i]);
        if (v < bv) bv = v, best = i;
      }
      const double a = ys[std::max(best - 1, 0)], c = ys[std::min(best + 1, m - 1)];
      const double y = golden_min(obj, a, c, 1e-13);
      g.values[k] = std::min(bv, obj(y));
    }
  });
  return g;
}

ShockVerdict shock_viscosity_verdict(const Hamiltonian& H, const ShockPoint& shock) {
  const auto e = check_entropy_condition(H, shock.p1, shock.p2);
  return ShockVerdict{e.holds, e.margin};
}

double subsolution_residual(const Hamiltonian& H, double dt_phi, const Vec& dq_phi) { return dt_phi + H(dq_phi); }

BruteForceVerdict brute_force_shock_verdict(const Hamiltonian& H, double p1, double p2) {
  require(H.dim() == 1, ErrorCode::Unsupported, "brute-force verdict is 1D");
  require(std::abs(p1 - p2) > 1e-12, ErrorCode::InvalidArgument, "shock momenta must differ");
  const double hi = std::max(p1, p2), lo = std::min(p1, p2);
  const double Hhi = H.h(hi), Hlo = H.h(lo);
  auto u = [&](double t, double q) { return std::min(hi * q - (t - 1) * Hhi, lo * q - (t - 1) * Hlo); };
  const double k2 = 0.5;
  const double span = 0.1 * (1 + std::abs(Hhi) + std::abs(Hlo));
  const auto betas = linspace(lo, hi, 11);
  const auto shifts = linspace(-span, span, 11);
  BruteForceVerdict out;
  out.max_residual = -std::numeric_limits<double>::infinity();
  for (double beta : betas) {
    const double mu = (beta - lo) / (hi - lo);
    const double delta0 = -(mu * Hhi + (1 - mu) * Hlo);
    for (double sh : shifts) {
      const double delta = delta0 + sh;
      auto phi = [&](double t, double q) { return beta * q + delta * (t - 1) + k2 * q * q; };
      bool admissible = true;
      for (double r : {1e-3, 1e-4})
        for (int k = 0; k < 1024 && admissible; ++k) {
          const double a = 2 * std::numbers::pi * k / 1024;
          const double t = 1 + r * std::cos(a), q = r * std::sin(a);
          if (u(t, q) - phi(t, q) > 1e-13) admissible = false;
        }
      if (!admissible) continue;
      ++out.admissible;
      const double res = subsolution_residual(H, delta, vec1(beta));
      out.max_residual = std::max(out.max_residual, res);
      if (res > 1e-10) out.is_viscosity = false;
    }
  }
  return out;
}

namespace {

std::vector<double> shifted_axis(const std::vector<double>& a, double scale, double shift) {
  std::vector<double> z(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) z[k] = scale * a[k] + shift;
  if (scale < 0) std::reverse(z.begin(), z.end());
  return z;
}

}  // namespace

double viscosity_conjugation_check_affine(const Hamiltonian& H, const InitialCondition& u0,
                                          const AffineTransformParams& T, double t, const std::vector<double>& q) {
  require(H.dim() == 1 && u0.dim() == 1, ErrorCode::Unsupported, "affine check is 1D");
  require(T.lambda > 0, ErrorCode::InvalidArgument, "the time rescaling needs lambda > 0");
  const Hamiltonian Hbar = affine_transform(H, T);
  const InitialCondition v0 = pullback(u0, T.A.transpose(), T.b);
  const double a = T.A(0, 0);
  const auto z = shifted_axis(q, a, T.lambda * t * T.n(0));
  GridScheme sv, su;
  sv.axes = {q};
  su.axes = {z};
  // One theta for both sides: theta_u = theta_v |a| / lambda.
  const double tv = default_theta(H, v0.lipschitz() + 1)[0];
  const double tu = default_theta(Hbar, u0.lipschitz() + 1)[0];
  const double theta = std::max(tv, tu * T.lambda / std::abs(a));
  sv.theta = {theta};
  su.theta = {theta * std::abs(a) / T.lambda};
  const SchemePlan pv = plan_scheme(H, v0, t, sv);
  const SchemePlan pu = plan_scheme(Hbar, u0, T.lambda * t, su);
  sv.steps = su.steps = std::max(pv.steps, pu.steps);
  sv.pad_cells = su.pad_cells = std::max(pv.pad_cells, pu.pad_cells);
  const auto lhs = viscosity_solve(H, v0, t, sv).values;
  auto rhs = viscosity_solve(Hbar, u0, T.lambda * t, su).values;
  if (a < 0) std::reverse(rhs.begin(), rhs.end());
  double m = 0;
  for (std::size_t k = 0; k < q.size(); ++k)
    m = std::max(m, std::abs(lhs[k] - (rhs[k] + T.b(0) * q[k] + T.alpha * T.lambda * t)));
  return m;
}

double viscosity_conjugation_check_reduction(const Hamiltonian& H, const InitialCondition& u0, double p2, double t,
                                             const std::vector<double>& q1, const std::vector<double>& q2) {
  require(H.dim() == 2 && u0.dim() == 1, ErrorCode::Unsupported, "reduction check takes 2D H and 1D data");
  const Hamiltonian Hbar = reduce(H, {1}, {p2});
  double hw = 0;
  for (double v : q2) hw = std::max(hw, std::abs(v));
  const InitialCondition v0 = extend(u0, vec1(p2), hw + 2.0);
  GridScheme s2, s1;
  s2.axes = {q1, q2};
  s1.axes = {q1};
  const SchemePlan p2plan = plan_scheme(H, v0, t, s2);
  const double th1 = std::max(p2plan.theta[0], default_theta(Hbar, u0.lipschitz() + 1)[0]);
  s2.theta = {th1, p2plan.theta[1]};
  s1.theta = {th1};
  const SchemePlan p2b = plan_scheme(H, v0, t, s2);
  s2.steps = s1.steps = p2b.steps;
  s2.pad_cells = s1.pad_cells = p2b.pad_cells;
  const SolutionGrid lhs = viscosity_solve(H, v0, t, s2);
  const auto rhs = viscosity_solve(Hbar, u0, t, s1).values;
  double m = 0;
  for (std::size_t i = 0; i < q1.size(); ++i)
    for (std::size_t j = 0; j < q2.size(); ++j)
      m = std::max(m, std::abs(lhs.values[lhs.index(i, j)] - (rhs[i] + p2 * q2[j])));
  return m;
}

}  // namespace hjlab
