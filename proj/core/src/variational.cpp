#include "hjlab/variational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hjlab/characteristics.hpp"
#include "hjlab/error.hpp"
#include "hjlab/numerics.hpp"
#include "hjlab/parallel.hpp"

namespace hjlab {

namespace {

SolutionGrid sample_initial(const InitialCondition& u0, const std::vector<std::vector<double>>& axes) {
  SolutionGrid g = make_grid(0, axes, Provenance::Variational);
  for (std::size_t k = 0; k < g.size(); ++k) g.values[k] = u0(g.point(k));
  return g;
}

}  // namespace

SolutionGrid variational_solve(const Hamiltonian& H, const InitialCondition& u0, double t,
                               const std::vector<std::vector<double>>& axes, const CloudSpec& cloud) {
  require(static_cast<int>(axes.size()) == u0.dim(), ErrorCode::AxisMismatch, "axes do not match the data dimension");
  require(std::isfinite(t) && t >= 0, ErrorCode::InvalidArgument, "t must be non-negative");
  require(t < data_horizon(H, u0), ErrorCode::HorizonExceeded, "t beyond the validity horizon 1/BC");
  if (t == 0) return sample_initial(u0, axes);
  if (u0.dim() == 1) return minimal_section(build_front_1d(H, u0, t), axes[0]);
  require(u0.dim() == 2, ErrorCode::Unsupported, "variational_solve supports d = 1, 2");
  return minimal_section_2d(build_front_cloud(H, u0, t, cloud), axes[0], axes[1]);
}

EnvelopeFamily saddle_family(double a, double b, double width) {
  require(b > a && a > 0, ErrorCode::InvalidArgument, "saddle family needs b > a > 0");
  const Profile f = blended_quadratic(2.0, 1.0, width);
  EnvelopeFamily F;
  F.member = [f](double c) { return profile_fn(2, 0, f, c, vec({0, -c}), 0); };
  F.c_lo = a;
  F.c_hi = b;
  F.dim = 2;
  F.lipschitz = b * std::hypot(2.0 + width, 1.0);
  F.semiconcavity = 2.0 * b;
  return F;
}

namespace {

struct EnvelopeContext {
  const Hamiltonian& H;
  const EnvelopeFamily& F;
  double t;
  double pad;
};

EnvelopeContext make_context(const Hamiltonian& H, const EnvelopeFamily& F, double t,
                             const std::vector<std::vector<double>>& axes) {
  require(static_cast<int>(axes.size()) == F.dim && F.dim == H.dim(), ErrorCode::AxisMismatch,
          "axes do not match the family dimension");
  require(F.member != nullptr, ErrorCode::InvalidArgument, "family has no member map");
  require(std::isfinite(t) && t >= 0, ErrorCode::InvalidArgument, "t must be non-negative");
  const int n = H.dim() == 1 ? 4001 : 101;
  require(t < horizon(F.semiconcavity, local_hessian_bound(H, F.lipschitz, n)), ErrorCode::HorizonExceeded,
          "t beyond the shared classical horizon of the family");
  const Vec M = max_abs_gradient(H, F.lipschitz + 1, H.dim() == 1 ? 2001 : 101);
  return EnvelopeContext{H, F, t, t * M.norm()};
}

std::vector<double> scan_params(const EnvelopeFamily& F, int n) {
  if (!F.values.empty()) return F.values;
  if (F.c_hi == F.c_lo) return {F.c_lo};
  return linspace(F.c_lo, F.c_hi, std::max(n, 2));
}

}  // namespace

SolutionGrid envelope_solve(const Hamiltonian& H, const EnvelopeFamily& F, double t,
                            const std::vector<std::vector<double>>& axes) {
  const auto ctx = make_context(H, F, t, axes);
  const auto cs = scan_params(F, F.n_scan);
  std::vector<SmoothFn> members;
  for (double c : cs) members.push_back(F.member(c));
  SolutionGrid g = make_grid(t, axes, Provenance::Envelope);
  parallel_for(g.size(), [&](std::size_t b, std::size_t e) {
    std::vector<double> v(cs.size());
    for (std::size_t k = b; k < e; ++k) {
      const Vec q = g.point(k);
      std::optional<Vec> guess;
      for (std::size_t i = 0; i < cs.size(); ++i) {
        const auto cp = classical_solve_member(ctx.H, members[i], ctx.t, q, ctx.pad, guess);
        v[i] = cp.value;
        guess = cp.q0;
      }
      double best = *std::min_element(v.begin(), v.end());
      if (F.values.empty()) {
        for (std::size_t i = 1; i + 1 < cs.size(); ++i) {
          if (!(v[i] <= v[i - 1] && v[i] <= v[i + 1])) continue;
          std::optional<Vec> g0;
          auto phi = [&](double c) {
            const auto cp = classical_solve_member(ctx.H, F.member(c), ctx.t, q, ctx.pad, g0);
            g0 = cp.q0;
            return cp.value;
          };
          const double c = golden_min(phi, cs[i - 1], cs[i + 1], 1e-10);
          best = std::min(best, phi(c));
        }
      }
      g.values[k] = best;
    }
  });
  return g;
}

SolutionGrid envelope_solve_scan(const Hamiltonian& H, const EnvelopeFamily& F, double t,
                                 const std::vector<std::vector<double>>& axes, int n) {
  const auto ctx = make_context(H, F, t, axes);
  const auto cs = scan_params(F, n);
  SolutionGrid g = make_grid(t, axes, Provenance::Envelope);
  g.values.assign(g.size(), std::numeric_limits<double>::infinity());
  std::vector<std::optional<Vec>> guess(g.size());
  for (double c : cs) {
    const SmoothFn m = F.member(c);
    parallel_for(g.size(), [&](std::size_t b, std::size_t e) {
      for (std::size_t k = b; k < e; ++k) {
        const auto cp = classical_solve_member(ctx.H, m, ctx.t, g.point(k), ctx.pad, guess[k]);
        guess[k] = cp.q0;
        g.values[k] = std::min(g.values[k], cp.value);
      }
    });
  }
  return g;
}

double saddle_closed_form(double a, double b, double t, double q1, double q2) {
  require(b > a && a > 0, ErrorCode::InvalidArgument, "closed form needs b > a > 0");
  require(q1 >= -1 - 1e-12 && q1 <= -1.5 * b * t + 1e-12, ErrorCode::DomainViolation,
          "q1 outside the strip -1 <= q1 <= -(3b/2) t");
  const double ua = a * ((q1 + a * t) * (q1 + a * t) - q2);
  const double ub = b * ((q1 + b * t) * (q1 + b * t) - q2);
  return std::min(ua, ub);
}

GridSolver variational_grid_solver() {
  return [](const Hamiltonian& H, const InitialCondition& u0, double t, const std::vector<double>& q) {
    return variational_solve(H, u0, t, {q}).values;
  };
}

namespace {

double sup_abs(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

}  // namespace

AxiomReport check_operator_axioms(const GridSolver& solver, const std::vector<AxiomFixture>& fixtures,
                                  const std::vector<double>& q, double tol) {
  AxiomReport rep;
  for (std::size_t f = 0; f < fixtures.size(); ++f) {
    const auto& fx = fixtures[f];
    const auto Ru = solver(fx.H, fx.u, fx.t, q);
    const auto Rv = solver(fx.H, fx.v, fx.t, q);
    const auto Rw = solver(fx.H, fx.w, fx.t, q);
    const auto Rc = solver(fx.H, add_constant(fx.u, fx.c), fx.t, q);
    double mono = -std::numeric_limits<double>::infinity(), add = 0;
    for (std::size_t k = 0; k < q.size(); ++k) {
      mono = std::max(mono, Ru[k] - Rv[k]);
      add = std::max(add, std::abs(Rc[k] - Ru[k] - fx.c));
    }
    const double L = std::max(fx.u.lipschitz(), fx.w.lipschitz());
    const double reach = fx.t * max_abs_gradient(fx.H, L + 1, 2001).norm() + 1e-3;
    const double step = (q.back() - q.front()) / (10.0 * static_cast<double>(q.size()));
    double data = 0;
    for (double x : make_axis(q.front() - reach, q.back() + reach, step))
      data = std::max(data, std::abs(fx.u.value1(x) - fx.w.value1(x)));
    const double contr = sup_abs(Ru, Rw) - data;
    rep.monotonicity_excess = std::max(rep.monotonicity_excess, mono);
    rep.additivity_error = std::max(rep.additivity_error, add);
    rep.contraction_excess = std::max(rep.contraction_excess, contr);
    if (mono > tol) rep.violations.push_back("fixture " + std::to_string(f) + ": monotonicity");
    if (add > tol) rep.violations.push_back("fixture " + std::to_string(f) + ": additivity");
    if (contr > tol) rep.violations.push_back("fixture " + std::to_string(f) + ": contraction");
  }
  return rep;
}

double check_local_estimate(const GridSolver& solver, const Hamiltonian& H1, const Hamiltonian& H2,
                            const InitialCondition& u0, double t, const std::vector<double>& q) {
  require(H1.dim() == 1 && H2.dim() == 1, ErrorCode::Unsupported, "local estimate check is 1D");
  const double L = u0.lipschitz();
  double dh = 0;
  for (double p : linspace(-L, L, 4001)) dh = std::max(dh, std::abs(H1.h(p) - H2.h(p)));
  const auto R1 = solver(H1, u0, t, q);
  const auto R2 = solver(H2, u0, t, q);
  return t * dh - sup_abs(R1, R2);
}

double conjugation_check_affine(const GridSolver& solver, const Hamiltonian& H, const InitialCondition& u0,
                                const AffineTransformParams& T, double t, const std::vector<double>& q) {
  require(H.dim() == 1 && u0.dim() == 1, ErrorCode::Unsupported, "affine conjugation check is 1D");
  require(T.lambda > 0, ErrorCode::InvalidArgument, "the time rescaling needs lambda > 0");
  const Hamiltonian Hbar = affine_transform(H, T);
  const InitialCondition v0 = pullback(u0, T.A.transpose(), T.b);
  const auto lhs = solver(H, v0, t, q);
  const double a = T.A(0, 0), shift = T.lambda * t * T.n(0);
  std::vector<double> z(q.size());
  for (std::size_t k = 0; k < q.size(); ++k) z[k] = a * q[k] + shift;
  const bool flip = a < 0;
  if (flip) std::reverse(z.begin(), z.end());
  auto rhs = solver(Hbar, u0, T.lambda * t, z);
  if (flip) std::reverse(rhs.begin(), rhs.end());
  double m = 0;
  for (std::size_t k = 0; k < q.size(); ++k)
    m = std::max(m, std::abs(lhs[k] - (rhs[k] + T.b(0) * q[k] + T.alpha * T.lambda * t)));
  return m;
}

double conjugation_check_reduction(const GridSolver& solver1, const GridSolver2D& solver2, const Hamiltonian& H,
                                   const InitialCondition& u0, double p2, double t, const std::vector<double>& q1,
                                   const std::vector<double>& q2) {
  require(H.dim() == 2 && u0.dim() == 1, ErrorCode::Unsupported, "reduction check takes 2D H and 1D data");
  const Hamiltonian Hbar = reduce(H, {1}, {p2});
  double hw = 0;
  for (double v : q2) hw = std::max(hw, std::abs(v));
  const InitialCondition v0 = extend(u0, vec1(p2), hw + 2.0);
  const SolutionGrid lhs = solver2(H, v0, t, {q1, q2});
  const auto rhs = solver1(Hbar, u0, t, q1);
  double m = 0;
  for (std::size_t i = 0; i < q1.size(); ++i)
    for (std::size_t j = 0; j < q2.size(); ++j)
      m = std::max(m, std::abs(lhs.values[lhs.index(i, j)] - (rhs[i] + p2 * q2[j])));
  return m;
}

}  // namespace hjlab
