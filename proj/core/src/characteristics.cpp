#include "hjlab/characteristics.hpp"

#include <cmath>
#include <limits>

#include "hjlab/error.hpp"
#include "hjlab/numerics.hpp"

namespace hjlab {

PhaseState flow(const Hamiltonian& H, double t, const PhaseState& s) {
  return PhaseState{s.q + t * H.grad(s.p), s.p};
}

double action(const Hamiltonian& H, double t, const Vec& p) { return t * (p.dot(H.grad(p)) - H(p)); }

double validity_time(double B, double C) {
  require(std::isfinite(B) && std::isfinite(C) && B > 0 && C > 0, ErrorCode::InvalidArgument,
          "validity_time needs B > 0 and C > 0");
  return 1.0 / (B * C);
}

double horizon(double B, double C) {
  require(B >= 0 && C >= 0, ErrorCode::InvalidArgument, "horizon needs B, C >= 0");
  if (B * C == 0) return std::numeric_limits<double>::infinity();
  return 1.0 / (B * C);
}

double data_horizon(const Hamiltonian& H, const InitialCondition& u0) {
  if (u0.semiconcavity() == 0) return std::numeric_limits<double>::infinity();
  const int n = H.dim() == 1 ? 4001 : 101;
  return horizon(u0.semiconcavity(), local_hessian_bound(H, u0.lipschitz(), n));
}

namespace {

ClassicalPoint finish(const Hamiltonian& H, const SmoothFn& g, double t, const Vec& q0) {
  ClassicalPoint out;
  out.q0 = q0;
  out.p = g.grad(q0);
  out.value = g.value(q0) + action(H, t, out.p);
  return out;
}

bool newton(const Hamiltonian& H, const SmoothFn& g, double t, const Vec& q, Vec& q0) {
  const int d = static_cast<int>(q.size());
  const Mat I = Mat::Identity(d, d);
  auto residual = [&](const Vec& x) { return Vec(x + t * H.grad(g.grad(x)) - q); };
  Vec r = residual(q0);
  double rn = r.norm();
  const double tol = 1e-13 * (1 + q.norm());
  for (int it = 0; it < 60 && rn > tol; ++it) {
    const Mat J = I + t * H.hess(g.grad(q0)) * g.hess(q0);
    const Vec step = J.fullPivLu().solve(r);
    if (!step.allFinite()) return false;
    double lam = 1;
    bool moved = false;
    for (int k = 0; k < 30; ++k, lam *= 0.5) {
      const Vec cand = q0 - lam * step;
      const Vec rc = residual(cand);
      if (rc.norm() < rn) {
        q0 = cand;
        r = rc;
        rn = rc.norm();
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  return rn <= 1e-10;
}

}  // namespace

ClassicalPoint classical_solve_member(const Hamiltonian& H, const SmoothFn& g, double t, const Vec& q,
                                      double pad, const std::optional<Vec>& guess) {
  require(q.size() == H.dim(), ErrorCode::InvalidArgument, "q dimension mismatch");
  if (t == 0) return finish(H, g, t, q);
  if (H.dim() == 1) {
    auto F = [&](double x) { return x + t * H.dh(g.grad(vec1(x))(0)) - q(0); };
    auto dF = [&](double x) {
      const Vec xv = vec1(x);
      return 1 + t * H.d2h(g.grad(xv)(0)) * g.hess(xv)(0, 0);
    };
    const double m = pad + 1e-9 * (1 + std::abs(q(0)));
    double root = 0;
    if (!bracketed_root(F, dF, q(0) - m, q(0) + m, root, 1e-6, 1e-13))
      fail(ErrorCode::NoConvergence, "no characteristic lands at q (outside the padded box?)");
    require(std::abs(F(root)) <= 1e-10, ErrorCode::NoConvergence, "characteristic residual too large");
    return finish(H, g, t, vec1(root));
  }
  Vec q0 = guess ? *guess : Vec(q - t * H.grad(g.grad(q)));
  if (newton(H, g, t, q, q0)) return finish(H, g, t, q0);
  const int n = 4;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Vec start = q;
      start(0) += pad * (2.0 * i / (n - 1) - 1);
      start(1) += pad * (2.0 * j / (n - 1) - 1);
      if (newton(H, g, t, q, start)) return finish(H, g, t, start);
    }
  fail(ErrorCode::NoConvergence, "multi-start Newton failed to land a characteristic at q");
}

ClassicalPoint classical_solve(const Hamiltonian& H, const InitialCondition& u0, double t, const Vec& q,
                               const std::optional<Vec>& guess) {
  require(u0.is_smooth(), ErrorCode::Unsupported, "classical_solve needs single-member data");
  require(u0.dim() == H.dim(), ErrorCode::InvalidArgument, "dimension mismatch between H and u0");
  require(t >= 0, ErrorCode::InvalidArgument, "t must be non-negative");
  require(t < data_horizon(H, u0), ErrorCode::HorizonExceeded, "t beyond the validity horizon 1/BC");
  const Vec M = max_abs_gradient(H, u0.lipschitz() + 1, H.dim() == 1 ? 2001 : 101);
  return classical_solve_member(H, u0.members()[0], t, q, t * M.norm(), guess);
}

}  // namespace hjlab
