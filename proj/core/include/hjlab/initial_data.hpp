#pragma once

#include <functional>
#include <memory>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "hjlab/numerics.hpp"
#include "hjlab/types.hpp"

namespace hjlab {

// C2 function on R^d with gradient and Hessian.
struct SmoothFn {
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> grad;
  std::function<Mat(const Vec&)> hess;
};

// One-dimensional C2 profile given by its jet.
using Profile = std::function<Jet(double)>;

// x -> k x^2 / 2 on [-r, r]; beyond, the second derivative is damped to 0 over `width`.
Profile blended_quadratic(double k, double r = 1.0, double width = 0.25);

SmoothFn affine_fn(const Vec& slope, double offset);
// q -> scale * profile(q_axis) + slope.q + offset.
SmoothFn profile_fn(int dim, int axis, Profile profile, double scale, const Vec& slope, double offset);
SmoothFn poly_fn(const std::vector<double>& coeffs);

struct Piece1D {
  int member = 0;
  double a = 0;
  double b = 0;
};

struct Kink1D {
  double q = 0;
  int left_member = 0;
  int right_member = 0;
  double p_left = 0;
  double p_right = 0;
};

struct ClarkeFan {
  Vec q;
  // d = 1: {p_min, p_max}; otherwise hull vertices of the active gradients.
  std::vector<Vec> vertices;

  double lo() const { return vertices.front()(0); }
  double hi() const { return vertices.back()(0); }
  double diameter() const;
};

// Lipschitz, piecewise-C2 initial condition u0 = min_i g_i with constants L (Lipschitz) and
// B (semiconcavity) declared for its domain box.
class InitialCondition {
 public:
  InitialCondition(int dim, std::vector<SmoothFn> members, double lipschitz, double semiconcavity,
                   Box domain, nlohmann::json spec);

  int dim() const { return dim_; }
  double lipschitz() const { return L_; }
  double semiconcavity() const { return B_; }
  const Box& domain() const { return domain_; }
  const nlohmann::json& spec() const { return spec_; }
  const std::vector<SmoothFn>& members() const { return data_->members; }
  int member_count() const { return static_cast<int>(data_->members.size()); }

  double operator()(const Vec& q) const;
  double value1(double q) const { return (*this)(vec1(q)); }
  int argmin(const Vec& q) const;
  std::vector<int> active(const Vec& q, double tol = 1e-10) const;
  // Gradient of the lowest-index active member (a.e. gradient of u0).
  Vec gradient(const Vec& q) const;
  double deriv1(double q) const { return gradient(vec1(q))(0); }

  // One-dimensional piece intervals (maximal intervals of the domain where one member is the
  // minimum) and the kinks between them.
  const std::vector<Piece1D>& pieces_1d() const;
  const std::vector<Kink1D>& kinks_1d() const;

  bool is_smooth() const { return member_count() == 1; }

 private:
  struct Data {
    std::vector<SmoothFn> members;
    std::vector<Piece1D> pieces;
    std::vector<Kink1D> kinks;
  };
  void resolve_1d();

  int dim_;
  double L_;
  double B_;
  Box domain_;
  nlohmann::json spec_;
  std::shared_ptr<Data> data_;
};

ClarkeFan clarke_derivative(const InitialCondition& u0, const Vec& q, double tol = 1e-10);

// Catalog.
InitialCondition abs_kink(double half_width = 5.0);
// -|q| + f(q) with f = q^2/2 on [-1,1] and affine tails after a blend of `width`.
InitialCondition abs_kink_quad(double half_width = 5.0, double width = 0.25);
// min(a (f(q1) - q2), b (f(q1) - q2)) with f = q^2 on [-1,1] and affine tails.
InitialCondition saddle_data(double a, double b, Box domain = box2(-2, 2, -2, 2), double width = 0.25);
// q -> p.q + c.
InitialCondition linear_data(const Vec& slope, double offset, Box domain);
// min over members c_i + g_i.q + k_i |q|^2 / 2.
struct QuadraticMember {
  double c = 0;
  Vec g;
  double k = 0;
};
InitialCondition min_of_quadratics(const std::vector<QuadraticMember>& members, Box domain);
// min over 1D polynomial members.
InitialCondition custom_pieces(const std::vector<std::vector<double>>& members, Box domain);
// Single smooth member with declared constants.
InitialCondition smooth_data(int dim, SmoothFn f, double lipschitz, double semiconcavity, Box domain,
                             nlohmann::json spec = {{"kind", "smooth"}});

// {"kind": ..., "params": {...}}.
InitialCondition initial_condition_from_json(const nlohmann::json& spec);

// Closure operations used by the conjugation identities.
InitialCondition add_constant(const InitialCondition& u0, double c);
InitialCondition add_smooth(const InitialCondition& u0, const SmoothFn& s, double dL, double dB);
// v0(q) = u0(At q) + b.q.
InitialCondition pullback(const InitialCondition& u0, const Mat& At, const Vec& b);
// v0(q1, q2) = u0(q1) + p2.q2 with q2 in R^{p2.size()}.
InitialCondition extend(const InitialCondition& u0, const Vec& p2, double half_width);

// Convolution of u0 with the normalized bump exp(-1/(1-|y|^2)) of radius eps (d = 1, 2),
// by Gauss-Legendre quadrature split at the kinks of u0.
class Mollified {
 public:
  Mollified(const InitialCondition& u0, double eps, int order = 33);
  double eps() const;
  // Any of the outputs may be null.
  void jet(const Vec& q, double* value, Vec* grad, Mat* hess) const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

// Mollification by the normalized bump exp(-1/(1-|y|^2)) of radius eps.
InitialCondition mollify(const InitialCondition& u0, double eps, int order = 33);
// int |grad rho| over the unit ball for the normalized bump (d = 1, 2).
double bump_gradient_l1(int dim);

using PointSet = std::vector<Vec>;

double point_set_distance(const Vec& x, const PointSet& X);
// sup over x in X of d(x, Y).
double directed_hausdorff(const PointSet& X, const PointSet& Y);
double hausdorff_distance(const PointSet& X, const PointSet& Y);
bool enhanced_triangle_check(const Vec& x, const Vec& y, const PointSet& X, const PointSet& Y,
                             double* slack = nullptr);

}  // namespace hjlab
