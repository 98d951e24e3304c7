#pragma once

#include <functional>
#include <memory>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "hjlab/types.hpp"

namespace hjlab {

// Polymorphic model behind a Hamiltonian value. Implementations are immutable.
class HamiltonianModel {
 public:
  virtual ~HamiltonianModel() = default;
  virtual int dim() const = 0;
  virtual double value(const Vec& p) const = 0;
  virtual Vec grad(const Vec& p) const = 0;
  virtual Mat hess(const Vec& p) const = 0;
  virtual nlohmann::json spec() const = 0;

  virtual double value1(double p) const { return value(vec1(p)); }
  virtual double d1(double p) const { return grad(vec1(p))(0); }
  virtual double d2(double p) const { return hess(vec1(p))(0, 0); }
  virtual double value2(double a, double b) const { return value(vec({a, b})); }
  virtual void grad2(double a, double b, double& ga, double& gb) const {
    const Vec g = grad(vec({a, b}));
    ga = g(0);
    gb = g(1);
  }
};

// Integrable Hamiltonian p -> H(p) with derivatives and the bound C on the Hessian norm.
class Hamiltonian {
 public:
  Hamiltonian() = default;
  Hamiltonian(std::shared_ptr<const HamiltonianModel> model, double c_bound,
              std::optional<Box> valid_box = std::nullopt);

  int dim() const { return model_->dim(); }
  double c_bound() const { return c_bound_; }
  // Box on which c_bound is certified; empty means all of R^d.
  const std::optional<Box>& valid_box() const { return valid_box_; }

  double operator()(const Vec& p) const { return model_->value(p); }
  Vec grad(const Vec& p) const { return model_->grad(p); }
  Mat hess(const Vec& p) const { return model_->hess(p); }

  double h(double p) const { return model_->value1(p); }
  double dh(double p) const { return model_->d1(p); }
  double d2h(double p) const { return model_->d2(p); }

  double h2(double a, double b) const { return model_->value2(a, b); }
  void grad2(double a, double b, double& ga, double& gb) const { model_->grad2(a, b, ga, gb); }

  nlohmann::json spec() const { return model_->spec(); }
  const std::shared_ptr<const HamiltonianModel>& model() const { return model_; }
  bool valid() const { return static_cast<bool>(model_); }

 private:
  std::shared_ptr<const HamiltonianModel> model_;
  double c_bound_ = 0;
  std::optional<Box> valid_box_;
};

// -(p+1)(1-p)^2 on [-2,2]; outside, H'' is damped to zero over width 1 (affine beyond |p|=3).
Hamiltonian cubic_wave();
// H(p1,p2) = p1 p2.
Hamiltonian saddle();
// H(p) = k |p|^2 / 2 in dimension d.
Hamiltonian half_square(int dim, double k = 1.0);

// Multivariate polynomial: sum of c * prod p_i^{e_i}. c_bound must hold on `box`.
struct PolyTerm {
  double coeff = 0;
  std::vector<int> exps;
};
Hamiltonian custom_poly(int dim, std::vector<PolyTerm> terms, double c_bound,
                        std::optional<Box> box = std::nullopt);
// One-dimensional polynomial sum c_k p^k.
Hamiltonian poly1d(const std::vector<double>& coeffs, double c_bound,
                   std::optional<Box> box = std::nullopt);

Hamiltonian from_functions(int dim, std::function<double(const Vec&)> f,
                           std::function<Vec(const Vec&)> g, std::function<Mat(const Vec&)> h,
                           double c_bound, std::string label = "functions");

// Catalog entry point: name in {saddle, cubic_wave, half_square, custom, custom_poly}.
Hamiltonian make_builtin(const std::string& name, const nlohmann::json& params = {});
// {"family": ..., ...} as in the JSON interface.
Hamiltonian hamiltonian_from_json(const nlohmann::json& spec);

struct AffineTransformParams {
  Mat A;
  Vec b;
  Vec n;
  double alpha = 0;
  double lambda = 1;

  static AffineTransformParams identity(int dim);
};

// Hbar(p) = H(Ap + b)/lambda + p.n + alpha.
Hamiltonian affine_transform(const Hamiltonian& H, const AffineTransformParams& T);
// Single transform equal to applying `first` and then `second`.
AffineTransformParams compose(const AffineTransformParams& first,
                              const AffineTransformParams& second);

// Hbar(p_free) = H(p) with p[indices[k]] = values[k]; indices are 0-based.
Hamiltonian reduce(const Hamiltonian& H, const std::vector<int>& indices,
                   const std::vector<double>& values);

// Sampled sup of the Hessian norm over |p| <= radius, capped by c_bound.
double local_hessian_bound(const Hamiltonian& H, double radius, int n_per_axis = 401);
// Sampled sup of |dH/dp_i| per axis over |p| <= radius.
Vec max_abs_gradient(const Hamiltonian& H, double radius, int n_per_axis = 401);

enum class Convexity { Convex, Concave, Neither, Indeterminate };
const char* to_string(Convexity c);

struct ConvexityVerdict {
  Convexity kind = Convexity::Indeterminate;
  // One indefinite point, or (positive point, negative point) for Neither.
  std::vector<Vec> witnesses;
  double min_eigenvalue = 0;
  double max_eigenvalue = 0;
};
ConvexityVerdict classify_convexity(const Hamiltonian& H, const Box& box, int n_samples,
                                    double tol = 1e-12);

struct EntropyVerdict {
  bool holds = false;
  bool strict = false;
  double margin = 0;
};
EntropyVerdict check_entropy_condition(const Hamiltonian& H, double p1, double p2,
                                       int n_samples = 1001, double tol = 1e-12);

struct LaxVerdict {
  bool holds = false;
  bool strict = false;
  double left_margin = 0;
  double right_margin = 0;
};
LaxVerdict check_lax_condition(const Hamiltonian& H, double p1, double p2, double tol = 1e-12);

struct EntropyPair {
  double p1 = 0;
  double p2 = 0;
  bool strict = false;
  // When set, the pair refers to p -> H(-p).
  bool reflect = false;
};
EntropyPair find_entropy_pair(const Hamiltonian& H, double lo, double hi, int n_scan = 4001,
                              double tol = 1e-8);

}  // namespace hjlab
