#include "hjlab/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hjlab/error.hpp"
#include "hjlab/numerics.hpp"

namespace hjlab {

using nlohmann::json;

Hamiltonian::Hamiltonian(std::shared_ptr<const HamiltonianModel> model, double c_bound,
                         std::optional<Box> valid_box)
    : model_(std::move(model)), c_bound_(c_bound), valid_box_(std::move(valid_box)) {
  require(static_cast<bool>(model_), ErrorCode::InvalidArgument, "null Hamiltonian model");
  require(std::isfinite(c_bound_) && c_bound_ > 0, ErrorCode::NonFinite,
          "c_bound must be finite and positive");
}

namespace {

class CubicWave final : public HamiltonianModel {
 public:
  int dim() const override { return 1; }
  double value(const Vec& p) const override { return jet(p(0)).v; }
  Vec grad(const Vec& p) const override { return vec1(jet(p(0)).d1); }
  Mat hess(const Vec& p) const override { return mat1(jet(p(0)).d2); }
  double value1(double p) const override { return jet(p).v; }
  double d1(double p) const override { return jet(p).d1; }
  double d2(double p) const override { return jet(p).d2; }
  json spec() const override { return {{"family", "cubic_wave"}}; }

  static Jet core(double p) {
    return Jet{-(p + 1) * (1 - p) * (1 - p), (1 - p) * (3 * p + 1), 2 - 6 * p};
  }
  static Jet jet(double p) {
    if (p > 2) return damped_tail(core(2), p - 2, 1.0, +1);
    if (p < -2) return damped_tail(core(-2), -2 - p, 1.0, -1);
    return core(p);
  }
};

class Saddle final : public HamiltonianModel {
 public:
  int dim() const override { return 2; }
  double value(const Vec& p) const override { return p(0) * p(1); }
  Vec grad(const Vec& p) const override { return vec({p(1), p(0)}); }
  Mat hess(const Vec&) const override {
    Mat m(2, 2);
    m << 0, 1, 1, 0;
    return m;
  }
  double value2(double a, double b) const override { return a * b; }
  void grad2(double a, double b, double& ga, double& gb) const override {
    ga = b;
    gb = a;
  }
  json spec() const override { return {{"family", "saddle"}}; }
};

class HalfSquare final : public HamiltonianModel {
 public:
  HalfSquare(int d, double k) : d_(d), k_(k) {}
  int dim() const override { return d_; }
  double value(const Vec& p) const override { return 0.5 * k_ * p.squaredNorm(); }
  Vec grad(const Vec& p) const override { return k_ * p; }
  Mat hess(const Vec&) const override { return k_ * Mat::Identity(d_, d_); }
  double value1(double p) const override { return 0.5 * k_ * p * p; }
  double d1(double p) const override { return k_ * p; }
  double d2(double) const override { return k_; }
  double value2(double a, double b) const override { return 0.5 * k_ * (a * a + b * b); }
  void grad2(double a, double b, double& ga, double& gb) const override {
    ga = k_ * a;
    gb = k_ * b;
  }
  json spec() const override { return {{"family", "half_square"}, {"dim", d_}, {"k", k_}}; }

 private:
  int d_;
  double k_;
};

double ipow(double x, int e) {
  double r = 1;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

class Poly final : public HamiltonianModel {
 public:
  Poly(int d, std::vector<PolyTerm> terms, double c_bound, std::optional<Box> box)
      : d_(d), terms_(std::move(terms)), c_bound_(c_bound), box_(std::move(box)) {}
  int dim() const override { return d_; }
  double value(const Vec& p) const override {
    double s = 0;
    for (const auto& t : terms_) {
      double m = t.coeff;
      for (int i = 0; i < d_; ++i) m *= ipow(p(i), t.exps[i]);
      s += m;
    }
    return s;
  }
  Vec grad(const Vec& p) const override {
    Vec g = Vec::Zero(d_);
    for (const auto& t : terms_) {
      for (int k = 0; k < d_; ++k) {
        if (t.exps[k] == 0) continue;
        double m = t.coeff * t.exps[k];
        for (int i = 0; i < d_; ++i) m *= ipow(p(i), i == k ? t.exps[i] - 1 : t.exps[i]);
        g(k) += m;
      }
    }
    return g;
  }
  Mat hess(const Vec& p) const override {
    Mat h = Mat::Zero(d_, d_);
    for (const auto& t : terms_) {
      for (int k = 0; k < d_; ++k) {
        for (int l = k; l < d_; ++l) {
          std::vector<int> e = t.exps;
          double m = t.coeff;
          m *= e[k];
          e[k] -= 1;
          if (m == 0) continue;
          m *= e[l];
          e[l] -= 1;
          if (m == 0) continue;
          for (int i = 0; i < d_; ++i) m *= ipow(p(i), e[i]);
          h(k, l) += m;
          if (l != k) h(l, k) += m;
        }
      }
    }
    return h;
  }
  double value1(double p) const override {
    double s = 0;
    for (const auto& t : terms_) s += t.coeff * ipow(p, t.exps[0]);
    return s;
  }
  double d1(double p) const override {
    double s = 0;
    for (const auto& t : terms_)
      if (t.exps[0] > 0) s += t.coeff * t.exps[0] * ipow(p, t.exps[0] - 1);
    return s;
  }
  double d2(double p) const override {
    double s = 0;
    for (const auto& t : terms_)
      if (t.exps[0] > 1) s += t.coeff * t.exps[0] * (t.exps[0] - 1) * ipow(p, t.exps[0] - 2);
    return s;
  }
  json spec() const override {
    json coeffs = json::array();
    for (const auto& t : terms_) {
      json row = json::array({t.coeff});
      for (int e : t.exps) row.push_back(e);
      coeffs.push_back(row);
    }
    json j = {{"family", "custom_poly"}, {"dim", d_}, {"coeffs", coeffs}, {"c_bound", c_bound_}};
    if (box_) {
      json lo = json::array(), hi = json::array();
      for (int i = 0; i < d_; ++i) {
        lo.push_back(box_->lo(i));
        hi.push_back(box_->hi(i));
      }
      j["box"] = {lo, hi};
    }
    return j;
  }

 private:
  int d_;
  std::vector<PolyTerm> terms_;
  double c_bound_;
  std::optional<Box> box_;
};

class Functions final : public HamiltonianModel {
 public:
  Functions(int d, std::function<double(const Vec&)> f, std::function<Vec(const Vec&)> g,
            std::function<Mat(const Vec&)> h, std::string label)
      : d_(d), f_(std::move(f)), g_(std::move(g)), h_(std::move(h)), label_(std::move(label)) {}
  int dim() const override { return d_; }
  double value(const Vec& p) const override { return f_(p); }
  Vec grad(const Vec& p) const override { return g_(p); }
  Mat hess(const Vec& p) const override { return h_(p); }
  json spec() const override { return {{"family", "functions"}, {"label", label_}, {"dim", d_}}; }

 private:
  int d_;
  std::function<double(const Vec&)> f_;
  std::function<Vec(const Vec&)> g_;
  std::function<Mat(const Vec&)> h_;
  std::string label_;
};

json vec_json(const Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json mat_json(const Mat& m) {
  json a = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    a.push_back(row);
  }
  return a;
}

class Affine final : public HamiltonianModel {
 public:
  Affine(Hamiltonian base, AffineTransformParams t) : base_(std::move(base)), t_(std::move(t)) {
    inv_lambda_ = 1.0 / t_.lambda;
  }
  int dim() const override { return static_cast<int>(t_.A.cols()); }
  double value(const Vec& p) const override {
    return base_(t_.A * p + t_.b) * inv_lambda_ + p.dot(t_.n) + t_.alpha;
  }
  Vec grad(const Vec& p) const override {
    return t_.A.transpose() * base_.grad(t_.A * p + t_.b) * inv_lambda_ + t_.n;
  }
  Mat hess(const Vec& p) const override {
    return t_.A.transpose() * base_.hess(t_.A * p + t_.b) * t_.A * inv_lambda_;
  }
  double value1(double p) const override {
    return base_.h(t_.A(0, 0) * p + t_.b(0)) * inv_lambda_ + p * t_.n(0) + t_.alpha;
  }
  double d1(double p) const override {
    return t_.A(0, 0) * base_.dh(t_.A(0, 0) * p + t_.b(0)) * inv_lambda_ + t_.n(0);
  }
  double d2(double p) const override {
    const double a = t_.A(0, 0);
    return a * a * base_.d2h(a * p + t_.b(0)) * inv_lambda_;
  }
  json spec() const override {
    return {{"family", "affine"}, {"base", base_.spec()}, {"A", mat_json(t_.A)},
            {"b", vec_json(t_.b)}, {"n", vec_json(t_.n)}, {"alpha", t_.alpha},
            {"lambda", t_.lambda}};
  }

 private:
  Hamiltonian base_;
  AffineTransformParams t_;
  double inv_lambda_;
};

class Reduced final : public HamiltonianModel {
 public:
  Reduced(Hamiltonian base, std::vector<int> idx, std::vector<double> vals)
      : base_(std::move(base)), idx_(std::move(idx)), vals_(std::move(vals)) {
    const int d = base_.dim();
    std::vector<bool> fixed(d, false);
    for (int i : idx_) fixed[i] = true;
    for (int i = 0; i < d; ++i)
      if (!fixed[i]) free_.push_back(i);
  }
  int dim() const override { return static_cast<int>(free_.size()); }
  double value(const Vec& p) const override { return base_(lift(p)); }
  Vec grad(const Vec& p) const override {
    const Vec g = base_.grad(lift(p));
    Vec out(dim());
    for (int k = 0; k < dim(); ++k) out(k) = g(free_[k]);
    return out;
  }
  Mat hess(const Vec& p) const override {
    const Mat h = base_.hess(lift(p));
    Mat out(dim(), dim());
    for (int k = 0; k < dim(); ++k)
      for (int l = 0; l < dim(); ++l) out(k, l) = h(free_[k], free_[l]);
    return out;
  }
  json spec() const override {
    return {{"family", "reduced"}, {"base", base_.spec()}, {"indices", idx_}, {"values", vals_}};
  }

 private:
  Vec lift(const Vec& p) const {
    Vec full(base_.dim());
    for (size_t k = 0; k < idx_.size(); ++k) full(idx_[k]) = vals_[k];
    for (size_t k = 0; k < free_.size(); ++k) full(free_[k]) = p(static_cast<int>(k));
    return full;
  }

  Hamiltonian base_;
  std::vector<int> idx_;
  std::vector<double> vals_;
  std::vector<int> free_;
};

bool all_finite(const json& j) {
  if (j.is_number()) return std::isfinite(j.get<double>());
  if (j.is_array() || j.is_object()) {
    for (const auto& x : j)
      if (!all_finite(x)) return false;
  }
  return true;
}

std::optional<Box> box_from_json(const json& j, int d) {
  if (!j.is_array() || j.size() != 2) return std::nullopt;
  Box b{Vec(d), Vec(d)};
  for (int i = 0; i < d; ++i) {
    b.lo(i) = j[0].at(i).get<double>();
    b.hi(i) = j[1].at(i).get<double>();
  }
  return b;
}

}  // namespace

Hamiltonian cubic_wave() { return Hamiltonian(std::make_shared<CubicWave>(), 14.0); }

Hamiltonian saddle() { return Hamiltonian(std::make_shared<Saddle>(), 1.0); }

Hamiltonian half_square(int dim, double k) {
  require(dim >= 1 && dim <= kMaxDim, ErrorCode::InvalidArgument, "half_square dim out of range");
  require(std::isfinite(k) && k != 0, ErrorCode::NonFinite, "half_square k must be finite, nonzero");
  return Hamiltonian(std::make_shared<HalfSquare>(dim, k), std::abs(k));
}

Hamiltonian custom_poly(int dim, std::vector<PolyTerm> terms, double c_bound,
                        std::optional<Box> box) {
  require(dim >= 1 && dim <= kMaxDim, ErrorCode::InvalidArgument, "custom_poly dim out of range");
  for (const auto& t : terms) {
    require(static_cast<int>(t.exps.size()) == dim, ErrorCode::InvalidArgument,
            "custom_poly exponent count does not match dim");
    require(std::isfinite(t.coeff), ErrorCode::NonFinite, "custom_poly coefficient not finite");
    for (int e : t.exps)
      require(e >= 0, ErrorCode::InvalidArgument, "custom_poly exponent negative");
  }
  return Hamiltonian(std::make_shared<Poly>(dim, std::move(terms), c_bound, box), c_bound, box);
}

Hamiltonian poly1d(const std::vector<double>& coeffs, double c_bound, std::optional<Box> box) {
  std::vector<PolyTerm> terms;
  for (size_t k = 0; k < coeffs.size(); ++k)
    if (coeffs[k] != 0) terms.push_back(PolyTerm{coeffs[k], {static_cast<int>(k)}});
  return custom_poly(1, std::move(terms), c_bound, std::move(box));
}

Hamiltonian from_functions(int dim, std::function<double(const Vec&)> f,
                           std::function<Vec(const Vec&)> g, std::function<Mat(const Vec&)> h,
                           double c_bound, std::string label) {
  return Hamiltonian(
      std::make_shared<Functions>(dim, std::move(f), std::move(g), std::move(h), std::move(label)),
      c_bound);
}

Hamiltonian make_builtin(const std::string& name, const json& params) {
  require(all_finite(params), ErrorCode::NonFinite, "non-finite Hamiltonian parameter");
  if (name == "saddle") return saddle();
  if (name == "cubic_wave") return cubic_wave();
  if (name == "half_square") {
    const int d = params.is_object() ? params.value("dim", 1) : 1;
    const double k = params.is_object() ? params.value("k", 1.0) : 1.0;
    return half_square(d, k);
  }
  if (name == "custom" || name == "custom_poly") {
    require(params.is_object() && params.contains("coeffs") && params.contains("c_bound"),
            ErrorCode::InvalidArgument, "custom_poly needs coeffs and c_bound");
    const auto& coeffs = params.at("coeffs");
    int d = params.value("dim", 0);
    std::vector<PolyTerm> terms;
    if (d == 0 && !coeffs.empty() && coeffs[0].is_number()) d = 1;
    if (coeffs.size() > 0 && coeffs[0].is_number()) {
      for (size_t k = 0; k < coeffs.size(); ++k)
        terms.push_back(PolyTerm{coeffs[k].get<double>(), {static_cast<int>(k)}});
    } else {
      for (const auto& row : coeffs) {
        require(row.is_array() && !row.empty(), ErrorCode::ParseError, "bad custom_poly term");
        if (d == 0) d = static_cast<int>(row.size()) - 1;
        PolyTerm t{row[0].get<double>(), {}};
        for (size_t i = 1; i < row.size(); ++i) t.exps.push_back(row[i].get<int>());
        terms.push_back(std::move(t));
      }
    }
    std::optional<Box> box;
    if (params.contains("box")) box = box_from_json(params.at("box"), d);
    return custom_poly(d, std::move(terms), params.at("c_bound").get<double>(), box);
  }
  fail(ErrorCode::UnknownName, "unknown Hamiltonian family '" + name + "'");
}

Hamiltonian hamiltonian_from_json(const json& spec) {
  require(spec.is_object() && spec.contains("family"), ErrorCode::ParseError,
          "Hamiltonian spec needs a family");
  const std::string fam = spec.at("family").get<std::string>();
  if (fam == "affine" || fam == "reduced") {
    const Hamiltonian base = hamiltonian_from_json(spec.at("base"));
    if (fam == "reduced")
      return reduce(base, spec.at("indices").get<std::vector<int>>(),
                    spec.at("values").get<std::vector<double>>());
    AffineTransformParams t;
    const auto& A = spec.at("A");
    const int d = static_cast<int>(A.size());
    t.A = Mat(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) t.A(i, j) = A[i][j].get<double>();
    t.b = Vec(d);
    t.n = Vec(d);
    for (int i = 0; i < d; ++i) {
      t.b(i) = spec.at("b")[i].get<double>();
      t.n(i) = spec.at("n")[i].get<double>();
    }
    t.alpha = spec.at("alpha").get<double>();
    t.lambda = spec.at("lambda").get<double>();
    return affine_transform(base, t);
  }
  return make_builtin(fam, spec);
}

AffineTransformParams AffineTransformParams::identity(int dim) {
  AffineTransformParams t;
  t.A = Mat::Identity(dim, dim);
  t.b = Vec::Zero(dim);
  t.n = Vec::Zero(dim);
  t.alpha = 0;
  t.lambda = 1;
  return t;
}

Hamiltonian affine_transform(const Hamiltonian& H, const AffineTransformParams& T) {
  const int d = H.dim();
  require(T.A.rows() == d && T.A.cols() == d && T.b.size() == d && T.n.size() == d,
          ErrorCode::InvalidArgument, "affine transform dimensions do not match H");
  require(T.lambda != 0 && std::isfinite(T.lambda), ErrorCode::InvalidArgument, "lambda = 0");
  const double det = T.A.determinant();
  require(std::isfinite(det) && std::abs(det) > 1e-14, ErrorCode::SingularMatrix, "A is singular");
  const double nA = op_norm(T.A);
  return Hamiltonian(std::make_shared<Affine>(H, T), H.c_bound() * nA * nA / std::abs(T.lambda));
}

AffineTransformParams compose(const AffineTransformParams& t1, const AffineTransformParams& t2) {
  AffineTransformParams t;
  t.A = t1.A * t2.A;
  t.b = t1.A * t2.b + t1.b;
  t.lambda = t1.lambda * t2.lambda;
  t.n = t2.A.transpose() * t1.n / t2.lambda + t2.n;
  t.alpha = t2.b.dot(t1.n) / t2.lambda + t1.alpha / t2.lambda + t2.alpha;
  return t;
}

Hamiltonian reduce(const Hamiltonian& H, const std::vector<int>& indices,
                   const std::vector<double>& values) {
  const int d = H.dim();
  require(indices.size() == values.size(), ErrorCode::InvalidArgument,
          "reduce: indices and values differ in length");
  require(static_cast<int>(indices.size()) < d, ErrorCode::InvalidArgument,
          "reduce: at least one free coordinate required");
  std::vector<bool> seen(d, false);
  for (int i : indices) {
    require(i >= 0 && i < d, ErrorCode::IndexOutOfRange, "reduce: index out of range");
    require(!seen[i], ErrorCode::InvalidArgument, "reduce: repeated index");
    seen[i] = true;
  }
  return Hamiltonian(std::make_shared<Reduced>(H, indices, values), H.c_bound());
}

namespace {

// Calls fn(p) on a grid of the ball |p| <= r.
template <class Fn>
void for_ball(int d, double r, int n_per_axis, Fn&& fn) {
  if (d == 1) {
    for (double x : linspace(-r, r, n_per_axis)) fn(vec1(x));
    return;
  }
  int n = n_per_axis;
  while (d > 2 && std::pow(static_cast<double>(n), d) > 2e5) n = std::max(3, n / 2);
  std::vector<int> idx(d, 0);
  const auto axis = linspace(-r, r, n);
  while (true) {
    Vec p(d);
    for (int i = 0; i < d; ++i) p(i) = axis[idx[i]];
    if (p.norm() <= r * (1 + 1e-12)) fn(p);
    int k = 0;
    while (k < d && ++idx[k] == n) idx[k++] = 0;
    if (k == d) break;
  }
}

}  // namespace

double local_hessian_bound(const Hamiltonian& H, double radius, int n_per_axis) {
  double m = 0;
  if (H.dim() == 1) {
    for (double x : linspace(-radius, radius, std::max(n_per_axis, 2001)))
      m = std::max(m, std::abs(H.d2h(x)));
  } else {
    for_ball(H.dim(), radius, n_per_axis, [&](const Vec& p) { m = std::max(m, sym_norm(H.hess(p))); });
  }
  return std::min(m, H.c_bound());
}

Vec max_abs_gradient(const Hamiltonian& H, double radius, int n_per_axis) {
  Vec m = Vec::Zero(H.dim());
  if (H.dim() == 1) {
    for (double x : linspace(-radius, radius, std::max(n_per_axis, 2001)))
      m(0) = std::max(m(0), std::abs(H.dh(x)));
    return m;
  }
  for_ball(H.dim(), radius, n_per_axis, [&](const Vec& p) { m = m.cwiseMax(H.grad(p).cwiseAbs()); });
  return m;
}

const char* to_string(Convexity c) {
  switch (c) {
    case Convexity::Convex: return "Convex";
    case Convexity::Concave: return "Concave";
    case Convexity::Neither: return "Neither";
    case Convexity::Indeterminate: return "Indeterminate";
  }
  return "?";
}

ConvexityVerdict classify_convexity(const Hamiltonian& H, const Box& box, int n_samples,
                                    double tol) {
  require(!box.empty() && box.dim() == H.dim(), ErrorCode::EmptyBox, "empty or mismatched box");
  require(n_samples >= 2, ErrorCode::InvalidArgument, "n_samples must be >= 2");
  const int d = H.dim();
  const Vec center = 0.5 * (box.lo + box.hi);
  std::vector<int> idx(d, 0);
  ConvexityVerdict v;
  v.min_eigenvalue = std::numeric_limits<double>::infinity();
  v.max_eigenvalue = -std::numeric_limits<double>::infinity();
  double best_indef = std::numeric_limits<double>::infinity();
  double best_pos = best_indef, best_neg = best_indef;
  Vec w_indef, w_pos, w_neg;
  while (true) {
    Vec p(d);
    for (int i = 0; i < d; ++i)
      p(i) = box.lo(i) + (box.hi(i) - box.lo(i)) * idx[i] / (n_samples - 1);
    double lo, hi;
    const Mat h = H.hess(p);
    if (d == 1) {
      lo = hi = h(0, 0);
    } else {
      Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
      lo = es.eigenvalues().minCoeff();
      hi = es.eigenvalues().maxCoeff();
    }
    v.min_eigenvalue = std::min(v.min_eigenvalue, lo);
    v.max_eigenvalue = std::max(v.max_eigenvalue, hi);
    const double dist = (p - center).norm();
    if (lo < -tol && hi > tol && dist < best_indef) {
      best_indef = dist;
      w_indef = p;
    }
    if (hi > tol && dist < best_pos) {
      best_pos = dist;
      w_pos = p;
    }
    if (lo < -tol && dist < best_neg) {
      best_neg = dist;
      w_neg = p;
    }
    int k = 0;
    while (k < d && ++idx[k] == n_samples) idx[k++] = 0;
    if (k == d) break;
  }
  if (w_indef.size() > 0) {
    v.kind = Convexity::Neither;
    v.witnesses = {w_indef};
  } else if (w_pos.size() > 0 && w_neg.size() > 0) {
    v.kind = Convexity::Neither;
    v.witnesses = {w_pos, w_neg};
  } else if (w_pos.size() > 0) {
    v.kind = Convexity::Convex;
  } else if (w_neg.size() > 0) {
    v.kind = Convexity::Concave;
  } else {
    v.kind = Convexity::Indeterminate;
  }
  return v;
}

EntropyVerdict check_entropy_condition(const Hamiltonian& H, double p1, double p2, int n_samples,
                                       double tol) {
  require(p1 != p2, ErrorCode::InvalidArgument, "entropy check needs p1 != p2");
  require(n_samples >= 3, ErrorCode::InvalidArgument, "entropy check needs n_samples >= 3");
  const double a = std::min(p1, p2), b = std::max(p1, p2);
  const double ha = H.h(a), hb = H.h(b);
  double worst = -std::numeric_limits<double>::infinity();
  for (int k = 1; k <= n_samples; ++k) {
    const double mu = static_cast<double>(k) / (n_samples + 1);
    const double p = a + mu * (b - a);
    const double chord = ha + mu * (hb - ha);
    worst = std::max(worst, H.h(p) - chord);
  }
  EntropyVerdict v;
  v.holds = worst <= tol;
  v.strict = worst < -tol;
  v.margin = -worst;
  return v;
}

LaxVerdict check_lax_condition(const Hamiltonian& H, double p1, double p2, double tol) {
  require(p1 != p2, ErrorCode::InvalidArgument, "Lax check needs p1 != p2");
  const double a = std::min(p1, p2), b = std::max(p1, p2);
  const double dH = H.h(b) - H.h(a);
  LaxVerdict v;
  v.left_margin = dH - H.dh(a) * (b - a);
  v.right_margin = H.dh(b) * (b - a) - dH;
  v.holds = v.left_margin >= -tol && v.right_margin >= -tol;
  v.strict = v.left_margin > tol && v.right_margin > tol;
  return v;
}

namespace {

bool tec_conditions(const Hamiltonian& H, double p1, double p2, double tol) {
  if (!(p1 < p2)) return false;
  const double chord = (H.h(p2) - H.h(p1)) / (p2 - p1);
  if (std::abs(H.dh(p2) - chord) > tol) return false;
  if (!(H.dh(p1) < H.dh(p2))) return false;
  if (!(H.d2h(p2) < -1e-12)) return false;
  return check_entropy_condition(H, p1, p2).strict;
}

// Maximizer of the chord slope from p1 over (p1, pmax], polished at a critical point.
double max_slope_point(const Hamiltonian& H, double p1, double pmax, int n) {
  const double h1 = H.h(p1);
  auto slope = [&](double p) { return (H.h(p) - h1) / (p - p1); };
  const auto grid = linspace(p1, pmax, n);
  int best = 1;
  double best_s = slope(grid[1]);
  for (int k = 2; k < n; ++k) {
    const double s = slope(grid[k]);
    if (s > best_s) {
      best_s = s;
      best = k;
    }
  }
  if (best == n - 1) return grid[best];
  // Critical points of the slope solve H'(p)(p - p1) - (H(p) - h1) = 0.
  auto phi = [&](double p) { return H.dh(p) * (p - p1) - (H.h(p) - h1); };
  auto dphi = [&](double p) { return H.d2h(p) * (p - p1); };
  double root = grid[best];
  const double a = grid[std::max(best - 1, 1)], b = grid[std::min(best + 1, n - 1)];
  if (bracketed_root(phi, dphi, a, b, root, 1e-9, 1e-15)) return root;
  return grid[best];
}

// Largest p < p2 where the graph meets the tangent at p2; NaN when none in [lo, p2).
double last_tangent_hit(const Hamiltonian& H, double lo, double p2, int n) {
  const double h2 = H.h(p2), s2 = H.dh(p2);
  auto g = [&](double p) { return H.h(p) - h2 - s2 * (p - p2); };
  const auto grid = linspace(lo, p2, n);
  for (int k = n - 2; k >= 0; --k) {
    if (g(grid[k]) >= 0) {
      if (g(grid[k]) == 0) return grid[k];
      return bisect(g, grid[k], grid[k + 1]);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

EntropyPair oriented_pair(const Hamiltonian& H, double lo, double hi, double p1o, double p2o,
                          int n_scan, double tol) {
  const double nudge = 1e-4;
  for (int attempt = 0; attempt <= 100; ++attempt) {
    if (!(p1o < p2o)) break;
    const bool satisfied = check_entropy_condition(H, p1o, p2o).holds;
    double p1, p2;
    if (!satisfied) {
      p1 = p1o;
      p2 = max_slope_point(H, p1, p2o, n_scan);
    } else {
      p2 = p2o;
      p1 = last_tangent_hit(H, lo, p2, n_scan);
    }
    if (std::isfinite(p1) && tec_conditions(H, p1, p2, tol)) {
      return EntropyPair{p1, p2, true, false};
    }
    if (!satisfied)
      p1o = std::min(p1o + nudge, hi);
    else
      p2o = std::max(p2o - nudge, lo);
  }
  fail(ErrorCode::NotFound, "no entropy pair at this scan resolution");
}

}  // namespace

EntropyPair find_entropy_pair(const Hamiltonian& H, double lo, double hi, int n_scan, double tol) {
  require(H.dim() == 1, ErrorCode::InvalidArgument, "find_entropy_pair needs a 1D Hamiltonian");
  require(lo < hi, ErrorCode::EmptyBox, "empty scan box");
  const auto grid = linspace(lo, hi, n_scan);
  int imax = 0, imin = 0;
  double vmax = -std::numeric_limits<double>::infinity(), vmin = -vmax;
  for (int k = 0; k < n_scan; ++k) {
    const double v = H.d2h(grid[k]);
    if (v > vmax) {
      vmax = v;
      imax = k;
    }
    if (v < vmin) {
      vmin = v;
      imin = k;
    }
  }
  require(vmax > 1e-12 && vmin < -1e-12, ErrorCode::NotFound,
          "Hamiltonian is not Neither on the scan box");
  if (grid[imax] > grid[imin]) {
    AffineTransformParams mirror = AffineTransformParams::identity(1);
    mirror.A(0, 0) = -1;
    const Hamiltonian K = affine_transform(H, mirror);
    EntropyPair e = oriented_pair(K, -hi, -lo, -grid[imax], -grid[imin], n_scan, tol);
    e.reflect = true;
    return e;
  }
  return oriented_pair(H, lo, hi, grid[imax], grid[imin], n_scan, tol);
}

}  // namespace hjlab
