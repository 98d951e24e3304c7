#include "hjlab/initial_data.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "hjlab/error.hpp"
#include "hjlab/numerics.hpp"

namespace hjlab {

using nlohmann::json;

Profile blended_quadratic(double k, double r, double width) {
  return [k, r, width](double x) {
    if (x > r) return damped_tail(Jet{0.5 * k * r * r, k * r, k}, x - r, width, +1);
    if (x < -r) return damped_tail(Jet{0.5 * k * r * r, -k * r, k}, -r - x, width, -1);
    return Jet{0.5 * k * x * x, k * x, k};
  };
}

SmoothFn affine_fn(const Vec& slope, double offset) {
  const int d = static_cast<int>(slope.size());
  return SmoothFn{[slope, offset](const Vec& q) { return slope.dot(q) + offset; },
                  [slope](const Vec&) { return slope; },
                  [d](const Vec&) { return Mat(Mat::Zero(d, d)); }};
}

SmoothFn profile_fn(int dim, int axis, Profile profile, double scale, const Vec& slope, double offset) {
  return SmoothFn{
      [=](const Vec& q) { return scale * profile(q(axis)).v + slope.dot(q) + offset; },
      [=](const Vec& q) {
        Vec g = slope;
        g(axis) += scale * profile(q(axis)).d1;
        return g;
      },
      [=](const Vec& q) {
        Mat h = Mat::Zero(dim, dim);
        h(axis, axis) = scale * profile(q(axis)).d2;
        return h;
      }};
}

SmoothFn poly_fn(const std::vector<double>& c) {
  auto eval = [c](double x, int der) {
    double s = 0;
    for (int k = static_cast<int>(c.size()) - 1; k >= der; --k) {
      double f = c[k];
      for (int j = 0; j < der; ++j) f *= (k - j);
      s = s * x + f;
    }
    return s;
  };
  return SmoothFn{[eval](const Vec& q) { return eval(q(0), 0); },
                  [eval](const Vec& q) { return vec1(eval(q(0), 1)); },
                  [eval](const Vec& q) { return mat1(eval(q(0), 2)); }};
}

double ClarkeFan::diameter() const {
  double m = 0;
  for (size_t i = 0; i < vertices.size(); ++i)
    for (size_t j = i + 1; j < vertices.size(); ++j) m = std::max(m, (vertices[i] - vertices[j]).norm());
  return m;
}

InitialCondition::InitialCondition(int dim, std::vector<SmoothFn> members, double lipschitz,
                                   double semiconcavity, Box domain, json spec)
    : dim_(dim), L_(lipschitz), B_(semiconcavity), domain_(std::move(domain)), spec_(std::move(spec)) {
  require(dim >= 1 && dim <= kMaxDim, ErrorCode::InvalidArgument, "initial condition dim out of range");
  require(!members.empty(), ErrorCode::InvalidArgument, "initial condition needs a member");
  require(std::isfinite(L_) && L_ >= 0 && std::isfinite(B_) && B_ >= 0, ErrorCode::NonFinite,
          "L and B must be finite and non-negative");
  require(domain_.dim() == dim && !domain_.empty(), ErrorCode::EmptyBox, "bad domain box");
  data_ = std::make_shared<Data>();
  data_->members = std::move(members);
  if (dim_ == 1) resolve_1d();
}

double InitialCondition::operator()(const Vec& q) const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& g : data_->members) m = std::min(m, g.value(q));
  return m;
}

int InitialCondition::argmin(const Vec& q) const {
  int best = 0;
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i < member_count(); ++i) {
    const double v = data_->members[i].value(q);
    if (v < m) {
      m = v;
      best = i;
    }
  }
  return best;
}

std::vector<int> InitialCondition::active(const Vec& q, double tol) const {
  std::vector<double> v(member_count());
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i < member_count(); ++i) {
    v[i] = data_->members[i].value(q);
    m = std::min(m, v[i]);
  }
  std::vector<int> out;
  for (int i = 0; i < member_count(); ++i)
    if (v[i] <= m + tol) out.push_back(i);
  return out;
}

Vec InitialCondition::gradient(const Vec& q) const { return data_->members[argmin(q)].grad(q); }

const std::vector<Piece1D>& InitialCondition::pieces_1d() const {
  require(dim_ == 1, ErrorCode::Unsupported, "pieces_1d needs d = 1");
  return data_->pieces;
}

const std::vector<Kink1D>& InitialCondition::kinks_1d() const {
  require(dim_ == 1, ErrorCode::Unsupported, "kinks_1d needs d = 1");
  return data_->kinks;
}

void InitialCondition::resolve_1d() {
  const double lo = domain_.lo(0), hi = domain_.hi(0);
  const int n = 4001;
  const auto grid = linspace(lo, hi, n);
  std::vector<int> who(n);
  for (int k = 0; k < n; ++k) who[k] = argmin(vec1(grid[k]));
  double start = lo;
  for (int k = 0; k + 1 < n; ++k) {
    if (who[k + 1] == who[k]) continue;
    const int i = who[k], j = who[k + 1];
    const auto& gi = data_->members[i];
    const auto& gj = data_->members[j];
    const double q = bisect([&](double x) { return gi.value(vec1(x)) - gj.value(vec1(x)); }, grid[k],
                            grid[k + 1]);
    data_->pieces.push_back(Piece1D{i, start, q});
    data_->kinks.push_back(Kink1D{q, i, j, gi.grad(vec1(q))(0), gj.grad(vec1(q))(0)});
    start = q;
  }
  data_->pieces.push_back(Piece1D{who[n - 1], start, hi});
}

namespace {

std::vector<Vec> hull_2d(std::vector<Vec> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec& a, const Vec& b) {
    return a(0) < b(0) || (a(0) == b(0) && a(1) < b(1));
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Vec& a, const Vec& b) { return (a - b).norm() <= 1e-14; }),
            pts.end());
  if (pts.size() < 3) return pts;
  auto cross = [](const Vec& o, const Vec& a, const Vec& b) {
    return (a(0) - o(0)) * (b(1) - o(1)) - (a(1) - o(1)) * (b(0) - o(0));
  };
  std::vector<Vec> h(2 * pts.size());
  size_t k = 0;
  for (size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  for (size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross(h[k - 2], h[k - 1], pts[i - 1]) <= 0) --k;
    h[k++] = pts[i - 1];
  }
  h.resize(k - 1);
  return h;
}

}  // namespace

ClarkeFan clarke_derivative(const InitialCondition& u0, const Vec& q, double tol) {
  require(u0.domain().contains(q, 1e-12), ErrorCode::OutsideDomain, "q outside the domain box");
  ClarkeFan fan;
  fan.q = q;
  std::vector<Vec> grads;
  for (int i : u0.active(q, tol)) grads.push_back(u0.members()[i].grad(q));
  if (u0.dim() == 1) {
    double lo = grads[0](0), hi = lo;
    for (const auto& g : grads) {
      lo = std::min(lo, g(0));
      hi = std::max(hi, g(0));
    }
    fan.vertices = {vec1(lo)};
    if (hi - lo > 1e-14) fan.vertices.push_back(vec1(hi));
  } else if (u0.dim() == 2) {
    fan.vertices = hull_2d(grads);
  } else {
    for (const auto& g : grads) {
      bool dup = false;
      for (const auto& v : fan.vertices) dup = dup || (v - g).norm() <= 1e-14;
      if (!dup) fan.vertices.push_back(g);
    }
  }
  return fan;
}

InitialCondition abs_kink(double hw) {
  return InitialCondition(1, {affine_fn(vec1(1), 0), affine_fn(vec1(-1), 0)}, 1.0, 0.0, box1(-hw, hw),
                          {{"kind", "abs_kink"}, {"params", {{"half_width", hw}}}});
}

InitialCondition abs_kink_quad(double hw, double width) {
  const Profile f = blended_quadratic(1.0, 1.0, width);
  // Slopes are 1 + f' on q < 0 and -1 + f' on q > 0, with f' in [-1 - w/2, 1 + w/2].
  const double fmax = 1.0 + 0.5 * width;
  return InitialCondition(1,
                          {profile_fn(1, 0, f, 1.0, vec1(1), 0), profile_fn(1, 0, f, 1.0, vec1(-1), 0)},
                          std::max(1.0, fmax - 1.0), 1.0, box1(-hw, hw),
                          {{"kind", "abs_kink_quad"}, {"params", {{"half_width", hw}, {"width", width}}}});
}

InitialCondition saddle_data(double a, double b, Box domain, double width) {
  require(b > a && a > 0, ErrorCode::InvalidArgument, "saddle data needs b > a > 0");
  const Profile f = blended_quadratic(2.0, 1.0, width);
  const double fmax = 2.0 + width;
  json dj = {{domain.lo(0), domain.lo(1)}, {domain.hi(0), domain.hi(1)}};
  return InitialCondition(2,
                          {profile_fn(2, 0, f, a, vec({0, -a}), 0), profile_fn(2, 0, f, b, vec({0, -b}), 0)},
                          b * std::hypot(fmax, 1.0), 2.0 * b, domain,
                          {{"kind", "saddle_min"},
                           {"params", {{"a", a}, {"b", b}, {"width", width}, {"domain", dj}}}});
}

InitialCondition linear_data(const Vec& slope, double offset, Box domain) {
  json s = json::array();
  for (int i = 0; i < slope.size(); ++i) s.push_back(slope(i));
  return InitialCondition(static_cast<int>(slope.size()), {affine_fn(slope, offset)}, slope.norm(), 0.0,
                          domain, {{"kind", "linear"}, {"params", {{"slope", s}, {"offset", offset}}}});
}

InitialCondition min_of_quadratics(const std::vector<QuadraticMember>& ms, Box domain) {
  require(!ms.empty(), ErrorCode::InvalidArgument, "min_of_quadratics needs members");
  const int d = domain.dim();
  std::vector<SmoothFn> members;
  double B = 0, L = 0;
  json mj = json::array();
  for (const auto& m : ms) {
    require(m.g.size() == d, ErrorCode::InvalidArgument, "member slope dimension mismatch");
    members.push_back(SmoothFn{[m](const Vec& q) { return m.c + m.g.dot(q) + 0.5 * m.k * q.squaredNorm(); },
                               [m](const Vec& q) { return Vec(m.g + m.k * q); },
                               [m, d](const Vec&) { return Mat(m.k * Mat::Identity(d, d)); }});
    B = std::max(B, m.k);
    for (int c = 0; c < (1 << d); ++c) {
      Vec corner(d);
      for (int i = 0; i < d; ++i) corner(i) = (c >> i) & 1 ? domain.hi(i) : domain.lo(i);
      L = std::max(L, (m.g + m.k * corner).norm());
    }
    json g = json::array();
    for (int i = 0; i < d; ++i) g.push_back(m.g(i));
    mj.push_back({{"c", m.c}, {"g", g}, {"k", m.k}});
  }
  json lo = json::array(), hi = json::array();
  for (int i = 0; i < d; ++i) {
    lo.push_back(domain.lo(i));
    hi.push_back(domain.hi(i));
  }
  return InitialCondition(d, std::move(members), L, B, domain,
                          {{"kind", "min_of_quadratics"}, {"params", {{"members", mj}, {"domain", {lo, hi}}}}});
}

InitialCondition custom_pieces(const std::vector<std::vector<double>>& ms, Box domain) {
  require(!ms.empty() && domain.dim() == 1, ErrorCode::InvalidArgument, "custom_pieces is 1D");
  std::vector<SmoothFn> members;
  double L = 0, B = 0;
  for (const auto& c : ms) {
    members.push_back(poly_fn(c));
    for (double x : linspace(domain.lo(0), domain.hi(0), 4001)) {
      L = std::max(L, std::abs(members.back().grad(vec1(x))(0)));
      B = std::max(B, members.back().hess(vec1(x))(0, 0));
    }
  }
  return InitialCondition(1, std::move(members), L, B, domain,
                          {{"kind", "custom_pieces"},
                           {"params", {{"members", ms}, {"domain", {{domain.lo(0)}, {domain.hi(0)}}}}}});
}

InitialCondition smooth_data(int dim, SmoothFn f, double lipschitz, double semiconcavity, Box domain,
                             json spec) {
  return InitialCondition(dim, {std::move(f)}, lipschitz, semiconcavity, std::move(domain), std::move(spec));
}

namespace {

Box box_from_params(const json& p, int d, double default_hw) {
  if (p.contains("domain")) {
    const auto& j = p.at("domain");
    Box b{Vec(d), Vec(d)};
    for (int i = 0; i < d; ++i) {
      b.lo(i) = j.at(0).at(i).get<double>();
      b.hi(i) = j.at(1).at(i).get<double>();
    }
    return b;
  }
  const double hw = p.value("half_width", default_hw);
  Box b{Vec::Constant(d, -hw), Vec::Constant(d, hw)};
  return b;
}

}  // namespace

InitialCondition initial_condition_from_json(const json& spec) {
  require(spec.is_object() && spec.contains("kind"), ErrorCode::ParseError,
          "initial condition spec needs a kind");
  const std::string kind = spec.at("kind").get<std::string>();
  const json p = spec.value("params", json::object());
  if (kind == "abs_kink") return abs_kink(p.value("half_width", 5.0));
  if (kind == "abs_kink_quad") return abs_kink_quad(p.value("half_width", 5.0), p.value("width", 0.25));
  if (kind == "saddle_min")
    return saddle_data(p.at("a").get<double>(), p.at("b").get<double>(), box_from_params(p, 2, 2.0),
                       p.value("width", 0.25));
  if (kind == "linear") {
    const auto s = p.at("slope").get<std::vector<double>>();
    Vec slope(static_cast<int>(s.size()));
    for (size_t i = 0; i < s.size(); ++i) slope(static_cast<int>(i)) = s[i];
    return linear_data(slope, p.value("offset", 0.0), box_from_params(p, slope.size(), 5.0));
  }
  if (kind == "min_of_quadratics") {
    std::vector<QuadraticMember> ms;
    int d = 0;
    for (const auto& m : p.at("members")) {
      const auto g = m.at("g").get<std::vector<double>>();
      d = static_cast<int>(g.size());
      QuadraticMember q;
      q.c = m.value("c", 0.0);
      q.k = m.value("k", 0.0);
      q.g = Vec(d);
      for (int i = 0; i < d; ++i) q.g(i) = g[i];
      ms.push_back(q);
    }
    return min_of_quadratics(ms, box_from_params(p, d, 5.0));
  }
  if (kind == "custom_pieces")
    return custom_pieces(p.at("members").get<std::vector<std::vector<double>>>(), box_from_params(p, 1, 5.0));
  fail(ErrorCode::UnknownName, "unknown initial condition kind '" + kind + "'");
}

InitialCondition add_constant(const InitialCondition& u0, double c) {
  std::vector<SmoothFn> ms;
  for (const auto& g : u0.members())
    ms.push_back(SmoothFn{[g, c](const Vec& q) { return g.value(q) + c; }, g.grad, g.hess});
  return InitialCondition(u0.dim(), std::move(ms), u0.lipschitz(), u0.semiconcavity(), u0.domain(),
                          {{"kind", "shifted"}, {"base", u0.spec()}, {"c", c}});
}

InitialCondition add_smooth(const InitialCondition& u0, const SmoothFn& s, double dL, double dB) {
  std::vector<SmoothFn> ms;
  for (const auto& g : u0.members())
    ms.push_back(SmoothFn{[g, s](const Vec& q) { return g.value(q) + s.value(q); },
                          [g, s](const Vec& q) { return Vec(g.grad(q) + s.grad(q)); },
                          [g, s](const Vec& q) { return Mat(g.hess(q) + s.hess(q)); }});
  return InitialCondition(u0.dim(), std::move(ms), u0.lipschitz() + dL, u0.semiconcavity() + dB,
                          u0.domain(), {{"kind", "plus_smooth"}, {"base", u0.spec()}});
}

InitialCondition pullback(const InitialCondition& u0, const Mat& At, const Vec& b) {
  const int d = u0.dim();
  require(At.rows() == d && At.cols() == d && b.size() == d, ErrorCode::InvalidArgument,
          "pullback dimensions do not match");
  require(std::abs(At.determinant()) > 1e-14, ErrorCode::SingularMatrix, "pullback matrix singular");
  std::vector<SmoothFn> ms;
  for (const auto& g : u0.members())
    ms.push_back(SmoothFn{[g, At, b](const Vec& q) { return g.value(At * q) + b.dot(q); },
                          [g, At, b](const Vec& q) { return Vec(At.transpose() * g.grad(At * q) + b); },
                          [g, At](const Vec& q) { return Mat(At.transpose() * g.hess(At * q) * At); }});
  const Mat inv = At.inverse();
  Box dom{Vec::Constant(d, std::numeric_limits<double>::infinity()),
          Vec::Constant(d, -std::numeric_limits<double>::infinity())};
  for (int c = 0; c < (1 << d); ++c) {
    Vec corner(d);
    for (int i = 0; i < d; ++i) corner(i) = (c >> i) & 1 ? u0.domain().hi(i) : u0.domain().lo(i);
    const Vec img = inv * corner;
    dom.lo = dom.lo.cwiseMin(img);
    dom.hi = dom.hi.cwiseMax(img);
  }
  const double nA = op_norm(At);
  return InitialCondition(d, std::move(ms), nA * u0.lipschitz() + b.norm(), nA * nA * u0.semiconcavity(),
                          dom, {{"kind", "pullback"}, {"base", u0.spec()}});
}

InitialCondition extend(const InitialCondition& u0, const Vec& p2, double hw) {
  const int d1 = u0.dim(), d2 = static_cast<int>(p2.size()), d = d1 + d2;
  require(d <= kMaxDim && d2 >= 1, ErrorCode::InvalidArgument, "extend dimension out of range");
  std::vector<SmoothFn> ms;
  for (const auto& g : u0.members()) {
    ms.push_back(SmoothFn{[g, p2, d1, d2](const Vec& q) { return g.value(q.head(d1)) + p2.dot(q.tail(d2)); },
                          [g, p2, d1, d2, d](const Vec& q) {
                            Vec out(d);
                            out.head(d1) = g.grad(q.head(d1));
                            out.tail(d2) = p2;
                            return out;
                          },
                          [g, d1, d](const Vec& q) {
                            Mat h = Mat::Zero(d, d);
                            h.topLeftCorner(d1, d1) = g.hess(q.head(d1));
                            return h;
                          }});
  }
  Box dom{Vec(d), Vec(d)};
  dom.lo.head(d1) = u0.domain().lo;
  dom.hi.head(d1) = u0.domain().hi;
  dom.lo.tail(d2).setConstant(-hw);
  dom.hi.tail(d2).setConstant(hw);
  return InitialCondition(d, std::move(ms), std::hypot(u0.lipschitz(), p2.norm()), u0.semiconcavity(), dom,
                          {{"kind", "extended"}, {"base", u0.spec()}});
}

namespace {

double bump(double r2) { return r2 < 1 ? std::exp(-1.0 / (1.0 - r2)) : 0.0; }

// d bump / dy_i = bump * (-2 y_i / (1 - r2)^2).
double bump_radial_factor(double r2) {
  if (r2 >= 1) return 0;
  const double s = 1 - r2;
  return bump(r2) * (-2.0 / (s * s));
}

double bump_mass(int d) {
  const auto& gl = gauss_legendre(33);
  const int panels = 64;
  double z = 0;
  for (int k = 0; k < panels; ++k) {
    const double a = static_cast<double>(k) / panels, b = static_cast<double>(k + 1) / panels;
    for (size_t i = 0; i < gl.nodes.size(); ++i) {
      const double r = 0.5 * (a + b) + 0.5 * (b - a) * gl.nodes[i];
      const double w = 0.5 * (b - a) * gl.weights[i];
      z += d == 1 ? 2 * w * bump(r * r) : 2 * std::numbers::pi * r * w * bump(r * r);
    }
  }
  return z;
}

}  // namespace

struct Mollified::Impl {
  InitialCondition u0;
  double eps;
  int order;
  double mass;
  std::vector<double> kinks;

  void eval1(double q, double* v, double* g, double* h) const {
    std::vector<double> cuts{-1.0};
    for (double k : kinks) {
      const double y = (q - k) / eps;
      if (y > -1 && y < 1) cuts.push_back(y);
    }
    cuts.push_back(1.0);
    std::sort(cuts.begin(), cuts.end());
    const auto& gl = gauss_legendre(order);
    double sv = 0, sg = 0, sh = 0, sm = 0;
    for (size_t p = 0; p + 1 < cuts.size(); ++p) {
      const double a = cuts[p], b = cuts[p + 1];
      if (b - a <= 0) continue;
      const Vec mid_z = vec1(q - eps * 0.5 * (a + b));
      const auto& m = u0.members()[u0.argmin(mid_z)];
      for (size_t i = 0; i < gl.nodes.size(); ++i) {
        const double y = 0.5 * (a + b) + 0.5 * (b - a) * gl.nodes[i];
        const double w = 0.5 * (b - a) * gl.weights[i];
        const Vec z = vec1(q - eps * y);
        const double rho = bump(y * y);
        const double drho = bump_radial_factor(y * y) * y;
        sm += w * rho;
        if (v) sv += w * rho * m.value(z);
        if (g || h) {
          const double du = m.grad(z)(0);
          sg += w * rho * du;
          sh += w * drho * du;
        }
      }
    }
    if (v) *v = sv / sm;
    if (g) *g = sg / sm;
    if (h) *h = sh / (sm * eps);
  }

  void eval2(const Vec& q, double* v, Vec* g, Mat* h) const {
    const auto& gl = gauss_legendre(order);
    const std::size_t n = gl.nodes.size();
    double sv = 0, sm = 0;
    Vec sg = Vec::Zero(2);
    Mat sh = Mat::Zero(2, 2);
    const int probes = 9;
    std::vector<double> cuts;
    for (std::size_t i = 0; i < n; ++i) {
      const double y1 = gl.nodes[i];
      const double w1 = gl.weights[i];
      const double hh = std::sqrt(std::max(0.0, 1 - y1 * y1));
      auto z_of = [&](double y2) { return Vec(q - eps * vec({y1, y2})); };
      cuts.assign(1, -hh);
      int prev = u0.argmin(z_of(-hh));
      double prev_y = -hh;
      for (int k = 1; k <= probes; ++k) {
        const double y2 = -hh + 2 * hh * k / probes;
        const int cur = u0.argmin(z_of(y2));
        if (cur != prev) {
          const auto& ga = u0.members()[prev];
          const auto& gb = u0.members()[cur];
          cuts.push_back(bisect([&](double s) { return ga.value(z_of(s)) - gb.value(z_of(s)); }, prev_y, y2, 1e-15));
        }
        prev = cur;
        prev_y = y2;
      }
      cuts.push_back(hh);
      const bool whole = cuts.size() == 2;
      for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
        const double a = cuts[p], b = cuts[p + 1];
        if (b - a <= 0) continue;
        const auto& m = u0.members()[whole ? prev : u0.argmin(z_of(0.5 * (a + b)))];
        for (std::size_t j = 0; j < n; ++j) {
          const double y2 = 0.5 * (a + b) + 0.5 * (b - a) * gl.nodes[j];
          const double w = w1 * 0.5 * (b - a) * gl.weights[j];
          const Vec z = z_of(y2);
          const double r2 = y1 * y1 + y2 * y2;
          const double rho = whole ? rho_tab[i * n + j] : bump(r2);
          sm += w * rho;
          if (v) sv += w * rho * m.value(z);
          if (g || h) {
            const Vec du = m.grad(z);
            sg += w * rho * du;
            if (h) {
              const double f = bump_radial_factor(r2);
              const Vec drho = f * vec({y1, y2});
              sh += w * du * drho.transpose();
            }
          }
        }
      }
    }
    if (v) *v = sv / sm;
    if (g) *g = sg / sm;
    if (h) {
      const Mat s = sh / (sm * eps);
      *h = 0.5 * (s + s.transpose());
    }
  }

  // bump at the uncut nodes of each chord.
  std::vector<double> rho_tab;
};

Mollified::Mollified(const InitialCondition& u0, double eps, int order) {
  require(std::isfinite(eps) && eps > 0, ErrorCode::InvalidArgument, "mollify needs eps > 0");
  require(u0.dim() <= 2, ErrorCode::Unsupported, "mollify supports d = 1, 2");
  require(order >= 2, ErrorCode::InvalidArgument, "quadrature order must be >= 2");
  auto im = std::make_shared<Impl>(Impl{u0, eps, order, bump_mass(u0.dim()), {}, {}});
  if (u0.dim() == 1)
    for (const auto& k : u0.kinks_1d()) im->kinks.push_back(k.q);
  if (u0.dim() == 2) {
    const auto& gl = gauss_legendre(order);
    for (double y1 : gl.nodes)
      for (double x : gl.nodes) {
        const double y2 = std::sqrt(std::max(0.0, 1 - y1 * y1)) * x;
        im->rho_tab.push_back(bump(y1 * y1 + y2 * y2));
      }
  }
  impl_ = im;
}

double Mollified::eps() const { return impl_->eps; }

void Mollified::jet(const Vec& q, double* value, Vec* grad, Mat* hess) const {
  if (impl_->u0.dim() == 1) {
    double g = 0, h = 0;
    impl_->eval1(q(0), value, grad ? &g : nullptr, hess ? &h : nullptr);
    if (grad) *grad = vec1(g);
    if (hess) *hess = mat1(h);
  } else {
    impl_->eval2(q, value, grad, hess);
  }
}

double bump_gradient_l1(int dim) {
  require(dim == 1 || dim == 2, ErrorCode::Unsupported, "bump constant for d = 1, 2");
  const double z = bump_mass(dim);
  if (dim == 1) return 2 * bump(0) / z;
  // Radial profile: int |d rho/dr| 2 pi r dr = 2 pi int rho(r) dr for a decreasing profile.
  const auto& gl = gauss_legendre(33);
  double s = 0;
  for (int k = 0; k < 64; ++k) {
    const double a = k / 64.0, b = (k + 1) / 64.0;
    for (size_t i = 0; i < gl.nodes.size(); ++i) {
      const double r = 0.5 * (a + b) + 0.5 * (b - a) * gl.nodes[i];
      s += 0.5 * (b - a) * gl.weights[i] * bump(r * r);
    }
  }
  return 2 * std::numbers::pi * s / z;
}

InitialCondition mollify(const InitialCondition& u0, double eps, int order) {
  const Mollified mol(u0, eps, order);
  SmoothFn f;
  f.value = [mol](const Vec& q) {
    double v;
    mol.jet(q, &v, nullptr, nullptr);
    return v;
  };
  f.grad = [mol](const Vec& q) {
    Vec g;
    mol.jet(q, nullptr, &g, nullptr);
    return g;
  };
  f.hess = [mol](const Vec& q) {
    Mat h;
    mol.jet(q, nullptr, nullptr, &h);
    return h;
  };
  return InitialCondition(u0.dim(), {f}, u0.lipschitz(), u0.semiconcavity(), u0.domain(),
                          {{"kind", "mollified"}, {"base", u0.spec()}, {"eps", eps}, {"order", order}});
}

namespace {

// Static k-d tree for exact nearest-neighbour distances.
class KdTree {
 public:
  explicit KdTree(const PointSet& pts) : pts_(pts), idx_(pts.size()) {
    std::iota(idx_.begin(), idx_.end(), 0);
    if (!pts.empty()) build(0, idx_.size(), 0);
  }

  double nearest(const Vec& x) const {
    double best = std::numeric_limits<double>::infinity();
    search(0, idx_.size(), 0, x, best);
    return std::sqrt(best);
  }

 private:
  void build(size_t b, size_t e, int depth) {
    if (e - b <= 8) return;
    const int axis = depth % static_cast<int>(pts_[idx_[b]].size());
    const size_t m = b + (e - b) / 2;
    std::nth_element(idx_.begin() + b, idx_.begin() + m, idx_.begin() + e,
                     [&](size_t i, size_t j) { return pts_[i](axis) < pts_[j](axis); });
    build(b, m, depth + 1);
    build(m + 1, e, depth + 1);
  }

  void search(size_t b, size_t e, int depth, const Vec& x, double& best) const {
    if (b >= e) return;
    if (e - b <= 8) {
      for (size_t k = b; k < e; ++k) best = std::min(best, (pts_[idx_[k]] - x).squaredNorm());
      return;
    }
    const int axis = depth % static_cast<int>(x.size());
    const size_t m = b + (e - b) / 2;
    const Vec& pm = pts_[idx_[m]];
    best = std::min(best, (pm - x).squaredNorm());
    const double diff = x(axis) - pm(axis);
    if (diff < 0) {
      search(b, m, depth + 1, x, best);
      if (diff * diff < best) search(m + 1, e, depth + 1, x, best);
    } else {
      search(m + 1, e, depth + 1, x, best);
      if (diff * diff < best) search(b, m, depth + 1, x, best);
    }
  }

  const PointSet& pts_;
  std::vector<size_t> idx_;
};

void check_points(const PointSet& X) {
  require(!X.empty(), ErrorCode::InvalidArgument, "empty point set");
  for (const auto& x : X) require(x.allFinite(), ErrorCode::NonFinite, "non-finite point");
}

double directed(const PointSet& X, const PointSet& Y) {
  KdTree tree(Y);
  double m = 0;
  for (const auto& x : X) m = std::max(m, tree.nearest(x));
  return m;
}

}  // namespace

double point_set_distance(const Vec& x, const PointSet& X) {
  check_points(X);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& y : X) best = std::min(best, (x - y).squaredNorm());
  return std::sqrt(best);
}

double directed_hausdorff(const PointSet& X, const PointSet& Y) {
  check_points(X);
  check_points(Y);
  return directed(X, Y);
}

double hausdorff_distance(const PointSet& X, const PointSet& Y) {
  check_points(X);
  check_points(Y);
  return std::max(directed(X, Y), directed(Y, X));
}

bool enhanced_triangle_check(const Vec& x, const Vec& y, const PointSet& X, const PointSet& Y,
                             double* slack) {
  const double lhs = point_set_distance(x, X);
  const double rhs = (x - y).norm() + point_set_distance(y, Y) + hausdorff_distance(X, Y);
  if (slack) *slack = rhs - lhs;
  return lhs <= rhs;
}

}  // namespace hjlab
