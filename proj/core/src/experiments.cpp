#include "hjlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>

#include "hjlab/characteristics.hpp"
#include "hjlab/error.hpp"
#include "hjlab/io.hpp"
#include "hjlab/numerics.hpp"
#include "hjlab/parallel.hpp"
#include "hjlab/variational.hpp"
#include "hjlab/viscosity.hpp"
#include "hjlab/wavefront.hpp"

namespace hjlab {

using nlohmann::json;

namespace {

json to_j(const Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Vec from_j(const json& a) {
  Vec v(static_cast<int>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) v(static_cast<int>(i)) = a[i].get<double>();
  return v;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

GapStats compare_solutions(const SolutionGrid& R, const SolutionGrid& V) {
  require(same_axes(R, V), ErrorCode::AxisMismatch, "compare_solutions needs identical axes");
  require(R.size() > 0, ErrorCode::InvalidArgument, "empty grids");
  GapStats s;
  s.min_signed_gap = kInf;
  s.max_signed_gap = -kInf;
  std::size_t kmin = 0, kmax = 0;
  for (std::size_t k = 0; k < R.size(); ++k) {
    const double d = R.values[k] - V.values[k];
    s.sup_abs_gap = std::max(s.sup_abs_gap, std::abs(d));
    if (d < s.min_signed_gap) s.min_signed_gap = d, kmin = k;
    if (d > s.max_signed_gap) s.max_signed_gap = d, kmax = k;
  }
  s.argmin_point = R.point(kmin);
  s.argmax_point = R.point(kmax);
  return s;
}

json CounterexampleReport::to_json() const {
  json w = {{"q", to_j(witness.q)},   {"R", witness.R},           {"V", witness.V},
            {"gap", witness.gap},     {"strict", witness.strict}, {"alpha", witness.alpha}};
  return {{"version", kReportVersion},
          {"scenario", scenario},
          {"params", params},
          {"t", t},
          {"shock", shock},
          {"margins", {{"lax", lax_margin}, {"entropy", entropy_margin}}},
          {"gaps", {{"sup", sup_gap}, {"min_signed", min_signed_gap}}},
          {"scheme_tolerance", scheme_tolerance},
          {"witness", w},
          {"artifacts", artifacts},
          {"extra", extra}};
}

CounterexampleReport CounterexampleReport::from_json(const json& j) {
  try {
    CounterexampleReport r;
    r.scenario = j.at("scenario").get<std::string>();
    r.params = j.value("params", json::object());
    r.t = j.at("t").get<double>();
    r.shock = j.value("shock", json::object());
    r.lax_margin = j.at("margins").at("lax").get<double>();
    r.entropy_margin = j.at("margins").at("entropy").get<double>();
    r.sup_gap = j.at("gaps").at("sup").get<double>();
    r.min_signed_gap = j.at("gaps").at("min_signed").get<double>();
    r.scheme_tolerance = j.value("scheme_tolerance", 0.0);
    const auto& w = j.at("witness");
    r.witness.q = from_j(w.at("q"));
    r.witness.R = w.at("R").get<double>();
    r.witness.V = w.at("V").get<double>();
    r.witness.gap = w.at("gap").get<double>();
    r.witness.strict = w.at("strict").get<bool>();
    r.witness.alpha = w.value("alpha", 0.0);
    r.artifacts = j.value("artifacts", std::vector<std::string>{});
    r.extra = j.value("extra", json::object());
    return r;
  } catch (const json::exception& e) {
    fail(ErrorCode::ParseError, std::string("report: ") + e.what());
  }
}

double convex_scheme_tolerance(double dx, double t) {
  const auto q = make_axis(-1, 1, dx);
  GridScheme s;
  s.axes = {q};
  const auto V = viscosity_solve(half_square(1), abs_kink(5.0), t, s);
  double e = 0;
  for (std::size_t k = 0; k < q.size(); ++k) e = std::max(e, std::abs(V.values[k] - (-std::abs(q[k]) - 0.5 * t)));
  return e;
}

namespace {

bool is_wave_normalized(const Hamiltonian& H, double tol) {
  return std::abs(H.h(-1)) <= tol && std::abs(H.h(1)) <= tol && std::abs(H.dh(1)) <= tol && H.d2h(1) < 0 &&
         H.dh(-1) < H.dh(1) && check_entropy_condition(H, -1, 1).strict;
}

struct Normalization {
  Hamiltonian H;
  AffineTransformParams T;
  bool applied = false;
  EntropyPair pair;
};

Normalization normalize_wave(const Hamiltonian& H, double lo, double hi) {
  Normalization n{H, AffineTransformParams::identity(1), false, {-1, 1, true, false}};
  if (is_wave_normalized(H, 1e-12)) return n;
  EntropyPair e;
  try {
    e = find_entropy_pair(H, lo, hi);
  } catch (const HjError& err) {
    fail(ErrorCode::NormalizationFailed, std::string("no entropy pair: ") + err.what());
  }
  AffineTransformParams mirror = AffineTransformParams::identity(1);
  mirror.A(0, 0) = -1;
  const Hamiltonian K = e.reflect ? affine_transform(H, mirror) : H;
  const double m = 0.5 * (e.p2 - e.p1), c = 0.5 * (e.p1 + e.p2), sigma = K.dh(e.p2);
  AffineTransformParams T = AffineTransformParams::identity(1);
  T.A(0, 0) = m;
  T.b(0) = c;
  T.n(0) = -sigma * m;
  T.alpha = -K.h(e.p1) - sigma * m;
  n.T = e.reflect ? compose(mirror, T) : T;
  n.H = affine_transform(H, n.T);
  n.applied = true;
  n.pair = e;
  require(is_wave_normalized(n.H, 1e-8), ErrorCode::NormalizationFailed,
          "normalized Hamiltonian fails H(-1) = H(1) = H'(1) = 0 with a strict entropy pair");
  return n;
}

json transform_json(const AffineTransformParams& T) {
  return {{"A", T.A(0, 0)}, {"b", T.b(0)}, {"n", T.n(0)}, {"alpha", T.alpha}, {"lambda", T.lambda}};
}

const Kink1D& central_kink(const InitialCondition& u0) {
  const auto& ks = u0.kinks_1d();
  require(!ks.empty(), ErrorCode::InvalidArgument, "initial data has no kink");
  const Kink1D* best = &ks.front();
  for (const auto& k : ks)
    if (std::abs(k.q) < std::abs(best->q)) best = &k;
  return *best;
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

}  // namespace

ShockSystemSolution solve_shock_system(const Hamiltonian& H, const InitialCondition& u0, double t) {
  require(H.dim() == 1 && u0.dim() == 1, ErrorCode::Unsupported, "shock system is 1D");
  require(t > 0, ErrorCode::InvalidArgument, "shock system needs t > 0");
  const Kink1D& kink = central_kink(u0);
  const double k0 = kink.q, u_k = u0.value1(k0);
  const int right = kink.right_member;
  const SmoothFn& g = u0.members()[right];
  const double plo = std::min(kink.p_left, kink.p_right), phi = std::max(kink.p_left, kink.p_right);
  auto residual = [&](double q, double p, double* J) {
    const Vec z = vec1(q);
    const double r = g.grad(z)(0), r2 = g.hess(z)(0, 0);
    const double e1 = q + t * H.dh(r) - (k0 + t * H.dh(p));
    const double e2 = g.value(z) + t * (r * H.dh(r) - H.h(r)) - (u_k + t * (p * H.dh(p) - H.h(p)));
    if (J) {
      J[0] = 1 + t * H.d2h(r) * r2;
      J[1] = -t * H.d2h(p);
      J[2] = r + t * r * H.d2h(r) * r2;
      J[3] = -t * p * H.d2h(p);
    }
    return std::make_pair(e1, e2);
  };
  ShockSystemSolution s;
  double q = k0 + t * (H.dh(phi) - H.dh(kink.p_right)), p = phi;
  for (int it = 0; it < 200; ++it) {
    double J[4];
    auto [e1, e2] = residual(q, p, J);
    const double nrm = std::hypot(e1, e2);
    s.iterations = it;
    if (nrm <= 1e-14) break;
    const double det = J[0] * J[3] - J[1] * J[2];
    require(std::isfinite(det) && std::abs(det) > 1e-300, ErrorCode::ShockSolverFailed, "singular shock Jacobian");
    const double dq = (J[3] * e1 - J[1] * e2) / det, dp = (-J[2] * e1 + J[0] * e2) / det;
    double lam = 1;
    for (int k = 0; k < 40; ++k) {
      const double qn = q - lam * dq, pn = p - lam * dp;
      auto [f1, f2] = residual(qn, pn, nullptr);
      if (std::hypot(f1, f2) < nrm || k == 39) {
        q = qn;
        p = pn;
        break;
      }
      lam *= 0.5;
    }
  }
  auto [e1, e2] = residual(q, p, nullptr);
  require(std::hypot(e1, e2) <= 1e-11, ErrorCode::ShockSolverFailed, "shock system Newton did not converge");
  require(q > k0 && p >= plo - 1e-9 && p <= phi + 1e-9, ErrorCode::ShockSolverFailed,
          "shock system converged outside the piece / fan ranges");
  s.q0 = q;
  s.p = p;
  s.x = k0 + t * H.dh(p);
  return s;
}

std::vector<CounterexampleReport> run_counterexample_1d(const Hamiltonian& H, const std::vector<double>& t_list,
                                                        const Dim1Options& opts) {
  require(H.dim() == 1, ErrorCode::InvalidArgument, "run_counterexample_1d needs a 1D Hamiltonian");
  require(!t_list.empty(), ErrorCode::InvalidArgument, "empty t list");
  require(opts.dx > 0 && opts.q_lo < opts.q_hi, ErrorCode::InvalidArgument, "bad grid");
  const auto cls = classify_convexity(H, box1(opts.pair_lo, opts.pair_hi), 4001);
  require(cls.kind == Convexity::Neither, ErrorCode::InvalidArgument,
          std::string("run_counterexample_1d needs a non-convex, non-concave H (got ") + to_string(cls.kind) + ")");
  const Normalization nz = normalize_wave(H, opts.pair_lo, opts.pair_hi);
  const Hamiltonian& Hn = nz.H;
  const InitialCondition u0 = abs_kink_quad(opts.half_width);
  const double horizon_t = data_horizon(Hn, u0);
  for (double t : t_list)
    require(std::isfinite(t) && t > 0 && t < horizon_t, ErrorCode::HorizonExceeded,
            "t outside (0, horizon) for the normalized problem");
  const auto q = make_axis(opts.q_lo, opts.q_hi, opts.dx);

  std::vector<CounterexampleReport> out;
  for (std::size_t ti = 0; ti < t_list.size(); ++ti) {
    const double t = t_list[ti];
    CounterexampleReport rep;
    rep.scenario = "dim1";
    rep.t = t;
    rep.params = {{"hamiltonian", H.spec()},
                  {"normalized", nz.applied},
                  {"transform", transform_json(nz.T)},
                  {"entropy_pair", {nz.pair.p1, nz.pair.p2}},
                  {"reflect", nz.pair.reflect},
                  {"initial", u0.spec()},
                  {"grid", {{"q_lo", opts.q_lo}, {"q_hi", opts.q_hi}, {"dx", opts.dx}}},
                  {"horizon", horizon_t}};

    const Front front = build_front_1d(Hn, u0, t);
    const auto sections = enumerate_continuous_sections(front, q);
    const ShockSystemSolution sh = solve_shock_system(Hn, u0, t);
    const double r = u0.deriv1(sh.q0);
    const LaxVerdict lax = check_lax_condition(Hn, sh.p, r);
    rep.lax_margin = std::min(lax.left_margin, lax.right_margin);
    ShockPoint sp;
    sp.q = sh.x;
    sp.t = t;
    sp.p1 = sh.p;
    sp.p2 = r;
    sp.S = u0.value1(central_kink(u0).q) + action(Hn, t, vec1(sh.p));
    rep.entropy_margin = shock_viscosity_verdict(Hn, sp).entropy_margin;

    json vshocks = json::array();
    const Section path = minimal_section_path(front, q);
    for (const auto& s : find_shocks(front, path))
      vshocks.push_back({{"q", s.q}, {"S", s.S}, {"p1", s.p1}, {"p2", s.p2}, {"left", s.left_source},
                         {"right", s.right_source}});
    rep.shock = {{"q", sh.x},          {"S", sp.S},           {"p_fan", sh.p},     {"q0_piece", sh.q0},
                 {"p_piece", r},       {"reduced_x", sh.q0 / t}, {"reduced_q", sh.x / t},
                 {"newton_iterations", sh.iterations},     {"variational_shocks", vshocks}};

    SolutionGrid R = minimal_section(front, q);
    GridScheme scheme;
    scheme.axes = {q};
    SolutionGrid V = viscosity_solve(Hn, u0, t, scheme);
    const GapStats gs = compare_solutions(R, V);
    rep.sup_gap = gs.sup_abs_gap;
    rep.min_signed_gap = gs.min_signed_gap;
    rep.scheme_tolerance = convex_scheme_tolerance(opts.dx, t);

    std::size_t best = 0;
    double bg = -kInf;
    for (std::size_t k = 0; k < q.size(); ++k) {
      if (std::abs(q[k] - sh.x) > opts.witness_radius) continue;
      const double d = R.values[k] - V.values[k];
      if (d > bg) bg = d, best = k;
    }
    require(bg > -kInf, ErrorCode::InvalidArgument, "no grid point near the shock");
    rep.witness.q = vec1(q[best]);
    rep.witness.R = R.values[best];
    rep.witness.V = V.values[best];
    rep.witness.gap = bg;
    rep.witness.strict = bg > 3 * rep.scheme_tolerance;
    rep.extra = {{"section_count", sections.size()},
                 {"max_signed_gap", gs.max_signed_gap},
                 {"scheme", V.meta},
                 {"lax", {{"left", lax.left_margin}, {"right", lax.right_margin}}}};

    if (!opts.out_dir.empty()) {
      const std::string tag = "dim1_t" + std::to_string(ti);
      const std::string rp = join_path(opts.out_dir, tag + "_R.csv"), vp = join_path(opts.out_dir, tag + "_V.csv");
      const std::string fp = join_path(opts.out_dir, tag + "_front.csv");
      const std::string sp_path = join_path(opts.out_dir, tag + "_section.csv");
      write_solution_grid(rp, R, Hn.spec(), u0.spec());
      write_solution_grid(vp, V, Hn.spec(), u0.spec());
      write_front(fp, front, front.sample(257));
      if (!sections.empty()) write_section(sp_path, front, sections.front(), q);
      rep.artifacts = {rp, vp, fp};
      if (!sections.empty()) rep.artifacts.push_back(sp_path);
    }
    out.push_back(std::move(rep));
  }
  return out;
}

double saddle_parabola(double a, double b, double t, double q1) {
  return q1 * q1 + 2 * (a + b) * t * q1 + t * t * (a * a + a * b + b * b);
}

double saddle_residual_formula(double a, double b, double t, double q1) {
  return 0.5 * (a - b) * (a - b) * ((a + b) * t + q1);
}

double saddle_residual(double a, double b, double t, double q1) {
  const double dt_phi = a * a * (q1 + a * t) + b * b * (q1 + b * t);
  const Vec dq = vec({a * (q1 + a * t) + b * (q1 + b * t), -0.5 * (a + b)});
  return subsolution_residual(saddle(), dt_phi, dq);
}

namespace {

// Point of the Clarke graph of u0 with its value.
struct GraphPt {
  Vec q0;
  Vec p;
  double u = 0;
};

struct KinkPt {
  Vec z;
  int i = 0;
  int j = 0;
  Vec normal;
};

Vec psi(const Hamiltonian& H, double t, const GraphPt& g) {
  const Vec q = g.q0 + t * H.grad(g.p);
  return vec({q(0), q(1), g.u + action(H, t, g.p)});
}

Vec graph_point4(const GraphPt& g) { return vec({g.q0(0), g.q0(1), g.p(0), g.p(1)}); }

bool in_window(const Vec& img, const Vec& c, double r) {
  return std::abs(img(0) - c(0)) <= r && std::abs(img(1) - c(1)) <= r;
}

// Local samples of the front of a 2D min-of-members datum around the image window |q - c| <= r_out.
class LocalSampler {
 public:
  LocalSampler(const Hamiltonian& H, const InitialCondition& u0, double t, const Vec& c, double r_out, double h)
      : H_(H), u0_(u0), t_(t), c_(c), r_out_(r_out), h_(h) {
    require(H.dim() == 2 && u0.dim() == 2, ErrorCode::Unsupported, "local front sampling is 2D");
    const double pad = t * max_abs_gradient(H, u0.lipschitz() + 1, 101).norm();
    Vec lo = vec({kInf, kInf}), hi = vec({-kInf, -kInf});
    for (const auto& g : u0.members())
      for (double s1 : linspace(-r_out, r_out, 5))
        for (double s2 : linspace(-r_out, r_out, 5)) {
          const Vec q = c + vec({s1, s2});
          const auto cp = classical_solve_member(H, g, t, q, pad);
          lo = lo.cwiseMin(cp.q0);
          hi = hi.cwiseMax(cp.q0);
        }
    const double m = 0.25 * std::max(hi(0) - lo(0), hi(1) - lo(1)) + 2 * h;
    lo.array() -= m;
    hi.array() += m;
    box_ = Box{lo, hi};
    ax0_ = make_axis(lo(0), hi(0), h);
    ax1_ = make_axis(lo(1), hi(1), h);
    scan();
  }

  const std::vector<GraphPt>& graph() const { return graph_; }
  const std::vector<Vec>& nodes() const { return nodes_; }
  const std::vector<KinkPt>& kinks() const { return kinks_; }
  const Box& preimage_box() const { return box_; }

  // True when the member images of q0 span a box meeting the outer window.
  bool relevant(const Vec& q0, double margin) const {
    double lo0 = kInf, hi0 = -kInf, lo1 = kInf, hi1 = -kInf;
    for (const auto& g : u0_.members()) {
      const Vec q = q0 + t_ * H_.grad(g.grad(q0));
      lo0 = std::min(lo0, q(0));
      hi0 = std::max(hi0, q(0));
      lo1 = std::min(lo1, q(1));
      hi1 = std::max(hi1, q(1));
    }
    const double r = r_out_ + margin;
    return hi0 >= c_(0) - r && lo0 <= c_(0) + r && hi1 >= c_(1) - r && lo1 <= c_(1) + r;
  }

 private:
  void scan() {
    const auto& ms = u0_.members();
    const std::size_t n0 = ax0_.size(), n1 = ax1_.size();
    std::vector<int> arg(n0 * n1);
    for (std::size_t i = 0; i < n0; ++i)
      for (std::size_t j = 0; j < n1; ++j) {
        const Vec q0 = vec({ax0_[i], ax1_[j]});
        arg[i * n1 + j] = u0_.argmin(q0);
        if (!relevant(q0, h_)) continue;
        nodes_.push_back(q0);
        const auto act = u0_.active(q0, 1e-12);
        if (act.size() != 1) continue;
        const GraphPt g{q0, ms[act[0]].grad(q0), ms[act[0]].value(q0)};
        if (in_window(psi(H_, t_, g), c_, r_out_)) graph_.push_back(g);
      }
    auto add_kink = [&](const Vec& a, const Vec& b, int ia, int ib) {
      auto phi = [&](double s) {
        const Vec z = a + s * (b - a);
        return ms[ia].value(z) - ms[ib].value(z);
      };
      if (!(phi(0) * phi(1) <= 0)) return;
      const double s = bisect(phi, 0, 1, 1e-15);
      const Vec z = a + s * (b - a);
      const Vec gi = ms[ia].grad(z), gj = ms[ib].grad(z);
      const double nn = (gi - gj).norm();
      if (nn <= 1e-14) return;
      kinks_.push_back(KinkPt{z, ia, ib, (gi - gj) / nn});
      const double u = ms[ia].value(z);
      const GraphPt e0{z, gi, u}, e1{z, gj, u};
      const Vec i0 = psi(H_, t_, e0), i1 = psi(H_, t_, e1);
      const double len = (i1 - i0).norm();
      const int ns = static_cast<int>(std::clamp(std::ceil(len / h_) + 1, 2.0, 20000.0));
      for (double s2 : linspace(0, 1, ns)) {
        const GraphPt g{z, (1 - s2) * gi + s2 * gj, u};
        if (in_window(psi(H_, t_, g), c_, r_out_)) graph_.push_back(g);
      }
    };
    for (std::size_t i = 0; i < n0; ++i)
      for (std::size_t j = 0; j < n1; ++j) {
        const int a = arg[i * n1 + j];
        const Vec qa = vec({ax0_[i], ax1_[j]});
        if (i + 1 < n0 && arg[(i + 1) * n1 + j] != a)
          add_kink(qa, vec({ax0_[i + 1], ax1_[j]}), a, arg[(i + 1) * n1 + j]);
        if (j + 1 < n1 && arg[i * n1 + j + 1] != a) add_kink(qa, vec({ax0_[i], ax1_[j + 1]}), a, arg[i * n1 + j + 1]);
      }
  }

  const Hamiltonian& H_;
  const InitialCondition& u0_;
  double t_;
  Vec c_;
  double r_out_;
  double h_;
  Box box_;
  std::vector<double> ax0_, ax1_;
  std::vector<GraphPt> graph_;
  std::vector<Vec> nodes_;
  std::vector<KinkPt> kinks_;
};

// Images in the outer window, and the subset in the inner window.
struct Cloud {
  PointSet outer;
  PointSet inner;
};

Cloud image_cloud(const Hamiltonian& H, double t, const std::vector<GraphPt>& g, const Vec& c, double r_in,
                  double r_out) {
  Cloud cl;
  for (const auto& s : g) {
    const Vec x = psi(H, t, s);
    if (!in_window(x, c, r_out)) continue;
    cl.outer.push_back(x);
    if (in_window(x, c, r_in)) cl.inner.push_back(x);
  }
  return cl;
}

Cloud graph_cloud(const Hamiltonian& H, double t, const std::vector<GraphPt>& g, const Vec& c, double r_in,
                  double r_out) {
  Cloud cl;
  for (const auto& s : g) {
    const Vec x = psi(H, t, s);
    if (!in_window(x, c, r_out)) continue;
    cl.outer.push_back(graph_point4(s));
    if (in_window(x, c, r_in)) cl.inner.push_back(graph_point4(s));
  }
  return cl;
}

// max of the directed distances from each inner set to the other outer set.
double local_hausdorff(const Cloud& X, const Cloud& Y) {
  return std::max(directed_hausdorff(X.inner, Y.outer), directed_hausdorff(Y.inner, X.outer));
}

double alpha_at(const Hamiltonian& H, const InitialCondition& u0, double t, const Vec& q, double v, double r,
                double h) {
  const LocalSampler smp(H, u0, t, q, r, h);
  const Cloud cl = image_cloud(H, t, smp.graph(), q, r, r);
  require(!cl.outer.empty(), ErrorCode::EmptyFiber, "no front samples near the witness");
  return std::min(point_set_distance(vec({q(0), q(1), v}), cl.outer), r);
}

}  // namespace

CounterexampleReport run_counterexample_saddle(double a, double b, double t, const SaddleOptions& opts) {
  require(std::isfinite(a) && std::isfinite(b) && b > a && a > 0, ErrorCode::InvalidArgument,
          "saddle scenario needs b > a > 0");
  require(a > 0.5 * b, ErrorCode::EmptyViolationInterval,
          "a <= b/2: the interval -(a+b)t < q1 < -(3b/2)t is empty");
  require(std::isfinite(t) && t > 0 && t < 2.0 / (3.0 * b), ErrorCode::InvalidArgument,
          "saddle scenario needs 0 < t < 2/(3b)");
  require(opts.dx > 0 && opts.residual_samples > 0, ErrorCode::InvalidArgument, "bad scenario options");
  const Hamiltonian H = saddle();
  const InitialCondition u0 = saddle_data(a, b);
  const double q1_lo = -(a + b) * t, q1_hi = -1.5 * b * t;

  CounterexampleReport rep;
  rep.scenario = "saddle";
  rep.t = t;
  rep.params = {{"a", a},
                {"b", b},
                {"hamiltonian", H.spec()},
                {"initial", u0.spec()},
                {"grid",
                 {{"q1", {opts.q1_lo, opts.q1_hi}}, {"q2", {opts.q2_lo, opts.q2_hi}}, {"dx", opts.dx}}}};
  rep.shock = {{"parabola", {{"c0", t * t * (a * a + a * b + b * b)}, {"c1", 2 * (a + b) * t}, {"c2", 1.0}}},
               {"q1_interval", {q1_lo, q1_hi}}};

  json profile = json::array();
  double max_formula_err = 0, min_res = kInf;
  const int ns = opts.residual_samples;
  for (int k = 0; k < ns; ++k) {
    const double q1 = q1_lo + (q1_hi - q1_lo) * (k + 1) / (ns + 1);
    const double r = saddle_residual(a, b, t, q1), f = saddle_residual_formula(a, b, t, q1);
    max_formula_err = std::max(max_formula_err, std::abs(r - f));
    min_res = std::min(min_res, r);
    profile.push_back({{"q1", q1}, {"q2", saddle_parabola(a, b, t, q1)}, {"residual", r}, {"formula", f}});
  }
  // Restriction of H to the segment between the two momenta at the interval midpoint.
  const double qm = 0.5 * (q1_lo + q1_hi);
  const Vec pa = vec({2 * a * (qm + a * t), -a}), pb = vec({2 * b * (qm + b * t), -b});
  const Vec dp = pb - pa;
  const Hamiltonian K = poly1d({H(pa), pa(0) * dp(1) + pa(1) * dp(0), dp(0) * dp(1)}, 2 * std::abs(dp(0) * dp(1)));
  const LaxVerdict lax = check_lax_condition(K, 0, 1);
  rep.lax_margin = std::min(lax.left_margin, lax.right_margin);
  rep.entropy_margin = check_entropy_condition(K, 0, 1).margin;

  const auto ax1 = make_axis(opts.q1_lo, opts.q1_hi, opts.dx), ax2 = make_axis(opts.q2_lo, opts.q2_hi, opts.dx);
  SolutionGrid R = envelope_solve(H, saddle_family(a, b), t, {ax1, ax2});
  double cross = 0;
  if (opts.cross_check) {
    const SolutionGrid Rm = variational_solve(H, u0, t, {ax1, ax2});
    for (std::size_t k = 0; k < R.size(); ++k) cross = std::max(cross, std::abs(R.values[k] - Rm.values[k]));
  }
  GridScheme scheme;
  scheme.axes = {ax1, ax2};
  SolutionGrid V = viscosity_solve(H, u0, t, scheme);
  const GapStats gs = compare_solutions(R, V);
  rep.sup_gap = gs.sup_abs_gap;
  rep.min_signed_gap = gs.min_signed_gap;
  rep.scheme_tolerance = convex_scheme_tolerance(opts.dx, t);

  double bg = -kInf;
  std::size_t best = 0;
  for (std::size_t k = 0; k < R.size(); ++k) {
    const Vec q = R.point(k);
    if (q(0) <= q1_lo || q(0) >= q1_hi) continue;
    if (std::abs(q(1) - saddle_parabola(a, b, t, q(0))) > opts.witness_band) continue;
    const double d = R.values[k] - V.values[k];
    if (d > bg) bg = d, best = k;
  }
  require(bg > -kInf, ErrorCode::EmptyViolationInterval, "no grid point inside the violation interval");
  rep.witness.q = R.point(best);
  rep.witness.R = R.values[best];
  rep.witness.V = V.values[best];
  rep.witness.gap = bg;
  rep.witness.strict = bg > 3 * rep.scheme_tolerance;
  if (bg > 0) {
    const double r = 1.5 * bg;
    rep.witness.alpha = alpha_at(H, u0, t, rep.witness.q, rep.witness.V, r, bg / 12);
  }
  rep.extra = {{"residual_profile", profile},
               {"residual_formula_max_error", max_formula_err},
               {"residual_min", min_res},
               {"cross_check_max", opts.cross_check ? json(cross) : json(nullptr)},
               {"max_signed_gap", gs.max_signed_gap},
               {"argmin_signed", to_j(gs.argmin_point)},
               {"scheme", V.meta},
               {"lax", {{"left", lax.left_margin}, {"right", lax.right_margin}}}};
  if (!opts.out_dir.empty()) {
    const std::string rp = join_path(opts.out_dir, "saddle_R.csv"), vp = join_path(opts.out_dir, "saddle_V.csv");
    write_solution_grid(rp, R, H.spec(), u0.spec());
    write_solution_grid(vp, V, H.spec(), u0.spec());
    rep.artifacts = {rp, vp};
  }
  return rep;
}

std::vector<double> default_eps_sweep() {
  std::vector<double> e;
  for (int k = 0; k <= 10; ++k) e.push_back(0.1 * std::ldexp(1.0, -k));
  return e;
}

json SmoothingReport::to_json() const {
  json rows_j = json::array();
  for (const auto& r : rows)
    rows_j.push_back({{"eps", r.eps},
                      {"sup_u_change", r.sup_u_change},
                      {"haus_graph", r.haus_graph},
                      {"haus_front", r.haus_front},
                      {"sup_v_change", r.sup_v_change},
                      {"dist_smoothed", r.dist_smoothed},
                      {"bound", r.bound},
                      {"bound_holds", r.bound_holds},
                      {"ete_holds", r.ete_holds},
                      {"ete_slack", r.ete_slack},
                      {"contdh_haus", r.contdh_haus},
                      {"contdh_bound", r.contdh_bound},
                      {"conditions_met", r.conditions_met},
                      {"conclusion_holds", r.conclusion_holds}});
  return {{"version", kReportVersion}, {"scenario", "smoothing"}, {"witness", to_j(witness)},
          {"alpha", alpha},            {"v_unsmoothed", v_unsmoothed}, {"spacing", spacing},
          {"window", window},          {"rows", rows_j}};
}

SmoothingReport run_smoothing_argument(const Hamiltonian& H, const CounterexampleReport& scenario,
                                       const std::vector<double>& eps_list, const SmoothingOptions& opts) {
  require(H.dim() == 2, ErrorCode::Unsupported, "the smoothing argument is run on 2D scenarios");
  require(scenario.witness.q.size() == 2, ErrorCode::InvalidArgument, "scenario witness is not 2D");
  require(scenario.witness.gap > 0 && scenario.witness.alpha > 0, ErrorCode::WitnessGapNonpositive,
          "scenario witness has no positive gap to the front");
  require(!eps_list.empty(), ErrorCode::InvalidArgument, "empty eps list");
  const InitialCondition uL = initial_condition_from_json(scenario.params.at("initial"));
  const double t = scenario.t;
  const Vec qs = scenario.witness.q;

  const int m = static_cast<int>(std::ceil(opts.v_radius / opts.dx));
  std::vector<double> ax1, ax2;
  for (int k = -m; k <= m; ++k) {
    ax1.push_back(qs(0) + k * opts.dx);
    ax2.push_back(qs(1) + k * opts.dx);
  }
  GridScheme scheme;
  scheme.axes = {ax1, ax2};
  const SolutionGrid VL = viscosity_solve(H, uL, t, scheme);
  const std::size_t centre = VL.index(m, m);

  SmoothingReport rep;
  rep.witness = qs;
  rep.v_unsmoothed = VL.values[centre];
  const double h = opts.spacing_ratio * scenario.witness.alpha;
  const double r_in = opts.window_ratio * scenario.witness.gap, r_out = 2 * r_in;
  rep.spacing = h;
  rep.window = r_in;

  const LocalSampler smp(H, uL, t, qs, r_out, h);
  const Cloud FL = image_cloud(H, t, smp.graph(), qs, r_in, r_out);
  const Cloud GL = graph_cloud(H, t, smp.graph(), qs, r_in, r_out);
  const Vec y = vec({qs(0), qs(1), rep.v_unsmoothed});
  rep.alpha = std::min(point_set_distance(y, FL.outer), r_out);
  require(rep.alpha > 0, ErrorCode::WitnessGapNonpositive, "witness lies on the sampled front");

  for (double eps : eps_list) {
    require(std::isfinite(eps) && eps > 0, ErrorCode::InvalidArgument, "eps must be positive");
    const Mollified mol(uL, eps, opts.order);
    SmoothingRow row;
    row.eps = eps;

    // Graph of du_eps: the preimage grid plus a band across the kink curve.
    std::vector<Vec> q0s = smp.nodes();
    for (const auto& k : smp.kinks())
      for (double d : linspace(-1.2 * eps, 1.2 * eps, opts.band_points)) {
        const Vec z = k.z + d * k.normal;
        if (smp.relevant(z, h)) q0s.push_back(z);
      }
    std::vector<GraphPt> ge(q0s.size());
    parallel_for(q0s.size(), [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) {
        double v;
        Vec g;
        mol.jet(q0s[i], &v, &g, nullptr);
        ge[i] = GraphPt{q0s[i], g, v};
      }
    });
    for (const auto& g : ge) row.sup_u_change = std::max(row.sup_u_change, std::abs(g.u - uL(g.q0)));
    const Cloud Fe = image_cloud(H, t, ge, qs, r_in, r_out);
    const Cloud Ge = graph_cloud(H, t, ge, qs, r_in, r_out);
    require(!Fe.outer.empty(), ErrorCode::EmptyFiber, "no smoothed front samples near the witness");
    row.haus_graph = local_hausdorff(Ge, GL);
    row.haus_front = local_hausdorff(Fe, FL);

    // Same graph of the unsmoothed data pushed by both psi maps.
    {
      PointSet A, B;
      double bound = 0;
      for (const auto& g : smp.graph()) {
        double ve;
        mol.jet(g.q0, &ve, nullptr, nullptr);
        const GraphPt ga{g.q0, g.p, ve};
        A.push_back(psi(H, t, ga));
        B.push_back(psi(H, t, g));
        bound = std::max(bound, std::abs(ve - g.u));
      }
      row.contdh_haus = hausdorff_distance(A, B);
      row.contdh_bound = bound;
    }

    const SolutionGrid Ve = viscosity_solve(H, mollify(uL, eps, opts.order), t, scheme);
    for (std::size_t k = 0; k < Ve.size(); ++k)
      row.sup_v_change = std::max(row.sup_v_change, std::abs(Ve.values[k] - VL.values[k]));
    const Vec x = vec({qs(0), qs(1), Ve.values[centre]});
    row.dist_smoothed = std::min(point_set_distance(x, Fe.outer), r_out);
    row.bound = rep.alpha - row.sup_v_change - row.haus_front;
    row.bound_holds = row.bound <= 0 || row.dist_smoothed >= row.bound - 1e-6;
    row.ete_holds = enhanced_triangle_check(x, y, Fe.outer, FL.outer, &row.ete_slack);
    row.conditions_met = row.sup_v_change < rep.alpha / 4 && row.haus_front < rep.alpha / 2;
    row.conclusion_holds = row.dist_smoothed >= rep.alpha / 4 - 1e-6;
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace hjlab
