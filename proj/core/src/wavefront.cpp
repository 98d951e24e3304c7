#include "hjlab/wavefront.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "hjlab/characteristics.hpp"
#include "hjlab/error.hpp"
#include "hjlab/numerics.hpp"
#include "hjlab/parallel.hpp"

namespace hjlab {

std::string BranchSource::label() const {
  if (kind == Kind::Piece) return "piece:" + std::to_string(index);
  if (i >= 0 && j >= 0) return "fan:" + std::to_string(i) + "-" + std::to_string(j);
  return "fan:" + std::to_string(index);
}

Front::Front(Hamiltonian H, InitialCondition u0, double t, bool reduced)
    : H_(std::move(H)), u0_(std::move(u0)), t_(t), reduced_(reduced) {
  require(std::isfinite(t) && t >= 0, ErrorCode::InvalidArgument, "front time must be >= 0");
  require(!reduced || t > 0, ErrorCode::InvalidArgument, "reduced front needs t > 0");
  require(H_.dim() == u0_.dim(), ErrorCode::InvalidArgument, "dimension mismatch between H and u0");
}

double Front::momentum(int b, double s) const {
  const auto& br = branches[b];
  if (br.source.kind == BranchSource::Kind::Fan) return s;
  return u0_.members()[br.member].grad(vec1(s))(0);
}

double Front::x(int b, double s) const {
  const auto& br = branches[b];
  const double q0 = br.source.kind == BranchSource::Kind::Fan ? br.q0 : s;
  const double dh = H_.dh(momentum(b, s));
  return reduced_ ? q0 / t_ + dh : q0 + t_ * dh;
}

double Front::y(int b, double s) const {
  const auto& br = branches[b];
  const double p = momentum(b, s);
  const double a = p * H_.dh(p) - H_.h(p);
  const double v = br.source.kind == BranchSource::Kind::Fan ? u0_.value1(br.q0)
                                                            : u0_.members()[br.member].value(vec1(s));
  return reduced_ ? v / t_ + a : v + t_ * a;
}

double Front::dx(int b, double s) const {
  const auto& br = branches[b];
  const double p = momentum(b, s);
  if (br.source.kind == BranchSource::Kind::Fan) return reduced_ ? H_.d2h(p) : t_ * H_.d2h(p);
  const double g2 = u0_.members()[br.member].hess(vec1(s))(0, 0);
  return reduced_ ? 1.0 / t_ + H_.d2h(p) * g2 : 1.0 + t_ * H_.d2h(p) * g2;
}

double Front::dy(int b, double s) const { return momentum(b, s) * dx(b, s); }

FrontPoint Front::point(int b, double s) const {
  const auto& br = branches[b];
  FrontPoint pt;
  pt.q = vec1(x(b, s));
  pt.S = y(b, s);
  pt.p = vec1(momentum(b, s));
  pt.q0 = vec1(br.source.kind == BranchSource::Kind::Fan ? br.q0 : s);
  pt.source = b;
  pt.param = s;
  return pt;
}

std::vector<FrontPoint> Front::sample(int n) const {
  if (dim() != 1) return cloud;
  std::vector<FrontPoint> out;
  for (int b = 0; b < static_cast<int>(branches.size()); ++b)
    for (double s : linspace(branches[b].a, branches[b].b, std::max(n, 2))) out.push_back(point(b, s));
  return out;
}

Front build_front_1d(const Hamiltonian& H, const InitialCondition& u0, double t) {
  require(u0.dim() == 1, ErrorCode::InvalidArgument, "build_front_1d needs 1D data");
  Front f(H, u0, t);
  const auto& pieces = u0.pieces_1d();
  for (int k = 0; k < static_cast<int>(pieces.size()); ++k) {
    FrontBranch b;
    b.source = BranchSource{BranchSource::Kind::Piece, k, pieces[k].member, -1};
    b.a = pieces[k].a;
    b.b = pieces[k].b;
    b.member = pieces[k].member;
    f.branches.push_back(b);
  }
  const auto& kinks = u0.kinks_1d();
  for (int k = 0; k < static_cast<int>(kinks.size()); ++k) {
    FrontBranch b;
    b.source = BranchSource{BranchSource::Kind::Fan, k, -1, -1};
    b.a = std::min(kinks[k].p_left, kinks[k].p_right);
    b.b = std::max(kinks[k].p_left, kinks[k].p_right);
    b.q0 = kinks[k].q;
    f.branches.push_back(b);
  }
  for (const auto& b : f.branches) f.sources.push_back(b.source);
  return f;
}

Front reduced_front(const Hamiltonian& H, const InitialCondition& u0, double t) {
  require(t > 0, ErrorCode::InvalidArgument, "reduced front needs t > 0");
  Front raw = build_front_1d(H, u0, t);
  Front f(H, u0, t, true);
  f.branches = raw.branches;
  f.sources = raw.sources;
  return f;
}

Front build_front_cloud(const Hamiltonian& H, const InitialCondition& u0, double t, const CloudSpec& spec) {
  require(u0.dim() == 2, ErrorCode::Unsupported, "cloud fronts are built for d = 2");
  require(spec.n_per_axis >= 2 && spec.fan_samples >= 2, ErrorCode::InvalidArgument, "cloud spec too small");
  Front f(H, u0, t);
  const int m = u0.member_count();
  for (int i = 0; i < m; ++i) f.sources.push_back(BranchSource{BranchSource::Kind::Piece, i, i, -1});
  std::map<std::pair<int, int>, int> fan_id;
  auto fan_source = [&](int i, int j) {
    const auto key = std::make_pair(std::min(i, j), std::max(i, j));
    auto it = fan_id.find(key);
    if (it != fan_id.end()) return it->second;
    const int id = static_cast<int>(f.sources.size());
    f.sources.push_back(BranchSource{BranchSource::Kind::Fan, id, key.first, key.second});
    fan_id[key] = id;
    return id;
  };
  const Box& D = u0.domain();
  const auto ax = linspace(D.lo(0), D.hi(0), spec.n_per_axis);
  const auto ay = linspace(D.lo(1), D.hi(1), spec.n_per_axis);
  const int n = spec.n_per_axis;
  std::vector<int> who(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Vec q0 = vec({ax[i], ay[j]});
      const int k = u0.argmin(q0);
      who[i * n + j] = k;
      const auto& g = u0.members()[k];
      FrontPoint pt;
      pt.q0 = q0;
      pt.p = g.grad(q0);
      pt.q = q0 + t * H.grad(pt.p);
      pt.S = g.value(q0) + action(H, t, pt.p);
      pt.source = k;
      f.cloud.push_back(pt);
    }
  const auto fans = linspace(0, 1, spec.fan_samples);
  auto add_kink = [&](const Vec& a, const Vec& b, int i, int j) {
    const auto& gi = u0.members()[i];
    const auto& gj = u0.members()[j];
    const double s = bisect([&](double s) { return gi.value(Vec(a + s * (b - a))) - gj.value(Vec(a + s * (b - a))); },
                            0.0, 1.0, 1e-15);
    const Vec z = a + s * (b - a);
    const double u = u0(z);
    if (gi.value(z) > u + 1e-10 || gj.value(z) > u + 1e-10) return;
    const int src = fan_source(i, j);
    const bool swap = i > j;
    const Vec g0 = swap ? gj.grad(z) : gi.grad(z);
    const Vec g1 = swap ? gi.grad(z) : gj.grad(z);
    for (double sv : fans) {
      FrontPoint pt;
      pt.q0 = z;
      pt.p = (1 - sv) * g0 + sv * g1;
      pt.q = z + t * H.grad(pt.p);
      pt.S = u + action(H, t, pt.p);
      pt.source = src;
      pt.param = sv;
      f.cloud.push_back(pt);
    }
  };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i + 1 < n && who[i * n + j] != who[(i + 1) * n + j])
        add_kink(vec({ax[i], ay[j]}), vec({ax[i + 1], ay[j]}), who[i * n + j], who[(i + 1) * n + j]);
      if (j + 1 < n && who[i * n + j] != who[i * n + j + 1])
        add_kink(vec({ax[i], ay[j]}), vec({ax[i], ay[j + 1]}), who[i * n + j], who[i * n + j + 1]);
    }
  return f;
}

namespace {

double segment_distance(const Vec& p, const Vec& a, const Vec& b) {
  const Vec ab = b - a;
  const double l2 = ab.squaredNorm();
  const double s = l2 > 0 ? std::clamp((p - a).dot(ab) / l2, 0.0, 1.0) : 0.0;
  return (p - (a + s * ab)).norm();
}

double hull_distance(const Vec& p, const std::vector<Vec>& v) {
  if (v.size() == 1) return (p - v[0]).norm();
  if (p.size() == 1) {
    double lo = v[0](0), hi = v[0](0);
    for (const auto& x : v) {
      lo = std::min(lo, x(0));
      hi = std::max(hi, x(0));
    }
    return std::max({0.0, lo - p(0), p(0) - hi});
  }
  if (v.size() == 2) return segment_distance(p, v[0], v[1]);
  bool inside = true;
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < v.size(); ++k) {
    const Vec& a = v[k];
    const Vec& b = v[(k + 1) % v.size()];
    const double cr = (b(0) - a(0)) * (p(1) - a(1)) - (b(1) - a(1)) * (p(0) - a(0));
    if (cr < 0) inside = false;
    d = std::min(d, segment_distance(p, a, b));
  }
  return inside ? 0.0 : d;
}

}  // namespace

double membership_residual(const Front& front, const FrontPoint& pt) {
  const auto& u0 = front.initial();
  const auto& H = front.hamiltonian();
  const double t = front.t();
  const auto fan = clarke_derivative(u0, pt.q0, 1e-9);
  if (hull_distance(pt.p, fan.vertices) > 1e-10) return std::numeric_limits<double>::infinity();
  double rq, rs;
  if (front.reduced()) {
    rq = (pt.q0 / t + H.grad(pt.p) - pt.q).norm();
    rs = std::abs(u0(pt.q0) / t + (pt.p.dot(H.grad(pt.p)) - H(pt.p)) - pt.S);
  } else {
    rq = (pt.q0 + t * H.grad(pt.p) - pt.q).norm();
    rs = std::abs(u0(pt.q0) + action(H, t, pt.p) - pt.S);
  }
  return std::max(rq, rs);
}

double branch_slope(const Front& front, int b, double s) {
  const double d = front.dx(b, s);
  require(std::abs(d) > 1e-12, ErrorCode::DegenerateParam, "branch is vertical at this parameter");
  return front.momentum(b, s);
}

int branch_convexity_sign(const Front& front, int b, double s) {
  const auto& br = front.branches[b];
  require(br.source.kind == BranchSource::Kind::Piece, ErrorCode::Unsupported,
          "convexity sign is defined on piece branches");
  require(front.dx(b, s) > 0, ErrorCode::DegenerateParam, "piece branch is not a graph here");
  const double g2 = front.initial().members()[br.member].hess(vec1(s))(0, 0);
  if (std::abs(g2) <= 1e-12) return 0;
  return g2 > 0 ? 1 : -1;
}

std::vector<FrontCurve> resolve_curves(const Front& front, int n) {
  require(front.dim() == 1, ErrorCode::Unsupported, "curves are defined for 1D fronts");
  std::vector<FrontCurve> out;
  for (int b = 0; b < static_cast<int>(front.branches.size()); ++b) {
    const auto& br = front.branches[b];
    if (!(br.b > br.a)) continue;
    const auto s = linspace(br.a, br.b, n);
    std::vector<double> cuts{br.a};
    double prev = front.dx(b, s[0]);
    for (int k = 1; k < n; ++k) {
      const double cur = front.dx(b, s[k]);
      if ((prev > 0 && cur < 0) || (prev < 0 && cur > 0))
        cuts.push_back(bisect([&](double v) { return front.dx(b, v); }, s[k - 1], s[k], 1e-15));
      if (cur != 0) prev = cur;
    }
    cuts.push_back(br.b);
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const double x0 = front.x(b, cuts[k]), x1 = front.x(b, cuts[k + 1]);
      if (std::abs(x1 - x0) <= 1e-13) continue;
      FrontCurve c;
      c.branch = b;
      if (x0 < x1) {
        c.pl = cuts[k], c.pr = cuts[k + 1], c.xl = x0, c.xr = x1;
      } else {
        c.pl = cuts[k + 1], c.pr = cuts[k], c.xl = x1, c.xr = x0;
      }
      out.push_back(c);
    }
  }
  return out;
}

double curve_param(const Front& front, const FrontCurve& c, double x) {
  if (x <= c.xl) return c.pl;
  if (x >= c.xr) return c.pr;
  const double a = std::min(c.pl, c.pr), b = std::max(c.pl, c.pr);
  const int b_idx = c.branch;
  double root = 0;
  const bool ok = bracketed_root([&](double s) { return front.x(b_idx, s) - x; },
                                 [&](double s) { return front.dx(b_idx, s); }, a, b, root, 1e-9, 1e-15);
  require(ok, ErrorCode::NoConvergence, "curve inversion failed");
  return root;
}

double curve_value(const Front& front, const FrontCurve& c, double x) {
  return front.y(c.branch, curve_param(front, c, x));
}

double section_value(const Front& front, const Section& s, double x) {
  for (const auto& seg : s.segments)
    if (x <= seg.x1) return curve_value(front, seg.curve, x);
  return curve_value(front, s.segments.back().curve, x);
}

std::vector<ShockPoint> find_shocks(const Front& front, const Section& s) {
  std::vector<ShockPoint> out;
  for (std::size_t k = 0; k + 1 < s.segments.size(); ++k) {
    const auto& L = s.segments[k];
    const auto& R = s.segments[k + 1];
    const double x = L.x1;
    const double p1 = front.momentum(L.curve.branch, curve_param(front, L.curve, x));
    const double p2 = front.momentum(R.curve.branch, curve_param(front, R.curve, x));
    if (std::abs(p1 - p2) <= 1e-8) continue;
    ShockPoint sp;
    sp.q = x;
    sp.t = front.t();
    sp.S = curve_value(front, L.curve, x);
    sp.p1 = p1;
    sp.p2 = p2;
    sp.left_source = front.sources[L.curve.branch].label();
    sp.right_source = front.sources[R.curve.branch].label();
    out.push_back(sp);
  }
  return out;
}

namespace {

struct Crossing {
  double x;
  int other;
};

constexpr double kEndTol = 1e-11;

std::vector<std::vector<Crossing>> find_crossings(const Front& front, const std::vector<FrontCurve>& cs,
                                                  const std::vector<double>& grid, double lo, double hi) {
  const int n = static_cast<int>(cs.size());
  std::vector<std::vector<Crossing>> out(n);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      const double l = std::max({cs[a].xl, cs[b].xl, lo});
      const double r = std::min({cs[a].xr, cs[b].xr, hi});
      if (!(r - l > kEndTol)) continue;
      std::vector<double> xs{l};
      for (double g : grid)
        if (g > l && g < r) xs.push_back(g);
      xs.push_back(r);
      auto d = [&](double x) { return curve_value(front, cs[a], x) - curve_value(front, cs[b], x); };
      std::vector<double> dv(xs.size());
      for (std::size_t k = 0; k < xs.size(); ++k) dv[k] = d(xs[k]);
      // Near-zero values at the overlap ends are junction contacts, not crossings.
      auto sgn = [&](std::size_t k) {
        const bool end = k == 0 || k + 1 == xs.size();
        if (end && std::abs(dv[k]) <= 1e-10) return 0;
        return dv[k] > 0 ? 1 : (dv[k] < 0 ? -1 : 0);
      };
      int prev_sign = 0;
      std::size_t prev_k = 0;
      for (std::size_t k = 0; k < xs.size(); ++k) {
        const int s = sgn(k);
        if (s == 0) continue;
        if (prev_sign != 0) {
          const double m = 0.5 * (xs[prev_k] + xs[k]);
          const double dm = d(m);
          if (s == prev_sign) {
            if ((dm > 0 ? 1 : -1) != s && std::abs(dm) > 1e-12)
              fail(ErrorCode::ResolutionTooCoarse, "two crossings inside one grid cell");
          } else {
            const double x = bisect(d, xs[prev_k], xs[k], 1e-14);
            if (x > l + kEndTol && x < r - kEndTol) {
              out[a].push_back(Crossing{x, b});
              out[b].push_back(Crossing{x, a});
            }
          }
        }
        prev_sign = s;
        prev_k = k;
      }
    }
  for (auto& v : out) std::sort(v.begin(), v.end(), [](const Crossing& u, const Crossing& w) { return u.x < w.x; });
  return out;
}

}  // namespace

std::vector<Section> enumerate_continuous_sections(const Front& front, const std::vector<double>& q_grid) {
  require(q_grid.size() >= 2, ErrorCode::InvalidArgument, "q grid needs two points");
  const auto cs = resolve_curves(front);
  require(!cs.empty(), ErrorCode::EmptyFiber, "front has no curves");
  double cover_lo = std::numeric_limits<double>::infinity(), cover_hi = -cover_lo;
  for (const auto& c : cs) {
    cover_lo = std::min(cover_lo, c.xl);
    cover_hi = std::max(cover_hi, c.xr);
  }
  const double lo = std::max(q_grid.front(), cover_lo);
  const double hi = std::min(q_grid.back(), cover_hi);
  require(hi > lo, ErrorCode::EmptyFiber, "q grid does not meet the front");
  const auto crossings = find_crossings(front, cs, q_grid, lo, hi);
  const int n = static_cast<int>(cs.size());
  std::vector<std::vector<int>> junctions(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (a == b) continue;
      if (std::abs(cs[a].xr - cs[b].xl) > 1e-9) continue;
      if (std::abs(front.y(cs[a].branch, cs[a].pr) - front.y(cs[b].branch, cs[b].pl)) > 1e-9) continue;
      junctions[a].push_back(b);
    }
  const std::size_t cap = 64;
  std::vector<Section> out;
  std::vector<SectionSegment> path;
  std::function<void(int, double)> dfs = [&](int c, double from) {
    if (out.size() >= cap) return;
    const double end = std::min(cs[c].xr, hi);
    for (const auto& cr : crossings[c]) {
      if (cr.x <= from + kEndTol || cr.x >= end) continue;
      path.push_back(SectionSegment{cs[c], from, cr.x});
      dfs(cr.other, cr.x);
      path.pop_back();
      if (out.size() >= cap) return;
    }
    path.push_back(SectionSegment{cs[c], from, end});
    if (end >= hi - kEndTol) {
      out.push_back(Section{path});
    } else {
      for (int nb : junctions[c]) dfs(nb, end);
    }
    path.pop_back();
  };
  for (int c = 0; c < n; ++c)
    if (cs[c].xl <= lo + kEndTol && cs[c].xr > lo + kEndTol) dfs(c, lo);
  return out;
}

Section minimal_section_path(const Front& front, const std::vector<double>& q) {
  const auto cs = resolve_curves(front);
  const std::size_t n = q.size();
  std::vector<int> best(n, -1);
  std::vector<double> val(n, std::numeric_limits<double>::infinity());
  parallel_for(n, [&](std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k)
      for (int c = 0; c < static_cast<int>(cs.size()); ++c) {
        if (q[k] < cs[c].xl - 1e-12 || q[k] > cs[c].xr + 1e-12) continue;
        const double v = curve_value(front, cs[c], q[k]);
        if (v < val[k]) {
          val[k] = v;
          best[k] = c;
        }
      }
  });
  for (std::size_t k = 0; k < n; ++k)
    require(best[k] >= 0, ErrorCode::EmptyFiber, "no front point above q = " + std::to_string(q[k]));
  Section s;
  double start = q.front();
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const int a = best[k], b = best[k + 1];
    if (a == b) continue;
    double x;
    const double l = std::max({cs[a].xl, cs[b].xl, q[k]});
    const double r = std::min({cs[a].xr, cs[b].xr, q[k + 1]});
    auto d = [&](double z) { return curve_value(front, cs[a], z) - curve_value(front, cs[b], z); };
    if (r > l && (d(l) > 0) != (d(r) > 0)) {
      x = bisect(d, l, r, 1e-14);
    } else if (cs[a].xr < q[k + 1] + 1e-12) {
      x = std::clamp(cs[a].xr, q[k], q[k + 1]);
    } else if (l > q[k]) {
      x = l;
    } else {
      x = 0.5 * (q[k] + q[k + 1]);
    }
    s.segments.push_back(SectionSegment{cs[a], start, x});
    start = x;
  }
  s.segments.push_back(SectionSegment{cs[best[n - 1]], start, q.back()});
  return s;
}

SolutionGrid minimal_section(const Front& front, const std::vector<double>& q) {
  require(front.dim() == 1, ErrorCode::Unsupported, "use minimal_section_2d for d = 2");
  require(!q.empty(), ErrorCode::InvalidArgument, "empty q grid");
  const auto cs = resolve_curves(front);
  SolutionGrid g = make_grid(front.t(), {q}, Provenance::Variational);
  std::vector<char> found(q.size(), 0);
  parallel_for(q.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) {
      double m = std::numeric_limits<double>::infinity();
      for (const auto& c : cs) {
        if (q[k] < c.xl - 1e-12 || q[k] > c.xr + 1e-12) continue;
        m = std::min(m, curve_value(front, c, q[k]));
      }
      g.values[k] = m;
      found[k] = std::isfinite(m);
    }
  });
  for (std::size_t k = 0; k < q.size(); ++k)
    require(found[k], ErrorCode::EmptyFiber, "no front point above q = " + std::to_string(q[k]));
  return g;
}

struct FiberSolver::Impl {
  Hamiltonian H;
  InitialCondition u0;
  double t;
  std::vector<FrontPoint> cloud;
  std::vector<BranchSource> sources;
  Vec lo;
  double h = 1;
  int nx = 1, ny = 1;
  std::vector<std::vector<int>> bins;
  double q0_spacing = 1;

  int bin_of(double v, double l, int n) const {
    return std::clamp(static_cast<int>(std::floor((v - l) / h)), 0, n - 1);
  }

  bool solve_piece(int i, const Vec& q, Vec& z) const {
    const auto& g = u0.members()[i];
    const Mat I = Mat::Identity(2, 2);
    auto res = [&](const Vec& x) { return Vec(x + t * H.grad(g.grad(x)) - q); };
    Vec r = res(z);
    double rn = r.norm();
    const double tol = 1e-13 * (1 + q.norm());
    for (int it = 0; it < 50 && rn > tol; ++it) {
      const Mat J = I + t * H.hess(g.grad(z)) * g.hess(z);
      const Vec step = J.fullPivLu().solve(r);
      if (!step.allFinite()) return false;
      double lam = 1;
      bool moved = false;
      for (int k = 0; k < 20; ++k, lam *= 0.5) {
        const Vec c = z - lam * step;
        const Vec rc = res(c);
        if (rc.norm() < rn) {
          z = c, r = rc, rn = rc.norm(), moved = true;
          break;
        }
      }
      if (!moved) break;
    }
    return rn <= 1e-10;
  }

  bool solve_fan(int i, int j, const Vec& q, Vec& z, double& s) const {
    const auto& gi = u0.members()[i];
    const auto& gj = u0.members()[j];
    auto res = [&](const Vec& x, double sv) {
      Vec r(3);
      r(0) = gi.value(x) - gj.value(x);
      const Vec p = (1 - sv) * gi.grad(x) + sv * gj.grad(x);
      r.tail(2) = x + t * H.grad(p) - q;
      return r;
    };
    Vec r = res(z, s);
    double rn = r.norm();
    const double tol = 1e-13 * (1 + q.norm());
    for (int it = 0; it < 50 && rn > tol; ++it) {
      const Vec di = gi.grad(z), dj = gj.grad(z);
      const Vec p = (1 - s) * di + s * dj;
      const Mat Hp = H.hess(p);
      Mat J = Mat::Zero(3, 3);
      J(0, 0) = di(0) - dj(0);
      J(0, 1) = di(1) - dj(1);
      J.block(1, 0, 2, 2) = Mat::Identity(2, 2) + t * Hp * ((1 - s) * gi.hess(z) + s * gj.hess(z));
      J.block(1, 2, 2, 1) = t * Hp * (dj - di);
      const Vec step = J.fullPivLu().solve(r);
      if (!step.allFinite()) return false;
      double lam = 1;
      bool moved = false;
      for (int k = 0; k < 20; ++k, lam *= 0.5) {
        const Vec zc = z - lam * step.head(2);
        const double sc = s - lam * step(2);
        const Vec rc = res(zc, sc);
        if (rc.norm() < rn) {
          z = zc, s = sc, r = rc, rn = rc.norm(), moved = true;
          break;
        }
      }
      if (!moved) break;
    }
    return rn <= 1e-10;
  }
};

FiberSolver::FiberSolver(const Front& front) {
  require(front.dim() == 2 && !front.cloud.empty(), ErrorCode::Unsupported, "fiber solver needs a 2D cloud");
  auto im = std::make_shared<Impl>(Impl{front.hamiltonian(), front.initial(), front.t(), front.cloud,
                                        front.sources, Vec(), 1, 1, 1, {}, 1});
  Vec lo = front.cloud[0].q, hi = lo;
  for (const auto& p : front.cloud) {
    lo = lo.cwiseMin(p.q);
    hi = hi.cwiseMax(p.q);
  }
  const Box& D = im->u0.domain();
  const double area = (D.hi - D.lo).prod();
  const double n_pieces = static_cast<double>(front.cloud.size());
  im->q0_spacing = std::sqrt(area / n_pieces);
  im->h = 2.0 * im->q0_spacing;
  im->lo = lo;
  im->nx = std::max(1, static_cast<int>(std::ceil((hi(0) - lo(0)) / im->h)) + 1);
  im->ny = std::max(1, static_cast<int>(std::ceil((hi(1) - lo(1)) / im->h)) + 1);
  im->bins.assign(static_cast<std::size_t>(im->nx) * im->ny, {});
  for (int k = 0; k < static_cast<int>(front.cloud.size()); ++k) {
    const auto& p = front.cloud[k];
    im->bins[im->bin_of(p.q(0), lo(0), im->nx) * im->ny + im->bin_of(p.q(1), lo(1), im->ny)].push_back(k);
  }
  impl_ = im;
}

std::vector<FiberPoint> FiberSolver::fiber(const Vec& q) const {
  const Impl& m = *impl_;
  const int bx = static_cast<int>(std::floor((q(0) - m.lo(0)) / m.h));
  const int by = static_cast<int>(std::floor((q(1) - m.lo(1)) / m.h));
  std::vector<int> cand;
  for (int ring = 2; ring <= 64 && cand.empty(); ring *= 2) {
    for (int i = bx - ring; i <= bx + ring; ++i)
      for (int j = by - ring; j <= by + ring; ++j) {
        if (i < 0 || j < 0 || i >= m.nx || j >= m.ny) continue;
        const auto& b = m.bins[static_cast<std::size_t>(i) * m.ny + j];
        cand.insert(cand.end(), b.begin(), b.end());
      }
  }
  std::sort(cand.begin(), cand.end(), [&](int a, int b) {
    const double da = (m.cloud[a].q - q).squaredNorm(), db = (m.cloud[b].q - q).squaredNorm();
    return da < db || (da == db && a < b);
  });
  std::map<int, std::vector<int>> seeds;
  for (int k : cand) {
    auto& s = seeds[m.cloud[k].source];
    if (s.size() >= 4) continue;
    bool distinct = true;
    for (int o : s) {
      const bool near_q0 = (m.cloud[o].q0 - m.cloud[k].q0).norm() <= 4 * m.q0_spacing;
      const bool near_s = std::abs(m.cloud[o].param - m.cloud[k].param) <= 0.25;
      if (near_q0 && near_s) distinct = false;
    }
    if (distinct) s.push_back(k);
  }
  std::vector<FiberPoint> out;
  auto add = [&](FiberPoint fp) {
    for (const auto& o : out)
      if (o.source == fp.source && (o.q0 - fp.q0).norm() <= 1e-7 && std::abs(o.s - fp.s) <= 1e-7) return;
    out.push_back(fp);
  };
  const Box& D = m.u0.domain();
  for (const auto& [src, ks] : seeds) {
    const auto& bs = m.sources[src];
    for (int k : ks) {
      Vec z = m.cloud[k].q0;
      if (bs.kind == BranchSource::Kind::Piece) {
        if (!m.solve_piece(bs.index, q, z) || !D.contains(z, 1e-9)) continue;
        const auto& g = m.u0.members()[bs.index];
        if (g.value(z) > m.u0(z) + 1e-10) continue;
        FiberPoint fp;
        fp.q0 = z;
        fp.p = g.grad(z);
        fp.S = g.value(z) + action(m.H, m.t, fp.p);
        fp.source = src;
        add(fp);
      } else {
        double s = m.cloud[k].param;
        if (!m.solve_fan(bs.i, bs.j, q, z, s) || !D.contains(z, 1e-9)) continue;
        if (s < -1e-10 || s > 1 + 1e-10) continue;
        s = std::clamp(s, 0.0, 1.0);
        const auto& gi = m.u0.members()[bs.i];
        const auto& gj = m.u0.members()[bs.j];
        const double u = m.u0(z);
        if (gi.value(z) > u + 1e-9 || gj.value(z) > u + 1e-9) continue;
        FiberPoint fp;
        fp.q0 = z;
        fp.p = (1 - s) * gi.grad(z) + s * gj.grad(z);
        fp.S = u + action(m.H, m.t, fp.p);
        fp.source = src;
        fp.s = s;
        add(fp);
      }
    }
  }
  return out;
}

SolutionGrid minimal_section_2d(const Front& front, const std::vector<double>& ax1, const std::vector<double>& ax2) {
  const FiberSolver solver(front);
  SolutionGrid g = make_grid(front.t(), {ax1, ax2}, Provenance::Variational);
  std::vector<char> found(g.size(), 0);
  parallel_for(g.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) {
      double m = std::numeric_limits<double>::infinity();
      for (const auto& fp : solver.fiber(g.point(k))) m = std::min(m, fp.S);
      g.values[k] = m;
      found[k] = std::isfinite(m);
    }
  });
  for (std::size_t k = 0; k < g.size(); ++k)
    if (!found[k]) {
      const Vec q = g.point(k);
      fail(ErrorCode::EmptyFiber,
           "no front point above (" + std::to_string(q(0)) + ", " + std::to_string(q(1)) + ")");
    }
  return g;
}

}  // namespace hjlab
