#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

// Reference computations that use only closed forms or brute force.
namespace oracle {

// min over y in [lo, hi] (n samples) of u0(y) + (q - y)^2 / (2 t k).
inline double hopf_lax_quadratic(const std::function<double(double)>& u0, double k, double t, double q, double lo,
                                 double hi, int n) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double y = lo + (hi - lo) * i / (n - 1);
    best = std::min(best, u0(y) + (q - y) * (q - y) / (2 * t * k));
  }
  return best;
}

// Classical solutions u_c = c((q1 + c t)^2 - q2) of u_t + u_{q1} u_{q2} = 0 and the residual of
// their average.
inline double saddle_average_residual(double a, double b, double t, double q1) {
  const double xa = q1 + a * t, xb = q1 + b * t;
  const double phi_t = 0.5 * (2 * a * a * xa + 2 * b * b * xb);
  const double p1 = 0.5 * (2 * a * xa + 2 * b * xb);
  const double p2 = -0.5 * (a + b);
  return phi_t + p1 * p2;
}

struct Polyline {
  int tag = 0;  // -1 left tail, +1 right tail, 0 interior
  std::vector<double> x, y;
};

// Intersections of two polylines (interior crossings only), as x coordinates.
inline std::vector<double> crossings(const Polyline& A, const Polyline& B) {
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < A.x.size(); ++i) {
    const double ax0 = A.x[i], ay0 = A.y[i], rx = A.x[i + 1] - ax0, ry = A.y[i + 1] - ay0;
    const double amin = std::min(ax0, A.x[i + 1]), amax = std::max(ax0, A.x[i + 1]);
    for (std::size_t j = 0; j + 1 < B.x.size(); ++j) {
      if (std::max(B.x[j], B.x[j + 1]) < amin || std::min(B.x[j], B.x[j + 1]) > amax) continue;
      const double sx = B.x[j + 1] - B.x[j], sy = B.y[j + 1] - B.y[j];
      const double den = rx * sy - ry * sx;
      if (den == 0) continue;
      const double qx = B.x[j] - ax0, qy = B.y[j] - ay0;
      const double tt = (qx * sy - qy * sx) / den, uu = (qx * ry - qy * rx) / den;
      if (tt > 1e-9 && tt < 1 - 1e-9 && uu > 1e-9 && uu < 1 - 1e-9) out.push_back(ax0 + tt * rx);
    }
  }
  return out;
}

// Number of left-to-right continuous selections through the polylines: start on the left tail,
// switch curves only at crossings or end-to-start joins, finish on the right tail.
inline int count_sections(const std::vector<Polyline>& curves, int cap = 64) {
  const int n = static_cast<int>(curves.size());
  std::vector<std::vector<std::pair<double, int>>> ev(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (double x : crossings(curves[i], curves[j])) {
        ev[i].push_back({x, j});
        ev[j].push_back({x, i});
      }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const auto& a = curves[i];
      const auto& b = curves[j];
      if (std::abs(a.x.back() - b.x.front()) < 1e-9 && std::abs(a.y.back() - b.y.front()) < 1e-9)
        ev[i].push_back({a.x.back(), j});
    }
  int found = 0;
  std::function<void(int, double)> dfs = [&](int i, double xin) {
    if (found > cap) return;
    if (curves[i].tag == 1) ++found;
    for (const auto& [x, j] : ev[i])
      if (x > xin + 1e-12) dfs(j, x);
  };
  for (int i = 0; i < n; ++i)
    if (curves[i].tag == -1) dfs(i, -std::numeric_limits<double>::infinity());
  return found;
}

// Reduced time-1 front of u0 = -|q| under a 1D Hamiltonian with derivative dh, second derivative
// d2h: two tails and the fan from the kink split where d2h changes sign.
inline std::vector<Polyline> kink_fan_polylines(const std::function<double(double)>& h,
                                                const std::function<double(double)>& dh,
                                                const std::function<double(double)>& d2h, int n,
                                                double big = 1e3) {
  std::vector<double> br{-1.0};
  const int scan = 20000;
  for (int i = 0; i < scan; ++i) {
    double a = -1 + 2.0 * i / scan, b = -1 + 2.0 * (i + 1) / scan;
    if ((d2h(a) > 0) == (d2h(b) > 0)) continue;
    for (int k = 0; k < 80; ++k) {
      const double m = 0.5 * (a + b);
      ((d2h(a) > 0) == (d2h(m) > 0) ? a : b) = m;
    }
    br.push_back(0.5 * (a + b));
  }
  br.push_back(1.0);
  std::vector<Polyline> out;
  out.push_back({-1, {-big, dh(1)}, {-big - h(1), dh(1) - h(1)}});
  out.push_back({1, {dh(-1), big}, {-dh(-1) - h(-1), -big - h(-1)}});
  for (std::size_t k = 0; k + 1 < br.size(); ++k) {
    Polyline pl;
    for (int i = 0; i < n; ++i) {
      const double p = br[k] + (br[k + 1] - br[k]) * i / (n - 1);
      pl.x.push_back(dh(p));
      pl.y.push_back(p * dh(p) - h(p));
    }
    if (pl.x.front() > pl.x.back()) {
      std::reverse(pl.x.begin(), pl.x.end());
      std::reverse(pl.y.begin(), pl.y.end());
    }
    out.push_back(pl);
  }
  return out;
}

}  // namespace oracle
