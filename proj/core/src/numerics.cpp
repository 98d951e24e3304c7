#include "hjlab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "hjlab/types.hpp"

namespace hjlab {

double sym_norm(const Mat& m) {
  if (m.rows() == 1) return std::abs(m(0, 0));
  Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double op_norm(const Mat& m) {
  if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out(static_cast<size_t>(std::max(n, 0)));
  if (n == 1) {
    out[0] = a;
    return out;
  }
  for (int i = 0; i < n; ++i) out[i] = a + (b - a) * i / (n - 1);
  if (n > 1) out.back() = b;
  return out;
}

double smoothstep5(double x) {
  if (x <= 0) return 0;
  if (x >= 1) return 1;
  return x * x * x * (10 - 15 * x + 6 * x * x);
}

double tail_w0(double x) { return 1 - smoothstep5(x); }

double tail_w1(double x) {
  if (x <= 0) return x;
  if (x >= 1) return 0.5;
  const double x4 = x * x * x * x;
  return x - (2.5 * x4 - 3 * x4 * x + x4 * x * x);
}

double tail_w2(double x) {
  if (x <= 0) return 0.5 * x * x;
  if (x >= 1) return 5.0 / 14.0 + 0.5 * (x - 1);
  const double x5 = x * x * x * x * x;
  return 0.5 * x * x - (0.5 * x5 - 0.5 * x5 * x + x5 * x * x / 7.0);
}

Jet damped_tail(const Jet& b, double s, double width, int direction) {
  const double x = s / width;
  const double dir = direction >= 0 ? 1.0 : -1.0;
  Jet out;
  out.v = b.v + dir * b.d1 * s + b.d2 * width * width * tail_w2(x);
  out.d1 = b.d1 + dir * b.d2 * width * tail_w1(x);
  out.d2 = b.d2 * tail_w0(x);
  return out;
}

bool bracketed_root(const std::function<double(double)>& f, const std::function<double(double)>& df,
                    double a, double b, double& root, double bisect_tol, double tol) {
  double fa = f(a), fb = f(b);
  if (fa == 0) {
    root = a;
    return true;
  }
  if (fb == 0) {
    root = b;
    return true;
  }
  if ((fa > 0) == (fb > 0)) return false;
  while (b - a > bisect_tol) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if (fm == 0) {
      root = m;
      return true;
    }
    if ((fm > 0) == (fa > 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  double x = 0.5 * (a + b);
  for (int it = 0; it < 50; ++it) {
    const double fx = f(x);
    const double d = df(x);
    if (d == 0 || !std::isfinite(d)) break;
    double nx = x - fx / d;
    if (nx < a || nx > b) nx = 0.5 * (a + b);
    const double fn = f(nx);
    if ((fn > 0) == (fa > 0)) a = nx; else b = nx;
    const bool done = std::abs(nx - x) <= tol * std::max(1.0, std::abs(x));
    x = nx;
    if (done) break;
  }
  root = x;
  return true;
}

double bisect(const std::function<double(double)>& f, double a, double b, double tol) {
  double fa = f(a);
  for (int it = 0; it < 200 && b - a > tol; ++it) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if (fm == 0) return m;
    if ((fm > 0) == (fa > 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

double golden_min(const std::function<double(double)>& f, double a, double b, double tol) {
  const double g = (std::sqrt(5.0) - 1) / 2;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 200 && b - a > tol; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

namespace {

Quadrature compute_gl(int n) {
  Quadrature q;
  q.nodes.resize(n);
  q.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    q.nodes[i] = -x;
    q.weights[i] = 2 / ((1 - x * x) * dp * dp);
  }
  return q;
}

}  // namespace

const Quadrature& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, Quadrature> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gl(n)).first;
  return it->second;
}

}  // namespace hjlab
