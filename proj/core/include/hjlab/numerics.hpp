#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace hjlab {

// Quintic smoothstep 10x^3 - 15x^4 + 6x^5 clamped to [0,1].
double smoothstep5(double x);

// Tail integrals of 1 - smoothstep5: w1(x) = int_0^x (1 - S), w2(x) = int_0^x w1.
// Both are extended past x = 1 (w1 constant, w2 affine).
double tail_w0(double x);
double tail_w1(double x);
double tail_w2(double x);

// C2 extension of a function known at a boundary point. Given value, first and second
// derivative at the boundary, returns (value, d1, d2) at signed distance s outward, where
// the second derivative is damped to 0 over the given width.
struct Jet {
  double v = 0, d1 = 0, d2 = 0;
};
Jet damped_tail(const Jet& at_boundary, double s, double width, int direction);

// Root of a monotone-bracketed scalar function on [a, b]; bisection to `bisect_tol`
// then Newton polish. Returns false when f(a), f(b) do not bracket a root.
bool bracketed_root(const std::function<double(double)>& f, const std::function<double(double)>& df,
                    double a, double b, double& root, double bisect_tol = 1e-6, double tol = 1e-13);

// Plain bisection on a sign change, to absolute tolerance.
double bisect(const std::function<double(double)>& f, double a, double b, double tol = 1e-14);

// Golden-section minimization on [a, b].
double golden_min(const std::function<double(double)>& f, double a, double b, double tol = 1e-12);

// Gauss-Legendre nodes and weights on [-1, 1].
struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const Quadrature& gauss_legendre(int n);

}  // namespace hjlab
