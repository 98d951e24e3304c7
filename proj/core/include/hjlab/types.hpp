#pragma once

#include <Eigen/Dense>
#include <initializer_list>
#include <vector>

namespace hjlab {

inline constexpr int kMaxDim = 6;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;

inline Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

inline Vec vec1(double x) {
  Vec v(1);
  v(0) = x;
  return v;
}

inline Mat mat1(double x) {
  Mat m(1, 1);
  m(0, 0) = x;
  return m;
}

// Axis-aligned rectangle [lo, hi] in R^d.
struct Box {
  Vec lo;
  Vec hi;

  int dim() const { return static_cast<int>(lo.size()); }
  bool contains(const Vec& q, double slack = 0.0) const {
    for (int i = 0; i < dim(); ++i)
      if (q(i) < lo(i) - slack || q(i) > hi(i) + slack) return false;
    return true;
  }
  bool empty() const {
    if (lo.size() == 0 || lo.size() != hi.size()) return true;
    for (int i = 0; i < dim(); ++i)
      if (!(lo(i) < hi(i))) return true;
    return false;
  }
};

inline Box box1(double lo, double hi) { return Box{vec1(lo), vec1(hi)}; }

inline Box box2(double lo1, double hi1, double lo2, double hi2) {
  return Box{vec({lo1, lo2}), vec({hi1, hi2})};
}

// Spectral norm of a symmetric matrix.
double sym_norm(const Mat& m);

// Spectral norm of a general matrix.
double op_norm(const Mat& m);

std::vector<double> linspace(double a, double b, int n);

}  // namespace hjlab
