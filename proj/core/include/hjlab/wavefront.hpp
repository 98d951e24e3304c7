#pragma once

#include <string>
#include <vector>

#include "hjlab/hamiltonian.hpp"
#include "hjlab/initial_data.hpp"
#include "hjlab/solution_grid.hpp"
#include "hjlab/types.hpp"

namespace hjlab {

// Piece sources carry the member index; fan sources carry the kink index (1D) or the member pair.
struct BranchSource {
  enum class Kind { Piece, Fan };
  Kind kind = Kind::Piece;
  int index = 0;
  int i = -1;
  int j = -1;

  std::string label() const;
};

struct FrontBranch {
  BranchSource source;
  // Parameter range: q0 on pieces, p on fans.
  double a = 0;
  double b = 0;
  int member = -1;
  double q0 = 0;
};

struct FrontPoint {
  Vec q;
  double S = 0;
  Vec p;
  Vec q0;
  int source = 0;
  double param = 0;
};

// Time-t wavefront. In 1D it is a list of parametrized branches; in 2D a sampled cloud.
// A reduced front divides both output coordinates by t.
class Front {
 public:
  Front(Hamiltonian H, InitialCondition u0, double t, bool reduced = false);

  double t() const { return t_; }
  bool reduced() const { return reduced_; }
  int dim() const { return u0_.dim(); }
  const Hamiltonian& hamiltonian() const { return H_; }
  const InitialCondition& initial() const { return u0_; }

  std::vector<FrontBranch> branches;
  std::vector<FrontPoint> cloud;
  std::vector<BranchSource> sources;

  // 1D branch maps and their parameter derivatives.
  double x(int branch, double param) const;
  double y(int branch, double param) const;
  double dx(int branch, double param) const;
  double dy(int branch, double param) const;
  double momentum(int branch, double param) const;
  FrontPoint point(int branch, double param) const;
  // n samples per branch (uniform in the parameter).
  std::vector<FrontPoint> sample(int n_per_branch) const;

 private:
  Hamiltonian H_;
  InitialCondition u0_;
  double t_;
  bool reduced_;
};

Front build_front_1d(const Hamiltonian& H, const InitialCondition& u0, double t);
Front reduced_front(const Hamiltonian& H, const InitialCondition& u0, double t);

struct CloudSpec {
  int n_per_axis = 201;
  int fan_samples = 33;
};
// Pushes sampled points of the Clarke graph of u0 (2D) through the flow.
Front build_front_cloud(const Hamiltonian& H, const InitialCondition& u0, double t, const CloudSpec& spec = {});

// Max of the three membership residuals; +inf when p is not in the Clarke fan at q0.
double membership_residual(const Front& front, const FrontPoint& pt);

// dy/dx along a 1D branch: p on fans, u0'(q0) on pieces.
double branch_slope(const Front& front, int branch, double param);
// Sign of u0''(q0) on a piece branch.
int branch_convexity_sign(const Front& front, int branch, double param);

// Monotone sub-arc of a branch, a graph over [xl, xr].
struct FrontCurve {
  int branch = 0;
  double pl = 0;  // parameter at x = xl
  double pr = 0;  // parameter at x = xr
  double xl = 0;
  double xr = 0;
};
std::vector<FrontCurve> resolve_curves(const Front& front, int n_samples = 2049);
double curve_param(const Front& front, const FrontCurve& c, double x);
double curve_value(const Front& front, const FrontCurve& c, double x);

struct ShockPoint {
  double q = 0;
  double t = 0;
  double S = 0;
  double p1 = 0;  // left momentum
  double p2 = 0;  // right momentum
  std::string left_source;
  std::string right_source;
};

struct SectionSegment {
  FrontCurve curve;
  double x0 = 0;
  double x1 = 0;
};

struct Section {
  std::vector<SectionSegment> segments;

  double lo() const { return segments.front().x0; }
  double hi() const { return segments.back().x1; }
};

double section_value(const Front& front, const Section& s, double x);
std::vector<ShockPoint> find_shocks(const Front& front, const Section& s);

// All continuous single-valued selections over the q-grid range, at most 64.
std::vector<Section> enumerate_continuous_sections(const Front& front, const std::vector<double>& q_grid);

// Pointwise minimum of S over the front above each grid point.
SolutionGrid minimal_section(const Front& front, const std::vector<double>& q_grid);
// The minimal section as a Section (argmin curve per cell, switches refined).
Section minimal_section_path(const Front& front, const std::vector<double>& q_grid);
// 2D minimal section on axes (q1, q2) from a cloud front, with per-query Newton polish.
SolutionGrid minimal_section_2d(const Front& front, const std::vector<double>& ax1, const std::vector<double>& ax2);

// All front points above q (2D), solved from cloud seeds.
struct FiberPoint {
  double S = 0;
  Vec q0;
  Vec p;
  int source = 0;
  double s = 0;
};
class FiberSolver {
 public:
  explicit FiberSolver(const Front& front);
  std::vector<FiberPoint> fiber(const Vec& q) const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

}  // namespace hjlab
