#include "hjlab/solution_grid.hpp"

#include <cmath>

#include "hjlab/error.hpp"

namespace hjlab {

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::Variational: return "variational";
    case Provenance::Viscosity: return "viscosity";
    case Provenance::ClosedForm: return "closed_form";
    case Provenance::Envelope: return "envelope";
    case Provenance::LaxOleinik: return "lax_oleinik";
  }
  return "?";
}

Provenance provenance_from_string(const std::string& s) {
  for (auto p : {Provenance::Variational, Provenance::Viscosity, Provenance::ClosedForm, Provenance::Envelope,
                 Provenance::LaxOleinik})
    if (s == to_string(p)) return p;
  fail(ErrorCode::ParseError, "unknown provenance '" + s + "'");
}

std::vector<double> make_axis(double lo, double hi, double step) {
  require(std::isfinite(lo) && std::isfinite(hi) && hi >= lo, ErrorCode::InvalidArgument, "bad axis range");
  require(std::isfinite(step) && step > 0, ErrorCode::InvalidArgument, "axis step must be positive");
  const auto n = static_cast<std::size_t>(std::llround((hi - lo) / step)) + 1;
  std::vector<double> a(n);
  for (std::size_t i = 0; i < n; ++i) a[i] = lo + step * static_cast<double>(i);
  return a;
}

std::size_t SolutionGrid::size() const {
  std::size_t n = axes.empty() ? 0 : 1;
  for (const auto& a : axes) n *= a.size();
  return n;
}

std::size_t SolutionGrid::index(std::size_t i, std::size_t j) const {
  return dim() == 1 ? i : i * axes[1].size() + j;
}

Vec SolutionGrid::point(std::size_t k) const {
  if (dim() == 1) return vec1(axes[0][k]);
  const std::size_t n2 = axes[1].size();
  return vec({axes[0][k / n2], axes[1][k % n2]});
}

void SolutionGrid::validate() const {
  require(dim() == 1 || dim() == 2, ErrorCode::AxisMismatch, "grid must have one or two axes");
  require(values.size() == size(), ErrorCode::AxisMismatch, "value count does not match axes");
  for (double v : values) require(std::isfinite(v), ErrorCode::NonFinite, "non-finite grid value");
}

SolutionGrid make_grid(double t, std::vector<std::vector<double>> axes, Provenance provenance) {
  SolutionGrid g;
  g.t = t;
  g.axes = std::move(axes);
  g.provenance = provenance;
  g.values.assign(g.size(), 0.0);
  return g;
}

bool same_axes(const SolutionGrid& a, const SolutionGrid& b, double tol) {
  if (a.axes.size() != b.axes.size()) return false;
  for (std::size_t k = 0; k < a.axes.size(); ++k) {
    if (a.axes[k].size() != b.axes[k].size()) return false;
    for (std::size_t i = 0; i < a.axes[k].size(); ++i)
      if (std::abs(a.axes[k][i] - b.axes[k][i]) > tol) return false;
  }
  return true;
}

}  // namespace hjlab
