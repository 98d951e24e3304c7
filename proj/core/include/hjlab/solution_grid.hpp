#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "hjlab/types.hpp"

namespace hjlab {

enum class Provenance { Variational, Viscosity, ClosedForm, Envelope, LaxOleinik };
const char* to_string(Provenance p);
Provenance provenance_from_string(const std::string& s);

// Uniform axis lo, lo + step, ..., n points.
std::vector<double> make_axis(double lo, double hi, double step);

// Values of a solution at time t on a rectangular grid; the last axis varies fastest.
struct SolutionGrid {
  double t = 0;
  std::vector<std::vector<double>> axes;
  std::vector<double> values;
  Provenance provenance = Provenance::Variational;
  nlohmann::json meta = nlohmann::json::object();

  int dim() const { return static_cast<int>(axes.size()); }
  std::size_t size() const;
  std::size_t index(std::size_t i, std::size_t j = 0) const;
  Vec point(std::size_t k) const;
  double& operator[](std::size_t k) { return values[k]; }
  double operator[](std::size_t k) const { return values[k]; }
  // Throws AxisMismatch / NonFinite when the invariants fail.
  void validate() const;
};

SolutionGrid make_grid(double t, std::vector<std::vector<double>> axes, Provenance provenance);
bool same_axes(const SolutionGrid& a, const SolutionGrid& b, double tol = 1e-12);

}  // namespace hjlab
