#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "hjlab/initial_data.hpp"
#include "hjlab/solution_grid.hpp"
#include "hjlab/wavefront.hpp"

namespace hjlab {

// %.17g.
std::string format_double(double x);
// FNV-1a of the compact dump, as 16 hex digits.
std::string spec_hash(const nlohmann::json& spec);

// Writes to path + ".tmp" and renames.
void write_text_atomic(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);
void write_json(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json(const std::string& path);

// Grid CSV: header "q1[,q2],value", one row per node in storage order.
// The sidecar path + ".json" holds t, solver, spec hashes and the grid metadata.
std::string solution_grid_csv(const SolutionGrid& g);
void write_solution_grid(const std::string& path, const SolutionGrid& g, const nlohmann::json& h_spec = nullptr,
                         const nlohmann::json& u0_spec = nullptr);
SolutionGrid read_solution_grid(const std::string& path);

// Front CSV: t,q1[,q2],S,p1[,p2],q0_1[,q0_2],source,param.
struct FrontTable {
  int dim = 1;
  std::vector<double> t;
  std::vector<FrontPoint> points;
  std::vector<std::string> sources;
};
std::string front_csv(const Front& front, const std::vector<FrontPoint>& points);
void write_front(const std::string& path, const Front& front, const std::vector<FrontPoint>& points);
FrontTable read_front(const std::string& path);

// Section CSV: q,S,curve,source on the given grid.
void write_section(const std::string& path, const Front& front, const Section& s, const std::vector<double>& q_grid);
struct SectionTable {
  std::vector<double> q;
  std::vector<double> S;
  std::vector<int> curve;
  std::vector<std::string> sources;
};
SectionTable read_section(const std::string& path);

// Point set CSV: x1,...,xn.
void write_point_set(const std::string& path, const PointSet& pts);
PointSet read_point_set(const std::string& path);

}  // namespace hjlab
