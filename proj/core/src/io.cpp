#include "hjlab/io.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "hjlab/error.hpp"

namespace hjlab {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string spec_hash(const nlohmann::json& spec) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : spec.dump()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_text_atomic(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorCode::IoError, "cannot open " + tmp);
    out << content;
    out.flush();
    require(static_cast<bool>(out), ErrorCode::IoError, "write failed: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  require(!ec, ErrorCode::IoError, "rename failed: " + path + ": " + ec.message());
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::IoError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_json(const std::string& path, const nlohmann::json& j) { write_text_atomic(path, j.dump(2) + "\n"); }

nlohmann::json read_json(const std::string& path) {
  try {
    return nlohmann::json::parse(read_text(path));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, path + ": " + e.what());
  }
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, const std::string& path) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    require(used == s.size(), ErrorCode::ParseError, path + ": bad number '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    fail(ErrorCode::ParseError, path + ": bad number '" + s + "'");
  }
}

// Header plus rows of fields.
std::vector<std::vector<std::string>> read_csv(const std::string& path, std::vector<std::string>* header) {
  std::istringstream in(read_text(path));
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::ParseError, path + ": empty file");
  *header = split(line);
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    auto f = split(line);
    require(f.size() == header->size(), ErrorCode::ParseError, path + ": ragged row");
    rows.push_back(std::move(f));
  }
  return rows;
}

std::string join(const std::vector<std::string>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + xs[i];
  return s;
}

}  // namespace

std::string solution_grid_csv(const SolutionGrid& g) {
  g.validate();
  std::string s = g.dim() == 1 ? "q1,value\n" : "q1,q2,value\n";
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Vec q = g.point(k);
    for (int i = 0; i < q.size(); ++i) s += format_double(q(i)) + ",";
    s += format_double(g.values[k]) + "\n";
  }
  return s;
}

void write_solution_grid(const std::string& path, const SolutionGrid& g, const nlohmann::json& h_spec,
                         const nlohmann::json& u0_spec) {
  write_text_atomic(path, solution_grid_csv(g));
  nlohmann::json side = {{"t", g.t},
                         {"solver", to_string(g.provenance)},
                         {"dim", g.dim()},
                         {"meta", g.meta}};
  std::vector<std::size_t> n;
  for (const auto& a : g.axes) n.push_back(a.size());
  side["shape"] = n;
  if (!h_spec.is_null()) side["hamiltonian_hash"] = spec_hash(h_spec);
  if (!u0_spec.is_null()) side["initial_hash"] = spec_hash(u0_spec);
  write_json(path + ".json", side);
}

SolutionGrid read_solution_grid(const std::string& path) {
  std::vector<std::string> header;
  const auto rows = read_csv(path, &header);
  const int d = static_cast<int>(header.size()) - 1;
  require(d == 1 || d == 2, ErrorCode::ParseError, path + ": expected 2 or 3 columns");
  SolutionGrid g;
  g.axes.assign(d, {});
  std::vector<std::set<double>> seen(d);
  for (const auto& r : rows) {
    for (int i = 0; i < d; ++i) {
      const double x = parse_double(r[i], path);
      if (seen[i].insert(x).second) g.axes[i].push_back(x);
    }
    g.values.push_back(parse_double(r[d], path));
  }
  const std::string side = path + ".json";
  if (std::filesystem::exists(side)) {
    const auto j = read_json(side);
    g.t = j.value("t", 0.0);
    g.provenance = provenance_from_string(j.value("solver", std::string("variational")));
    g.meta = j.value("meta", nlohmann::json::object());
  }
  g.validate();
  return g;
}

std::string front_csv(const Front& front, const std::vector<FrontPoint>& points) {
  const int d = front.dim();
  std::vector<std::string> h{"t"};
  for (int i = 1; i <= d; ++i) h.push_back("q" + std::to_string(i));
  h.push_back("S");
  for (int i = 1; i <= d; ++i) h.push_back("p" + std::to_string(i));
  for (int i = 1; i <= d; ++i) h.push_back("q0_" + std::to_string(i));
  h.push_back("source");
  h.push_back("param");
  std::string s = join(h) + "\n";
  for (const auto& pt : points) {
    std::vector<std::string> f{format_double(front.t())};
    for (int i = 0; i < d; ++i) f.push_back(format_double(pt.q(i)));
    f.push_back(format_double(pt.S));
    for (int i = 0; i < d; ++i) f.push_back(format_double(pt.p(i)));
    for (int i = 0; i < d; ++i) f.push_back(format_double(pt.q0(i)));
    f.push_back(front.sources.at(pt.source).label());
    f.push_back(format_double(pt.param));
    s += join(f) + "\n";
  }
  return s;
}

void write_front(const std::string& path, const Front& front, const std::vector<FrontPoint>& points) {
  write_text_atomic(path, front_csv(front, points));
}

FrontTable read_front(const std::string& path) {
  std::vector<std::string> header;
  const auto rows = read_csv(path, &header);
  require(header.size() == 7 || header.size() == 10, ErrorCode::ParseError, path + ": not a front table");
  FrontTable ft;
  ft.dim = header.size() == 7 ? 1 : 2;
  const int d = ft.dim;
  std::vector<std::string> labels;
  for (const auto& r : rows) {
    FrontPoint pt;
    pt.q = Vec(d);
    pt.p = Vec(d);
    pt.q0 = Vec(d);
    ft.t.push_back(parse_double(r[0], path));
    for (int i = 0; i < d; ++i) pt.q(i) = parse_double(r[1 + i], path);
    pt.S = parse_double(r[1 + d], path);
    for (int i = 0; i < d; ++i) pt.p(i) = parse_double(r[2 + d + i], path);
    for (int i = 0; i < d; ++i) pt.q0(i) = parse_double(r[2 + 2 * d + i], path);
    const std::string& lab = r[2 + 3 * d];
    auto it = std::find(labels.begin(), labels.end(), lab);
    pt.source = static_cast<int>(it - labels.begin());
    if (it == labels.end()) labels.push_back(lab);
    pt.param = parse_double(r[3 + 3 * d], path);
    ft.points.push_back(pt);
  }
  ft.sources = labels;
  return ft;
}

void write_section(const std::string& path, const Front& front, const Section& s, const std::vector<double>& q_grid) {
  require(!s.segments.empty(), ErrorCode::InvalidArgument, "empty section");
  std::string out = "q,S,curve,source\n";
  for (double x : q_grid) {
    if (x < s.lo() - 1e-12 || x > s.hi() + 1e-12) continue;
    std::size_t k = 0;
    while (k + 1 < s.segments.size() && x > s.segments[k].x1) ++k;
    const int b = s.segments[k].curve.branch;
    out += format_double(x) + "," + format_double(section_value(front, s, x)) + "," + std::to_string(b) + "," +
           front.branches[b].source.label() + "\n";
  }
  write_text_atomic(path, out);
}

SectionTable read_section(const std::string& path) {
  std::vector<std::string> header;
  const auto rows = read_csv(path, &header);
  require(header.size() == 4 && header[0] == "q", ErrorCode::ParseError, path + ": not a section table");
  SectionTable st;
  for (const auto& r : rows) {
    st.q.push_back(parse_double(r[0], path));
    st.S.push_back(parse_double(r[1], path));
    st.curve.push_back(static_cast<int>(parse_double(r[2], path)));
    st.sources.push_back(r[3]);
  }
  return st;
}

void write_point_set(const std::string& path, const PointSet& pts) {
  const int n = pts.empty() ? 1 : static_cast<int>(pts.front().size());
  std::vector<std::string> h;
  for (int i = 1; i <= n; ++i) h.push_back("x" + std::to_string(i));
  std::string s = join(h) + "\n";
  for (const auto& p : pts) {
    require(p.size() == n, ErrorCode::InvalidArgument, "point set with mixed dimensions");
    std::vector<std::string> f;
    for (int i = 0; i < n; ++i) f.push_back(format_double(p(i)));
    s += join(f) + "\n";
  }
  write_text_atomic(path, s);
}

PointSet read_point_set(const std::string& path) {
  std::vector<std::string> header;
  const auto rows = read_csv(path, &header);
  PointSet pts;
  for (const auto& r : rows) {
    Vec p(static_cast<int>(r.size()));
    for (std::size_t i = 0; i < r.size(); ++i) p(static_cast<int>(i)) = parse_double(r[i], path);
    pts.push_back(p);
  }
  return pts;
}

}  // namespace hjlab
