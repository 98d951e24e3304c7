#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "hjlab/error.hpp"
#include "hjlab/experiments.hpp"
#include "hjlab/hamiltonian.hpp"
#include "hjlab/initial_data.hpp"
#include "hjlab/io.hpp"
#include "hjlab/variational.hpp"
#include "hjlab/viscosity.hpp"
#include "hjlab/wavefront.hpp"

using namespace hjlab;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kComputeError = 3;

// Thrown for configuration problems found before dispatch.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json load_spec(const std::string& arg) {
  if (!arg.empty() && arg.front() == '{') {
    try {
      return json::parse(arg);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("inline spec: ") + e.what());
    }
  }
  if (std::filesystem::exists(arg)) return read_json(arg);
  return nullptr;
}

Hamiltonian parse_hamiltonian(const std::string& arg) {
  const json spec = load_spec(arg);
  try {
    if (!spec.is_null()) return hamiltonian_from_json(spec);
    return make_builtin(arg);
  } catch (const HjError& e) {
    throw ConfigError(std::string("--h: ") + e.what());
  }
}

InitialCondition parse_initial(const std::string& arg) {
  const json spec = load_spec(arg);
  try {
    if (!spec.is_null()) return initial_condition_from_json(spec);
    return initial_condition_from_json({{"kind", arg}, {"params", json::object()}});
  } catch (const HjError& e) {
    throw ConfigError(std::string("--u0: ") + e.what());
  }
}

std::vector<double> parse_range(const std::vector<double>& r, const char* name) {
  if (r.size() != 2 || !(r[0] < r[1])) throw ConfigError(std::string(name) + " needs lo < hi");
  return r;
}

struct Common {
  std::string h;
  std::string u0;
  double t = 0;
  std::string out = "out";
};

struct GridArgs {
  std::vector<double> q1{-1, 1};
  std::vector<double> q2;
  double dx = 1e-2;

  std::vector<std::vector<double>> axes(int dim) const {
    if (!(dx > 0)) throw ConfigError("--dx must be positive");
    std::vector<std::vector<double>> ax{[&] {
      const auto r = parse_range(q1, "--q1");
      return make_axis(r[0], r[1], dx);
    }()};
    if (dim == 2) {
      if (q2.empty()) throw ConfigError("2D problems need --q2 lo hi");
      const auto r = parse_range(q2, "--q2");
      ax.push_back(make_axis(r[0], r[1], dx));
    }
    return ax;
  }
};

std::string path_in(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void write_report(const std::string& path, const json& j) {
  write_json(path, j);
  std::cout << path << "\n";
}

int cmd_front(const Common& c, bool reduced, int samples, int cloud_n) {
  if (!(c.t >= 0)) throw ConfigError("t must be non-negative");
  if (samples < 2 || cloud_n < 3) throw ConfigError("sample counts too small");
  if (reduced && !(c.t > 0)) throw ConfigError("the reduced front needs t > 0");
  const Hamiltonian H = parse_hamiltonian(c.h);
  const InitialCondition u0 = parse_initial(c.u0);
  if (H.dim() != u0.dim()) throw ConfigError("Hamiltonian and initial data dimensions differ");
  Front f = u0.dim() == 1 ? (reduced ? reduced_front(H, u0, c.t) : build_front_1d(H, u0, c.t))
                          : build_front_cloud(H, u0, c.t, CloudSpec{cloud_n, 33});
  const auto pts = u0.dim() == 1 ? f.sample(samples) : f.cloud;
  const std::string csv = path_in(c.out, "front.csv");
  write_front(csv, f, pts);
  json branches = json::array();
  for (const auto& b : f.branches) branches.push_back({{"source", b.source.label()}, {"a", b.a}, {"b", b.b}});
  write_report(path_in(c.out, "front.json"), {{"t", c.t},
                                              {"reduced", reduced},
                                              {"hamiltonian", H.spec()},
                                              {"initial", u0.spec()},
                                              {"hamiltonian_hash", spec_hash(H.spec())},
                                              {"initial_hash", spec_hash(u0.spec())},
                                              {"branches", branches},
                                              {"points", pts.size()},
                                              {"csv", csv}});
  std::cout << csv << "\n";
  return kOk;
}

int cmd_solve(const Common& c, const std::string& solver, const GridArgs& g, double a, double b, double width) {
  if (!(c.t >= 0)) throw ConfigError("t must be non-negative");
  const Hamiltonian H = parse_hamiltonian(c.h.empty() && solver == "envelope" ? "saddle" : c.h);
  SolutionGrid out;
  std::string out_path = path_in(c.out, solver + ".csv");
  if (solver == "envelope") {
    if (!(b > a && a > 0)) throw ConfigError("envelope needs --a, --b with b > a > 0");
    const auto axes = g.axes(2);
    out = envelope_solve(H, saddle_family(a, b, width), c.t, axes);
    write_solution_grid(out_path, out, H.spec(), saddle_data(a, b).spec());
    std::cout << out_path << "\n";
    return kOk;
  }
  const InitialCondition u0 = parse_initial(c.u0);
  if (H.dim() != u0.dim()) throw ConfigError("Hamiltonian and initial data dimensions differ");
  const auto axes = g.axes(u0.dim());
  if (solver == "variational") {
    out = variational_solve(H, u0, c.t, axes);
  } else if (solver == "viscosity") {
    GridScheme s;
    s.axes = axes;
    out = viscosity_solve(H, u0, c.t, s);
  } else {
    out = lax_oleinik(H, u0, c.t, axes.at(0));
  }
  write_solution_grid(out_path, out, H.spec(), u0.spec());
  std::cout << out_path << "\n";
  return kOk;
}

// Short property suite over the library contracts.
int cmd_check(const std::string& out_dir, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1, 1);
  json results = json::array();
  bool all = true;
  auto record = [&](const std::string& name, bool ok, double value) {
    results.push_back({{"check", name}, {"ok", ok}, {"value", value}});
    std::cout << (ok ? "ok   " : "FAIL ") << name << " " << format_double(value) << "\n";
    all = all && ok;
  };

  const auto q = make_axis(-1, 1, 2e-2);
  {
    const auto R = variational_solve(half_square(1), abs_kink(), 0.5, {q});
    double e = 0;
    for (std::size_t k = 0; k < q.size(); ++k) e = std::max(e, std::abs(R.values[k] + std::abs(q[k]) + 0.25));
    record("convex_closed_form", e <= 1e-9, e);
  }
  {
    AffineTransformParams T = AffineTransformParams::identity(1);
    T.A(0, 0) = 0.8 + 0.2 * U(rng);
    T.b(0) = 0.3 * U(rng);
    T.n(0) = 0.3 * U(rng);
    T.alpha = 0.1 * U(rng);
    const double r = conjugation_check_affine(variational_grid_solver(), cubic_wave(), abs_kink_quad(), T, 0.05,
                                              make_axis(-0.5, 0.5, 1e-2));
    record("affine_conjugation_variational", r <= 1e-6, r);
  }
  {
    int bad = 0;
    const Hamiltonian H = cubic_wave();
    for (int k = 0; k < 200; ++k) {
      const double p1 = 2 * U(rng), p2 = 2 * U(rng);
      if (std::abs(p1 - p2) < 1e-3) continue;
      if (check_entropy_condition(H, p1, p2).strict && !check_lax_condition(H, p1, p2).holds) ++bad;
    }
    record("entropy_implies_lax", bad == 0, bad);
  }
  {
    const Front f = build_front_1d(cubic_wave(), abs_kink_quad(), 0.05);
    double e = 0;
    for (int b = 0; b < static_cast<int>(f.branches.size()); ++b)
      for (double s : linspace(0.1, 0.9, 9)) {
        const double p = f.branches[b].a + s * (f.branches[b].b - f.branches[b].a);
        if (std::abs(f.dx(b, p)) < 1e-6) continue;
        e = std::max(e, std::abs(f.dy(b, p) / f.dx(b, p) - branch_slope(f, b, p)));
      }
    record("branch_slopes", e <= 1e-9, e);
  }
  write_report(path_in(out_dir, "check.json"), {{"seed", seed}, {"results", results}, {"passed", all}});
  return all ? kOk : kComputeError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hamilton-Jacobi variational and viscosity solutions"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  Common c;
  bool reduced = false;
  int samples = 257, cloud_n = 201;
  auto* front = app.add_subcommand("front", "Wavefront of u0 at time t (CSV + metadata JSON)");
  front->add_option("--h", c.h, "Hamiltonian: builtin name, JSON file or inline JSON")->required();
  front->add_option("--u0", c.u0, "Initial condition: catalog kind, JSON file or inline JSON")->required();
  front->add_option("--t", c.t, "Time")->required();
  front->add_option("--out", c.out, "Output directory");
  front->add_flag("--reduced", reduced, "Divide the front coordinates by t (1D)");
  front->add_option("--samples", samples, "Samples per branch (1D)");
  front->add_option("--cloud", cloud_n, "Preimage grid size per axis (2D)");

  std::string solver = "variational";
  GridArgs grid;
  double a = 0, b = 0, width = 0.25;
  auto* solve = app.add_subcommand("solve", "Solution grid by one of the solvers");
  solve->add_option("--solver", solver, "Solver")
      ->check(CLI::IsMember({"variational", "viscosity", "lax_oleinik", "envelope"}));
  solve->add_option("--h", c.h, "Hamiltonian");
  solve->add_option("--u0", c.u0, "Initial condition");
  solve->add_option("--t", c.t, "Time")->required();
  solve->add_option("--q1", grid.q1, "First axis range lo hi")->expected(2);
  solve->add_option("--q2", grid.q2, "Second axis range lo hi")->expected(2);
  solve->add_option("--dx", grid.dx, "Grid step");
  solve->add_option("--a", a, "Envelope family lower parameter");
  solve->add_option("--b", b, "Envelope family upper parameter");
  solve->add_option("--width", width, "Blend width of the family profile");
  solve->add_option("--out", c.out, "Output directory");

  auto* cx = app.add_subcommand("counterexample", "Counterexample scenarios with JSON reports");
  cx->require_subcommand(1);
  std::string h1 = "cubic_wave";
  std::vector<double> t_list{0.1, 0.05, 0.025};
  Dim1Options d1;
  auto* dim1 = cx->add_subcommand("dim1", "1D shock scenario");
  dim1->add_option("--h", h1, "1D Hamiltonian (normalized when needed)");
  dim1->add_option("--t", t_list, "Times");
  dim1->add_option("--dx", d1.dx, "Grid step");
  dim1->add_option("--out", c.out, "Output directory");

  double sa = 0, sb = 0, st = 0;
  SaddleOptions so;
  bool no_cross = false;
  auto* sad = cx->add_subcommand("saddle", "Saddle scenario");
  sad->add_option("--a", sa, "Lower slope")->required();
  sad->add_option("--b", sb, "Upper slope")->required();
  sad->add_option("--t", st, "Time")->required();
  sad->add_option("--dx", so.dx, "Grid step");
  sad->add_flag("--no-cross-check", no_cross, "Skip the minimal-section cross-check");
  sad->add_option("--out", c.out, "Output directory");

  std::string report_path;
  std::vector<double> eps_list;
  SmoothingOptions smo;
  auto* smooth = cx->add_subcommand("smoothing", "Smoothing argument on a saddle report");
  smooth->add_option("--report", report_path, "Saddle scenario report JSON")->required()->check(CLI::ExistingFile);
  smooth->add_option("--eps", eps_list, "Mollification radii (default 0.1 * 2^-k, k = 0..10)");
  smooth->add_option("--dx", smo.dx, "Grid step of the local viscosity solves");
  smooth->add_option("--out", c.out, "Output directory");

  std::string check_out = "out";
  std::uint64_t seed = 20240611;
  auto* check = app.add_subcommand("check", "Run the property suite");
  check->add_option("--out", check_out, "Output directory");
  check->add_option("--seed", seed, "Random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  // Problems raised while building inputs are configuration errors; the rest are computational.
  bool dispatched = false;
  try {
    if (*front) return cmd_front(c, reduced, samples, cloud_n);
    if (*solve) {
      if (solver != "envelope" && (c.h.empty() || c.u0.empty())) throw ConfigError("--h and --u0 are required");
      return cmd_solve(c, solver, grid, a, b, width);
    }
    if (*check) return cmd_check(check_out, seed);
    if (*dim1) {
      for (double t : t_list)
        if (!(t > 0)) throw ConfigError("times must be positive");
      const Hamiltonian H = parse_hamiltonian(h1);
      dispatched = true;
      d1.out_dir = c.out;
      const auto reps = run_counterexample_1d(H, t_list, d1);
      json all = json::array();
      for (const auto& r : reps) all.push_back(r.to_json());
      write_report(path_in(c.out, "dim1_report.json"), {{"version", kReportVersion}, {"reports", all}});
      return kOk;
    }
    if (*sad) {
      if (!(so.dx > 0)) throw ConfigError("--dx must be positive");
      dispatched = true;
      so.cross_check = !no_cross;
      so.out_dir = c.out;
      const auto r = run_counterexample_saddle(sa, sb, st, so);
      write_report(path_in(c.out, "saddle_report.json"), r.to_json());
      return kOk;
    }
    if (*smooth) {
      const auto rep = CounterexampleReport::from_json(read_json(report_path));
      if (rep.scenario != "saddle") throw ConfigError("smoothing needs a saddle report");
      if (eps_list.empty()) eps_list = default_eps_sweep();
      dispatched = true;
      const auto s = run_smoothing_argument(saddle(), rep, eps_list, smo);
      write_report(path_in(c.out, "smoothing_report.json"), s.to_json());
      return kOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const HjError& e) {
    // Parse failures and unknown names come from input handling.
    const bool config = !dispatched && (e.code() == ErrorCode::ParseError || e.code() == ErrorCode::UnknownName ||
                                        e.code() == ErrorCode::IoError);
    std::cerr << "error: " << e.what() << "\n";
    return config ? kConfigError : kComputeError;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kComputeError;
  }
  return kOk;
}
