#include "cmcglue/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "cmcglue/verify.hpp"
#include "json.hpp"

namespace cmcglue {

using ojson = nlohmann::ordered_json;

namespace {

ojson num(double x) { return std::isfinite(x) ? ojson(x) : ojson(nullptr); }

ojson vec_json(const std::vector<double>& v) {
  ojson a = ojson::array();
  for (const double x : v) a.push_back(num(x));
  return a;
}

ojson mat_json(const Mat& M) {
  ojson a = ojson::array();
  for (int i = 0; i < M.rows(); ++i) {
    ojson row = ojson::array();
    for (int j = 0; j < M.cols(); ++j) row.push_back(num(M(i, j)));
    a.push_back(row);
  }
  return a;
}

void write_json(const std::filesystem::path& path, const ojson& j) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorKind::argument, "cannot write " + path.string());
  os << j.dump(2) << '\n';
}

bool is_chain(Construction c) {
  return c == Construction::delaunay || c == Construction::two_geodesic;
}

bool is_torus(Construction c) { return !is_chain(c); }

MeshFormat parse_format(const std::string& f) {
  if (f == "obj") return MeshFormat::obj;
  if (f == "ply") return MeshFormat::ply;
  if (f == "csv") return MeshFormat::csv_profile;
  throw Error(ErrorKind::argument, "unknown mesh format " + f);
}

std::string extension(MeshFormat f) {
  return f == MeshFormat::obj ? "obj" : f == MeshFormat::ply ? "ply" : "csv";
}

ojson manifest(const Assembly& a) {
  ojson j;
  j["construction"] = to_string(a.params.construction);
  j["n"] = a.params.n;
  j["alpha"] = num(a.params.alpha);
  j["alpha_sphere"] = num(a.alpha_sphere);
  j["tau"] = num(a.params.tau);
  j["N"] = a.N;
  j["m"] = a.m;
  j["eps"] = num(a.eps);
  j["rho"] = num(a.rho);
  j["rho0"] = num(a.rho0);
  j["H_target"] = num(a.H_target);
  std::vector<double> eps_bar, b_bar, b;
  for (const BlockSpec& s : a.blocks) {
    if (s.kind == BlockKind::neck) {
      eps_bar.push_back(s.eps_bar);
      b_bar.push_back(s.b_bar);
    } else if (s.kind == BlockKind::sphere) {
      b.push_back(s.b);
    }
  }
  j["eps_bar"] = vec_json(eps_bar);
  j["b"] = vec_json(b);
  j["b_bar"] = vec_json(b_bar);
  j["counts"] = {{"spheres", a.count(BlockKind::sphere)},
                 {"necks", a.count(BlockKind::neck)},
                 {"tori", a.count(BlockKind::torus)}};
  j["samples"] = a.samples.size();
  j["mesh_edge"] = num(a.mesh_edge);
  return j;
}

Check make_check(std::string name, double expected, double actual, double tol, bool passed) {
  return {std::move(name), expected, actual, tol, passed};
}

Check at_most(std::string name, double actual, double tol) {
  return make_check(std::move(name), 0.0, actual, tol, actual <= tol);
}

Check equals(std::string name, double expected, double actual) {
  return make_check(std::move(name), expected, actual, 0.0, expected == actual);
}

// Chain parameters along a sweep keep N, m and move alpha with tau.
AssemblyParams at_tau(const AssemblyParams& base, double tau) {
  AssemblyParams p = base;
  p.tau = tau;
  if (is_chain(base.construction)) {
    p.alpha = (2 * pi * base.m / base.N - tau) / 2;
  } else {
    p.alpha = 0.0;
  }
  return p;
}

void require_chain_counts(const AssemblyParams& p) {
  if (is_chain(p.construction) && (p.N < 1 || p.m < 1))
    throw Error(ErrorKind::configuration, "sweeps of chain constructions need N and m");
}

std::vector<Check> oracle_checks(const Assembly& a, const RunConfig& c) {
  std::vector<int> pool;
  for (std::size_t i = 0; i < a.samples.size(); ++i)
    if (!a.samples[i].fd_H) pool.push_back(static_cast<int>(i));
  std::mt19937 rng(a.params.seed);
  std::shuffle(pool.begin(), pool.end(), rng);
  if (static_cast<int>(pool.size()) > c.oracle_samples) pool.resize(c.oracle_samples);
  // The oracle steps are about 1e-3 of the local scale; second differences
  // then lose roughly h^2 / zeta.
  double worst = 0.0, worst_diff = 0.0;
  for (const int i : pool) {
    const SurfaceSample& s = a.samples[i];
    const double fd = fd_mean_curvature(local_embedding(a, s));
    const double tol = std::max(c.oracle_tol, 10 * 1e-6 / std::max(s.weight, 1e-300));
    const double r = std::abs(fd - s.analytic_H) / tol;
    if (!(r <= worst)) {
      worst = r;
      worst_diff = std::abs(fd - s.analytic_H);
    }
  }
  return {at_most("oracle_agreement_ratio", worst, 1.0),
          make_check("oracle_max_abs_difference", 0.0, worst_diff, 0.0, true)};
}

Check slope_check(const RunConfig& c) {
  AssemblyParams base = c.params;
  base.profile_only = true;
  base.compute_mean_curvature = true;
  const Assembly ref = assemble(base);
  const double ratio = base.eps_override > 0 ? base.eps_override / ref.neck_solve.eps : 0.0;
  std::vector<double> eps, err;
  for (const double f : {1.0, 0.75, 0.5}) {
    AssemblyParams p = at_tau(base, base.tau * f);
    p.N = ref.N;
    p.m = ref.m;
    p.alpha = (2 * pi * p.m / p.N - p.tau) / 2;
    if (ratio > 0) p.eps_override = ratio * solve_scale(p.n, p.alpha, p.tau);
    const Assembly a = assemble(p);
    eps.push_back(a.eps);
    err.push_back(error_norm(a, c.delta).norm.total);
  }
  const double expected = expected_error_slope(base.n, c.delta);
  const double slope = fitted_slope(eps, err);
  return make_check("error_scaling_slope", expected, slope, c.slope_tol,
                    std::abs(slope - expected) <= c.slope_tol);
}

}  // namespace

double expected_error_slope(int n, double delta) {
  return (2.0 - delta) * (3.0 * n - 3.0) / (3.0 * n - 2.0);
}

double fitted_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw Error(ErrorKind::argument, "fitted_slope: need two or more paired values");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= x.size();
  my /= y.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  if (sxx == 0) throw Error(ErrorKind::argument, "fitted_slope: x values coincide");
  return sxy / sxx;
}

std::vector<Check> verification_checks(const RunConfig& c) {
  const Assembly a = assemble(c.params);
  const Construction kind = a.params.construction;
  std::vector<Check> out = oracle_checks(a, c);

  if (kind == Construction::delaunay) out.push_back(slope_check(c));

  for (const NamedTransform& t : a.symmetry_group)
    out.push_back(at_most("symmetry_" + t.name, symmetry_check(a, t.matrix), 2 * a.mesh_edge));

  if (kind == Construction::delaunay) {
    const bool embedded = embeddedness_check(a).embedded;
    out.push_back(equals("embedded", a.m == 1 ? 1.0 : 0.0, embedded ? 1.0 : 0.0));
  }

  if (is_chain(kind)) out.push_back(at_most("neck_system_residual", a.neck_solve.residual, 1e-10));

  if (kind == Construction::two_geodesic) {
    bool unbalanced = false;
    for (const double s : a.params.sigma) unbalanced |= s != 0.0;
    if (!unbalanced) {
      double worst = 0.0;
      for (const double b : balancing_map(a).B) worst = std::max(worst, std::abs(b));
      out.push_back(at_most("balancing_map_at_zero", worst, 1e-8));
    }
  }

  const int N = a.N, orbit = a.orbit_size;
  const auto counts = [&](int spheres, int necks, int tori) {
    out.push_back(equals("sphere_count", spheres, a.count(BlockKind::sphere)));
    out.push_back(equals("neck_count", necks, a.count(BlockKind::neck)));
    out.push_back(equals("torus_count", tori, a.count(BlockKind::torus)));
  };
  switch (kind) {
    case Construction::delaunay: counts(N, N, 0); break;
    case Construction::two_geodesic: counts(2 * N - 2, 2 * N, 0); break;
    case Construction::handle: counts(N, N + 1, 1); break;
    case Construction::doubling: counts(orbit * N, orbit * (N + 1), 2); break;
  }

  if (is_torus(kind)) {
    const int n1 = a.params.n1, n2 = a.params.n2;
    const double alpha = a.params.alpha;
    const double sign = kind == Construction::handle ? -1.0 : 1.0;
    out.push_back(at_most("clifford_matching",
                          std::abs(sign * clifford_mean_curvature(n1, n2, alpha) - a.H_target),
                          1e-12));
    const WindingMode mode = kind == Construction::handle ? WindingMode::handle : WindingMode::doubling;
    out.push_back(at_most("winding_residual",
                          std::abs(winding_residual(n1, n2, alpha, a.params.tau, N, a.m, mode)),
                          1e-12));
  }

  if (kind == Construction::doubling) {
    std::vector<GroupElement> gens = c.params.group;
    if (gens.empty())
      gens = group_preset(c.params.group_name.empty() ? "antipodal" : c.params.group_name,
                          a.params.n1, a.params.n2);
    const GroupCondition g = group_condition_check(group_closure(gens), a.params.n1, a.params.n2);
    out.push_back(equals("group_condition", 1.0, g.passes ? 1.0 : 0.0));
  }
  return out;
}

namespace {

int cmd_build(const RunConfig& c, const std::filesystem::path& dir, std::ostream& out) {
  const Assembly a = assemble(c.params);
  std::filesystem::create_directories(dir);
  ojson j = manifest(a);
  const MeshFormat f =
      a.params.n == 2 && !a.params.profile_only ? MeshFormat::obj : MeshFormat::csv_profile;
  const std::string mesh = "surface." + extension(f);
  export_mesh(a, f, Projection::coords4, (dir / mesh).string());
  j["mesh"] = mesh;
  write_json(dir / "manifest.json", j);
  out << "built " << to_string(a.params.construction) << ": " << a.blocks.size() << " blocks, "
      << a.samples.size() << " samples, eps = " << a.eps << '\n';
  return 0;
}

int cmd_export(const RunConfig& c, const std::filesystem::path& dir, const std::string& format,
               std::ostream& out) {
  const MeshFormat f = parse_format(format);
  const Assembly a = assemble(c.params);
  std::filesystem::create_directories(dir);
  const std::filesystem::path path = dir / ("surface." + extension(f));
  export_mesh(a, f, Projection::coords4, path.string());
  out << "wrote " << path.string() << '\n';
  return 0;
}

int cmd_verify(const RunConfig& c, const std::filesystem::path& dir, std::ostream& out) {
  const std::vector<Check> checks = verification_checks(c);
  ojson j;
  j["construction"] = to_string(c.params.construction);
  j["checks"] = ojson::array();
  bool all = true;
  for (const Check& k : checks) {
    j["checks"].push_back({{"name", k.name},
                           {"expected", num(k.expected)},
                           {"actual", num(k.actual)},
                           {"tolerance", num(k.tolerance)},
                           {"passed", k.passed}});
    all = all && k.passed;
    out << (k.passed ? "PASS " : "FAIL ") << k.name << " actual=" << k.actual
        << " expected=" << k.expected << " tol=" << k.tolerance << '\n';
  }
  j["passed"] = all;
  std::filesystem::create_directories(dir);
  write_json(dir / "report.json", j);
  return all ? 0 : 1;
}

int cmd_sweep(RunConfig c, const std::filesystem::path& dir, std::ostream& out) {
  if (!(c.tau_min > 0 && c.tau_max > c.tau_min && c.steps >= 3))
    throw Error(ErrorKind::configuration, "sweep needs 0 < tau_min < tau_max and steps >= 3");
  require_chain_counts(c.params);
  if (c.params.construction == Construction::delaunay) c.params.profile_only = true;
  std::filesystem::create_directories(dir);
  std::ofstream csv(dir / "sweep.csv");
  if (!csv) throw Error(ErrorKind::argument, "cannot write sweep.csv");
  csv << std::setprecision(12) << "tau,eps,rho,error_norm,neck_max,transition_max,exterior_max,status\n";
  std::vector<double> eps, err;
  for (int i = 0; i < c.steps; ++i) {
    const double tau = c.tau_min * std::pow(c.tau_max / c.tau_min, double(i) / (c.steps - 1));
    try {
      const Assembly a = assemble(at_tau(c.params, tau));
      const CurvatureReport r = error_norm(a, c.delta);
      csv << tau << ',' << a.eps << ',' << a.rho << ',' << r.norm.total << ',' << r.neck_max << ','
          << r.transition_max << ',' << r.exterior_max << ",ok\n";
      eps.push_back(a.eps);
      err.push_back(r.norm.total);
    } catch (const Error& e) {
      csv << tau << ",,,,,,," << to_string(e.kind()) << '\n';
    }
  }
  const double expected = expected_error_slope(c.params.n, c.delta);
  const double slope = eps.size() >= 2 ? fitted_slope(eps, err) : std::nan("");
  csv << "# slope " << slope << " expected " << expected << '\n';
  out << "sweep: " << eps.size() << " of " << c.steps << " feasible, slope " << slope
      << " (expected " << expected << ")\n";
  return 0;
}

int cmd_balance(const RunConfig& c, const std::filesystem::path& dir, std::ostream& out) {
  if (c.params.construction != Construction::two_geodesic)
    throw Error(ErrorKind::configuration, "balance needs construction = two_geodesic");
  const Assembly a = assemble(c.params);
  const BalanceReport r = balancing_map(a);
  const DerivativeStructure d = balancing_derivative_structure(a);
  const double pattern_tol = 1e-8 * std::abs(d.omega);
  ojson j;
  j["B"] = vec_json(r.B);
  j["DB"] = mat_json(r.DB);
  j["omega"] = num(d.omega);
  j["omega_scale"] = num(r.omega_scale);
  j["flux_per_neck"] = vec_json(r.flux_per_neck);
  j["flux_ratio"] = vec_json(r.flux_ratio);
  j["pattern_residual"] = num(d.pattern_residual);
  j["pattern_tolerance"] = num(pattern_tol);
  j["scaled_determinant"] = num(d.scaled_determinant);
  j["invertible"] = d.invertible;
  std::filesystem::create_directories(dir);
  write_json(dir / "balance.json", j);
  const bool ok = d.invertible && d.pattern_residual <= pattern_tol;
  out << "balance: omega " << d.omega << ", pattern residual " << d.pattern_residual
      << ", det " << d.scaled_determinant << (ok ? "" : " (check failed)") << '\n';
  return ok ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Glue constant mean curvature hypersurfaces in spheres"};
  app.require_subcommand(1);
  std::string config, dir = ".", format = "obj";
  double tau_min = 0, tau_max = 0;
  int steps = 0;
  long long seed = -1;
  const auto common = [&](CLI::App* s) {
    s->add_option("--config", config, "run configuration")->required();
    s->add_option("--out", dir, "output directory");
    s->add_option("--seed", seed, "random seed (overrides the configuration)");
  };
  CLI::App* build = app.add_subcommand("build", "assemble and write manifest and mesh");
  CLI::App* verify = app.add_subcommand("verify", "run checks and write report.json");
  CLI::App* sweep = app.add_subcommand("sweep", "error norm over a range of tau");
  CLI::App* balance = app.add_subcommand("balance", "balancing map of a two-geodesic chain");
  CLI::App* exp = app.add_subcommand("export", "write the mesh in a chosen format");
  for (CLI::App* s : {build, verify, sweep, balance, exp}) common(s);
  sweep->add_option("--tau-min", tau_min);
  sweep->add_option("--tau-max", tau_max);
  sweep->add_option("--steps", steps);
  exp->add_option("--format", format)->check(CLI::IsMember({"obj", "ply", "csv"}));

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    RunConfig c = load_config(config);
    if (seed >= 0) c.params.seed = static_cast<unsigned>(seed);
    if (tau_min > 0) c.tau_min = tau_min;
    if (tau_max > 0) c.tau_max = tau_max;
    if (steps > 0) c.steps = steps;
    const std::filesystem::path d(dir);
    if (*build) return cmd_build(c, d, out);
    if (*verify) return cmd_verify(c, d, out);
    if (*sweep) return cmd_sweep(c, d, out);
    if (*balance) return cmd_balance(c, d, out);
    return cmd_export(c, d, format, out);
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return 2;
  }
}

}  // namespace cmcglue
