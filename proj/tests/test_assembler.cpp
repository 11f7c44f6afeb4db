#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "cmcglue/assembler.hpp"
#include "cmcglue/config.hpp"
#include "cmcglue/verify.hpp"
#include "doctest.h"

using namespace cmcglue;

namespace {

AssemblyParams delaunay_params(int resolution, bool full = true) {
  AssemblyParams p;
  p.n = 2;
  p.N = 5;
  p.m = 1;
  p.alpha = 0.618;
  p.tau = closure_tau(p.alpha, 5, 1);
  p.resolution = resolution;
  p.compute_mean_curvature = false;
  p.profile_only = !full;
  return p;
}

const Assembly& small_delaunay() {
  static const Assembly a = assemble(delaunay_params(16));
  return a;
}

}  // namespace

TEST_CASE("cut-off function") {
  CHECK(cutoff_eta(0.25) == 0.0);
  CHECK(cutoff_eta(0.5) == 0.0);
  CHECK(cutoff_eta(3.0) == 1.0);
  CHECK(cutoff_eta(2.0) == 1.0);
  double prev = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double v = cutoff_eta(2.5 * i / 1000);
    CHECK(v >= prev);
    prev = v;
  }
  const Jet j = cutoff_eta(Jet::variable(1.1));
  const double h = 1e-6;
  CHECK(j.d == doctest::Approx((cutoff_eta(1.1 + h) - cutoff_eta(1.1 - h)) / (2 * h)).epsilon(1e-6));
}

TEST_CASE("merged neck graph") {
  const int n = 2;
  const double alpha = 0.618, tau = 0.02, eps = 1e-4, eb = 1e-5, bb = 2e-6;
  const double rho = truncation_radius(n, eps);
  const double r0 = rho / 4;
  CHECK(merged_graph(n, eb, bb, alpha, tau, eps, 0.0, r0, 1).v ==
        doctest::Approx(bb + eb * catenoid_graph(n, r0 / eb)).epsilon(1e-14));
  CHECK(merged_graph(n, eb, bb, alpha, tau, eps, 0.0, r0, -1).v ==
        doctest::Approx(bb - eb * catenoid_graph(n, r0 / eb)).epsilon(1e-14));
  CHECK(merged_graph(n, eb, bb, alpha, tau, eps, 0.0, 3 * rho, -1).v ==
        doctest::Approx(perturbed_sphere_graph(n, alpha, tau, eps, 0.0, 3 * rho)).epsilon(1e-14));
  CHECK(merged_graph(n, eb, bb, alpha, tau, eps, 0.0, 3 * rho, 1).v ==
        doctest::Approx(-perturbed_sphere_graph(n, alpha, tau, eps, 0.0, 3 * rho)).epsilon(1e-14));

  // Derivatives are continuous across both seams and agree with differences.
  for (const double seam : {rho / 2, 2 * rho}) {
    const double d = 1e-10 * rho;
    const Jet lo = merged_graph(n, eb, bb, alpha, tau, eps, 0.0, seam - d, -1);
    const Jet hi = merged_graph(n, eb, bb, alpha, tau, eps, 0.0, seam + d, -1);
    CHECK(std::abs(lo.d - hi.d) <= 1e-6 * std::abs(hi.d));
    CHECK(std::abs(lo.dd - hi.dd) <= 1e-6 * std::abs(hi.dd));
    const double h = 1e-3 * rho;
    const double fd = (merged_graph(n, eb, bb, alpha, tau, eps, 0.0, seam + h, -1).v -
                       merged_graph(n, eb, bb, alpha, tau, eps, 0.0, seam - h, -1).v) /
                      (2 * h);
    CHECK(fd == doctest::Approx(hi.d).epsilon(1e-5));
  }
  CHECK_THROWS_AS(merged_graph(n, eb, bb, alpha, tau, eps, 0.0, eb / 2, 1), Error);
  CHECK_THROWS_AS(merged_graph(n, eb, bb, alpha, tau, eps, 0.0, r0, 0), Error);
}

TEST_CASE("delaunay chain") {
  const Assembly& a = small_delaunay();
  CHECK(a.count(BlockKind::sphere) == 5);
  CHECK(a.count(BlockKind::neck) == 5);
  CHECK(a.count(BlockKind::torus) == 0);
  CHECK(a.eps == doctest::Approx(solve_scale(2, a.params.alpha, a.params.tau)).epsilon(1e-12));
  for (const NamedTransform& t : a.symmetry_group) {
    INFO(t.name);
    CHECK(symmetry_check(a, t.matrix) <= 2 * a.mesh_edge);
  }
  const Embeddedness e = embeddedness_check(a);
  CHECK(e.embedded);
  CHECK(e.min_separation > 0.0);

  AssemblyParams bad = delaunay_params(8);
  bad.tau += 0.05;
  CHECK_THROWS_AS(assemble(bad), Error);
}

TEST_CASE("two-geodesic configuration") {
  AssemblyParams p;
  p.construction = Construction::two_geodesic;
  p.n = 2;
  p.N = 10;
  p.m = 1;
  p.alpha = 0.31;
  p.tau = closure_tau(p.alpha, 10, 1);
  p.resolution = 12;
  p.compute_mean_curvature = false;
  const Assembly a = assemble(p);
  CHECK(a.count(BlockKind::sphere) == 2 * 10 - 2);
  CHECK(a.count(BlockKind::neck) == 2 * 10);
  int shared = 0;
  for (const BlockSpec& b : a.blocks) shared += b.kind == BlockKind::sphere && b.shared;
  CHECK(shared == 2);
  for (const NamedTransform& t : a.symmetry_group) {
    INFO(t.name);
    CHECK(symmetry_check(a, t.matrix) <= 2 * a.mesh_edge);
  }

  AssemblyParams q = p;
  q.N = 12;
  q.alpha = (2 * pi / 12 - 0.01) / 2;
  q.tau = 0.01;
  CHECK_THROWS_AS(assemble(q), Error);
}

TEST_CASE("torus geodesic geometry") {
  const double alpha = 0.9;
  const std::vector<double> t = torus_geodesic_intersections(1, 1, alpha);
  const std::vector<double> expect = {0.0, pi - 2 * alpha, pi, 2 * pi - 2 * alpha};
  REQUIRE(t.size() == 4);
  for (const double e : expect) {
    double best = 1e300;
    for (const double v : t) best = std::min(best, std::abs(v - e));
    CHECK(best < 1e-10);
  }
  const Vec n = clifford_normal(alpha, Vec::Unit(2, 0), Vec::Unit(3, 0));
  Vec expected = Vec::Zero(5);
  expected(0) = -std::sin(alpha);
  expected(2) = std::cos(alpha);
  CHECK((n - expected).norm() < 1e-15);
  const Vec p = torus_geodesic_point(1, 2, alpha, 0.0);
  CHECK(std::abs(n.dot(p)) < 1e-15);
}

TEST_CASE("symmetry groups of the doubling") {
  const int n1 = 1, n2 = 1;
  const std::vector<GroupElement> id = group_preset("identity", n1, n2);
  const GroupCondition c0 = group_condition_check(id, n1, n2);
  CHECK_FALSE(c0.passes);
  CHECK(c0.fixed_dimension == 4);
  const GroupCondition c1 = group_condition_check(group_preset("reflection-T", n1, n2), n1, n2);
  CHECK_FALSE(c1.passes);
  CHECK(c1.fixed_dimension >= 1);
  const Mat I = Mat::Identity(2, 2);
  const GroupCondition c2 = group_condition_check({{I, I}, {-I, I}}, n1, n2);
  CHECK(c2.passes);
  CHECK(c2.fixed_dimension == 0);
  CHECK_THROWS_AS(group_preset("dihedral-1", n1, n2), Error);
  CHECK_THROWS_AS(group_preset("cubic", n1, n2), Error);

  for (const std::string name : {"antipodal", "dihedral-3", "dihedral-4"}) {
    INFO(name);
    const std::vector<GroupElement> G = group_closure(group_preset(name, n1, n2));
    const Orbit o = torus_orbit(G, n1, n2);
    const Vec e1 = Vec::Unit(2, 0), e2 = Vec::Unit(2, 0);
    int stab = 0;
    for (const GroupElement& g : G)
      stab += (g.omega1 * e1 - e1).norm() < 1e-9 && (g.omega2 * e2 - e2).norm() < 1e-9;
    CHECK(o.group_order == static_cast<int>(G.size()));
    CHECK(static_cast<int>(o.points.size()) * stab == o.group_order);
  }

  AssemblyParams p;
  p.construction = Construction::doubling;
  p.N = 6;
  p.m = 1;
  p.tau = 0.02;
  p.resolution = 8;
  p.compute_mean_curvature = false;
  try {
    assemble_doubling(p, id);
    FAIL("trivial group accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::obstruction);
  }
  const Assembly a = assemble_doubling(p, group_preset("antipodal", n1, n2));
  CHECK(a.count(BlockKind::torus) == 2);
  CHECK(a.count(BlockKind::sphere) == a.orbit_size * 6);
  for (const NamedTransform& t : a.symmetry_group) {
    INFO(t.name);
    CHECK(symmetry_check(a, t.matrix) <= 2 * a.mesh_edge);
  }
}

TEST_CASE("weight function") {
  const Assembly& a = small_delaunay();
  bool saw_far = false;
  for (const SurfaceSample& s : a.samples) {
    const double z = weight_function(a, s);
    CHECK(z >= a.eps * (1 - 1e-12));
    CHECK(z <= a.rho0 * (1 + 1e-12));
    if (s.region.kind == RegionKind::neck) {
      CHECK(z == doctest::Approx(std::min(a.eps * std::cosh(s.parametric(0)), a.rho0)));
      SurfaceSample waist = s;
      waist.parametric(0) = 0.0;
      CHECK(weight_function(a, waist) == doctest::Approx(a.eps).epsilon(1e-14));
    }
    if (s.region.kind == RegionKind::exterior && s.gamma_dist > 2 * a.rho0) {
      saw_far = true;
      CHECK(z == a.rho0);
    }
  }
  CHECK(saw_far);
}

TEST_CASE("weighted sup norm") {
  const Assembly& a = small_delaunay();
  const std::size_t m = a.samples.size();
  CHECK(weighted_sup_norm(a, std::vector<double>(m, 1.0), 0.0).total == doctest::Approx(1.0));
  std::vector<double> f(m), g(m), z(m);
  for (std::size_t i = 0; i < m; ++i) {
    f[i] = std::sin(0.37 * i) + 0.1;
    g[i] = -2.5 * f[i];
    z[i] = std::pow(a.samples[i].weight, -0.5);
  }
  CHECK(weighted_sup_norm(a, g, -0.5).total ==
        doctest::Approx(2.5 * weighted_sup_norm(a, f, -0.5).total).epsilon(1e-14));
  CHECK(weighted_sup_norm(a, z, -0.5).annular == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(weighted_sup_norm(a, std::vector<double>(m + 1, 1.0), 0.0), Error);
}

TEST_CASE("mesh topology and export") {
  const Assembly s = assemble_single_sphere(2, 0.8, 32);
  CHECK(euler_characteristic(build_mesh(s)) == 2);
  CHECK(euler_characteristic(build_mesh(small_delaunay())) == 0);

  const auto dir = std::filesystem::temp_directory_path() / "cmcglue_mesh_test";
  std::filesystem::create_directories(dir);
  const std::string csv = (dir / "profile.csv").string();
  export_mesh(small_delaunay(), MeshFormat::csv_profile, Projection::coords4, csv);
  std::ifstream in(csv);
  std::string header, row;
  std::getline(in, header);
  CHECK(header == "param,radius,y1,region,block,zeta,H");
  REQUIRE(std::getline(in, row));
  CHECK(std::count(row.begin(), row.end(), ',') == 6);

  const std::string obj = (dir / "surface.obj").string();
  export_mesh(small_delaunay(), MeshFormat::obj, Projection::stereo, obj);
  std::ifstream o(obj);
  std::string first;
  std::getline(o, first);
  CHECK(first.rfind("v ", 0) == 0);
  CHECK(std::count(first.begin(), first.end(), ' ') == 3);
  std::filesystem::remove_all(dir);

  CHECK_THROWS_AS(build_mesh(assemble(delaunay_params(8, false))), Error);
}
