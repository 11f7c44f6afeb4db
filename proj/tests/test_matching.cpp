#include <cmath>
#include <algorithm>
#include <random>

#include "cmcglue/blocks.hpp"
#include "cmcglue/matching.hpp"
#include "doctest.h"

using namespace cmcglue;

TEST_CASE("gap geometry") {
  for (const double a : {0.3, 0.7, 1.2}) {
    const NeckGeometryParams z = neck_geometry_params(a, 0.0);
    CHECK(z.r == doctest::Approx(std::tan(a) / 2).epsilon(1e-14));
    CHECK(z.d == doctest::Approx(z.r).epsilon(1e-14));
    for (const double t : {0.01, 0.2, 0.5}) {
      const NeckGeometryParams g = neck_geometry_params(a, t);
      CHECK(std::abs(g.d - g.r - std::tan(t / 4)) < 1e-12);
    }
  }
  const double a = pi / 3, t = 0.1;
  const double den = std::cos(a) + std::cos(a + t / 2);
  const NeckGeometryParams g = neck_geometry_params(a, t);
  CHECK(g.r == doctest::Approx(std::sin(a) / den).epsilon(1e-15));
  CHECK(g.d == doctest::Approx(std::sin(a + t / 2) / den).epsilon(1e-15));
  CHECK_THROWS_AS(neck_geometry_params(1.5, 0.5), Error);
}

TEST_CASE("prefactor form of the expansion constants") {
  // 2 alpha + tau/2 = pi/2 is a zero of the prefactor.
  const double t = 0.08, a = (pi / 2 - t / 2) / 2;
  for (int n = 2; n <= 4; ++n) {
    CHECK(std::abs(expansion_constants_prefactor_form(n, a, t).Cn) < 1e-15);
    const double lo = expansion_constants_prefactor_form(n, a - 0.01, t).Cn;
    const double hi = expansion_constants_prefactor_form(n, a + 0.01, t).Cn;
    CHECK(lo > 0.0);
    CHECK(hi < 0.0);
  }
  // Direct evaluation of the closed form, n = 3.
  const double al = pi / 4, ta = 0.05;
  const double r = std::sin(al) / (std::cos(al) + std::cos(al + ta / 2));
  const double q = std::pow(std::cos(ta / 4), 2) / (r * (std::cos(al) + std::cos(al + ta / 2)));
  const double pref = std::cos(2 * al + ta / 2) / std::pow(std::cos(al) + std::cos(al + ta / 2), 2);
  CHECK(expansion_constants_prefactor_form(3, al, ta).Cn == doctest::Approx(pref / (2 * q)).epsilon(1e-13));
}

TEST_CASE("expansion constants match the sheet") {
  // Recover C_3 from the difference of a perturbed and an unperturbed sheet.
  const int n = 3;
  const double a = 0.62, t = 0.01, eps = 1e-3, y = 3e-3;
  const double diff = perturbed_sphere_graph(n, a, t, eps, 0.0, y) -
                      perturbed_sphere_graph(n, a, t, 0.0, 0.0, y);
  const double fitted = diff * (n - 2) * std::pow(y, n - 2) / std::pow(eps, n - 1);
  const double c = expansion_constants(n, a, t).Cn;
  CHECK(c > 0.0);
  CHECK(std::abs(fitted / c - 1.0) < 1e-2);
  for (const double al : {0.3, 0.9, 1.4})
    for (int m = 2; m <= 4; ++m) CHECK(expansion_constants(m, al, 0.02).Cn > 0.0);
}

TEST_CASE("sphere sheet near the neck axis") {
  const double a = 0.7, t = 0.04;
  const NeckGeometryParams g = neck_geometry_params(a, t);
  // eps = 0: remainder after the quadratic expansion is O(|y|^4).
  const auto rem = [&](double y) {
    return std::abs(perturbed_sphere_graph(3, a, t, 0.0, 0.0, y) + std::tan(t / 4) + y * y / (2 * g.r));
  };
  const double slope = std::log(rem(1e-2) / rem(1e-3)) / std::log(10.0);
  CHECK(slope == doctest::Approx(4.0).epsilon(0.02));
  CHECK(perturbed_sphere_graph(2, a, t, 0.0, 0.0, 1e-3) < 0.0);

  // mu(|y|) has linear coefficient 2 csc(alpha) cos^2(tau/4).
  const SphereSheet sheet(3, a, t, 0.0, 0.0, 1.0);
  const double h = 1e-6;
  const double coeff = (sheet.mu_of_radius(2 * h) - sheet.mu_of_radius(h)) / h;
  CHECK(std::abs(coeff - 2 / std::sin(a) * std::pow(std::cos(t / 4), 2)) < 1e-6);
  CHECK(sheet.radius_of_mu(sheet.mu_of_radius(0.05)) == doctest::Approx(0.05).epsilon(1e-13));
  CHECK_THROWS_AS(sheet.mu_of_radius(-1.0), Error);
}

TEST_CASE("truncation radius") {
  CHECK(truncation_radius(2, 1e-4) == doctest::Approx(1e-3).epsilon(1e-12));
  CHECK(truncation_radius(3, 0.0) == 0.0);
  double prev_rho = 0.0, prev_ratio = 1e300;
  for (double e = 1e-8; e < 1e-1; e *= 10) {
    const double rho = truncation_radius(3, e);
    CHECK(rho > prev_rho);
    CHECK(rho / e < prev_ratio);
    prev_rho = rho;
    prev_ratio = rho / e;
  }
}

TEST_CASE("scale equation") {
  const double a = 0.62;
  for (const double t : {0.002, 0.006, 0.0086}) {
    const double e = solve_scale(3, a, t);
    const double c = expansion_constants(3, a, t).Cn;
    CHECK(std::abs(e * catenoid_constant(3) * std::sqrt(c) - std::tan(t / 4)) < 1e-14);
  }
  for (const double t : {0.005, 0.02}) {
    const double e = solve_scale(2, a, t);
    const ExpansionConstants k = expansion_constants(2, a, t);
    const double et = e * k.Cn;
    CHECK(std::abs(et * std::log(2 / et) - std::tan(t / 4) - e * k.c2) < 1e-12);
  }
  double prev = 0.0;
  for (double t = 1e-4; t < 0.03; t *= 1.5) {
    const double e = solve_scale(3, a, t);
    CHECK(e > prev);
    prev = e;
  }
  CHECK(solve_scale(3, a, 1e-8) < 1e-8);
  CHECK_THROWS_AS(solve_scale(3, a, 0.0), Error);
}

TEST_CASE("neck system") {
  const int n = 3, N = 8;
  const double a = 0.62, t = 0.006;
  const NeckSolve s0 = solve_neck_system(n, a, t, std::vector<double>(N, 0.0));
  CHECK(std::abs(s0.eps - solve_scale(n, a, t)) < 1e-12);
  for (int k = 0; k < N; ++k) {
    CHECK(std::abs(s0.b[k]) < 1e-12);
    CHECK(std::abs(s0.b_bar[k]) < 1e-12);
  }

  std::mt19937 rng(7);
  std::normal_distribution<double> nd;
  std::vector<double> free(1);
  free[0] = nd(rng);
  std::vector<double> sigma = symmetric_sigma(N, free);
  double norm = 0.0;
  for (const double v : sigma) norm += v * v;
  for (double& v : sigma) v *= 1e-3 / std::sqrt(norm);
  CHECK(sigma_is_symmetric(sigma));
  const NeckSolve s = solve_neck_system(n, a, t, sigma);
  CHECK(s.residual <= 1e-10);
  CHECK(s.b[0] == 0.0);
  CHECK(neck_system_residual(s, s.b, s.b_bar) <= 1e-10);
  for (int k = 0; k < N / 2; ++k) CHECK(std::abs(s.b[k] + s.b[N / 2 - k]) < 1e-9 * std::pow(s.eps, 1 - n));
  // Mirror necks carry equal scales.
  CHECK(std::abs(s.eps_bar[0] - s.eps_bar[N / 2 - 1]) < 1e-12);

  // Kernel direction (eps^{1-n}, -1).
  std::vector<double> b = s.b, bb = s.b_bar;
  for (int k = 0; k < N; ++k) {
    b[k] += 0.3 * std::pow(s.eps, 1 - n);
    bb[k] -= 0.3;
  }
  CHECK(std::abs(neck_system_residual(s, b, bb) - neck_system_residual(s, s.b, s.b_bar)) < 1e-12);
  // Rank 2N - 1.
  const auto& sv = s.singular_values;
  REQUIRE(sv.size() == 2 * N);
  const double big = *std::max_element(sv.begin(), sv.end());
  std::vector<double> sorted = sv;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted[0] <= 1e-10 * big);
  CHECK(sorted[1] > 1e-6 * big);

  std::vector<double> overlap(N, 0.0);
  overlap[1] = -t;
  CHECK_THROWS_AS(solve_neck_system(n, a, t, overlap), Error);
}

TEST_CASE("symmetric displacements") {
  const std::vector<double> s = symmetric_sigma(10, {0.1, 0.2});
  CHECK(s.size() == 10);
  CHECK(sigma_is_symmetric(s));
  CHECK(s[0] == 0.0);
  CHECK(s[5] == 0.0);
  CHECK(s[1] == 0.1);
  CHECK(s[4] == -0.1);
  CHECK_FALSE(sigma_is_symmetric({0.0, 0.1, 0.0, 0.0}));
  CHECK_THROWS_AS(symmetric_sigma(9, {}), Error);
  CHECK_THROWS_AS(symmetric_sigma(10, {0.1}), Error);
}

TEST_CASE("closure of the chain") {
  ClosureResult r = closure_check(0.0, 2 * pi / 5, 1e-12);
  CHECK(r.found);
  CHECK(r.N == 5);
  CHECK(r.m == 1);
  CHECK(r.exact);
  r = closure_check(0.3, 4 * pi / 5 - 0.6, 1e-12);
  CHECK(r.N == 5);
  CHECK(r.m == 2);
  CHECK_FALSE(closure_check(0.5, std::sqrt(2.0) - 1.0, 1e-12, 10000).found);
  r = closure_check(0.5, 2 * pi / 7 - 1.0 + 1e-6, 1e-4);
  CHECK(r.N == 7);
  CHECK_FALSE(r.exact);
}

TEST_CASE("winding conditions") {
  const HandleParameters p = handle_parameters(1, 1, 0.02, 6, 1, WindingMode::handle);
  CHECK(std::abs(winding_residual(1, 1, p.alpha, p.tau, 6, 1, WindingMode::handle)) <= 1e-12);
  CHECK(p.alpha > minimal_clifford_alpha(1, 1));
  const HandleParameters q = handle_tau(1, 1, p.alpha, 6, 1, WindingMode::handle);
  CHECK(q.tau == doctest::Approx(0.02).epsilon(1e-10));

  const HandleParameters d = handle_parameters(1, 1, 0.02, 6, 1, WindingMode::doubling);
  CHECK(std::abs(d.residual) <= 1e-12);
  CHECK(d.alpha_bar == doctest::Approx(opposite_alpha(1, 1, d.alpha)));

  // N alpha_hat(alpha) - alpha changes sign before pi/2.
  const int N = 3;
  const auto f = [&](double a) { return N * matched_sphere_alpha(1, 1, a) - a; };
  CHECK(f(minimal_clifford_alpha(1, 1)) > 0.0);
  CHECK(f(pi / 2 - 1e-3) < 0.0);

  // n1 = n2 at alpha*: N pi + (N + 1) tau = 2 m pi.
  CHECK(std::abs(winding_residual(1, 1, pi / 4, pi / 2, 1, 1, WindingMode::doubling)) < 1e-12);
  CHECK_THROWS_AS(handle_parameters(1, 1, 0.02, 0, 1, WindingMode::handle), Error);
  CHECK_THROWS_AS(handle_parameters(1, 1, 3.0, 6, 1, WindingMode::handle), Error);
}
