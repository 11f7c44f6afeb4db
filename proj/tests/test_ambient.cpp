#include <random>

#include "cmcglue/ambient.hpp"
#include "doctest.h"

using namespace cmcglue;

namespace {

Vec random_unit(int d, std::mt19937& rng) {
  std::normal_distribution<double> Z;
  Vec v(d);
  for (int i = 0; i < d; ++i) v(i) = Z(rng);
  return v.normalized();
}

}  // namespace

TEST_CASE("planar rotations") {
  const int n = 3;
  CHECK((planar_rotation(0, 1, 0.0, n).as_matrix - Mat::Identity(n + 2, n + 2)).norm() == 0.0);
  CHECK((planar_rotation(0, 1, 2 * pi, n).as_matrix - Mat::Identity(n + 2, n + 2))
            .cwiseAbs()
            .maxCoeff() < 1e-12);
  const double t = 0.37;
  const Vec e0 = planar_rotation(0, 1, t, n).as_matrix * Vec::Unit(n + 2, 0);
  CHECK(e0(0) == doctest::Approx(std::cos(t)).epsilon(1e-15));
  CHECK(e0(1) == doctest::Approx(std::sin(t)).epsilon(1e-15));
  CHECK(e0.tail(n).norm() == 0.0);
  // The chart centred at R(p) sends R(p) to the origin.
  const Mat R = planar_rotation(0, 1, t, n).as_matrix;
  CHECK(ambient_to_chart(R, R * Vec::Unit(n + 2, 0)).norm() < 1e-15);
}

TEST_CASE("stereographic projection") {
  const int d = 5;
  CHECK(stereo_project(Vec::Unit(d, 0)).full().norm() == 0.0);
  const Vec eq = stereo_project(Vec::Unit(d, 1)).full();
  CHECK((eq - Vec::Unit(d - 1, 0)).norm() < 1e-15);
  CHECK((stereo_unproject(Vec(Vec::Zero(d - 1))) - Vec::Unit(d, 0)).norm() < 1e-15);
  CHECK((stereo_unproject(Vec(Vec::Unit(d - 1, 0))) - Vec::Unit(d, 1)).norm() < 1e-15);
  const Vec far = stereo_unproject(Vec(1e8 * Vec::Unit(d - 1, 2)));
  CHECK((far + Vec::Unit(d, 0)).norm() < 1e-7);

  std::mt19937 rng(3);
  for (int i = 0; i < 100; ++i) {
    const Vec x = random_unit(d, rng);
    if (x(0) < -0.99) continue;
    CHECK((stereo_unproject(stereo_project(x)) - x).norm() < 1e-12);
  }
}

TEST_CASE("conformal factor and pullback metric") {
  CHECK(conformal_factor(Vec(Vec::Zero(3))) == 0.5);
  CHECK(conformal_factor(Vec(Vec::Unit(3, 1))) == 1.0);
  // Independent check: the round metric pulled back by K^{-1} is A^{-2} delta.
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> U(-1.5, 1.5);
  const double h = 1e-4;
  for (int trial = 0; trial < 20; ++trial) {
    Vec y(3);
    for (int i = 0; i < 3; ++i) y(i) = U(rng);
    Mat J(4, 3);
    for (int i = 0; i < 3; ++i) {
      const Vec e = h * Vec::Unit(3, i);
      J.col(i) = (stereo_unproject(Vec(y + e)) - stereo_unproject(Vec(y - e))) / (2 * h);
    }
    const double a = conformal_factor(y);
    CHECK((J.transpose() * J - Mat::Identity(3, 3) / (a * a)).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("conformal change of mean curvature") {
  const int n = 2;
  // Equatorial plane through the origin.
  const Vec N0 = Vec::Unit(3, 0);
  Vec pos(3);
  pos << 0.0, 0.4, -0.3;
  CHECK(conformal_geometry(0.0, N0, Mat::Zero(n, n), Mat::Identity(n, n), pos).mean_curvature ==
        0.0);

  // Catenoid waist (0, eps Theta) with normal pointing to the axis.
  const double eps = 0.01;
  Vec waist(3), inward(3);
  waist << 0.0, eps, 0.0;
  inward << 0.0, -1.0, 0.0;
  Mat B(n, n);
  B << 1 / eps, 0, 0, -1 / eps;
  CHECK(conformal_geometry(0.0, inward, B, Mat::Identity(n, n), waist).mean_curvature ==
        doctest::Approx(n * eps).epsilon(1e-14));

  // Chart image of S_alpha: a round sphere of radius r centred at -d e_1.
  for (const double alpha : {0.3, 0.7, 1.2}) {
    const double tau = 0.1;
    const double den = std::cos(alpha) + std::cos(alpha + tau / 2);
    const double r = std::sin(alpha) / den, d = std::sin(alpha + tau / 2) / den;
    for (const double t : {0.2, 1.4, 2.9}) {
      Vec u(3);
      u << std::cos(t), std::sin(t) * 0.6, std::sin(t) * 0.8;
      Vec y = r * u;
      y(0) -= d;
      const double H = conformal_geometry(n / r, u, Mat::Identity(n, n) / r,
                                          Mat::Identity(n, n), y)
                           .mean_curvature;
      CHECK(H == doctest::Approx(n / std::tan(alpha)).epsilon(1e-10));
    }
  }
  CHECK_THROWS_AS(conformal_geometry(0.0, 2 * N0, Mat::Zero(n, n), Mat::Identity(n, n), pos),
                  Error);
}

TEST_CASE("sphere distance") {
  const Vec a = Vec::Unit(4, 0), b = Vec::Unit(4, 1);
  CHECK(sphere_distance(a, b) == doctest::Approx(pi / 2));
  CHECK(sphere_distance(a, -a) == doctest::Approx(pi));
  CHECK(sphere_distance(a, a) == 0.0);
}
