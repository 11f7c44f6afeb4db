#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gegenbauer.hpp>
#include <cmath>

#include "cmcglue/blocks.hpp"

namespace cmcglue {

namespace {

double sphere_area(int k) {
  return 2.0 * std::pow(pi, (k + 1) / 2.0) / boost::math::tgamma((k + 1) / 2.0);
}

double eigenvalue(int k, int l) { return l * (l + k - 1.0); }

// Flat-space part removed by the heat factor: S - e^{t Delta} S = int_0^t K_s ds
// for the fundamental solution S of -Delta in R^n, at distance r.
double heat_tail(int n, double t, double r) {
  r = std::max(r, 1e-12);  // poles themselves are excluded by the samplers
  const double x = r * r / (4.0 * t);
  if (n == 2) return boost::math::expint(1, x) / (4.0 * pi);
  return std::pow(4.0 * pi, -n / 2.0) * std::pow(r * r / 4.0, 1.0 - n / 2.0) *
         boost::math::tgamma(n / 2.0 - 1.0, x);
}

// All zonal harmonics of degree <= lmax at x by the Gegenbauer (or
// Chebyshev, k = 1) three-term recurrence.
void zonal_table(int k, int lmax, double x, Vec& out) {
  x = std::clamp(x, -1.0, 1.0);
  out.resize(lmax + 1);
  if (k == 1) {
    double c0 = 1.0, c1 = x;
    out(0) = 1.0 / (2.0 * pi);
    for (int l = 1; l <= lmax; ++l) {
      out(l) = c1 / pi;
      const double c2 = 2.0 * x * c1 - c0;
      c0 = c1;
      c1 = c2;
    }
    return;
  }
  const double lambda = (k - 1) / 2.0, area = sphere_area(k);
  double g0 = 1.0, g1 = 2.0 * lambda * x;
  out(0) = 1.0 / area;
  for (int l = 1; l <= lmax; ++l) {
    out(l) = (l + lambda) / lambda * g1 / area;
    const double g2 = (2.0 * x * (l + lambda) * g1 - (l + 2.0 * lambda - 1.0) * g0) / (l + 1.0);
    g0 = g1;
    g1 = g2;
  }
}

}  // namespace

double zonal_harmonic(int k, int l, double x) {
  x = std::clamp(x, -1.0, 1.0);
  if (k == 1) return (l == 0 ? 1.0 : 2.0 * std::cos(l * std::acos(x))) / (2.0 * pi);
  const double lambda = (k - 1) / 2.0;
  return (l + lambda) / lambda * boost::math::gegenbauer(static_cast<unsigned>(l), lambda, x) /
         sphere_area(k);
}

TorusGreen::TorusGreen(int n1, int n2, double alpha, double strength, std::vector<Pole> poles,
                       double heat_time, int lmax)
    : n1_(n1), n2_(n2), alpha_(alpha), strength_(strength), heat_time_(heat_time),
      lmax_(lmax), poles_(std::move(poles)) {
  const double c2 = std::pow(std::cos(alpha), 2), s2 = std::pow(std::sin(alpha), 2);
  const double volume = std::pow(std::cos(alpha), n1) * std::pow(std::sin(alpha), n2);
  coeff_ = Mat::Zero(lmax + 1, lmax + 1);
  for (int l1 = 0; l1 <= lmax; ++l1) {
    for (int l2 = 0; l2 <= lmax; ++l2) {
      const double lam1 = eigenvalue(n1, l1), lam2 = eigenvalue(n2, l2);
      const double mu = (n1 - lam1) / c2 + (n2 - lam2) / s2;
      if (std::abs(mu) < 1e-8) continue;  // Jacobi fields of the torus
      const double big_lambda = lam1 / c2 + lam2 / s2;
      coeff_(l1, l2) = std::exp(-heat_time * big_lambda) / (volume * mu);
    }
  }
}

double TorusGreen::operator()(const Vec& theta1, const Vec& theta2) const {
  Vec z1, z2;
  double total = 0.0;
  for (const Pole& p : poles_) {
    zonal_table(n1_, lmax_, theta1.dot(p.theta1), z1);
    zonal_table(n2_, lmax_, theta2.dot(p.theta2), z2);
    total += z1.dot(coeff_ * z2);
    // Restore the pole singularity that the heat factor smooths out, using
    // the product-metric distance to the pole.
    const double d1 = std::acos(std::clamp(theta1.dot(p.theta1), -1.0, 1.0));
    const double d2 = std::acos(std::clamp(theta2.dot(p.theta2), -1.0, 1.0));
    const double r = std::hypot(std::cos(alpha_) * d1, std::sin(alpha_) * d2);
    if (r * r < 200.0 * heat_time_) total -= heat_tail(n1_ + n2_, heat_time_, r);
  }
  // The solution of L u = delta is negative at the pole; flip so the result
  // is positive there like the sphere Green's function.
  return -strength_ * total;
}

}  // namespace cmcglue
