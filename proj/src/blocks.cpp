#include "cmcglue/blocks.hpp"

#include <array>
#include <cmath>
#include <mutex>
#include <vector>

#include "cmcglue/numerics.hpp"

namespace cmcglue {

// ---- hyperspheres -------------------------------------------------------

Vec sphere_point(double alpha, double mu, const Vec& theta) {
  const int n = static_cast<int>(theta.size());
  Vec x(n + 2);
  x(0) = std::cos(alpha);
  x(1) = std::sin(alpha) * std::cos(mu);
  x.tail(n) = std::sin(alpha) * std::sin(mu) * theta;
  return x;
}

Vec sphere_base_point(double mu, const Vec& theta) {
  const int n = static_cast<int>(theta.size());
  Vec w(n + 1);
  w(0) = std::cos(mu);
  w.tail(n) = std::sin(mu) * theta;
  return w;
}

Mat sphere_tangent_frame(double mu, const Vec& theta) {
  const int n = static_cast<int>(theta.size());
  Mat e = Mat::Zero(n + 1, n);
  e(0, 0) = -std::sin(mu);
  e.col(0).tail(n) = std::cos(mu) * theta;
  if (n > 1) {
    // Orthonormal complement of Theta in R^n.
    Eigen::HouseholderQR<Mat> qr(theta);
    const Mat q = qr.householderQ() * Mat::Identity(n, n);
    for (int j = 1; j < n; ++j) e.col(j).tail(n) = q.col(j);
  }
  return e;
}

double sphere_mean_curvature(int n, double alpha) {
  if (alpha < 1e-8) throw Error(ErrorKind::divergence, "sphere_mean_curvature: alpha too small");
  if (alpha > pi / 2 + 1e-15)
    throw Error(ErrorKind::argument, "sphere_mean_curvature: alpha must be in (0, pi/2]");
  return n * std::cos(alpha) / std::sin(alpha);
}

GraphGeometryAt normal_graph_geometry(int n, double alpha, double F, const Vec& gradF,
                                      const Mat& hessF, double mu, const Vec& theta) {
  const double a = alpha + F;
  const double s = std::sin(a), c = std::cos(a);
  if (s <= 0.0)
    throw Error(ErrorKind::geometry, "normal_graph_geometry: graph leaves the hemisphere");
  const double g2 = gradF.squaredNorm();
  const double A = std::sqrt(s * s + g2);
  const Mat id = Mat::Identity(n, n);

  GraphGeometryAt out;
  out.metric = gradF * gradF.transpose() + s * s * id;
  out.second_form = (-s * hessF + 2.0 * c * gradF * gradF.transpose() + s * s * c * id) / A;

  const Vec w = sphere_base_point(mu, theta);
  const Mat frame = sphere_tangent_frame(mu, theta);
  Vec nu(n + 2);
  nu(0) = -s;
  nu.tail(n + 1) = c * w;
  Vec tang = Vec::Zero(n + 2);
  tang.tail(n + 1) = frame * gradF;
  out.normal = (s * nu - tang) / A;

  const double lap = hessF.trace();
  const double hgg = gradF.dot(hessF * gradF);
  out.mean_curvature = (-lap + n * s * c + (hgg + s * c * g2) / (A * A)) / (A * s);
  return out;
}

double axisymmetric_graph_mean_curvature(int n, double alpha, double F, double dF,
                                         double ddF, double mu) {
  const double a = alpha + F;
  const double s = std::sin(a), c = std::cos(a);
  const double A2 = s * s + dF * dF;
  const double A = std::sqrt(A2);
  const double lap = ddF + (n - 1) * std::cos(mu) / std::sin(mu) * dF;
  return (-lap + n * s * c + (ddF * dF * dF + s * c * dF * dF) / A2) / (A * s);
}

namespace {

// (1 - sin^{n-1}) / (cos^2 sin^{n-1}). Since 1 - sin = cos^2 / (1 + sin) this
// equals sum_{k=1}^{n-1} csc^k / (1 + sin), which has no removable singularity.
double green_integrand(int n, double sigma) {
  const double s = std::sin(sigma);
  double sum = 0.0, csc_k = 1.0;
  for (int k = 1; k <= n - 1; ++k) sum += (csc_k /= s);
  return sum / (1.0 + s);
}

// Antiderivative of the integrand from the recursions
//   int csc^k / (1 + sin) = int csc^k - int csc^{k-1} / (1 + sin),
//   int csc^k = -csc^{k-2} cot / (k-1) + (k-2)/(k-1) int csc^{k-2}.
double green_primitive(int n, double sigma) {
  const double s = std::sin(sigma), c = std::cos(sigma);
  std::vector<double> C(n);  // antiderivatives of csc^k, k < n
  C[0] = sigma;
  if (n > 1) C[1] = std::log(std::tan(sigma / 2));
  for (int k = 2; k < n; ++k)
    C[k] = -std::pow(s, 2 - k) * (c / s) / (k - 1) + (k - 2.0) / (k - 1) * C[k - 2];
  double J = -c / (1.0 + s);
  double total = 0.0;
  for (int k = 1; k <= n - 1; ++k) {
    J = C[k] - J;
    total += J;
  }
  return total;
}

// int_{pi/2}^{mu} of the integrand, mu in (0, pi/2].
double green_integral(int n, double mu) {
  if (mu >= pi / 2) return 0.0;
  return green_primitive(n, mu) - green_primitive(n, pi / 2);
}

void check_mu(double mu) {
  if (!(mu >= 1e-6 && mu <= pi - 1e-6))
    throw Error(ErrorKind::argument, "green_function: mu must lie in [1e-6, pi - 1e-6]");
}

}  // namespace

double green_function(int n, double mu) {
  check_mu(mu);
  const double m = std::min(mu, pi - mu);
  return -std::sin(m) - std::cos(m) * green_integral(n, m);
}

double green_derivative(int n, double mu) {
  check_mu(mu);
  const bool mirrored = mu > pi / 2;
  const double m = mirrored ? pi - mu : mu;
  const double d = -std::cos(m) + std::sin(m) * green_integral(n, m) -
                   std::cos(m) * green_integrand(n, m);
  return mirrored ? -d : d;
}

double green_second_derivative(int n, double mu) {
  return -(n - 1) * std::cos(mu) / std::sin(mu) * green_derivative(n, mu) -
         n * green_function(n, mu);
}

Jet green_jet(int n, double mu) {
  const double g = green_function(n, mu), d = green_derivative(n, mu);
  return {g, d, -(n - 1) * std::cos(mu) / std::sin(mu) * d - n * g};
}

double green_asymptotics(int n, double mu) {
  if (n == 2) return -1.0 + std::log(2.0) - std::log(mu);
  if (n == 3) return 1.0 / mu;
  if (n == 4) return 1.0 / (2.0 * mu * mu);
  return 1.0 / ((n - 2) * std::pow(mu, n - 2));
}

double sphere_linearized_apply(int n, double alpha, double u, double du, double ddu,
                               double mu) {
  const double s = std::sin(alpha);
  return (ddu + (n - 1) * std::cos(mu) / std::sin(mu) * du + n * u) / (s * s);
}

// ---- generalized catenoid ----------------------------------------------

CatenoidProfile catenoid_profile(int n, double s) {
  CatenoidProfile p;
  const double k = n - 1;
  const double ch = std::cosh(k * s), sh = std::sinh(k * s);
  p.phi = std::pow(ch, 1.0 / k);
  p.dphi = sh * std::pow(p.phi, 2.0 - n);
  p.ddphi = k * p.phi + (2.0 - n) * p.dphi * p.dphi / p.phi;
  p.dpsi = std::pow(p.phi, 2.0 - n);
  p.ddpsi = (2.0 - n) * std::pow(p.phi, 1.0 - n) * p.dphi;
  if (n == 2) {
    p.psi = s;
  } else {
    const auto f = [n](double t) { return std::pow(std::cosh((n - 1) * t), (2.0 - n) / (n - 1)); };
    p.psi = adaptive_simpson(f, 0.0, s, 1e-13);
  }
  return p;
}

namespace {

// Tail int_x^inf (t^{2n-2} - 1)^{-1/2} dt by the binomial series in t^{2-2n}.
double catenoid_tail(int n, double x) {
  double sum = 0.0, a = 1.0;
  for (int j = 0; j < 200; ++j) {
    const double p = (n - 2) + j * (2.0 * n - 2.0);
    const double term = a * std::pow(x, -p) / p;
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    a *= (2.0 * j + 1.0) / (2.0 * j + 2.0);
  }
  return sum;
}

constexpr double kTailSwitch = 4.0;

double catenoid_graph_quadrature(int n, double x) {
  const double m = 2.0 * n - 2.0;
  const auto f = [m](double t) {
    if (t < 1e-8) return 2.0 / std::sqrt(m);
    return 2.0 * t / std::sqrt(std::expm1(m * std::log1p(t * t)));
  };
  return adaptive_simpson(f, 0.0, std::sqrt(x - 1.0), 1e-13, 1e-15);
}

}  // namespace

double catenoid_constant(int n) {
  if (n < 3) throw Error(ErrorKind::argument, "catenoid_constant: defined for n >= 3");
  static std::mutex mutex;
  static std::array<double, 64> cache{};
  if (n >= static_cast<int>(cache.size()))
    return catenoid_graph_quadrature(n, kTailSwitch) + catenoid_tail(n, kTailSwitch);
  std::lock_guard<std::mutex> lock(mutex);
  if (cache[n] == 0.0)
    cache[n] = catenoid_graph_quadrature(n, kTailSwitch) + catenoid_tail(n, kTailSwitch);
  return cache[n];
}

double catenoid_graph(int n, double x) {
  if (x < 1.0) throw Error(ErrorKind::argument, "catenoid_graph: x must be >= 1");
  if (n >= 3 && x > kTailSwitch) return catenoid_constant(n) - catenoid_tail(n, x);
  return catenoid_graph_quadrature(n, x);
}

double catenoid_graph_derivative(int n, double x) {
  return 1.0 / std::sqrt(std::expm1((2.0 * n - 2.0) * std::log(x)));
}

double catenoid_graph_second_derivative(int n, double x) {
  const double q = std::expm1((2.0 * n - 2.0) * std::log(x));
  return -(n - 1.0) * std::pow(x, 2.0 * n - 3.0) / (q * std::sqrt(q));
}

CatenoidGeometry catenoid_geometry(int n, double eps, double s) {
  if (!(eps > 0.0)) throw Error(ErrorKind::argument, "catenoid_geometry: eps must be positive");
  const double phi = std::pow(std::cosh((n - 1) * s), 1.0 / (n - 1));
  CatenoidGeometry g;
  g.metric_factor = eps * eps * phi * phi;
  g.second_form_ss = eps * std::pow(phi, 2.0 - n) * (1.0 - n);
  g.second_form_angular = eps * std::pow(phi, 2.0 - n);
  g.norm_B = std::sqrt(n * (n - 1.0)) / (eps * std::pow(phi, n));
  g.norm_grad_B = n * std::sqrt((n + 2.0) * (n - 1.0)) * std::sinh((n - 1) * s) /
                  (eps * eps * std::pow(phi, 2.0 * n));
  // Trace of B against the metric: ((1-n) + (n-1)) / (eps phi^n) = 0.
  g.mean_curvature = (g.second_form_ss + (n - 1) * g.second_form_angular) / g.metric_factor;
  return g;
}

double catenoid_mean_curvature_analytic(int n, double eps, double s) {
  const CatenoidProfile p = catenoid_profile(n, s);
  const double xp = eps * p.dpsi, xpp = eps * p.ddpsi;
  const double rp = eps * p.dphi, rpp = eps * p.ddphi, r = eps * p.phi;
  const double sp = std::sqrt(xp * xp + rp * rp);
  return (xp * rpp - xpp * rp) / (sp * sp * sp) - (n - 1) * xp / (r * sp);
}

int jacobi_mode(JacobiKind kind) {
  return (kind == JacobiKind::J1 || kind == JacobiKind::J0) ? 0 : 1;
}

double catenoid_jacobi(int n, JacobiKind kind, double s, double theta_component) {
  const CatenoidProfile p = catenoid_profile(n, s);
  switch (kind) {
    case JacobiKind::J1: return p.dphi / p.phi;
    case JacobiKind::Jk: return -theta_component / std::pow(p.phi, n - 1);
    case JacobiKind::J1k:
      return theta_component * (p.psi / std::pow(p.phi, n - 1) + p.dphi);
    case JacobiKind::J0: return p.psi * p.dphi / p.phi - std::pow(p.phi, 2.0 - n);
  }
  throw Error(ErrorKind::argument, "catenoid_jacobi: unknown kind");
}

double catenoid_linearized_apply(int n, double u, double du, double ddu, double s,
                                 int angular_mode) {
  if (angular_mode < 0)
    throw Error(ErrorKind::argument, "catenoid_linearized_apply: negative mode");
  const double k = n - 1;
  const double phi = std::pow(std::cosh(k * s), 1.0 / k);
  const double dphi = std::sinh(k * s) * std::pow(phi, 2.0 - n);
  const double lambda = angular_mode * (angular_mode + n - 2.0);
  return (ddu + (n - 2) * dphi / phi * du - lambda * u) / (phi * phi) +
         n * (n - 1.0) * u / std::pow(phi, 2.0 * n);
}

// ---- generalized Clifford tori -----------------------------------------

Vec clifford_point(double alpha, const Vec& theta1, const Vec& theta2) {
  Vec x(theta1.size() + theta2.size());
  x.head(theta1.size()) = std::cos(alpha) * theta1;
  x.tail(theta2.size()) = std::sin(alpha) * theta2;
  return x;
}

double clifford_mean_curvature(int n1, int n2, double alpha) {
  if (!(alpha > 0.0 && alpha < pi / 2))
    throw Error(ErrorKind::argument, "clifford_mean_curvature: alpha must be in (0, pi/2)");
  return n2 / std::tan(alpha) - n1 * std::tan(alpha);
}

double minimal_clifford_alpha(int n1, int n2) {
  return std::atan(std::sqrt(static_cast<double>(n2) / n1));
}

double sphere_laplacian_fd(const std::function<double(const Vec&)>& u, const Vec& theta,
                           double h) {
  const auto ext = [&u](const Vec& x) { return u(x / x.norm()); };
  const double u0 = ext(theta);
  double sum = 0.0;
  for (int i = 0; i < theta.size(); ++i) {
    Vec e = Vec::Zero(theta.size());
    e(i) = h;
    sum += (-ext(theta + 2 * e) + 16 * ext(theta + e) - 30 * u0 + 16 * ext(theta - e) -
            ext(theta - 2 * e)) /
           (12 * h * h);
  }
  return sum;
}

double clifford_linearized_apply(int n1, int n2, double alpha, const ProductFunction& u,
                                 const Vec& theta1, const Vec& theta2, double h) {
  const double c = std::cos(alpha), s = std::sin(alpha);
  const double u0 = u(theta1, theta2);
  const double lap1 = sphere_laplacian_fd([&](const Vec& t) { return u(t, theta2); }, theta1, h);
  const double lap2 = sphere_laplacian_fd([&](const Vec& t) { return u(theta1, t); }, theta2, h);
  return (lap1 + n1 * u0) / (c * c) + (lap2 + n2 * u0) / (s * s);
}

double matched_sphere_alpha(int n1, int n2, double alpha) {
  const double n = n1 + n2;
  const double h = std::abs(n2 / n / std::tan(alpha) - n1 / n * std::tan(alpha));
  return std::atan2(1.0, h);
}

double opposite_alpha(int n1, int n2, double alpha) {
  const double target = -clifford_mean_curvature(n1, n2, alpha);
  const auto f = [&](double a) { return clifford_mean_curvature(n1, n2, a) - target; };
  const double lo = 1e-12, hi = pi / 2 - 1e-12;
  if ((f(lo) > 0) == (f(hi) > 0))
    throw Error(ErrorKind::internal, "opposite_alpha: root not bracketed");
  return bisect(f, lo, hi, 1e-15);
}

}  // namespace cmcglue
