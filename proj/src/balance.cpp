#include <Eigen/SVD>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>

#include "cmcglue/ambient.hpp"
#include "cmcglue/verify.hpp"

namespace cmcglue {

namespace {

struct Rule {
  std::vector<double> x, w;
};

// Gauss-Legendre on [a, b] by Golub-Welsch.
Rule gauss_legendre(int m, double a, double b) {
  Mat J = Mat::Zero(m, m);
  for (int i = 1; i < m; ++i) J(i, i - 1) = J(i - 1, i) = i / std::sqrt(4.0 * i * i - 1.0);
  Eigen::SelfAdjointEigenSolver<Mat> es(J);
  Rule r;
  for (int i = 0; i < m; ++i) {
    const double v0 = es.eigenvectors()(0, i);
    r.x.push_back(0.5 * (a + b) + 0.5 * (b - a) * es.eigenvalues()(i));
    r.w.push_back((b - a) * v0 * v0);
  }
  return r;
}

struct SphereRule {
  std::vector<Vec> x;
  std::vector<double> w;
};

// Product rule on S^{k-1} in R^k: trapezoid in the azimuth, Gauss-Legendre
// in each polar angle with the sin^{j} Jacobian folded into the weights.
SphereRule sphere_rule(int k, int order) {
  SphereRule s;
  if (k == 1) {
    s.x = {Vec::Ones(1), -Vec::Ones(1)};
    s.w = {1.0, 1.0};
    return s;
  }
  if (k == 2) {
    const int m = 2 * order;
    for (int j = 0; j < m; ++j) {
      Vec v(2);
      v << std::cos(2 * pi * j / m), std::sin(2 * pi * j / m);
      s.x.push_back(v);
      s.w.push_back(2 * pi / m);
    }
    return s;
  }
  const SphereRule sub = sphere_rule(k - 1, order);
  const Rule t = gauss_legendre(order, 0.0, pi);
  for (int i = 0; i < order; ++i)
    for (std::size_t j = 0; j < sub.x.size(); ++j) {
      Vec v(k);
      v(0) = std::cos(t.x[i]);
      v.tail(k - 1) = std::sin(t.x[i]) * sub.x[j];
      s.x.push_back(v);
      s.w.push_back(t.w[i] * std::pow(std::sin(t.x[i]), k - 2) * sub.w[j]);
    }
  return s;
}

double sphere_area(int k) {  // |S^k|
  return 2.0 * std::pow(pi, (k + 1) / 2.0) / boost::math::tgamma((k + 1) / 2.0);
}

// Flux through the waist {(b_bar, eps_bar Theta)} in a chart whose frame
// conjugates the Killing generator to K_loc.
double chart_flux(int n, double eps_bar, double b_bar, double H, const Mat& K_loc, int order) {
  const SphereRule sr = sphere_rule(n, order);
  const auto v1 = [&](const Vec& y) {
    const Vec x = stereo_unproject(y);
    return stereo_pushforward(x, K_loc * x)(0);
  };
  double ring = 0.0;
  for (std::size_t i = 0; i < sr.x.size(); ++i) {
    Vec y(n + 1);
    y(0) = b_bar;
    y.tail(n) = eps_bar * sr.x[i];
    const double A = conformal_factor(y);
    ring += sr.w[i] * v1(y) / A * std::pow(eps_bar / A, n - 1);
  }
  double disk = 0.0;
  const Rule rr = gauss_legendre(order, 0.0, eps_bar);
  for (int k = 0; k < order; ++k)
    for (std::size_t i = 0; i < sr.x.size(); ++i) {
      Vec y(n + 1);
      y(0) = b_bar;
      y.tail(n) = rr.x[k] * sr.x[i];
      const double A = conformal_factor(y);
      disk += rr.w[k] * sr.w[i] * std::pow(rr.x[k], n - 1) * v1(y) * std::pow(A, -n - 1);
    }
  return ring - H * disk;
}

Mat axial_generator(int n) {
  Mat K = Mat::Zero(n + 2, n + 2);
  K(1, 0) = 1.0;
  K(0, 1) = -1.0;
  return K;
}

}  // namespace

double neck_flux(int n, double eps_bar, double b_bar, double H, int angular_order) {
  return chart_flux(n, eps_bar, b_bar, H, axial_generator(n), angular_order);
}

double flux_integral(const Assembly& a, const CrossSection& section, const Mat& K,
                     int angular_order) {
  if (section.neck < 0 || section.neck >= static_cast<int>(a.blocks.size()) ||
      a.blocks[section.neck].kind != BlockKind::neck)
    throw Error(ErrorKind::argument, "flux_integral: cross-section must be a neck waist");
  const int n = a.params.n;
  if (K.rows() != n + 2 || K.cols() != n + 2 || (K + K.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw Error(ErrorKind::argument, "flux_integral: Killing generator must be antisymmetric");
  const BlockSpec& nk = a.blocks[section.neck];
  const Mat K_loc = nk.frame.transpose() * K * nk.frame;
  return chart_flux(n, nk.eps_bar, nk.b_bar, a.H_target, K_loc, angular_order);
}

Mat cyclic_shift(int k) {
  Mat P = Mat::Zero(k, k);
  for (int i = 0; i < k; ++i) P(i, (i + 1) % k) += 1.0;
  return P;
}

namespace {

int free_count(int N) { return (N - 2) / 4; }

std::vector<double> fluxes(const NeckSolve& s, double scale, double H, int count) {
  std::vector<double> f;
  for (int k = 0; k <= count; ++k) f.push_back(neck_flux(s.n, s.eps_bar[k] * scale, s.b_bar[k], H));
  return f;
}

std::vector<double> differences(const std::vector<double>& f) {
  std::vector<double> B;
  for (std::size_t k = 1; k < f.size(); ++k) B.push_back(f[k] - f[k - 1]);
  return B;
}

void require_two_geodesic(const Assembly& a) {
  if (a.params.construction != Construction::two_geodesic)
    throw Error(ErrorKind::argument, "balancing_map: needs a two_geodesic assembly");
}

}  // namespace

BalanceReport balancing_map(const Assembly& a, double h) {
  require_two_geodesic(a);
  const NeckSolve& s = a.neck_solve;
  const int n = s.n, N = static_cast<int>(s.sigma.size()), count = free_count(N);
  const double scale = a.eps / s.eps;
  BalanceReport r;
  r.flux_per_neck = fluxes(s, scale, a.H_target, count);
  r.B = differences(r.flux_per_neck);
  double om = 0.0;
  for (int k = 0; k <= count; ++k) {
    const double e = std::pow(s.eps_bar[k] * scale, n - 1);
    r.flux_ratio.push_back(r.flux_per_neck[k] / (e * sphere_area(n - 1)));
    om += r.flux_per_neck[k] / e;
  }
  r.omega_scale = om / (count + 1);

  std::vector<double> free(count);
  for (int j = 0; j < count; ++j) free[j] = s.sigma[j + 1];
  r.DB = Mat::Zero(count, count);
  for (int j = 0; j < count; ++j) {
    std::vector<double> up = free, dn = free;
    up[j] += h;
    dn[j] -= h;
    const NeckSolve su = solve_neck_system(n, s.alpha, s.tau, symmetric_sigma(N, up));
    const NeckSolve sd = solve_neck_system(n, s.alpha, s.tau, symmetric_sigma(N, dn));
    const std::vector<double> Bu = differences(fluxes(su, scale, a.H_target, count));
    const std::vector<double> Bd = differences(fluxes(sd, scale, a.H_target, count));
    for (int i = 0; i < count; ++i) r.DB(i, j) = (Bu[i] - Bd[i]) / (2 * h);
  }
  return r;
}

DerivativeStructure balancing_derivative_structure(const Assembly& a, double h) {
  const BalanceReport r = balancing_map(a, h);
  DerivativeStructure d;
  d.matrix = r.DB;
  const int k = static_cast<int>(r.DB.rows());
  if (k == 0) return d;
  const Mat P = cyclic_shift(k);
  d.omega = (r.DB.cwiseProduct(P)).sum() / P.squaredNorm();
  d.pattern_residual = (r.DB - d.omega * P).cwiseAbs().maxCoeff();
  if (d.omega != 0.0) {
    const Mat S = r.DB / d.omega;
    d.scaled_determinant = S.determinant();
    const Vec sv = Eigen::JacobiSVD<Mat>(S).singularValues();
    d.invertible = sv.minCoeff() > 1e-8 * std::max(1.0, sv.maxCoeff());
  }
  return d;
}

}  // namespace cmcglue
