#include "cmcglue/matching.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "cmcglue/blocks.hpp"

namespace cmcglue {
namespace {

void check_alpha_tau(double alpha, double tau) {
  if (!(alpha > 0.0 && alpha < pi / 2))
    throw Error(ErrorKind::argument, "alpha must lie in (0, pi/2)");
  if (!(tau >= 0.0) || !std::isfinite(tau))
    throw Error(ErrorKind::argument, "tau must be finite and non-negative");
}

double sq(double x) { return x * x; }

}  // namespace

NeckGeometryParams neck_geometry_params(double alpha, double tau) {
  check_alpha_tau(alpha, tau);
  const double den = std::cos(alpha) + std::cos(alpha + tau / 2);
  if (!(den > 0.0))
    throw Error(ErrorKind::geometry, "neck_geometry_params: cos a + cos(a + tau/2) <= 0");
  return {std::sin(alpha) / den, std::sin(alpha + tau / 2) / den};
}

ExpansionConstants expansion_constants(int n, double alpha, double tau) {
  if (n < 2) throw Error(ErrorKind::argument, "expansion_constants: n must be >= 2");
  check_alpha_tau(alpha, tau);
  const double c4 = sq(std::cos(tau / 4));
  const double q = 2.0 * c4 / std::sin(alpha);
  ExpansionConstants k;
  k.n = n;
  k.Cn = 1.0 / (2.0 * c4 * std::pow(q, n - 2));
  if (n == 2) k.c2 = k.Cn * (1.0 + std::log(c4 / std::sin(alpha)));
  return k;
}

ExpansionConstants expansion_constants_prefactor_form(int n, double alpha, double tau) {
  if (n < 2) throw Error(ErrorKind::argument, "expansion_constants: n must be >= 2");
  check_alpha_tau(alpha, tau);
  const double c4 = sq(std::cos(tau / 4));
  const double q = 2.0 * c4 / std::sin(alpha);
  const double pref =
      std::cos(2 * alpha + tau / 2) / sq(std::cos(alpha) + std::cos(alpha + tau / 2));
  ExpansionConstants k;
  k.n = n;
  k.Cn = pref / std::pow(q, n - 2);
  if (n == 2) k.c2 = pref * (1.0 + std::log(c4 / std::sin(alpha)));
  return k;
}

// ---- sphere sheets ------------------------------------------------------

SphereSheet::SphereSheet(int n, double alpha, double tau, double eps, double b,
                         double b_scale)
    : n_(n), alpha_(alpha), tau_(tau), eps_(eps), b_(b), b_scale_(b_scale) {
  if (n < 2) throw Error(ErrorKind::argument, "SphereSheet: n must be >= 2");
  check_alpha_tau(alpha, tau);
  if (!(eps >= 0.0)) throw Error(ErrorKind::argument, "SphereSheet: eps must be >= 0");
}

Jet SphereSheet::perturbation(double mu) const {
  const double e = std::pow(eps_, n_ - 1);
  if (e == 0.0) return Jet::constant(0.0);
  if (!(mu >= 1e-6 && mu <= pi - 1e-6))
    throw Error(ErrorKind::region, "SphereSheet: mu outside the perturbation domain");
  const Jet m = Jet::variable(mu);
  return e * (green_jet(n_, mu) - b_scale_ * b_ * cos(m));
}

namespace {

struct SheetJets {
  Jet y1, yh;
};

SheetJets sheet_jets(double alpha, double tau, double mu, const Jet& pert) {
  const double c = alpha + tau / 2;
  const Jet m = Jet::variable(mu);
  const Jet a = alpha + pert;
  const Jet sa = sin(a), ca = cos(a), cm = cos(m);
  const Jet den = 1.0 + std::cos(c) * ca + std::sin(c) * (sa * cm);
  const Jet y1 = (-std::sin(c) * ca + std::cos(c) * (sa * cm)) / den;
  const Jet yh = sa * sin(m) / den;
  return {y1, yh};
}

}  // namespace

Jet SphereSheet::y1_of_mu(double mu) const {
  return sheet_jets(alpha_, tau_, mu, perturbation(mu)).y1;
}

Jet SphereSheet::radius_jet(double mu) const {
  return sheet_jets(alpha_, tau_, mu, perturbation(mu)).yh;
}

double SphereSheet::radius_of_mu(double mu) const { return radius_jet(mu).v; }

double SphereSheet::mu_of_radius(double r) const {
  if (!(r > 0.0)) throw Error(ErrorKind::region, "SphereSheet: |yhat| must be positive");
  // Newton from the leading-order inverse, damped to stay in (0, pi).
  double mu = 2.0 * sq(std::cos(tau_ / 4)) / std::sin(alpha_) * r;
  mu = std::clamp(mu, 2e-6, pi - 2e-6);
  for (int it = 0; it < 100; ++it) {
    const Jet y = radius_jet(mu);
    if (!(y.d > 0.0)) break;
    double step = (y.v - r) / y.d;
    double next = mu - step;
    while (!(next > 1e-6 && next < pi - 1e-6) && std::abs(step) > 1e-300) {
      step /= 2;
      next = mu - step;
    }
    if (std::abs(next - mu) <= 1e-15 * std::max(1.0, mu)) {
      const Jet yn = radius_jet(next);
      if (yn.d > 0.0 && std::abs(yn.v - r) <= 1e-13 * r) return next;
      break;
    }
    mu = next;
  }
  const Jet y = radius_jet(mu);
  if (y.d > 0.0 && std::abs(y.v - r) <= 1e-12 * r) return mu;
  throw Error(ErrorKind::region,
              "SphereSheet: |yhat| outside the invertibility region of the sheet");
}

Jet SphereSheet::graph(double r) const {
  const double mu = mu_of_radius(r);
  const SheetJets j = sheet_jets(alpha_, tau_, mu, perturbation(mu));
  const double m1 = 1.0 / j.yh.d;
  const double m2 = -j.yh.dd * m1 * m1 * m1;
  return {j.y1.v, j.y1.d * m1, j.y1.dd * m1 * m1 + j.y1.d * m2};
}

double perturbed_sphere_graph(int n, double alpha, double tau, double eps, double b,
                              double yhat_norm) {
  const SphereSheet sheet(n, alpha, tau, eps, b, 2.0 * sq(std::cos(tau / 4)));
  return sheet.graph(yhat_norm).v;
}

double truncation_radius(int n, double eps) {
  if (!(eps >= 0.0)) throw Error(ErrorKind::argument, "truncation_radius: eps must be >= 0");
  return std::pow(eps, (3.0 * n - 3.0) / (3.0 * n - 2.0));
}

// ---- scale and neck system ---------------------------------------------

namespace {

// Smallest root of sum_k [tan(tau_k/4) + eps c2_k - eps C2_k log(2/(eps C2_k))].
double solve_eps_n2(const std::vector<double>& taus,
                    const std::vector<ExpansionConstants>& k) {
  double hi = 1e300;
  for (const auto& c : k) hi = std::min(hi, 2.0 / (std::exp(1.0) * c.Cn));
  const auto f = [&](double log_eps) {
    const double eps = std::exp(log_eps);
    double s = 0.0;
    for (size_t j = 0; j < taus.size(); ++j) {
      const double eb = eps * k[j].Cn;
      s += std::tan(taus[j] / 4) + eps * k[j].c2 - eb * std::log(2.0 / eb);
    }
    return s;
  };
  const auto br = scan_bracket(f, std::log(1e-300), std::log(hi), 1000);
  if (!br)
    throw Error(ErrorKind::scale,
                "solve_scale: tan(tau/4) exceeds the maximum of the n=2 matching equation");
  return std::exp(bisect(f, br->first, br->second, 1e-15));
}

double catenoid_c(int n) { return catenoid_constant(n); }

}  // namespace

double solve_scale(int n, double alpha, double tau) {
  if (!(tau > 0.0)) throw Error(ErrorKind::argument, "solve_scale: tau must be positive");
  const ExpansionConstants k = expansion_constants(n, alpha, tau);
  if (!(k.Cn > 0.0)) throw Error(ErrorKind::sign, "solve_scale: expansion constant is not positive");
  if (n == 2) return solve_eps_n2({tau}, {k});
  return std::tan(tau / 4) / (catenoid_c(n) * std::pow(k.Cn, 1.0 / (n - 1)));
}

NeckSolve solve_neck_system(int n, double alpha, double tau, const std::vector<double>& sigma) {
  const int N = static_cast<int>(sigma.size());
  if (N < 1) throw Error(ErrorKind::argument, "solve_neck_system: sigma must be non-empty");
  if (n < 2) throw Error(ErrorKind::argument, "solve_neck_system: n must be >= 2");
  check_alpha_tau(alpha, tau);
  NeckSolve s;
  s.n = n;
  s.alpha = alpha;
  s.tau = tau;
  s.sigma = sigma;
  std::vector<ExpansionConstants> k;
  for (int j = 0; j < N; ++j) {
    const double t = tau + sigma[(j + 1) % N] - sigma[j];
    if (!(t > 0.0)) throw Error(ErrorKind::overlap, "solve_neck_system: tau_k <= 0, spheres overlap");
    s.tau_k.push_back(t);
    k.push_back(expansion_constants(n, alpha, t));
  }
  if (n == 2) {
    s.eps = solve_eps_n2(s.tau_k, k);
  } else {
    double num = 0.0, den = 0.0;
    for (int j = 0; j < N; ++j) {
      num += std::tan(s.tau_k[j] / 4);
      den += std::pow(k[j].Cn, 1.0 / (n - 1));
    }
    s.eps = num / (catenoid_c(n) * den);
  }
  const double eps = s.eps;
  double sumT = 0.0, scaleT = 0.0;
  for (int j = 0; j < N; ++j) {
    double eb, T;
    if (n == 2) {
      eb = eps * k[j].Cn;
      T = std::tan(s.tau_k[j] / 4) + eps * k[j].c2 - eb * std::log(2.0 / eb);
    } else {
      eb = eps * std::pow(k[j].Cn, 1.0 / (n - 1));
      T = std::tan(s.tau_k[j] / 4) - eb * catenoid_c(n);
    }
    s.eps_bar.push_back(eb);
    s.T.push_back(T);
    sumT += T;
    scaleT += std::tan(s.tau_k[j] / 4);
  }
  if (std::abs(sumT) > 1e-10 * std::max(1.0, scaleT))
    throw Error(ErrorKind::solver, "solve_neck_system: sum of T_k does not vanish");

  // Unknowns u_k = eps^{n-1} b_k and v_k = b_bar_k keep the system well scaled.
  Mat M = Mat::Zero(2 * N, 2 * N);
  Vec rhs = Vec::Zero(2 * N);
  for (int j = 0; j < N; ++j) {
    const int jp = (j + 1) % N;
    M(j, N + j) += 1.0;
    M(j, j) += 0.5;
    M(j, jp) += 0.5;
    M(N + j, jp) += 0.5;
    M(N + j, j) -= 0.5;
    rhs(N + j) = s.T[j];
  }
  Eigen::JacobiSVD<Mat> svd(M);
  const Vec sv = svd.singularValues();
  s.singular_values.assign(sv.data(), sv.data() + sv.size());

  // Gauge u_0 = 0: drop the first column and solve in the least-squares sense.
  const Mat Mg = M.rightCols(2 * N - 1);
  const Vec xg = Mg.completeOrthogonalDecomposition().solve(rhs);
  Vec x = Vec::Zero(2 * N);
  x.tail(2 * N - 1) = xg;
  const double e = std::pow(eps, n - 1);
  for (int j = 0; j < N; ++j) {
    s.b.push_back(e > 0.0 ? x(j) / e : 0.0);
    s.b_bar.push_back(x(N + j));
  }
  s.residual = neck_system_residual(s, s.b, s.b_bar);
  if (!(s.residual <= 1e-10))
    throw Error(ErrorKind::solver, "solve_neck_system: residual above 1e-10");
  return s;
}

double neck_system_residual(const NeckSolve& s, const std::vector<double>& b,
                            const std::vector<double>& b_bar) {
  const int N = static_cast<int>(s.T.size());
  const double e = std::pow(s.eps, s.n - 1);
  double r = 0.0;
  for (int j = 0; j < N; ++j) {
    const int jp = (j + 1) % N;
    r = std::max(r, std::abs(b_bar[j] + e * (b[j] + b[jp]) / 2));
    r = std::max(r, std::abs(e * (b[jp] - b[j]) / 2 - s.T[j]));
  }
  return r;
}

std::vector<double> symmetric_sigma(int N, const std::vector<double>& free) {
  if (N < 2 || N % 2 != 0)
    throw Error(ErrorKind::argument, "symmetric_sigma: N must be even");
  const int h = N / 2;
  const int count = (h - 1) / 2;
  if (static_cast<int>(free.size()) != count)
    throw Error(ErrorKind::argument, "symmetric_sigma: expected " + std::to_string(count) +
                                         " free displacements");
  std::vector<double> s(N, 0.0);
  for (int k = 1; k <= count; ++k) {
    const double v = free[k - 1];
    s[k] = v;
    s[h - k] = -v;
    s[h + k] = v;
    s[N - k] = -v;
  }
  return s;
}

bool sigma_is_symmetric(const std::vector<double>& s, double tol) {
  const int N = static_cast<int>(s.size());
  if (N < 2 || N % 2 != 0) return false;
  const int h = N / 2;
  if (std::abs(s[0]) > tol || std::abs(s[h]) > tol) return false;
  for (int k = 0; k < N; ++k) {
    const auto at = [&](int i) { return s[((i % N) + N) % N]; };
    if (std::abs(at(h - k) + s[k]) > tol || std::abs(at(h + k) - s[k]) > tol ||
        std::abs(at(N - k) + s[k]) > tol)
      return false;
  }
  return true;
}

ClosureResult closure_check(double alpha, double tau, double tolerance, int N_max) {
  const double angle = 2 * alpha + tau;
  if (!(angle > 0.0 && angle < 2 * pi))
    throw Error(ErrorKind::argument, "closure_check: 2 alpha + tau must lie in (0, 2 pi)");
  ClosureResult res;
  for (int N = 1; N <= N_max; ++N) {
    const int m = static_cast<int>(std::lround(angle * N / (2 * pi)));
    if (m < 1 || std::gcd(m, N) != 1) continue;
    const double err = std::abs(angle - 2 * pi * m / N);
    if (err <= tolerance) {
      res.N = N;
      res.m = m;
      res.found = true;
      res.exact = err <= 1e-12;
      return res;
    }
  }
  return res;
}

// ---- winding conditions for the torus constructions --------------------

double winding_residual(int n1, int n2, double alpha, double tau, int N, int m,
                        WindingMode mode) {
  const double ah = matched_sphere_alpha(n1, n2, alpha);
  double rhs = 2 * alpha + 2 * m * pi;
  if (mode == WindingMode::doubling) rhs = opposite_alpha(n1, n2, alpha) - alpha + 2 * m * pi;
  return 2 * N * ah + (N + 1) * tau - rhs;
}

namespace {

HandleParameters fill(int n1, int n2, double alpha, double tau, int N, int m,
                      WindingMode mode) {
  HandleParameters p;
  p.n1 = n1;
  p.n2 = n2;
  p.N = N;
  p.m = m;
  p.mode = mode;
  p.alpha = alpha;
  p.tau = tau;
  p.alpha_hat = matched_sphere_alpha(n1, n2, alpha);
  p.alpha_bar = mode == WindingMode::doubling ? opposite_alpha(n1, n2, alpha) : alpha;
  p.residual = winding_residual(n1, n2, alpha, tau, N, m, mode);
  return p;
}

void check_winding_args(int n1, int n2, int N, int m) {
  if (n1 < 1 || n2 < 1) throw Error(ErrorKind::argument, "torus dimensions must be >= 1");
  if (N < 1 || m < 1) throw Error(ErrorKind::argument, "N and m must be positive");
}

}  // namespace

HandleParameters handle_parameters(int n1, int n2, double tau, int N, int m,
                                   WindingMode mode) {
  check_winding_args(n1, n2, N, m);
  const auto f = [&](double a) { return winding_residual(n1, n2, a, tau, N, m, mode); };
  // The branch whose torus orientation matches the spheres comes first:
  // handle arms leave on the smaller-angle side and need H^Cliff < 0, the
  // first doubling torus needs H^Cliff > 0.
  const double star = minimal_clifford_alpha(n1, n2);
  auto br = mode == WindingMode::handle ? scan_bracket(f, star, pi / 2 - 1e-9, 1000)
                                        : scan_bracket(f, 1e-9, star, 1000);
  if (!br) br = scan_bracket(f, 1e-9, pi / 2 - 1e-9, 1000);
  if (!br) throw Error(ErrorKind::infeasible, "winding equation has no root in (0, pi/2)");
  const double alpha = bisect(f, br->first, br->second, 1e-16);
  return fill(n1, n2, alpha, tau, N, m, mode);
}

HandleParameters handle_tau(int n1, int n2, double alpha, int N, int m, WindingMode mode) {
  check_winding_args(n1, n2, N, m);
  if (!(alpha > 0.0 && alpha < pi / 2))
    throw Error(ErrorKind::argument, "alpha must lie in (0, pi/2)");
  const double r0 = winding_residual(n1, n2, alpha, 0.0, N, m, mode);
  const double tau = -r0 / (N + 1);
  if (!(tau > 0.0)) throw Error(ErrorKind::infeasible, "winding equation forces tau <= 0");
  return fill(n1, n2, alpha, tau, N, m, mode);
}

}  // namespace cmcglue
