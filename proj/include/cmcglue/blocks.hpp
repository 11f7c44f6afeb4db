#pragma once

#include <functional>
#include <vector>

#include "cmcglue/common.hpp"
#include "cmcglue/numerics.hpp"

// The three building blocks: affine hyperspheres S_alpha with normal graphs
// over them, generalized catenoids, and generalized Clifford tori, together
// with their linearized operators, Green's functions and Jacobi fields.

namespace cmcglue {

// ---- hyperspheres -------------------------------------------------------

// (cos a, sin a cos mu, sin a sin mu Theta) with Theta a unit vector in R^n.
Vec sphere_point(double alpha, double mu, const Vec& theta);

// Point of S^n in R^{n+1} with polar angle mu from e_0 and direction Theta.
Vec sphere_base_point(double mu, const Vec& theta);

// Orthonormal tangent frame of S^n at sphere_base_point(mu, Theta): column 0
// is d/dmu, the remaining columns span the Theta-sphere directions.
Mat sphere_tangent_frame(double mu, const Vec& theta);

double sphere_mean_curvature(int n, double alpha);

struct GraphGeometryAt {
  Mat metric;        // in the orthonormal base frame
  Vec normal;        // ambient, outward (direction of increasing alpha)
  Mat second_form;   // B = -<d^2X, N>
  double mean_curvature = 0.0;
};

// Normal graph Theta -> (cos(a+F), sin(a+F) Theta) over S_alpha. gradF and
// hessF are expressed in sphere_tangent_frame(mu, Theta).
GraphGeometryAt normal_graph_geometry(int n, double alpha, double F, const Vec& gradF,
                                      const Mat& hessF, double mu, const Vec& theta);

// Mean curvature of an axisymmetric normal graph F(mu).
double axisymmetric_graph_mean_curvature(int n, double alpha, double F, double dF,
                                         double ddF, double mu);

// Rotationally symmetric Green's function on S^n, symmetric under mu -> pi - mu.
double green_function(int n, double mu);
double green_derivative(int n, double mu);
double green_second_derivative(int n, double mu);
double green_asymptotics(int n, double mu);

// G, G', G'' in one pass with fixed-order quadrature; used on hot paths.
Jet green_jet(int n, double mu);

// sin^{-2} alpha (u'' + (n-1) cot mu u' + n u).
double sphere_linearized_apply(int n, double alpha, double u, double du, double ddu,
                               double mu);

// ---- generalized catenoid ----------------------------------------------

struct CatenoidProfile {
  double phi = 1.0, psi = 0.0, dphi = 0.0, dpsi = 1.0, ddphi = 0.0, ddpsi = 0.0;
};

CatenoidProfile catenoid_profile(int n, double s);

// F(x) = int_1^x (t^{2n-2} - 1)^{-1/2} dt and its first two derivatives.
double catenoid_graph(int n, double x);
double catenoid_graph_derivative(int n, double x);
double catenoid_graph_second_derivative(int n, double x);

// c_n = lim F(x) for n >= 3; cached per dimension.
double catenoid_constant(int n);

struct CatenoidGeometry {
  double metric_factor = 0.0;  // g = factor (ds^2 + g_{S^{n-1}})
  double second_form_ss = 0.0;
  double second_form_angular = 0.0;
  double norm_B = 0.0;
  double norm_grad_B = 0.0;
  double mean_curvature = 0.0;
};

CatenoidGeometry catenoid_geometry(int n, double eps, double s);

// Euclidean mean curvature of eps * (psi(s), phi(s) Theta), from the profile.
double catenoid_mean_curvature_analytic(int n, double eps, double s);

enum class JacobiKind { J1, Jk, J1k, J0 };

// Angular mode of each family (0 or 1).
int jacobi_mode(JacobiKind kind);

// Jacobi field value; theta_component is Theta^k for the mode-1 families.
double catenoid_jacobi(int n, JacobiKind kind, double s, double theta_component = 1.0);

double catenoid_linearized_apply(int n, double u, double du, double ddu, double s,
                                 int angular_mode);

// ---- generalized Clifford tori -----------------------------------------

// (cos a Theta1, sin a Theta2) with Theta1 in S^{n1}, Theta2 in S^{n2}.
Vec clifford_point(double alpha, const Vec& theta1, const Vec& theta2);

double clifford_mean_curvature(int n1, int n2, double alpha);

// alpha* with zero mean curvature.
double minimal_clifford_alpha(int n1, int n2);

using ProductFunction = std::function<double(const Vec&, const Vec&)>;

// cos^{-2}(Delta_1 + n1) u + sin^{-2}(Delta_2 + n2) u, factor Laplacians by
// fourth-order differences of the degree-zero extension with step h.
double clifford_linearized_apply(int n1, int n2, double alpha, const ProductFunction& u,
                                 const Vec& theta1, const Vec& theta2, double h = 1e-4);

// Laplacian on S^k of u at Theta via the degree-zero extension.
double sphere_laplacian_fd(const std::function<double(const Vec&)>& u, const Vec& theta,
                           double h = 1e-4);

double matched_sphere_alpha(int n1, int n2, double alpha);
double opposite_alpha(int n1, int n2, double alpha);

// Singular solution of the torus operator with poles at the given points,
// normalized so each pole looks like the sphere Green's function of S_{alpha_hat}.
// The spectral sum is damped by exp(-t Lambda) and the flat-space heat tail
// is added back at each pole, which restores the exact local singularity.
class TorusGreen {
 public:
  struct Pole {
    Vec theta1;
    Vec theta2;
  };

  TorusGreen(int n1, int n2, double alpha, double strength, std::vector<Pole> poles,
             double heat_time, int lmax);

  double operator()(const Vec& theta1, const Vec& theta2) const;

  double heat_time() const { return heat_time_; }
  int lmax() const { return lmax_; }

 private:
  int n1_, n2_;
  double alpha_, strength_, heat_time_;
  int lmax_;
  std::vector<Pole> poles_;
  Mat coeff_;  // (lmax+1) x (lmax+1)
};

// Zonal harmonic of degree l on S^k evaluated at cos of the polar angle.
double zonal_harmonic(int k, int l, double x);

}  // namespace cmcglue
