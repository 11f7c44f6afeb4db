#pragma once

#include <vector>

#include "cmcglue/common.hpp"
#include "cmcglue/numerics.hpp"

// Matching of catenoidal necks to the stereographic images of two adjacent
// perturbed hyperspheres: gap geometry, expansion constants, the scale
// equation, the coupled neck system for displaced chains, and the closure and
// winding conditions of the four constructions.

namespace cmcglue {

struct NeckGeometryParams {
  double r = 0.0;  // radius of the stereographic image of the sphere
  double d = 0.0;  // distance of its centre from the chart origin
};

NeckGeometryParams neck_geometry_params(double alpha, double tau);

// Coefficients of the sheet expansion near the neck axis:
//   n = 2:  -tan(tau/4) - |y|^2/2r - eps c2 - eps C2 log|y|
//   n >= 3: -tan(tau/4) - |y|^2/2r + eps^{n-1} Cn / ((n-2) |y|^{n-2})
struct ExpansionConstants {
  int n = 2;
  double c2 = 0.0;  // n = 2 only
  double Cn = 0.0;  // C2 when n = 2
};

// Constants that the sheet actually carries; these drive every solver.
ExpansionConstants expansion_constants(int n, double alpha, double tau);

// Closed form with a cos(2 alpha + tau/2) prefactor. It
// disagrees with the sheet expansion and is kept for comparison only.
ExpansionConstants expansion_constants_prefactor_form(int n, double alpha, double tau);

// Radial stereographic image of the perturbed sphere
//   a(mu) = alpha + eps^{n-1} (G(mu) - b_scale b cos mu)
// seen from the neck chart centred in the gap of width tau.  The face
// nearest the chart origin lies at y1 ~ -tan(tau/4).
class SphereSheet {
 public:
  SphereSheet(int n, double alpha, double tau, double eps, double b, double b_scale);

  double mu_of_radius(double yhat_norm) const;
  double radius_of_mu(double mu) const;
  // y1 as a function of |yhat| with exact first and second derivatives.
  Jet graph(double yhat_norm) const;
  // Same quantities along the sphere parameter mu.
  Jet y1_of_mu(double mu) const;
  Jet radius_jet(double mu) const;
  // Perturbation eps^{n-1}(G - b_scale b cos mu) as a jet in mu.
  Jet perturbation(double mu) const;

  int n() const { return n_; }
  double alpha() const { return alpha_; }
  double tau() const { return tau_; }

 private:
  int n_;
  double alpha_, tau_, eps_, b_, b_scale_;
};

double perturbed_sphere_graph(int n, double alpha, double tau, double eps, double b,
                              double yhat_norm);

double truncation_radius(int n, double eps);

double solve_scale(int n, double alpha, double tau);

struct NeckSolve {
  int n = 2;
  double alpha = 0.0, tau = 0.0;
  double eps = 0.0;
  std::vector<double> sigma;
  std::vector<double> tau_k;      // gap of neck k, between spheres k and k+1
  std::vector<double> b;          // sphere parameters b_k
  std::vector<double> eps_bar;    // neck scales
  std::vector<double> b_bar;      // neck translations
  std::vector<double> T;          // T_{nk}
  std::vector<double> singular_values;  // of the scaled 2N x 2N system
  double residual = 0.0;
};

NeckSolve solve_neck_system(int n, double alpha, double tau, const std::vector<double>& sigma);

// Residual of the 2N equations at arbitrary (b, b_bar) for a solved ε.
double neck_system_residual(const NeckSolve& solve, const std::vector<double>& b,
                            const std::vector<double>& b_bar);

// Expands the (N-2)/4 free displacements of a two-geodesic chain into the
// full length-N vector obeying the reflection pattern of the configuration.
std::vector<double> symmetric_sigma(int N, const std::vector<double>& free);
bool sigma_is_symmetric(const std::vector<double>& sigma, double tol = 1e-14);

struct ClosureResult {
  int N = 0;
  int m = 0;
  bool exact = false;
  bool found = false;
};

ClosureResult closure_check(double alpha, double tau, double tolerance, int N_max = 10000);

enum class WindingMode { handle, doubling };

struct HandleParameters {
  int n1 = 1, n2 = 1, N = 1, m = 1;
  WindingMode mode = WindingMode::handle;
  double alpha = 0.0;      // torus angle
  double alpha_hat = 0.0;  // sphere angle
  double alpha_bar = 0.0;  // opposite torus angle (doubling)
  double tau = 0.0;
  double residual = 0.0;
};

// Residual of 2N alpha_hat + (N+1) tau = rhs(alpha).
double winding_residual(int n1, int n2, double alpha, double tau, int N, int m,
                        WindingMode mode);

// Solves the winding equation for alpha given tau.
HandleParameters handle_parameters(int n1, int n2, double tau, int N, int m,
                                   WindingMode mode);

// Solves the winding equation for tau given alpha.
HandleParameters handle_tau(int n1, int n2, double alpha, int N, int m, WindingMode mode);

}  // namespace cmcglue
