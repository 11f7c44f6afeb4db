#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cmcglue/assembler.hpp"

// Independent checks on assemblies: finite-difference mean curvature,
// weighted error norms, flux integrals and the balancing map, kernel
// residuals of the linearized operators, embeddedness and symmetry.

namespace cmcglue {

enum class AmbientMetric { sphere, euclidean };

using Embedding = std::function<Vec(const Vec&)>;

// Mean curvature of X at p from central differences with per-parameter steps
// h, oriented by normal_hint. With richardson the estimates at h and h/2 are
// combined as (4 H(h/2) - H(h)) / 3.
double fd_mean_curvature(const Embedding& X, const Vec& p, const Vec& h, AmbientMetric metric,
                         const Vec& normal_hint, bool richardson = true);

double fd_mean_curvature(const LocalEmbedding& e, bool richardson = true);

double mean_curvature_at(const Assembly& assembly, const SurfaceSample& sample);

struct CurvatureReport {
  double neck_max = 0.0;
  double transition_max = 0.0;
  double exterior_max = 0.0;
  double delta = 0.0;
  WeightedNorm norm;  // of H - H_target with exponent delta - 2
  std::size_t sample_count = 0;
};

CurvatureReport error_norm(const Assembly& assembly, double delta);

// Killing field V(x) = K x with K antisymmetric; the cross-section is the
// waist of one neck and the spanning disk is flat at y1 = b_bar in its chart.
struct CrossSection {
  int neck = -1;  // index into Assembly::blocks
};

double flux_integral(const Assembly& assembly, const CrossSection& section, const Mat& killing,
                     int angular_order = 32);

// Same integral for a neck described only by its scale and offset, in its
// own chart, with V the rotation generator along the chart axis.
double neck_flux(int n, double eps_bar, double b_bar, double H, int angular_order = 32);

struct BalanceReport {
  std::vector<double> B;
  Mat DB;
  std::vector<double> flux_per_neck;  // chain-1 necks 0..(N-2)/4
  std::vector<double> flux_ratio;     // flux / (eps_bar^{n-1} |S^{n-1}|)
  double omega_scale = 0.0;           // mean flux / eps_bar^{n-1}
};

BalanceReport balancing_map(const Assembly& assembly, double h = 1e-4);

struct DerivativeStructure {
  Mat matrix;
  double omega = 0.0;             // least-squares fit to omega * cyclic shift
  double pattern_residual = 0.0;  // max |matrix - omega * shift|
  double scaled_determinant = 0.0;
  bool invertible = false;
};

DerivativeStructure balancing_derivative_structure(const Assembly& assembly, double h = 1e-4);

// Cyclic superdiagonal-ones matrix of size k.
Mat cyclic_shift(int k);

struct JacobiReport {
  double sphere = 0.0;
  double catenoid_J1 = 0.0, catenoid_Jk = 0.0, catenoid_J1k = 0.0, catenoid_J0 = 0.0;
  double torus = 0.0;
  double max() const;
};

JacobiReport jacobi_residual_suite(int n, double alpha, int n1, int n2, double h = 1e-4);

struct Embeddedness {
  bool embedded = false;
  double min_separation = 0.0;
  double threshold = 0.0;
};

Embeddedness embeddedness_check(const Assembly& assembly);

// One-sided sampled Hausdorff distance from transform(samples) to samples.
double symmetry_check(const Assembly& assembly, const Mat& transform);

}  // namespace cmcglue
