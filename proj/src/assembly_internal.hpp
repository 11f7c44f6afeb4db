#pragma once

#include <random>
#include <vector>

#include "cmcglue/assembler.hpp"

// Shared between the placement, sampling and mesh translation units.

namespace cmcglue::detail {

Mat rotation(int i, int j, double theta, int n);
Mat random_orthogonal(int k, std::mt19937& rng, bool proper);

// Roughly uniform directions on S^{k-1} in R^k; k = 1 gives {+1}.
std::vector<Vec> direction_grid(int k, int res);

// Orthonormal basis of the complement of the unit vector v.
Mat complement_basis(const Vec& v);
Vec normalized_offset(const Vec& v, const Mat& basis, const Vec& t);

// Normal offset of a sphere block at direction omega in S^n (block frame).
double sphere_offset(const Assembly& a, const BlockSpec& b, const Vec& omega);
Jet radial_sphere_offset(const Assembly& a, const BlockSpec& b, double mu);
// Torus offset f(Theta1, Theta2).
double torus_offset(const Assembly& a, const BlockSpec& b, const Vec& t1, const Vec& t2);

// Signed level set of a sphere or torus block, positive on the outward side.
double level_set(const Assembly& a, const BlockSpec& b, const Vec& x);

bool sheet_is_radial(const Assembly& a, int neck, int side);
SphereSheet radial_sheet(const Assembly& a, int neck, int side);
// y1 of the sheet of the adjacent block in the neck chart.
double sheet_height(const Assembly& a, int neck, int side, double r, const Vec& theta);
// Catenoid sheet b_bar + side eps_bar F(r/eps_bar) blended into the block sheet.
Jet merged_radial(const Assembly& a, int neck, int side, double r);
double merged_height(const Assembly& a, int neck, int side, double r, const Vec& theta);

// Mean curvature of a chart graph y1 = F(r) of side `side` (conformal metric).
double transition_mean_curvature(int n, const Jet& F, double r, int side);
// Mean curvature of the neck (eps_bar psi + b_bar, eps_bar phi Theta) in the chart.
double neck_mean_curvature(int n, double eps_bar, double b_bar, double s);

double neck_s_max(int n, double eps_bar, double rho);

void sample_assembly(Assembly& a);

}  // namespace cmcglue::detail
