#pragma once

#include "cmcglue/common.hpp"

// Geometry of S^{n+1} in R^{n+2}: planar rotations, the stereographic chart
// K centred at p = e_0, and the conformal transformation rules for the
// chart metric A^{-2} g_0.

namespace cmcglue {

struct ChartVector {
  double y1 = 0.0;
  Vec yhat;  // n components

  Vec full() const;  // (y1, yhat) as an (n+1)-vector
  static ChartVector from_full(const Vec& y);
};

struct PlanarRotation {
  int i = 0;
  int j = 1;
  double theta = 0.0;
  Mat as_matrix;
};

// Rotation by theta in the (e_i, e_j) plane of R^{n+2}:
// e_i -> cos e_i + sin e_j, e_j -> -sin e_i + cos e_j.
PlanarRotation planar_rotation(int i, int j, double theta, int n);

ChartVector stereo_project(const Vec& x);
Vec stereo_unproject(const ChartVector& y);
Vec stereo_unproject(const Vec& y);

// A(y) = (1 + |y|^2) / 2; the chart metric is A^{-2} times Euclidean.
double conformal_factor(const ChartVector& y);
double conformal_factor(const Vec& y);

// Differential of K at x applied to v (both ambient).
Vec stereo_pushforward(const Vec& x, const Vec& v);

// Charts in use are K composed with an ambient isometry: x = frame * K^{-1}(y).
Vec chart_to_ambient(const Mat& frame, const Vec& y);
Vec ambient_to_chart(const Mat& frame, const Vec& x);

struct ConformalGeometryAt {
  Mat metric;
  Vec normal;  // unit for the chart metric
  Mat second_form;
  double mean_curvature = 0.0;
};

// Transfers Euclidean data of an immersed hypersurface at chart position
// sigma to the metric A^{-2} g_0.
ConformalGeometryAt conformal_geometry(double euclidean_H0,
                                       const Vec& euclidean_normal,
                                       const Mat& euclidean_second_form,
                                       const Mat& euclidean_metric,
                                       const Vec& position);

// Geodesic distance on the unit sphere.
double sphere_distance(const Vec& a, const Vec& b);

}  // namespace cmcglue
