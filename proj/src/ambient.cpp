#include "cmcglue/ambient.hpp"

#include <algorithm>
#include <cmath>

namespace cmcglue {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::argument: return "argument";
    case ErrorKind::pole: return "pole";
    case ErrorKind::divergence: return "divergence";
    case ErrorKind::region: return "region";
    case ErrorKind::scale: return "scale";
    case ErrorKind::sign: return "sign";
    case ErrorKind::solver: return "solver";
    case ErrorKind::overlap: return "overlap";
    case ErrorKind::geometry: return "geometry";
    case ErrorKind::configuration: return "configuration";
    case ErrorKind::obstruction: return "obstruction";
    case ErrorKind::unsupported: return "unsupported";
    case ErrorKind::infeasible: return "infeasible";
    case ErrorKind::oracle: return "oracle";
    case ErrorKind::internal: return "internal";
  }
  return "unknown";
}

Vec ChartVector::full() const {
  Vec y(yhat.size() + 1);
  y(0) = y1;
  y.tail(yhat.size()) = yhat;
  return y;
}

ChartVector ChartVector::from_full(const Vec& y) {
  return ChartVector{y(0), y.tail(y.size() - 1)};
}

PlanarRotation planar_rotation(int i, int j, double theta, int n) {
  const int dim = n + 2;
  if (n < 0 || i < 0 || j <= i || j >= dim)
    throw Error(ErrorKind::argument, "planar_rotation: need 0 <= i < j <= n+1");
  Mat m = Mat::Identity(dim, dim);
  const double c = std::cos(theta), s = std::sin(theta);
  m(i, i) = c;
  m(j, i) = s;
  m(i, j) = -s;
  m(j, j) = c;
  return PlanarRotation{i, j, theta, m};
}

ChartVector stereo_project(const Vec& x) {
  const double denom = 1.0 + x(0);
  if (std::abs(denom) < 1e-300)
    throw Error(ErrorKind::pole, "stereo_project: point is the antipode of the projection centre");
  return ChartVector{x(1) / denom, x.tail(x.size() - 2) / denom};
}

Vec stereo_unproject(const Vec& y) {
  const double r2 = y.squaredNorm();
  Vec x(y.size() + 1);
  x(0) = (1.0 - r2) / (1.0 + r2);
  x.tail(y.size()) = 2.0 * y / (1.0 + r2);
  return x;
}

Vec stereo_unproject(const ChartVector& y) { return stereo_unproject(y.full()); }

double conformal_factor(const Vec& y) { return 0.5 * (1.0 + y.squaredNorm()); }

double conformal_factor(const ChartVector& y) {
  return 0.5 * (1.0 + y.y1 * y.y1 + y.yhat.squaredNorm());
}

Vec stereo_pushforward(const Vec& x, const Vec& v) {
  const double d = 1.0 + x(0);
  const int m = static_cast<int>(x.size()) - 1;
  return v.tail(m) / d - x.tail(m) * (v(0) / (d * d));
}

Vec chart_to_ambient(const Mat& frame, const Vec& y) {
  return frame * stereo_unproject(y);
}

Vec ambient_to_chart(const Mat& frame, const Vec& x) {
  return stereo_project(frame.transpose() * x).full();
}

ConformalGeometryAt conformal_geometry(double euclidean_H0,
                                       const Vec& euclidean_normal,
                                       const Mat& euclidean_second_form,
                                       const Mat& euclidean_metric,
                                       const Vec& position) {
  if (std::abs(euclidean_normal.norm() - 1.0) > 1e-10)
    throw Error(ErrorKind::argument, "conformal_geometry: normal must be Euclidean-unit");
  const double a = conformal_factor(position);
  const double sn = position.dot(euclidean_normal);
  const double n = static_cast<double>(euclidean_metric.rows());
  ConformalGeometryAt out;
  out.metric = euclidean_metric / (a * a);
  out.normal = a * euclidean_normal;
  out.second_form = euclidean_second_form / a - (sn / (a * a)) * euclidean_metric;
  out.mean_curvature = a * euclidean_H0 - n * sn;
  return out;
}

double sphere_distance(const Vec& a, const Vec& b) {
  // Chord form keeps accuracy for nearby points.
  return 2.0 * std::asin(std::min(1.0, 0.5 * (a - b).norm()));
}

}  // namespace cmcglue
