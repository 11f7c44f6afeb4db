#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <utility>

// Small numerical helpers shared by the modules: adaptive Simpson quadrature,
// bracketed bisection, and a second-order forward-mode jet for exact first
// and second derivatives of radial profile functions.

namespace cmcglue {

using Fn1 = std::function<double(double)>;

// Adaptive Simpson on [a, b]; stops a panel when its Richardson error is
// below max(abs_tol, rel_tol * |panel estimate|) scaled to the panel width.
double adaptive_simpson(const Fn1& f, double a, double b, double abs_tol,
                        double rel_tol = 0.0, int max_depth = 50);

// Bisection on a sign-changing bracket to absolute width tol.
double bisect(const Fn1& f, double lo, double hi, double tol = 1e-14);

// Scans [lo, hi] on `points` cells and returns the first sign-changing cell.
std::optional<std::pair<double, double>> scan_bracket(const Fn1& f, double lo,
                                                      double hi, int points = 1000);

// Value with first and second derivative in one variable.
struct Jet {
  double v = 0.0, d = 0.0, dd = 0.0;

  static Jet constant(double c) { return Jet{c, 0.0, 0.0}; }
  static Jet variable(double x) { return Jet{x, 1.0, 0.0}; }
};

inline Jet operator+(Jet a, Jet b) { return {a.v + b.v, a.d + b.d, a.dd + b.dd}; }
inline Jet operator-(Jet a, Jet b) { return {a.v - b.v, a.d - b.d, a.dd - b.dd}; }
inline Jet operator-(Jet a) { return {-a.v, -a.d, -a.dd}; }
inline Jet operator*(Jet a, Jet b) {
  return {a.v * b.v, a.d * b.v + a.v * b.d, a.dd * b.v + 2.0 * a.d * b.d + a.v * b.dd};
}
inline Jet operator+(Jet a, double c) { return {a.v + c, a.d, a.dd}; }
inline Jet operator+(double c, Jet a) { return a + c; }
inline Jet operator-(Jet a, double c) { return {a.v - c, a.d, a.dd}; }
inline Jet operator-(double c, Jet a) { return {c - a.v, -a.d, -a.dd}; }
inline Jet operator*(Jet a, double c) { return {a.v * c, a.d * c, a.dd * c}; }
inline Jet operator*(double c, Jet a) { return a * c; }
inline Jet operator/(Jet a, double c) { return {a.v / c, a.d / c, a.dd / c}; }

// Applies a scalar function given its value and first two derivatives.
inline Jet chain(Jet a, double f, double f1, double f2) {
  return {f, f1 * a.d, f2 * a.d * a.d + f1 * a.dd};
}
inline Jet inverse(Jet a) {
  const double iv = 1.0 / a.v;
  return chain(a, iv, -iv * iv, 2.0 * iv * iv * iv);
}
inline Jet operator/(Jet a, Jet b) { return a * inverse(b); }
inline Jet operator/(double c, Jet b) { return c * inverse(b); }
inline Jet sin(Jet a) { return chain(a, std::sin(a.v), std::cos(a.v), -std::sin(a.v)); }
inline Jet cos(Jet a) { return chain(a, std::cos(a.v), -std::sin(a.v), -std::cos(a.v)); }
inline Jet exp(Jet a) {
  const double e = std::exp(a.v);
  return chain(a, e, e, e);
}
inline Jet log(Jet a) { return chain(a, std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v)); }
inline Jet sqrt(Jet a) {
  const double s = std::sqrt(a.v);
  return chain(a, s, 0.5 / s, -0.25 / (s * a.v));
}
inline Jet pow(Jet a, double p) {
  const double f = std::pow(a.v, p);
  return chain(a, f, p * f / a.v, p * (p - 1.0) * f / (a.v * a.v));
}

}  // namespace cmcglue
