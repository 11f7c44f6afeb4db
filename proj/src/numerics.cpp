#include "cmcglue/numerics.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cstdint>

#include "cmcglue/common.hpp"

namespace cmcglue {
namespace {

constexpr double kEps = 2.220446049250313e-16;

struct Panel {
  double a, fa, m, fm, b, fb, whole;
};

double simpson_rec(const Fn1& f, const Panel& p, double tol, double rel_tol, int depth,
                   long& budget) {
  const double lm = 0.5 * (p.a + p.m), rm = 0.5 * (p.m + p.b);
  const double flm = f(lm), frm = f(rm);
  budget -= 2;
  const double left = (p.m - p.a) / 6.0 * (p.fa + 4.0 * flm + p.fm);
  const double right = (p.b - p.m) / 6.0 * (p.fm + 4.0 * frm + p.fb);
  const double delta = left + right - p.whole;
  // Roundoff floor keeps unattainable tolerances from exhausting the depth.
  const double allowed =
      std::max({tol, rel_tol * std::abs(left + right), 8.0 * kEps * std::abs(left + right)});
  if (depth <= 0 || budget <= 0 || std::abs(delta) <= 15.0 * allowed ||
      p.b - p.a <= 64.0 * kEps * std::max(std::abs(p.a), std::abs(p.b)))
    return left + right + delta / 15.0;
  const Panel lp{p.a, p.fa, lm, flm, p.m, p.fm, left};
  const Panel rp{p.m, p.fm, rm, frm, p.b, p.fb, right};
  return simpson_rec(f, lp, tol / 2.0, rel_tol, depth - 1, budget) +
         simpson_rec(f, rp, tol / 2.0, rel_tol, depth - 1, budget);
}

}  // namespace

double adaptive_simpson(const Fn1& f, double a, double b, double abs_tol,
                        double rel_tol, int max_depth) {
  if (a == b) return 0.0;
  // Split into a few initial panels so narrow features are not skipped.
  constexpr int kPanels = 8;
  const double h = (b - a) / kPanels;
  double total = 0.0;
  long budget = 4'000'000;  // guards against noisy integrands
  for (int k = 0; k < kPanels; ++k) {
    const double pa = a + k * h, pb = (k + 1 == kPanels) ? b : a + (k + 1) * h;
    const double pm = 0.5 * (pa + pb);
    const double fa = f(pa), fm = f(pm), fb = f(pb);
    const Panel p{pa, fa, pm, fm, pb, fb, (pb - pa) / 6.0 * (fa + 4.0 * fm + fb)};
    total += simpson_rec(f, p, abs_tol / kPanels, rel_tol, max_depth, budget);
  }
  return total;
}

double bisect(const Fn1& f, double lo, double hi, double tol) {
  const double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0))
    throw Error(ErrorKind::solver, "bisect: interval does not bracket a root");
  std::uintmax_t max_iter = 400;
  const auto done = [tol](double a, double b) { return std::abs(b - a) <= tol; };
  const auto r = boost::math::tools::bisect(f, lo, hi, done, max_iter);
  return 0.5 * (r.first + r.second);
}

std::optional<std::pair<double, double>> scan_bracket(const Fn1& f, double lo, double hi,
                                                      int points) {
  double x0 = lo, f0 = f(lo);
  for (int k = 1; k <= points; ++k) {
    const double x1 = lo + (hi - lo) * k / points;
    const double f1 = f(x1);
    if (f0 == 0.0) return std::make_pair(x0, x0);
    if ((f0 > 0) != (f1 > 0)) return std::make_pair(x0, x1);
    x0 = x1;
    f0 = f1;
  }
  return std::nullopt;
}

}  // namespace cmcglue
