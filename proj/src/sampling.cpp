#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>

#include "assembly_internal.hpp"
#include "cmcglue/ambient.hpp"
#include "cmcglue/verify.hpp"

namespace cmcglue {

namespace {

double bump(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }
Jet bump(Jet t) { return t.v > 0.0 ? exp(-1.0 / t) : Jet::constant(0.0); }

double sq(double x) { return x * x; }

// b_bar + side eps_bar F(r / eps_bar) with its r-derivatives.
Jet catenoid_sheet(int n, double eps_bar, double b_bar, double r, int side) {
  const double x = r / eps_bar;
  return {b_bar + side * eps_bar * catenoid_graph(n, x), side * catenoid_graph_derivative(n, x),
          side * catenoid_graph_second_derivative(n, x) / eps_bar};
}

bool is_zero(const Jet& j) { return j.v == 0.0 && j.d == 0.0 && j.dd == 0.0; }
bool is_one(const Jet& j) { return j.v == 1.0 && j.d == 0.0 && j.dd == 0.0; }

Jet blend(const Jet& eta, const Jet& inner, const Jet& outer) {
  if (is_zero(eta)) return inner;
  if (is_one(eta)) return outer;
  return (1.0 - eta) * inner + eta * outer;
}

// Cubic smoothstep in log space between z0 (t <= 0) and z1 (t >= 1).
double log_blend(double z0, double z1, double t) {
  t = std::clamp(t, 0.0, 1.0);
  const double w = t * t * (3.0 - 2.0 * t);
  return std::exp((1.0 - w) * std::log(z0) + w * std::log(z1));
}

int adjacent(const Assembly& a, int neck, int side) {
  return side < 0 ? a.blocks[neck].lower : a.blocks[neck].upper;
}

double geodesic_distance(const BlockSpec& neck, const Vec& q) {
  const Vec u = neck.frame.col(0), v = neck.frame.col(1);
  const double pu = q.dot(u), pv = q.dot(v);
  return std::atan2((q - pu * u - pv * v).norm(), std::hypot(pu, pv));
}

// Polar axis along the last local coordinate, away from the neck axes.
Vec shared_omega(double mu, const Vec& theta) {
  const int n = static_cast<int>(theta.size());
  Vec w(n + 1);
  w.head(n) = std::sin(mu) * theta;
  w(n) = std::cos(mu);
  return w;
}

Vec push_chart(const Mat& frame, const Vec& y, const Vec& w) {
  const double t = 1e-7;
  return (chart_to_ambient(frame, y + t * w) - chart_to_ambient(frame, y - t * w)) / (2 * t);
}

bool near_neck(const Assembly& a, int block, const Vec& x) {
  for (const BlockSpec& nk : a.blocks) {
    if (nk.kind != BlockKind::neck || (nk.lower != block && nk.upper != block)) continue;
    const Vec y = ambient_to_chart(nk.frame, x);
    if (std::abs(y(0)) < 1.0 && y.tail(y.size() - 1).norm() < 2.0 * a.rho) return true;
  }
  return false;
}

int nearest_neck(const Assembly& a, const Vec& q, double* dist) {
  int best = -1;
  double bd = std::numeric_limits<double>::infinity();
  for (int j = 0; j < static_cast<int>(a.blocks.size()); ++j) {
    if (a.blocks[j].kind != BlockKind::neck) continue;
    const double d = sphere_distance(q, a.blocks[j].frame.col(0));
    if (d < bd) {
      bd = d;
      best = j;
    }
  }
  if (dist) *dist = bd;
  return best;
}

}  // namespace

double cutoff_eta(double s) {
  if (s <= 0.5) return 0.0;
  if (s >= 2.0) return 1.0;
  const double p = bump(s - 0.5), q = bump(2.0 - s);
  return p / (p + q);
}

Jet cutoff_eta(Jet s) {
  if (s.v <= 0.5) return Jet::constant(0.0);
  if (s.v >= 2.0) return Jet::constant(1.0);
  const Jet p = bump(s - 0.5), q = bump(2.0 - s);
  return p / (p + q);
}

Jet merged_graph(int n, double eps_bar, double b_bar, double alpha, double tau, double eps_sphere,
                 double b_sphere, double yhat_norm, int side) {
  if (side != 1 && side != -1) throw Error(ErrorKind::argument, "merged_graph: side must be +-1");
  if (!(eps_bar > 0.0) || !(yhat_norm >= eps_bar))
    throw Error(ErrorKind::region, "merged_graph: |yhat| must be at least eps_bar");
  const double rho = truncation_radius(n, eps_sphere);
  const Jet cat = catenoid_sheet(n, eps_bar, b_bar, yhat_norm, side);
  const Jet eta = cutoff_eta(Jet::variable(yhat_norm) / rho);
  if (is_zero(eta)) return cat;
  const double bs = 2.0 * sq(std::cos(tau / 4));
  const SphereSheet sheet(n, alpha, tau, eps_sphere, side < 0 ? b_sphere : -b_sphere, bs);
  const Jet g = sheet.graph(yhat_norm);
  return blend(eta, cat, side < 0 ? g : -g);
}

namespace detail {

namespace {

std::vector<Vec> hyperspherical(int k, int m) {
  std::vector<Vec> out;
  if (k == 2) {
    for (int j = 0; j < m; ++j) {
      Vec v(2);
      v << std::cos(2 * pi * j / m), std::sin(2 * pi * j / m);
      out.push_back(v);
    }
    return out;
  }
  const std::vector<Vec> sub = hyperspherical(k - 1, m);
  for (int i = 0; i < m; ++i) {
    const double t = pi * (i + 0.5) / m;
    for (const Vec& s : sub) {
      Vec v(k);
      v(0) = std::cos(t);
      v.tail(k - 1) = std::sin(t) * s;
      out.push_back(v);
    }
  }
  return out;
}

}  // namespace

std::vector<Vec> direction_grid(int k, int res) {
  if (k < 1) throw Error(ErrorKind::argument, "direction_grid: k must be >= 1");
  if (k == 1) return {Vec::Ones(1)};
  if (k == 2) return hyperspherical(2, std::max(3, res));
  return hyperspherical(k, k == 3 ? std::max(2, res / 4) : std::max(3, res / 8));
}

Mat complement_basis(const Vec& v) {
  const int k = static_cast<int>(v.size());
  const Mat col = v.normalized();
  const Mat Q = Eigen::HouseholderQR<Mat>(col).householderQ();
  return Q.rightCols(k - 1);
}

Vec normalized_offset(const Vec& v, const Mat& basis, const Vec& t) {
  return (v + basis * t).normalized();
}

double sphere_offset(const Assembly& a, const BlockSpec& b, const Vec& omega) {
  const int n = a.params.n;
  if (!(a.eps > 0.0)) return 0.0;
  const double e = std::pow(a.eps, n - 1);
  const double mu1 = std::acos(std::clamp(omega(0), -1.0, 1.0));
  if (!b.shared) return e * (green_jet(n, mu1).v - b.b_scale * b.b * std::cos(mu1));
  const double mu2 = std::acos(std::clamp(omega(1), -1.0, 1.0));
  return e * (green_jet(n, mu1).v + green_jet(n, mu2).v);
}

Jet radial_sphere_offset(const Assembly& a, const BlockSpec& b, double mu) {
  const int n = a.params.n;
  if (!(a.eps > 0.0)) return Jet::constant(0.0);
  const double e = std::pow(a.eps, n - 1);
  return e * (green_jet(n, mu) - b.b_scale * b.b * cos(Jet::variable(mu)));
}

double torus_offset(const Assembly& a, const BlockSpec& b, const Vec& t1, const Vec& t2) {
  if (!(a.eps > 0.0) || !b.green) return 0.0;
  return b.arm_sign * std::pow(a.eps, a.params.n - 1) * (*b.green)(t1, t2);
}

double level_set(const Assembly& a, const BlockSpec& b, const Vec& x) {
  const Vec y = b.frame.transpose() * x;
  if (b.kind == BlockKind::sphere) {
    const Vec w = y.tail(y.size() - 1);
    const double wn = w.norm();
    return std::atan2(wn, y(0)) - b.alpha - sphere_offset(a, b, w / wn);
  }
  if (b.kind == BlockKind::torus) {
    const Vec x1 = y.head(b.n1 + 1), x2 = y.tail(b.n2 + 1);
    const double ang = std::atan2(x2.norm(), x1.norm());
    return b.arm_sign * (ang - b.alpha - torus_offset(a, b, x1.normalized(), x2.normalized()));
  }
  throw Error(ErrorKind::internal, "level_set: necks have no level set");
}

bool sheet_is_radial(const Assembly& a, int neck, int side) {
  const BlockSpec& b = a.blocks[adjacent(a, neck, side)];
  return b.kind == BlockKind::sphere && !b.shared;
}

SphereSheet radial_sheet(const Assembly& a, int neck, int side) {
  const BlockSpec& nk = a.blocks[neck];
  const BlockSpec& s = a.blocks[adjacent(a, neck, side)];
  return SphereSheet(a.params.n, s.alpha, nk.tau_gap, a.eps, side < 0 ? s.b : -s.b, s.b_scale);
}

double sheet_height(const Assembly& a, int neck, int side, double r, const Vec& theta) {
  if (sheet_is_radial(a, neck, side)) {
    const double g = radial_sheet(a, neck, side).graph(r).v;
    return side < 0 ? g : -g;
  }
  const BlockSpec& nk = a.blocks[neck];
  const BlockSpec& blk = a.blocks[adjacent(a, neck, side)];
  const int n = a.params.n;
  const auto psi = [&](double y1) {
    Vec y(n + 1);
    y(0) = y1;
    y.tail(n) = r * theta;
    return level_set(a, blk, chart_to_ambient(nk.frame, y));
  };
  // The chart origin sits in the gap, outside both blocks; walk towards the
  // block until the level set changes sign.
  const double dir = side < 0 ? -1.0 : 1.0;
  const double step = std::max(std::tan(nk.tau_gap / 4), 1e-6) / 4;
  double lo = 0.0, flo = psi(0.0);
  if (!(flo > 0.0))
    throw Error(ErrorKind::region, "sheet_height: chart origin is not between the blocks");
  for (int i = 1; i <= 400; ++i) {
    const double hi = dir * step * i, fhi = psi(hi);
    if (fhi <= 0.0) {
      if (fhi == 0.0) return hi;
      std::uintmax_t iters = 200;
      const auto root = boost::math::tools::toms748_solve(
          psi, std::min(lo, hi), std::max(lo, hi), lo < hi ? flo : fhi, lo < hi ? fhi : flo,
          boost::math::tools::eps_tolerance<double>(52), iters);
      return 0.5 * (root.first + root.second);
    }
    lo = hi;
    flo = fhi;
  }
  throw Error(ErrorKind::region, "sheet_height: no block sheet along the chart axis");
}

Jet merged_radial(const Assembly& a, int neck, int side, double r) {
  const BlockSpec& nk = a.blocks[neck];
  const Jet cat = catenoid_sheet(a.params.n, nk.eps_bar, nk.b_bar, r, side);
  const Jet eta = cutoff_eta(Jet::variable(r) / a.rho);
  if (is_zero(eta)) return cat;
  const Jet g = radial_sheet(a, neck, side).graph(r);
  return blend(eta, cat, side < 0 ? g : -g);
}

double merged_height(const Assembly& a, int neck, int side, double r, const Vec& theta) {
  if (sheet_is_radial(a, neck, side)) return merged_radial(a, neck, side, r).v;
  const BlockSpec& nk = a.blocks[neck];
  const double cat = catenoid_sheet(a.params.n, nk.eps_bar, nk.b_bar, r, side).v;
  const double eta = cutoff_eta(r / a.rho);
  if (eta == 0.0) return cat;
  const double sheet = sheet_height(a, neck, side, r, theta);
  return eta == 1.0 ? sheet : (1.0 - eta) * cat + eta * sheet;
}

double transition_mean_curvature(int n, const Jet& F, double r, int side) {
  const double sgn = side < 0 ? 1.0 : -1.0;
  const double W = std::sqrt(1.0 + F.d * F.d);
  const double A = 0.5 * (1.0 + r * r + F.v * F.v);
  return sgn * (-A * (F.dd / (W * W * W) + (n - 1) * F.d / (r * W)) - n * (F.v - r * F.d) / W);
}

double neck_mean_curvature(int n, double eps_bar, double b_bar, double s) {
  const CatenoidProfile p = catenoid_profile(n, s);
  const double L = std::hypot(p.dphi, p.dpsi);
  const double y1 = eps_bar * p.psi + b_bar, R = eps_bar * p.phi;
  const double H0 = -((p.ddphi * p.dpsi - p.ddpsi * p.dphi) / (eps_bar * L * L * L) -
                      (n - 1) * p.dpsi / (eps_bar * p.phi * L));
  const double A = 0.5 * (1.0 + y1 * y1 + R * R);
  return A * H0 - n * (-y1 * p.dphi + R * p.dpsi) / L;
}

double neck_s_max(int n, double eps_bar, double rho) {
  const double lx = (n - 1) * std::log(rho / (2 * eps_bar));
  if (!(lx > 0.0)) throw Error(ErrorKind::scale, "neck_s_max: rho/2 below the neck waist");
  const double ach = lx > 30.0 ? lx + std::log(2.0) : std::acosh(std::exp(lx));
  return ach / (n - 1);
}

namespace {

double patch_edge(const Assembly& a, const Patch& p) {
  const auto at = [&](int i, int j) { return p.index[static_cast<std::size_t>(i) * p.cols + j]; };
  const auto dist = [&](int u, int v) {
    return (a.samples[u].ambient - a.samples[v].ambient).norm();
  };
  double e = 0.0;
  // Rows direction.
  if (p.rows_ordered) {
    const int last = p.wrap_rows ? p.rows : p.rows - 1;
    for (int i = 0; i < last; ++i)
      for (int j = 0; j < p.cols; ++j) {
        const int u = at(i, j), v = at((i + 1) % p.rows, j);
        if (u >= 0 && v >= 0) e = std::max(e, dist(u, v));
      }
  } else if (p.rows > 1) {
    for (int j = 0; j < p.cols; ++j)
      for (int i = 0; i < p.rows; ++i) {
        const int u = at(i, j);
        if (u < 0) continue;
        double nn = std::numeric_limits<double>::infinity();
        for (int k = 0; k < p.rows; ++k)
          if (k != i && at(k, j) >= 0) nn = std::min(nn, dist(u, at(k, j)));
        if (std::isfinite(nn)) e = std::max(e, nn);
      }
  }
  // Columns direction.
  if (p.cols > 1) {
    if (p.cols_ordered) {
      const int last = p.wrap_cols ? p.cols : p.cols - 1;
      for (int i = 0; i < p.rows; ++i)
        for (int j = 0; j < last; ++j) {
          const int u = at(i, j), v = at(i, (j + 1) % p.cols);
          if (u >= 0 && v >= 0) e = std::max(e, dist(u, v));
        }
    } else {
      for (int i = 0; i < p.rows; ++i)
        for (int j = 0; j < p.cols; ++j) {
          const int u = at(i, j);
          if (u < 0) continue;
          double nn = std::numeric_limits<double>::infinity();
          for (int k = 0; k < p.cols; ++k)
            if (k != j && at(i, k) >= 0) nn = std::min(nn, dist(u, at(i, k)));
          if (std::isfinite(nn)) e = std::max(e, nn);
        }
    }
  }
  return e;
}

}  // namespace

void sample_assembly(Assembly& a) {
  const int n = a.params.n, res = a.params.resolution;
  a.samples.clear();
  a.patches.clear();
  const bool profile = a.params.profile_only;
  const bool ring = n == 2 && !profile;
  const std::vector<Vec> thetas = profile ? std::vector<Vec>{Vec::Unit(n, 0)} : direction_grid(n, res);
  const int nt = static_cast<int>(thetas.size());

  const auto add = [&](SurfaceSample s) {
    if (a.params.compute_mean_curvature && std::isnan(s.analytic_H)) {
      s.analytic_H = sample_mean_curvature(a, s);
      s.fd_H = true;
    }
    a.samples.push_back(std::move(s));
    return static_cast<int>(a.samples.size()) - 1;
  };
  const auto new_patch = [&](int block, RegionKind kind, int side, int rows, int cols) {
    Patch p;
    p.block_index = block;
    p.kind = kind;
    p.side = side;
    p.rows = rows;
    p.cols = cols;
    p.wrap_cols = ring;
    p.cols_ordered = ring || cols == 1;
    p.index.assign(static_cast<std::size_t>(rows) * cols, -1);
    return p;
  };
  const double nan = std::numeric_limits<double>::quiet_NaN();

  for (int j = 0; j < static_cast<int>(a.blocks.size()); ++j) {
    const BlockSpec& nk = a.blocks[j];
    if (nk.kind != BlockKind::neck) continue;
    const double smax = neck_s_max(n, nk.eps_bar, a.rho);
    Patch np = new_patch(j, RegionKind::neck, 0, res, nt);
    for (int i = 0; i < res; ++i) {
      const double s = -smax + 2.0 * smax * i / (res - 1);
      const CatenoidProfile cp = catenoid_profile(n, s);
      const double H = neck_mean_curvature(n, nk.eps_bar, nk.b_bar, s);
      for (int t = 0; t < nt; ++t) {
        Vec y(n + 1);
        y(0) = nk.eps_bar * cp.psi + nk.b_bar;
        y.tail(n) = nk.eps_bar * cp.phi * thetas[t];
        SurfaceSample smp;
        smp.ambient = chart_to_ambient(nk.frame, y);
        smp.region = {RegionKind::neck, j, 0};
        smp.parametric.resize(n + 1);
        smp.parametric << s, thetas[t];
        smp.analytic_H = H;
        np.index[static_cast<std::size_t>(i) * nt + t] = add(std::move(smp));
      }
    }
    a.patches.push_back(std::move(np));

    const int rows = std::max(2, res / 2);
    for (const int side : {-1, 1}) {
      const bool radial = sheet_is_radial(a, j, side);
      Patch tp = new_patch(j, RegionKind::transition, side, rows, nt);
      for (int i = 0; i < rows; ++i) {
        const double r = 0.5 * a.rho * std::pow(4.0, static_cast<double>(i) / (rows - 1));
        Jet F;
        double H = nan;
        if (radial) {
          F = merged_radial(a, j, side, r);
          H = transition_mean_curvature(n, F, r, side);
        }
        for (int t = 0; t < nt; ++t) {
          Vec y(n + 1);
          y(0) = radial ? F.v : merged_height(a, j, side, r, thetas[t]);
          y.tail(n) = r * thetas[t];
          SurfaceSample smp;
          smp.ambient = chart_to_ambient(nk.frame, y);
          smp.region = {RegionKind::transition, j, side};
          smp.parametric.resize(n + 1);
          smp.parametric << r, thetas[t];
          smp.analytic_H = H;
          tp.index[static_cast<std::size_t>(i) * nt + t] = add(std::move(smp));
        }
      }
      a.patches.push_back(std::move(tp));
    }
  }

  for (int j = 0; j < static_cast<int>(a.blocks.size()); ++j) {
    const BlockSpec& b = a.blocks[j];
    if (b.kind == BlockKind::sphere && !b.shared) {
      double mu_lo = 0.0, mu_hi = pi;
      int rows = res + 1;
      const bool lone = b.plus_neck < 0 && b.minus_neck < 0;
      if (!lone) {
        if (b.plus_neck < 0 || b.minus_neck < 0)
          throw Error(ErrorKind::internal, "sample_assembly: sphere with a single neck");
        mu_lo = radial_sheet(a, b.plus_neck, -1).mu_of_radius(2 * a.rho);
        mu_hi = pi - radial_sheet(a, b.minus_neck, 1).mu_of_radius(2 * a.rho);
        rows = res;
      }
      Patch ep = new_patch(j, RegionKind::exterior, 0, rows, nt);
      for (int i = 0; i < rows; ++i) {
        const double mu = mu_lo + (mu_hi - mu_lo) * i / (rows - 1);
        double pert = 0.0, H = sphere_mean_curvature(n, b.alpha);
        if (!lone && a.eps > 0.0) {
          const Jet f = radial_sphere_offset(a, b, mu);
          pert = f.v;
          H = axisymmetric_graph_mean_curvature(n, b.alpha, f.v, f.d, f.dd, mu);
        }
        for (int t = 0; t < nt; ++t) {
          SurfaceSample smp;
          smp.ambient = b.frame * sphere_point(b.alpha + pert, mu, thetas[t]);
          smp.region = {RegionKind::exterior, j, 0};
          smp.parametric.resize(n + 1);
          smp.parametric << mu, thetas[t];
          smp.analytic_H = H;
          ep.index[static_cast<std::size_t>(i) * nt + t] = add(std::move(smp));
        }
      }
      a.patches.push_back(std::move(ep));
    } else if (b.kind == BlockKind::sphere) {
      Patch ep = new_patch(j, RegionKind::exterior, 0, res, nt);
      for (int i = 0; i < res; ++i) {
        const double mu = pi * (i + 0.5) / res;
        for (int t = 0; t < nt; ++t) {
          const Vec w = shared_omega(mu, thetas[t]);
          const double ang = b.alpha + sphere_offset(a, b, w);
          Vec loc(n + 2);
          loc(0) = std::cos(ang);
          loc.tail(n + 1) = std::sin(ang) * w;
          const Vec x = b.frame * loc;
          if (near_neck(a, j, x)) continue;
          SurfaceSample smp;
          smp.ambient = x;
          smp.region = {RegionKind::exterior, j, 0};
          smp.parametric.resize(n + 1);
          smp.parametric << mu, thetas[t];
          smp.analytic_H = nan;
          ep.index[static_cast<std::size_t>(i) * nt + t] = add(std::move(smp));
        }
      }
      a.patches.push_back(std::move(ep));
    } else if (b.kind == BlockKind::torus) {
      const std::vector<Vec> g1 = direction_grid(b.n1 + 1, res), g2 = direction_grid(b.n2 + 1, res);
      Patch ep = new_patch(j, RegionKind::exterior, 0, static_cast<int>(g1.size()),
                           static_cast<int>(g2.size()));
      ep.wrap_rows = b.n1 == 1;
      ep.rows_ordered = b.n1 == 1;
      ep.wrap_cols = b.n2 == 1;
      ep.cols_ordered = b.n2 == 1;
      for (std::size_t i = 0; i < g1.size(); ++i)
        for (std::size_t t = 0; t < g2.size(); ++t) {
          const Vec x = clifford_point(b.alpha + torus_offset(a, b, g1[i], g2[t]), g1[i], g2[t]);
          if (near_neck(a, j, x)) continue;
          SurfaceSample smp;
          smp.ambient = x;
          smp.region = {RegionKind::exterior, j, 0};
          smp.parametric.resize(b.n1 + b.n2 + 2);
          smp.parametric << g1[i], g2[t];
          smp.analytic_H = nan;
          ep.index[i * g2.size() + t] = add(std::move(smp));
        }
      a.patches.push_back(std::move(ep));
    }
  }

  for (SurfaceSample& s : a.samples) {
    if (s.region.kind == RegionKind::exterior) {
      const int k = nearest_neck(a, s.ambient, nullptr);
      s.gamma_dist = k < 0 ? pi : geodesic_distance(a.blocks[k], s.ambient);
    } else {
      s.gamma_dist = geodesic_distance(a.blocks[s.region.block_index], s.ambient);
    }
    s.weight = weight_function(a, s);
  }
  a.mesh_edge = 0.0;
  for (const Patch& p : a.patches) a.mesh_edge = std::max(a.mesh_edge, patch_edge(a, p));
}

}  // namespace detail

double weight_function(const Assembly& a, const SurfaceSample& s) {
  const int n = a.params.n;
  double z = a.rho0;
  switch (s.region.kind) {
    case RegionKind::neck:
      z = a.eps * std::cosh(s.parametric(0));
      break;
    case RegionKind::transition: {
      const BlockSpec& nk = a.blocks[s.region.block_index];
      const double z0 = a.eps * std::cosh(detail::neck_s_max(n, nk.eps_bar, a.rho));
      const double z1 = geodesic_distance(nk, s.ambient);
      z = log_blend(z0, z1, std::log(s.parametric(0) / (0.5 * a.rho)) / std::log(4.0));
      break;
    }
    case RegionKind::exterior: {
      double dc = 0.0;
      const int k = nearest_neck(a, s.ambient, &dc);
      if (k < 0) break;
      const double dg = std::max(geodesic_distance(a.blocks[k], s.ambient), 1e-300);
      if (dc <= a.rho0)
        z = dg;
      else if (dc <= 2 * a.rho0)
        z = log_blend(std::min(dg, a.rho0), a.rho0, (dc - a.rho0) / a.rho0);
      break;
    }
  }
  return std::clamp(z, a.eps > 0.0 ? a.eps : 0.0, a.rho0);
}

WeightedNorm weighted_sup_norm(const Assembly& a, const std::vector<double>& field, double delta) {
  if (field.size() != a.samples.size())
    throw Error(ErrorKind::argument, "weighted_sup_norm: field size differs from sample count");
  WeightedNorm r;
  for (std::size_t i = 0; i < field.size(); ++i) {
    const double f = std::abs(field[i]);
    if (f == 0.0) continue;
    const SurfaceSample& s = a.samples[i];
    if (s.gamma_dist <= a.rho0) {
      // log domain: zeta^{-delta} overflows for small eps and large |delta|
      r.annular = std::max(r.annular, std::exp(std::log(f) - delta * std::log(s.weight)));
    } else {
      r.far = std::max(r.far, f);
    }
  }
  r.total = std::max(r.annular, r.far);
  return r;
}

double sample_mean_curvature(const Assembly& a, const SurfaceSample& s) {
  const int n = a.params.n;
  const BlockSpec& b = a.blocks[s.region.block_index];
  switch (s.region.kind) {
    case RegionKind::neck:
      return detail::neck_mean_curvature(n, b.eps_bar, b.b_bar, s.parametric(0));
    case RegionKind::transition: {
      const int side = s.region.side;
      if (detail::sheet_is_radial(a, s.region.block_index, side)) {
        const double r = s.parametric(0);
        return detail::transition_mean_curvature(
            n, detail::merged_radial(a, s.region.block_index, side, r), r, side);
      }
      break;
    }
    case RegionKind::exterior:
      if (b.kind == BlockKind::sphere && !b.shared) {
        if (!(a.eps > 0.0)) return sphere_mean_curvature(n, b.alpha);
        const double mu = s.parametric(0);
        const Jet f = detail::radial_sphere_offset(a, b, mu);
        return axisymmetric_graph_mean_curvature(n, b.alpha, f.v, f.d, f.dd, mu);
      }
      break;
  }
  return fd_mean_curvature(local_embedding(a, s));
}

LocalEmbedding local_embedding(const Assembly& a, const SurfaceSample& s) {
  const int n = a.params.n;
  const int bi = s.region.block_index;
  const BlockSpec& b = a.blocks[bi];
  LocalEmbedding e;
  switch (s.region.kind) {
    case RegionKind::neck: {
      const double s0 = s.parametric(0);
      const Vec th0 = s.parametric.tail(n);
      const Mat E = detail::complement_basis(th0);
      const double eb = b.eps_bar, bb = b.b_bar;
      const Mat frame = b.frame;
      e.map = [=](const Vec& v) {
        const CatenoidProfile p = catenoid_profile(n, s0 + v(0));
        Vec y(n + 1);
        y(0) = eb * p.psi + bb;
        y.tail(n) = eb * p.phi * detail::normalized_offset(th0, E, v.tail(n - 1));
        return chart_to_ambient(frame, y);
      };
      e.base = Vec::Zero(n);
      e.step = Vec::Constant(n, 1e-3);
      const CatenoidProfile p = catenoid_profile(n, s0);
      Vec y(n + 1), w(n + 1);
      y << eb * p.psi + bb, eb * p.phi * th0;
      w << -p.dphi, p.dpsi * th0;
      e.normal_hint = push_chart(frame, y, w);
      return e;
    }
    case RegionKind::transition: {
      const double r0 = s.parametric(0);
      const Vec yh0 = r0 * s.parametric.tail(n);
      const int side = s.region.side;
      const Mat frame = b.frame;
      e.map = [&a, bi, side, yh0, frame, n](const Vec& v) {
        const Vec yh = yh0 + v;
        const double r = yh.norm();
        Vec y(n + 1);
        y(0) = detail::merged_height(a, bi, side, r, yh / r);
        y.tail(n) = yh;
        return chart_to_ambient(frame, y);
      };
      e.base = Vec::Zero(n);
      e.step = Vec::Constant(n, 1e-3 * r0);
      Vec y(n + 1), w = Vec::Zero(n + 1);
      y(0) = detail::merged_height(a, bi, side, r0, s.parametric.tail(n));
      y.tail(n) = yh0;
      w(0) = side < 0 ? 1.0 : -1.0;
      e.normal_hint = push_chart(frame, y, w);
      return e;
    }
    case RegionKind::exterior:
      break;
  }
  if (b.kind == BlockKind::sphere) {
    const double mu = s.parametric(0);
    const Vec th = s.parametric.tail(n);
    const Vec w0 = b.shared ? shared_omega(mu, th) : sphere_base_point(mu, th);
    const Mat E = detail::complement_basis(w0);
    e.map = [&a, bi, w0, E, n](const Vec& v) {
      const BlockSpec& blk = a.blocks[bi];
      const Vec w = detail::normalized_offset(w0, E, v);
      const double ang = blk.alpha + detail::sphere_offset(a, blk, w);
      Vec loc(n + 2);
      loc(0) = std::cos(ang);
      loc.tail(n + 1) = std::sin(ang) * w;
      return Vec(blk.frame * loc);
    };
    e.base = Vec::Zero(n);
    e.step = Vec::Constant(n, 1e-3);
    const double ang = b.alpha + detail::sphere_offset(a, b, w0);
    Vec loc(n + 2);
    loc(0) = -std::sin(ang);
    loc.tail(n + 1) = std::cos(ang) * w0;
    e.normal_hint = b.frame * loc;
    return e;
  }
  const int n1 = b.n1, n2 = b.n2;
  const Vec t1 = s.parametric.head(n1 + 1), t2 = s.parametric.tail(n2 + 1);
  const Mat E1 = detail::complement_basis(t1), E2 = detail::complement_basis(t2);
  e.map = [&a, bi, t1, t2, E1, E2, n1, n2](const Vec& v) {
    const BlockSpec& blk = a.blocks[bi];
    const Vec u1 = detail::normalized_offset(t1, E1, v.head(n1));
    const Vec u2 = detail::normalized_offset(t2, E2, v.tail(n2));
    return clifford_point(blk.alpha + detail::torus_offset(a, blk, u1, u2), u1, u2);
  };
  e.base = Vec::Zero(n1 + n2);
  e.step = Vec::Constant(n1 + n2, 1e-3);
  const double ang = b.alpha + detail::torus_offset(a, b, t1, t2);
  e.normal_hint = b.arm_sign * clifford_normal(ang, t1, t2);
  return e;
}

}  // namespace cmcglue
