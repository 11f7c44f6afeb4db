#include "cmcglue/verify.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <boost/geometry.hpp>
#include <boost/geometry/index/rtree.hpp>
#include <map>
#include <memory>

#include "assembly_internal.hpp"

namespace cmcglue {

namespace bg = boost::geometry;
namespace bgi = boost::geometry::index;

namespace {

double fd_once(const Embedding& X, const Vec& p, const Vec& h, AmbientMetric metric,
               const Vec& hint) {
  const int k = static_cast<int>(p.size());
  const Vec X0 = X(p);
  const int d = static_cast<int>(X0.size());
  const int cols = metric == AmbientMetric::sphere ? k + 1 : k;
  if (d != cols + 1) throw Error(ErrorKind::oracle, "fd_mean_curvature: codimension must be 1");
  std::vector<Vec> plus(k), minus(k);
  Mat J(d, k);
  for (int i = 0; i < k; ++i) {
    const Vec e = h(i) * Vec::Unit(k, i);
    plus[i] = X(p + e);
    minus[i] = X(p - e);
    J.col(i) = (plus[i] - minus[i]) / (2 * h(i));
  }
  const Mat g = J.transpose() * J;
  const Vec ev = Eigen::SelfAdjointEigenSolver<Mat>(g).eigenvalues();
  if (!(ev.minCoeff() > 1e-14 * ev.maxCoeff()))
    throw Error(ErrorKind::oracle, "fd_mean_curvature: degenerate induced metric");
  Mat M(d, cols);
  if (metric == AmbientMetric::sphere) {
    M.col(0) = X0;
    M.rightCols(k) = J;
  } else {
    M = J;
  }
  const Mat Q = Eigen::HouseholderQR<Mat>(M).householderQ();
  Vec N = Q.col(d - 1);
  if (N.dot(hint) < 0) N = -N;
  Mat b(k, k);
  for (int i = 0; i < k; ++i) {
    b(i, i) = (plus[i] - 2 * X0 + minus[i]).dot(N) / (h(i) * h(i));
    for (int j = 0; j < i; ++j) {
      const Vec ei = h(i) * Vec::Unit(k, i), ej = h(j) * Vec::Unit(k, j);
      const Vec mixed = X(p + ei + ej) - X(p + ei - ej) - X(p - ei + ej) + X(p - ei - ej);
      b(i, j) = b(j, i) = mixed.dot(N) / (4 * h(i) * h(j));
    }
  }
  return -g.ldlt().solve(b).trace();
}

}  // namespace

double fd_mean_curvature(const Embedding& X, const Vec& p, const Vec& h, AmbientMetric metric,
                         const Vec& normal_hint, bool richardson) {
  const double H1 = fd_once(X, p, h, metric, normal_hint);
  if (!richardson) return H1;
  const double H2 = fd_once(X, p, 0.5 * h, metric, normal_hint);
  return (4 * H2 - H1) / 3;
}

double fd_mean_curvature(const LocalEmbedding& e, bool richardson) {
  return fd_mean_curvature(e.map, e.base, e.step, AmbientMetric::sphere, e.normal_hint,
                           richardson);
}

double mean_curvature_at(const Assembly& a, const SurfaceSample& s) {
  return sample_mean_curvature(a, s);
}

CurvatureReport error_norm(const Assembly& a, double delta) {
  CurvatureReport r;
  r.delta = delta;
  r.sample_count = a.samples.size();
  std::vector<double> f(a.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    const SurfaceSample& s = a.samples[i];
    const double H = std::isnan(s.analytic_H) ? sample_mean_curvature(a, s) : s.analytic_H;
    f[i] = H - a.H_target;
    double& slot = s.region.kind == RegionKind::neck         ? r.neck_max
                   : s.region.kind == RegionKind::transition ? r.transition_max
                                                             : r.exterior_max;
    slot = std::max(slot, std::abs(f[i]));
  }
  r.norm = weighted_sup_norm(a, f, delta - 2.0);
  return r;
}

// ---- kernel suite -------------------------------------------------------

double JacobiReport::max() const {
  return std::max({sphere, catenoid_J1, catenoid_Jk, catenoid_J1k, catenoid_J0, torus});
}

JacobiReport jacobi_residual_suite(int n, double alpha, int n1, int n2, double h) {
  JacobiReport r;
  // Linear functions on S^n: Delta u + n u = 0.
  const std::vector<Vec> dirs = detail::direction_grid(n + 1, 16);
  for (int k = 0; k <= n; ++k)
    for (const Vec& w : dirs) {
      const auto u = [k](const Vec& x) { return x(k); };
      const double lap = sphere_laplacian_fd(u, w, h);
      r.sphere = std::max(r.sphere, std::abs((lap + n * w(k)) / std::pow(std::sin(alpha), 2)));
    }
  for (int i = 1; i < 50; ++i) {
    const double mu = pi * i / 50;
    const auto u = [](double m) { return std::cos(m); };
    const double du = (u(mu + h) - u(mu - h)) / (2 * h);
    const double ddu = (u(mu + h) - 2 * u(mu) + u(mu - h)) / (h * h);
    r.sphere = std::max(r.sphere, std::abs(sphere_linearized_apply(n, alpha, u(mu), du, ddu, mu)));
  }
  const std::pair<JacobiKind, double*> fams[] = {{JacobiKind::J1, &r.catenoid_J1},
                                                 {JacobiKind::Jk, &r.catenoid_Jk},
                                                 {JacobiKind::J1k, &r.catenoid_J1k},
                                                 {JacobiKind::J0, &r.catenoid_J0}};
  for (const auto& [kind, slot] : fams) {
    for (int i = 0; i <= 120; ++i) {
      const double s = -3.0 + 6.0 * i / 120;
      const auto u = [n, kind = kind](double t) { return catenoid_jacobi(n, kind, t); };
      const double du = (u(s + h) - u(s - h)) / (2 * h);
      const double ddu = (u(s + h) - 2 * u(s) + u(s - h)) / (h * h);
      *slot = std::max(*slot, std::abs(catenoid_linearized_apply(n, u(s), du, ddu, s,
                                                                 jacobi_mode(kind))));
    }
  }
  const std::vector<Vec> g1 = detail::direction_grid(n1 + 1, 8), g2 = detail::direction_grid(n2 + 1, 8);
  for (int j = 0; j <= n1; ++j)
    for (int jp = 0; jp <= n2; ++jp) {
      const ProductFunction u = [j, jp](const Vec& a, const Vec& b) { return a(j) * b(jp); };
      for (const Vec& t1 : g1)
        for (const Vec& t2 : g2)
          r.torus = std::max(r.torus, std::abs(clifford_linearized_apply(n1, n2, alpha, u, t1, t2, h)));
    }
  return r;
}

// ---- nearest-neighbour queries on samples ------------------------------

namespace {

// Nearest-sample distance over the full ambient coordinates.
class NearestSample {
 public:
  explicit NearestSample(const Assembly& a) : dim_(a.params.n + 2) {
    switch (dim_) {
      case 4: impl_ = make<4>(a); break;
      case 5: impl_ = make<5>(a); break;
      case 6: impl_ = make<6>(a); break;
      case 7: impl_ = make<7>(a); break;
      default: throw Error(ErrorKind::unsupported, "symmetry_check: n must be in 2..5");
    }
  }

  double distance(const Vec& x) const { return impl_(x); }

 private:
  template <int D>
  static std::function<double(const Vec&)> make(const Assembly& a) {
    using Point = bg::model::point<double, D, bg::cs::cartesian>;
    const auto to_point = [](const Vec& x) {
      Point p;
      [&]<std::size_t... I>(std::index_sequence<I...>) {
        (bg::set<I>(p, x(I)), ...);
      }(std::make_index_sequence<D>{});
      return p;
    };
    std::vector<Point> pts;
    pts.reserve(a.samples.size());
    for (const SurfaceSample& s : a.samples) pts.push_back(to_point(s.ambient));
    auto tree = std::make_shared<bgi::rtree<Point, bgi::quadratic<16>>>(pts);
    return [tree, to_point](const Vec& x) {
      const Point q = to_point(x);
      std::vector<Point> out;
      tree->query(bgi::nearest(q, 1), std::back_inserter(out));
      return out.empty() ? std::numeric_limits<double>::infinity() : bg::distance(q, out.front());
    };
  }

  int dim_;
  std::function<double(const Vec&)> impl_;
};

std::vector<std::vector<int>> block_distances(const Assembly& a) {
  const int m = static_cast<int>(a.blocks.size());
  std::vector<std::vector<int>> adj(m);
  for (int j = 0; j < m; ++j) {
    const BlockSpec& b = a.blocks[j];
    if (b.kind != BlockKind::neck) continue;
    for (const int k : {b.lower, b.upper}) {
      adj[j].push_back(k);
      adj[k].push_back(j);
    }
  }
  std::vector<std::vector<int>> dist(m, std::vector<int>(m, 1 << 20));
  for (int s = 0; s < m; ++s) {
    std::vector<int> queue = {s};
    dist[s][s] = 0;
    for (std::size_t q = 0; q < queue.size(); ++q)
      for (const int v : adj[queue[q]])
        if (dist[s][v] > dist[s][queue[q]] + 1) {
          dist[s][v] = dist[s][queue[q]] + 1;
          queue.push_back(v);
        }
  }
  return dist;
}

}  // namespace

double symmetry_check(const Assembly& a, const Mat& T) {
  if (T.rows() != T.cols() || T.rows() != a.params.n + 2 ||
      (T.transpose() * T - Mat::Identity(T.rows(), T.cols())).cwiseAbs().maxCoeff() > 1e-9)
    throw Error(ErrorKind::argument, "symmetry_check: transform must be orthogonal");
  if (a.samples.empty()) return 0.0;
  const NearestSample nearest(a);
  double worst = 0.0;
  for (const SurfaceSample& s : a.samples) worst = std::max(worst, nearest.distance(T * s.ambient));
  return worst;
}

Embeddedness embeddedness_check(const Assembly& a) {
  Embeddedness e;
  e.threshold = a.mesh_edge;
  e.min_separation = std::numeric_limits<double>::infinity();
  const auto dist = block_distances(a);
  const double cell = std::max(a.mesh_edge, 1e-6);
  // Cells keyed by (first three coordinates, block) so pairs of nearby
  // blocks are skipped without touching their samples.
  using Key = std::array<long long, 4>;
  std::map<Key, std::vector<int>> cells;
  std::map<std::array<long long, 3>, std::vector<int>> blocks_in;
  const auto key3 = [cell](const Vec& x) {
    return std::array<long long, 3>{static_cast<long long>(std::floor(x(0) / cell)),
                                    static_cast<long long>(std::floor(x(1) / cell)),
                                    static_cast<long long>(std::floor(x(2) / cell))};
  };
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    const auto k = key3(a.samples[i].ambient);
    const int b = a.samples[i].region.block_index;
    auto& v = cells[{k[0], k[1], k[2], b}];
    if (v.empty()) blocks_in[k].push_back(b);
    v.push_back(static_cast<int>(i));
  }
  for (const auto& [k, idx] : cells) {
    const int bi = static_cast<int>(k[3]);
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dz = -1; dz <= 1; ++dz) {
          const std::array<long long, 3> c{k[0] + dx, k[1] + dy, k[2] + dz};
          const auto it = blocks_in.find(c);
          if (it == blocks_in.end()) continue;
          for (const int bj : it->second) {
            if (bj <= bi || dist[bi][bj] <= 2) continue;
            const auto& jdx = cells.at({c[0], c[1], c[2], bj});
            for (const int i : idx)
              for (const int j : jdx)
                e.min_separation = std::min(
                    e.min_separation, (a.samples[i].ambient - a.samples[j].ambient).norm());
          }
        }
  }
  e.embedded = e.min_separation > e.threshold;
  return e;
}

}  // namespace cmcglue
