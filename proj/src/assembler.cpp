#include "cmcglue/assembler.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>

#include "assembly_internal.hpp"
#include "cmcglue/ambient.hpp"

namespace cmcglue {

Construction parse_construction(const std::string& name) {
  if (name == "delaunay") return Construction::delaunay;
  if (name == "two_geodesic") return Construction::two_geodesic;
  if (name == "handle") return Construction::handle;
  if (name == "doubling") return Construction::doubling;
  throw Error(ErrorKind::configuration, "unknown construction '" + name + "'");
}

std::string to_string(Construction c) {
  switch (c) {
    case Construction::delaunay: return "delaunay";
    case Construction::two_geodesic: return "two_geodesic";
    case Construction::handle: return "handle";
    case Construction::doubling: return "doubling";
  }
  return "?";
}

std::string to_string(RegionKind k) {
  switch (k) {
    case RegionKind::neck: return "neck";
    case RegionKind::transition: return "transition";
    case RegionKind::exterior: return "exterior";
  }
  return "?";
}

int Assembly::count(BlockKind kind) const {
  return static_cast<int>(
      std::count_if(blocks.begin(), blocks.end(), [kind](const BlockSpec& b) { return b.kind == kind; }));
}

Mat ambient_matrix(const GroupElement& g) {
  const int a = static_cast<int>(g.omega1.rows()), b = static_cast<int>(g.omega2.rows());
  Mat M = Mat::Zero(a + b, a + b);
  M.topLeftCorner(a, a) = g.omega1;
  M.bottomRightCorner(b, b) = g.omega2;
  return M;
}

namespace detail {

Mat rotation(int i, int j, double theta, int n) { return planar_rotation(i, j, theta, n).as_matrix; }

Mat random_orthogonal(int k, std::mt19937& rng, bool proper) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mat A(k, k);
  for (int r = 0; r < k; ++r)
    for (int c = 0; c < k; ++c) A(r, c) = gauss(rng);
  Eigen::HouseholderQR<Mat> qr(A);
  Mat Q = qr.householderQ();
  const Mat R = qr.matrixQR();
  for (int c = 0; c < k; ++c)
    if (R(c, c) < 0) Q.col(c) = -Q.col(c);
  if (proper && Q.determinant() < 0) Q.col(0) = -Q.col(0);
  return Q;
}

}  // namespace detail

namespace {

using detail::rotation;

double sq(double x) { return x * x; }

void check_common(const AssemblyParams& p) {
  if (p.n < 2) throw Error(ErrorKind::configuration, "n must be >= 2");
  if (p.resolution < 4) throw Error(ErrorKind::configuration, "resolution must be >= 4");
  if (!(p.rho0 > 0.0)) throw Error(ErrorKind::configuration, "rho0 must be positive");
}

void set_scale(Assembly& a, double eps_solved) {
  a.eps = a.params.eps_override > 0.0 ? a.params.eps_override : eps_solved;
  a.rho = truncation_radius(a.params.n, a.eps);
  a.rho0 = a.params.rho0;
  if (!(a.rho0 > 10.0 * a.rho))
    throw Error(ErrorKind::configuration,
                "rho0 must exceed 10 rho_eps (rho_eps = " + std::to_string(a.rho) + ")");
}

double neck_scale(int n, double eps, double alpha, double gap) {
  const ExpansionConstants k = expansion_constants(n, alpha, gap);
  return n == 2 ? eps * k.Cn : eps * std::pow(k.Cn, 1.0 / (n - 1));
}

int add_block(Assembly& a, BlockSpec b) {
  b.index = a.count(b.kind);
  a.blocks.push_back(std::move(b));
  return static_cast<int>(a.blocks.size()) - 1;
}

BlockSpec sphere_block(const Assembly& a, const Mat& frame, double alpha, double b) {
  BlockSpec s;
  s.kind = BlockKind::sphere;
  s.frame = frame;
  s.alpha = alpha;
  s.eps = a.eps;
  s.b = b;
  s.b_scale = 2.0 * sq(std::cos(a.params.tau / 4));
  return s;
}

BlockSpec neck_block(const Mat& frame, double eps_bar, double b_bar, double gap, int lower,
                     int upper) {
  BlockSpec s;
  s.kind = BlockKind::neck;
  s.frame = frame;
  s.eps_bar = eps_bar;
  s.b_bar = b_bar;
  s.tau_gap = gap;
  s.lower = lower;
  s.upper = upper;
  return s;
}

Mat reflection(int axis, int n) {
  Mat T = Mat::Identity(n + 2, n + 2);
  T(axis, axis) = -1.0;
  return T;
}

// Embeds B acting on coordinates first..first+B.rows()-1.
Mat embed(const Mat& B, int first, int n) {
  Mat M = Mat::Identity(n + 2, n + 2);
  M.block(first, first, B.rows(), B.cols()) = B;
  return M;
}

double sphere_area(int k) {
  return 2.0 * std::pow(pi, (k + 1) / 2.0) / boost::math::tgamma((k + 1) / 2.0);
}

std::shared_ptr<const TorusGreen> make_torus_green(int n1, int n2, double alpha,
                                                   double alpha_hat,
                                                   const std::vector<TorusGreen::Pole>& poles) {
  const int n = n1 + n2;
  const int lmax = 32;
  const double lam = std::min(lmax * (lmax + n1 - 1.0) / sq(std::cos(alpha)),
                              lmax * (lmax + n2 - 1.0) / sq(std::sin(alpha)));
  const double strength = sphere_area(n - 1) * std::pow(std::sin(alpha_hat), n - 2);
  return std::make_shared<const TorusGreen>(n1, n2, alpha, strength, poles, 20.0 / lam, lmax);
}

Vec unit(int dim, int i) {
  Vec v = Vec::Zero(dim);
  v(i) = 1.0;
  return v;
}

void finish(Assembly& a) {
  detail::sample_assembly(a);
}

}  // namespace

// ---- Delaunay chains ---------------------------------------------------

Assembly assemble_delaunay(const AssemblyParams& params) {
  check_common(params);
  Assembly a;
  a.params = params;
  const int n = params.n;
  const double alpha = params.alpha, tau = params.tau;
  if (!(alpha > 0.0 && alpha < pi / 2) || !(tau > 0.0))
    throw Error(ErrorKind::configuration, "delaunay: need alpha in (0, pi/2) and tau > 0");
  const ClosureResult cl = closure_check(alpha, tau, 1e-9);
  if (!cl.found)
    throw Error(ErrorKind::configuration,
                "delaunay: closure 2 alpha + tau = 2 pi m / N has no solution");
  if ((params.N > 0 && params.N != cl.N) || (params.m > 0 && params.m != cl.m))
    throw Error(ErrorKind::configuration, "delaunay: N, m disagree with 2 alpha + tau");
  a.N = cl.N;
  a.m = cl.m;
  a.neck_solve = solve_neck_system(n, alpha, tau, std::vector<double>(a.N, 0.0));
  set_scale(a, solve_scale(n, alpha, tau));
  a.alpha_sphere = alpha;
  a.H_target = sphere_mean_curvature(n, alpha);
  const int N = a.N;
  const double eb = neck_scale(n, a.eps, alpha, tau);
  for (int k = 0; k < N; ++k) {
    BlockSpec s = sphere_block(a, rotation(0, 1, k * (2 * alpha + tau), n), alpha, 0.0);
    s.plus_neck = N + k;
    s.minus_neck = N + (k + N - 1) % N;
    add_block(a, s);
  }
  for (int k = 0; k < N; ++k)
    add_block(a, neck_block(rotation(0, 1, (2 * k + 1) * (alpha + tau / 2), n), eb, 0.0, tau, k,
                            (k + 1) % N));
  std::mt19937 rng(params.seed);
  a.symmetry_group.push_back({"R_{2alpha+tau}", rotation(0, 1, 2 * alpha + tau, n)});
  a.symmetry_group.push_back({"T", reflection(1, n)});
  a.symmetry_group.push_back({"S01_B", embed(detail::random_orthogonal(n, rng, true), 2, n)});
  finish(a);
  return a;
}

// ---- two Delaunay chains on orthogonal geodesics ------------------------

Assembly assemble_two_geodesic(const AssemblyParams& params) {
  check_common(params);
  Assembly a;
  a.params = params;
  const int n = params.n;
  const double alpha = params.alpha, tau = params.tau;
  if (!(alpha > 0.0 && alpha < pi / 2) || !(tau > 0.0))
    throw Error(ErrorKind::configuration, "two_geodesic: need alpha in (0, pi/2) and tau > 0");
  const ClosureResult cl = closure_check(alpha, tau, 1e-9);
  if (!cl.found)
    throw Error(ErrorKind::configuration,
                "two_geodesic: closure 2 alpha + tau = 2 pi m / N has no solution");
  if ((params.N > 0 && params.N != cl.N) || (params.m > 0 && params.m != cl.m))
    throw Error(ErrorKind::configuration, "two_geodesic: N, m disagree with 2 alpha + tau");
  const int N = cl.N;
  if (N % 2 != 0 || (N / 2) % 2 != 1)
    throw Error(ErrorKind::configuration,
                "two_geodesic: N must be even with N/2 odd (got N = " + std::to_string(N) + ")");
  a.N = N;
  a.m = cl.m;
  std::vector<double> sigma = params.sigma;
  if (sigma.empty()) sigma.assign(N, 0.0);
  if (static_cast<int>(sigma.size()) == (N / 2 - 1) / 2 && static_cast<int>(sigma.size()) != N)
    sigma = symmetric_sigma(N, sigma);
  if (static_cast<int>(sigma.size()) != N)
    throw Error(ErrorKind::configuration, "two_geodesic: sigma must have N or (N-2)/4 entries");
  if (params.require_symmetric_sigma && !sigma_is_symmetric(sigma, 1e-12))
    throw Error(ErrorKind::configuration,
                "two_geodesic: sigma violates the displacement symmetry");
  a.params.sigma = sigma;
  a.neck_solve = solve_neck_system(n, alpha, tau, sigma);
  set_scale(a, a.neck_solve.eps);
  const double ratio = a.eps / a.neck_solve.eps;
  a.alpha_sphere = alpha;
  a.H_target = sphere_mean_curvature(n, alpha);

  const Mat Q = rotation(1, 2, pi / 2, n);
  const int h = N / 2;
  std::vector<double> theta(N);
  for (int k = 0; k < N; ++k) theta[k] = k * (2 * alpha + tau) + sigma[k];
  std::vector<int> g1(N), g2(N);
  for (int k = 0; k < N; ++k) {
    BlockSpec s = sphere_block(a, rotation(0, 1, theta[k], n), alpha, a.neck_solve.b[k]);
    s.shared = (k == 0 || k == h);
    if (s.shared) s.b = 0.0;
    g1[k] = add_block(a, s);
  }
  for (int k = 0; k < N; ++k) {
    if (k == 0 || k == h) {
      g2[k] = g1[k];
      continue;
    }
    g2[k] = add_block(a, sphere_block(a, Q * rotation(0, 1, theta[k], n), alpha,
                                      a.neck_solve.b[k]));
  }
  for (int chain = 0; chain < 2; ++chain) {
    const std::vector<int>& g = chain == 0 ? g1 : g2;
    for (int k = 0; k < N; ++k) {
      const double gap = a.neck_solve.tau_k[k];
      const double centre = theta[k] + alpha + gap / 2;
      Mat frame = rotation(0, 1, centre, n);
      if (chain == 1) frame = Q * frame;
      const int idx = add_block(a, neck_block(frame, a.neck_solve.eps_bar[k] * ratio,
                                              a.neck_solve.b_bar[k], gap, g[k], g[(k + 1) % N]));
      BlockSpec& lo = a.blocks[g[k]];
      if (!lo.shared) lo.plus_neck = idx;
      BlockSpec& up = a.blocks[g[(k + 1) % N]];
      if (!up.shared) up.minus_neck = idx;
    }
  }
  std::mt19937 rng(params.seed);
  a.symmetry_group.push_back({"T0", reflection(0, n)});
  a.symmetry_group.push_back({"T1", reflection(1, n)});
  a.symmetry_group.push_back({"T2", reflection(2, n)});
  a.symmetry_group.push_back({"Q", Q});
  if (n >= 3)
    a.symmetry_group.push_back(
        {"S012_B", embed(detail::random_orthogonal(n - 1, rng, n >= 4), 3, n)});
  finish(a);
  return a;
}

// ---- handles and doublings of Clifford tori ---------------------------

namespace {

HandleParameters solve_winding(const AssemblyParams& p, WindingMode mode) {
  if (p.N < 1 || p.m < 1)
    throw Error(ErrorKind::configuration, "torus constructions need positive N and m");
  HandleParameters hp;
  try {
    hp = p.tau > 0.0 ? handle_parameters(p.n1, p.n2, p.tau, p.N, p.m, mode)
                     : handle_tau(p.n1, p.n2, p.alpha, p.N, p.m, mode);
  } catch (const Error& e) {
    throw Error(ErrorKind::configuration,
                std::string("winding equation 2N alpha_hat + (N+1) tau = rhs: ") + e.what());
  }
  // Outward normals point along the arms, so the torus mean curvature in that
  // direction is -H^Cliff for a handle and +H^Cliff for the first doubling torus.
  const double h = clifford_mean_curvature(p.n1, p.n2, hp.alpha);
  if (mode == WindingMode::handle ? !(h < 0.0) : !(h > 0.0))
    throw Error(ErrorKind::configuration,
                "torus angle " + std::to_string(hp.alpha) +
                    " is on the wrong side of the minimal torus for the arm orientation");
  return hp;
}

std::vector<double> arm_sigma(const AssemblyParams& p) {
  std::vector<double> s = p.sigma;
  if (s.empty()) s.assign(p.N, 0.0);
  if (static_cast<int>(s.size()) != p.N)
    throw Error(ErrorKind::configuration, "sigma must have N entries");
  return s;
}

// Frame of the chart or sphere centred at gamma_p(t), axis along +t.
Mat arm_frame(int n1, int n, double alpha, double t) {
  return rotation(0, n1 + 1, alpha + t, n) * rotation(1, n1 + 1, pi / 2, n);
}

void torus_setup(Assembly& a, const AssemblyParams& params, WindingMode mode,
                 HandleParameters& hp) {
  check_common(params);
  if (params.n1 < 1 || params.n2 < 1)
    throw Error(ErrorKind::configuration, "torus dimensions n1, n2 must be >= 1");
  a.params = params;
  a.params.n = params.n1 + params.n2;
  hp = solve_winding(params, mode);
  a.params.alpha = hp.alpha;
  a.params.tau = hp.tau;
  a.N = params.N;
  a.m = params.m;
  const int n = a.params.n;
  a.neck_solve = solve_neck_system(n, hp.alpha_hat, hp.tau, std::vector<double>(a.N, 0.0));
  set_scale(a, solve_scale(n, hp.alpha_hat, hp.tau));
  a.alpha_sphere = hp.alpha_hat;
  a.H_target = sphere_mean_curvature(n, hp.alpha_hat);
}

BlockSpec torus_block(int n1, int n2, double alpha, double arm_sign,
                      std::shared_ptr<const TorusGreen> green) {
  BlockSpec t;
  t.kind = BlockKind::torus;
  t.frame = Mat::Identity(n1 + n2 + 2, n1 + n2 + 2);
  t.alpha = alpha;
  t.n1 = n1;
  t.n2 = n2;
  t.arm_sign = arm_sign;
  t.green = std::move(green);
  return t;
}

}  // namespace

Assembly assemble_handle(const AssemblyParams& params) {
  Assembly a;
  HandleParameters hp;
  torus_setup(a, params, WindingMode::handle, hp);
  const int n = a.params.n, n1 = params.n1, n2 = params.n2, N = a.N;
  const std::vector<double> sigma = arm_sigma(params);
  for (int k = 0; k < N; ++k)
    if (std::abs(sigma[k] - sigma[N - 1 - k]) > 1e-12)
      throw Error(ErrorKind::configuration, "handle: sigma_k must equal sigma_{N-1-k}");
  a.params.sigma = sigma;
  const double ah = hp.alpha_hat, tau = hp.tau;

  const std::vector<TorusGreen::Pole> poles = {{unit(n1 + 1, 0), unit(n2 + 1, 0)},
                                               {unit(n1 + 1, 0), -unit(n2 + 1, 0)}};
  const int torus =
      add_block(a, torus_block(n1, n2, hp.alpha, -1.0, make_torus_green(n1, n2, hp.alpha, ah, poles)));
  std::vector<double> t(N);
  std::vector<int> sph(N);
  for (int k = 0; k < N; ++k) {
    t[k] = -(k * (2 * ah + tau) + ah + tau) - sigma[k];
    sph[k] = add_block(a, sphere_block(a, arm_frame(n1, n, hp.alpha, t[k]), ah, 0.0));
  }
  const double t_end = -(2 * N * ah + (N + 1) * tau);
  for (int k = 0; k <= N; ++k) {
    const double hi = k == 0 ? 0.0 : t[k - 1] - ah;
    const double lo = k == N ? t_end : t[k] + ah;
    const int lower = k == N ? torus : sph[k];
    const int upper = k == 0 ? torus : sph[k - 1];
    const double gap = hi - lo;
    const int idx = add_block(a, neck_block(arm_frame(n1, n, hp.alpha, 0.5 * (lo + hi)),
                                            neck_scale(n, a.eps, ah, gap), 0.0, gap, lower, upper));
    if (k < N) a.blocks[sph[k]].plus_neck = idx;
    if (k > 0) a.blocks[sph[k - 1]].minus_neck = idx;
  }
  std::mt19937 rng(params.seed);
  a.symmetry_group.push_back({"T", reflection(n1 + 1, n)});
  Mat S = Mat::Identity(n + 2, n + 2);
  S.block(1, 1, n1, n1) = detail::random_orthogonal(n1, rng, false);
  S.block(n1 + 2, n1 + 2, n2, n2) = detail::random_orthogonal(n2, rng, false);
  a.symmetry_group.push_back({"S00_B1B2", S});
  finish(a);
  return a;
}

Assembly assemble_doubling(const AssemblyParams& params, const std::vector<GroupElement>& group) {
  if (params.n1 < 1 || params.n2 < 1)
    throw Error(ErrorKind::configuration, "torus dimensions n1, n2 must be >= 1");
  const int n1 = params.n1, n2 = params.n2;
  if (group.empty()) throw Error(ErrorKind::configuration, "doubling: empty symmetry group");
  const GroupCondition gc = group_condition_check(group, n1, n2);
  if (!gc.passes)
    throw Error(ErrorKind::obstruction,
                "doubling: the group fixes " + std::to_string(gc.fixed_dimension) +
                    " bilinear functions x1^j x2^j'");
  const std::vector<GroupElement> closure = group_closure(group);
  const GroupElement T = group_preset("reflection-T", n1, n2)[1];
  const bool has_T = std::any_of(closure.begin(), closure.end(), [&](const GroupElement& g) {
    return (g.omega1 - T.omega1).cwiseAbs().maxCoeff() < 1e-9 &&
           (g.omega2 - T.omega2).cwiseAbs().maxCoeff() < 1e-9;
  });
  if (!has_T) throw Error(ErrorKind::configuration, "doubling: the group must contain T");

  Assembly a;
  HandleParameters hp;
  torus_setup(a, params, WindingMode::doubling, hp);
  const int n = a.params.n, N = a.N;
  const std::vector<double> sigma = arm_sigma(params);
  a.params.sigma = sigma;
  a.params.group = group;
  const double ah = hp.alpha_hat, tau = hp.tau;
  const Orbit orbit = torus_orbit(closure, n1, n2);
  a.group_order = orbit.group_order;
  a.orbit_size = static_cast<int>(orbit.points.size());

  std::vector<TorusGreen::Pole> poles;
  for (const auto& pt : orbit.points) poles.push_back({pt.first, pt.second});
  const int torus_a =
      add_block(a, torus_block(n1, n2, hp.alpha, 1.0, make_torus_green(n1, n2, hp.alpha, ah, poles)));
  const int torus_b = add_block(
      a, torus_block(n1, n2, hp.alpha_bar, -1.0, make_torus_green(n1, n2, hp.alpha_bar, ah, poles)));

  std::vector<double> t(N + 1);
  for (int k = 1; k <= N; ++k) t[k] = (2 * k - 1) * ah + k * tau + sigma[k - 1];
  const double t_end = 2 * N * ah + (N + 1) * tau;
  for (const GroupElement& rep : orbit.representatives) {
    const Mat W = ambient_matrix(rep);
    std::vector<int> sph(N + 1, -1);
    for (int k = 1; k <= N; ++k)
      sph[k] = add_block(a, sphere_block(a, W * arm_frame(n1, n, hp.alpha, t[k]), ah, 0.0));
    for (int k = 0; k <= N; ++k) {
      const double lo = k == 0 ? 0.0 : t[k] + ah;
      const double hi = k == N ? t_end : t[k + 1] - ah;
      const int lower = k == 0 ? torus_a : sph[k];
      const int upper = k == N ? torus_b : sph[k + 1];
      const double gap = hi - lo;
      const int idx =
          add_block(a, neck_block(W * arm_frame(n1, n, hp.alpha, 0.5 * (lo + hi)),
                                  neck_scale(n, a.eps, ah, gap), 0.0, gap, lower, upper));
      if (k > 0) a.blocks[sph[k]].plus_neck = idx;
      if (k < N) a.blocks[sph[k + 1]].minus_neck = idx;
    }
  }
  for (size_t j = 0; j < group.size(); ++j)
    a.symmetry_group.push_back({"g" + std::to_string(j), ambient_matrix(group[j])});
  finish(a);
  return a;
}

Assembly assemble(const AssemblyParams& params) {
  switch (params.construction) {
    case Construction::delaunay: return assemble_delaunay(params);
    case Construction::two_geodesic: return assemble_two_geodesic(params);
    case Construction::handle: return assemble_handle(params);
    case Construction::doubling: {
      std::vector<GroupElement> g = params.group;
      if (g.empty()) g = group_preset(params.group_name.empty() ? "antipodal" : params.group_name,
                                      params.n1, params.n2);
      return assemble_doubling(params, g);
    }
  }
  throw Error(ErrorKind::internal, "unreachable construction");
}

// ---- groups ------------------------------------------------------------

namespace {

bool same(const GroupElement& a, const GroupElement& b) {
  return (a.omega1 - b.omega1).cwiseAbs().maxCoeff() < 1e-9 &&
         (a.omega2 - b.omega2).cwiseAbs().maxCoeff() < 1e-9;
}

void check_orthogonal(const Mat& w) {
  if (w.rows() != w.cols() ||
      (w.transpose() * w - Mat::Identity(w.rows(), w.cols())).cwiseAbs().maxCoeff() > 1e-9)
    throw Error(ErrorKind::argument, "group element is not orthogonal");
}

}  // namespace

std::vector<GroupElement> group_closure(const std::vector<GroupElement>& generators, int max_order) {
  if (generators.empty()) throw Error(ErrorKind::argument, "group_closure: no generators");
  for (const auto& g : generators) {
    check_orthogonal(g.omega1);
    check_orthogonal(g.omega2);
  }
  const int a = static_cast<int>(generators[0].omega1.rows());
  const int b = static_cast<int>(generators[0].omega2.rows());
  std::vector<GroupElement> out = {{Mat::Identity(a, a), Mat::Identity(b, b)}};
  for (size_t i = 0; i < out.size(); ++i) {
    for (const auto& g : generators) {
      GroupElement h{g.omega1 * out[i].omega1, g.omega2 * out[i].omega2};
      if (std::none_of(out.begin(), out.end(), [&](const GroupElement& e) { return same(e, h); })) {
        out.push_back(h);
        if (static_cast<int>(out.size()) > max_order)
          throw Error(ErrorKind::argument, "group_closure: group is not finite or too large");
      }
    }
  }
  return out;
}

GroupCondition group_condition_check(const std::vector<GroupElement>& group, int n1, int n2) {
  for (const auto& g : group) {
    if (g.omega1.rows() != n1 + 1 || g.omega2.rows() != n2 + 1)
      throw Error(ErrorKind::argument, "group element has the wrong block sizes");
  }
  const std::vector<GroupElement> G = group_closure(group);
  const int d = (n1 + 1) * (n2 + 1);
  Mat P = Mat::Zero(d, d);
  // vec(w1^T a w2) = (w2^T kron w1^T) vec(a)
  for (const auto& g : G) {
    const Mat A = g.omega1.transpose(), B = g.omega2.transpose();
    for (int i = 0; i < n2 + 1; ++i)
      for (int j = 0; j < n2 + 1; ++j)
        P.block(i * (n1 + 1), j * (n1 + 1), n1 + 1, n1 + 1) += B(i, j) * A;
  }
  P /= static_cast<double>(G.size());
  const Vec sv = Eigen::JacobiSVD<Mat>(P).singularValues();
  GroupCondition r;
  r.order = static_cast<int>(G.size());
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) >= 1.0 - 1e-8) ++r.fixed_dimension;
  r.passes = r.fixed_dimension == 0;
  return r;
}

std::vector<GroupElement> group_preset(const std::string& name, int n1, int n2) {
  const Mat I1 = Mat::Identity(n1 + 1, n1 + 1), I2 = Mat::Identity(n2 + 1, n2 + 1);
  Mat T1 = -I1, T2 = -I2;
  T1(0, 0) = 1.0;
  T2(0, 0) = 1.0;
  const GroupElement id{I1, I2}, T{T1, T2};
  if (name == "identity") return {id};
  if (name == "reflection-T") return {id, T};
  if (name == "antipodal") return group_closure({T, {-I1, I2}});
  if (name.rfind("dihedral-", 0) == 0) {
    int k = 0;
    try {
      k = std::stoi(name.substr(9));
    } catch (...) {
      k = 0;
    }
    if (k < 2) throw Error(ErrorKind::configuration, "dihedral-k needs k >= 2");
    Mat R = I1;
    R.topLeftCorner(2, 2) << std::cos(2 * pi / k), -std::sin(2 * pi / k), std::sin(2 * pi / k),
        std::cos(2 * pi / k);
    return group_closure({T, {R, I2}});
  }
  throw Error(ErrorKind::configuration, "unknown group preset '" + name + "'");
}

Orbit torus_orbit(const std::vector<GroupElement>& group, int n1, int n2) {
  const std::vector<GroupElement> G = group_closure(group);
  Orbit o;
  o.group_order = static_cast<int>(G.size());
  const Vec e1 = unit(n1 + 1, 0), e2 = unit(n2 + 1, 0);
  for (const auto& g : G) {
    const Vec a = g.omega1 * e1, b = g.omega2 * e2;
    const bool seen = std::any_of(o.points.begin(), o.points.end(), [&](const auto& p) {
      return (p.first - a).norm() < 1e-9 && (p.second - b).norm() < 1e-9;
    });
    if (!seen) {
      o.points.emplace_back(a, b);
      o.representatives.push_back(g);
    }
  }
  return o;
}

// ---- handle geometry ---------------------------------------------------

Vec torus_geodesic_point(int n1, int n2, double alpha, double t) {
  Vec x = Vec::Zero(n1 + n2 + 2);
  x(0) = std::cos(alpha + t);
  x(n1 + 1) = std::sin(alpha + t);
  return x;
}

Vec clifford_normal(double alpha, const Vec& theta1, const Vec& theta2) {
  Vec v(theta1.size() + theta2.size());
  v << -std::sin(alpha) * theta1, std::cos(alpha) * theta2;
  return v;
}

std::vector<double> torus_geodesic_intersections(int n1, int n2, double alpha) {
  const auto psi = [&](double t) {
    const Vec x = torus_geodesic_point(n1, n2, alpha, t);
    return std::atan2(x.tail(n2 + 1).norm(), x.head(n1 + 1).norm()) - alpha;
  };
  std::vector<double> out;
  const int cells = 4000;
  const double lo = -0.1, hi = 2 * pi - 0.1, h = (hi - lo) / cells;
  for (int i = 0; i < cells; ++i) {
    const double a = lo + i * h, b = a + h;
    if ((psi(a) > 0) != (psi(b) > 0)) {
      double t = bisect(psi, a, b, 1e-15);
      if (t < 0) t += 2 * pi;
      out.push_back(t);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

Assembly assemble_single_sphere(int n, double alpha, int resolution) {
  AssemblyParams p;
  p.n = n;
  p.alpha = alpha;
  p.resolution = resolution;
  Assembly a;
  a.params = p;
  a.alpha_sphere = alpha;
  a.H_target = sphere_mean_curvature(n, alpha);
  a.rho0 = p.rho0;
  BlockSpec s = sphere_block(a, Mat::Identity(n + 2, n + 2), alpha, 0.0);
  s.b_scale = 2.0;
  add_block(a, s);
  finish(a);
  return a;
}

}  // namespace cmcglue
