#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "cmcglue/blocks.hpp"
#include "cmcglue/common.hpp"
#include "cmcglue/matching.hpp"

// Assembly of the four approximate solutions as region-labelled sample sets.
// Blocks are placed by ambient isometries; every neck has a chart
// x = frame * K^{-1}(y) with +y1 pointing from its lower to its upper block.

namespace cmcglue {

enum class Construction { delaunay, two_geodesic, handle, doubling };

Construction parse_construction(const std::string& name);
std::string to_string(Construction c);

enum class RegionKind { neck, transition, exterior };

std::string to_string(RegionKind k);

struct RegionLabel {
  RegionKind kind = RegionKind::exterior;
  int block_index = 0;  // index into Assembly::blocks
  int side = 0;         // -1 lower sheet, +1 upper sheet, 0 none
};

// Block pair (omega1, omega2) in O(n1+1) x O(n2+1).
struct GroupElement {
  Mat omega1;
  Mat omega2;
};

Mat ambient_matrix(const GroupElement& g);

struct AssemblyParams {
  int n = 2;
  Construction construction = Construction::delaunay;
  double alpha = 0.0;
  double tau = 0.0;
  std::vector<double> sigma;
  int n1 = 1, n2 = 1;
  int N = 0, m = 0;
  double rho0 = 0.1;
  int resolution = 64;
  // Replaces the solved scale when positive; used for negative controls.
  double eps_override = 0.0;
  bool require_symmetric_sigma = true;
  bool compute_mean_curvature = true;
  // Sample only the meridian Theta = e_1 (enough for axisymmetric norms).
  bool profile_only = false;
  std::vector<GroupElement> group;  // doubling only
  std::string group_name;
  unsigned seed = 1;
};

struct SurfaceSample {
  Vec ambient;
  RegionLabel region;
  Vec parametric;  // neck (s, Theta), transition (r, Theta), sphere (mu, Theta), torus (Theta1, Theta2)
  double weight = 0.0;
  double analytic_H = 0.0;
  double gamma_dist = 0.0;  // distance to the geodesic of the nearest neck
  bool fd_H = false;        // analytic_H came from the finite-difference oracle
};

enum class BlockKind { sphere, neck, torus };

struct BlockSpec {
  BlockKind kind = BlockKind::sphere;
  int index = 0;  // position within its kind
  Mat frame;      // ambient isometry of the block
  double alpha = 0.0;
  // spheres
  double eps = 0.0;
  double b = 0.0;
  double b_scale = 1.0;
  bool shared = false;  // perturbed at four points (two-geodesic)
  int plus_neck = -1, minus_neck = -1;
  // necks
  double eps_bar = 0.0, b_bar = 0.0, tau_gap = 0.0;
  int lower = -1, upper = -1;
  // tori
  int n1 = 0, n2 = 0;
  double arm_sign = 1.0;  // +1: arms on the larger-angle side
  std::shared_ptr<const TorusGreen> green;
};

struct Patch {
  int block_index = 0;
  RegionKind kind = RegionKind::exterior;
  int side = 0;
  int rows = 0, cols = 0;
  bool wrap_cols = true;
  bool wrap_rows = false;
  // false when the direction is an unordered set of unit vectors (n >= 3)
  bool rows_ordered = true;
  bool cols_ordered = true;
  std::vector<int> index;  // rows*cols sample indices, -1 where excluded
  int pole_start = -1, pole_end = -1;
};

struct NamedTransform {
  std::string name;
  Mat matrix;
};

struct Assembly {
  AssemblyParams params;
  NeckSolve neck_solve;
  int N = 0, m = 0;
  double eps = 0.0;
  double rho = 0.0;   // truncation radius
  double rho0 = 0.0;
  double alpha_sphere = 0.0;
  double H_target = 0.0;
  std::vector<BlockSpec> blocks;
  std::vector<SurfaceSample> samples;
  std::vector<Patch> patches;
  std::vector<NamedTransform> symmetry_group;
  int group_order = 1;
  int orbit_size = 1;
  double mesh_edge = 0.0;

  int count(BlockKind kind) const;
};

// C-infinity cut-off: 0 on [0, 1/2], 1 on [2, inf).
double cutoff_eta(double s);
Jet cutoff_eta(Jet s);

// Blend of the catenoid sheet with the sphere sheet in one neck chart.
// side = +1 gives the upper sheet b_bar + eps_bar F(r/eps_bar) blended into
// the reflected sphere image, side = -1 the lower one.
Jet merged_graph(int n, double eps_bar, double b_bar, double alpha, double tau,
                 double eps_sphere, double b_sphere, double yhat_norm, int side = 1);

Assembly assemble(const AssemblyParams& params);
Assembly assemble_delaunay(const AssemblyParams& params);
Assembly assemble_two_geodesic(const AssemblyParams& params);
Assembly assemble_handle(const AssemblyParams& params);
Assembly assemble_doubling(const AssemblyParams& params, const std::vector<GroupElement>& group);

// A lone sphere sampled including its poles (mesh topology checks).
Assembly assemble_single_sphere(int n, double alpha, int resolution);

struct GroupCondition {
  bool passes = false;
  int fixed_dimension = 0;
  int order = 0;
};

std::vector<GroupElement> group_closure(const std::vector<GroupElement>& generators,
                                        int max_order = 4096);
GroupCondition group_condition_check(const std::vector<GroupElement>& group, int n1, int n2);

// Presets: identity, reflection-T, antipodal, dihedral-k (k >= 2).
std::vector<GroupElement> group_preset(const std::string& name, int n1, int n2);

// Points of the torus orbit of p = (cos a e_0, sin a e_0') as (Theta1, Theta2)
// pairs, with one group element mapping p to each.
struct Orbit {
  std::vector<std::pair<Vec, Vec>> points;
  std::vector<GroupElement> representatives;
  int group_order = 0;
};
Orbit torus_orbit(const std::vector<GroupElement>& group, int n1, int n2);

double weight_function(const Assembly& assembly, const SurfaceSample& sample);

struct WeightedNorm {
  double total = 0.0;
  double annular = 0.0;  // weighted part inside Tub_rho0
  double far = 0.0;      // unweighted part outside Tub_rho0
};

WeightedNorm weighted_sup_norm(const Assembly& assembly, const std::vector<double>& field,
                               double delta);

// Analytic mean curvature of the sample's region (finite differences where
// the region has no closed form).
double sample_mean_curvature(const Assembly& assembly, const SurfaceSample& sample);

// Local parametrisation of the assembly around a sample, for the oracle.
struct LocalEmbedding {
  std::function<Vec(const Vec&)> map;
  Vec base;
  Vec step;         // per-parameter finite-difference scale
  Vec normal_hint;  // ambient vector on the outward side
};

LocalEmbedding local_embedding(const Assembly& assembly, const SurfaceSample& sample);

// Handle geometry along gamma_p(t) = cos(a+t) e_0 + sin(a+t) e_0'.
Vec torus_geodesic_point(int n1, int n2, double alpha, double t);
Vec clifford_normal(double alpha, const Vec& theta1, const Vec& theta2);
std::vector<double> torus_geodesic_intersections(int n1, int n2, double alpha);

// ---- mesh export -------------------------------------------------------

struct Mesh {
  std::vector<Vec> vertices;
  std::vector<std::array<int, 3>> faces;
  std::vector<RegionKind> face_region;
};

// Welds the n = 2 patches into one triangulation.
Mesh build_mesh(const Assembly& assembly, double weld_tol = 1e-9);
long euler_characteristic(const Mesh& mesh);

enum class MeshFormat { obj, ply, csv_profile };
enum class Projection { stereo, coords4 };

void export_mesh(const Assembly& assembly, MeshFormat format, Projection projection,
                 const std::string& path);

}  // namespace cmcglue
