#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>

#include "assembly_internal.hpp"
#include "cmcglue/ambient.hpp"

namespace cmcglue {

namespace {

// Welds points closer than tol by hashing onto a grid of cell tol.
class Welder {
 public:
  explicit Welder(double tol) : tol_(tol) {}

  int insert(const Vec& x, std::vector<Vec>& vertices) {
    const Key k = key(x);
    const int d = static_cast<int>(x.size());
    // search the 3^d neighbouring cells
    std::vector<int> off(d, -1);
    while (true) {
      Key c = k;
      for (int i = 0; i < d; ++i) c[i] += off[i];
      const auto it = cells_.find(c);
      if (it != cells_.end())
        for (const int v : it->second)
          if ((vertices[v] - x).norm() <= tol_) return v;
      int i = 0;
      while (i < d && off[i] == 1) off[i++] = -1;
      if (i == d) break;
      ++off[i];
    }
    vertices.push_back(x);
    const int id = static_cast<int>(vertices.size()) - 1;
    cells_[k].push_back(id);
    return id;
  }

 private:
  using Key = std::vector<long long>;
  Key key(const Vec& x) const {
    Key k(x.size());
    for (int i = 0; i < x.size(); ++i) k[i] = static_cast<long long>(std::floor(x(i) / tol_));
    return k;
  }
  double tol_;
  std::map<Key, std::vector<int>> cells_;
};

}  // namespace

Mesh build_mesh(const Assembly& a, double weld_tol) {
  if (a.params.n != 2 || a.params.profile_only)
    throw Error(ErrorKind::unsupported, "build_mesh: triangulations need n = 2 full sampling");
  Mesh m;
  Welder welder(weld_tol);
  std::vector<int> vid(a.samples.size(), -1);
  for (std::size_t i = 0; i < a.samples.size(); ++i)
    vid[i] = welder.insert(a.samples[i].ambient, m.vertices);
  for (const Patch& p : a.patches) {
    if (!p.rows_ordered || !p.cols_ordered) continue;
    const auto at = [&](int i, int j) {
      const int s = p.index[static_cast<std::size_t>(i % p.rows) * p.cols + j % p.cols];
      return s < 0 ? -1 : vid[s];
    };
    const int ri = p.wrap_rows ? p.rows : p.rows - 1;
    const int cj = p.wrap_cols ? p.cols : p.cols - 1;
    for (int i = 0; i < ri; ++i)
      for (int j = 0; j < cj; ++j) {
        const int v00 = at(i, j), v10 = at(i + 1, j), v11 = at(i + 1, j + 1), v01 = at(i, j + 1);
        if (v00 < 0 || v10 < 0 || v11 < 0 || v01 < 0) continue;
        for (const std::array<int, 3> f : {std::array<int, 3>{v00, v10, v11},
                                           std::array<int, 3>{v00, v11, v01}}) {
          if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2]) continue;
          m.faces.push_back(f);
          m.face_region.push_back(p.kind);
        }
      }
  }
  return m;
}

long euler_characteristic(const Mesh& mesh) {
  std::set<int> verts;
  std::set<std::pair<int, int>> edges;
  for (const auto& f : mesh.faces)
    for (int k = 0; k < 3; ++k) {
      verts.insert(f[k]);
      const int u = f[k], v = f[(k + 1) % 3];
      edges.insert({std::min(u, v), std::max(u, v)});
    }
  return static_cast<long>(verts.size()) - static_cast<long>(edges.size()) +
         static_cast<long>(mesh.faces.size());
}

namespace {

// Stereographic projection from the coordinate pole farthest from the surface.
std::vector<Vec> project_stereo(const std::vector<Vec>& pts) {
  const int d = static_cast<int>(pts.front().size());
  Vec best_pole;
  double best = -1.0;
  for (int i = 0; i < d; ++i)
    for (const double sgn : {1.0, -1.0}) {
      const Vec p = sgn * Vec::Unit(d, i);
      double near = 1e300;
      for (const Vec& x : pts) near = std::min(near, (x - p).norm());
      if (near > best) {
        best = near;
        best_pole = p;
      }
    }
  const Mat basis = detail::complement_basis(best_pole);
  std::vector<Vec> out;
  out.reserve(pts.size());
  for (const Vec& x : pts) {
    const double c = x.dot(best_pole);
    out.push_back(basis.transpose() * (x - c * best_pole) / (1.0 - c));
  }
  return out;
}

void write_csv_profile(const Assembly& a, std::ostream& os) {
  const int n = a.params.n;
  os << "param,radius,y1,region,block,zeta,H\n";
  for (const SurfaceSample& s : a.samples) {
    const BlockSpec& b = a.blocks[s.region.block_index];
    if (s.parametric.size() != n + 1 || s.parametric(1) < 1.0 - 1e-12) continue;
    if (b.kind != BlockKind::neck && (b.kind != BlockKind::sphere || b.shared)) continue;
    double radius = 0.0, y1 = 0.0;
    if (b.kind == BlockKind::neck) {
      const Vec y = ambient_to_chart(b.frame, s.ambient);
      y1 = y(0);
      radius = y.tail(n).norm();
    } else {
      const Vec loc = b.frame.transpose() * s.ambient;
      y1 = loc(1);
      radius = loc.tail(n).norm();
    }
    os << s.parametric(0) << ',' << radius << ',' << y1 << ',' << to_string(s.region.kind) << ','
       << s.region.block_index << ',' << s.weight << ',' << s.analytic_H << '\n';
  }
}

}  // namespace

void export_mesh(const Assembly& a, MeshFormat format, Projection projection,
                 const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorKind::argument, "export_mesh: cannot open " + path);
  os << std::setprecision(9);
  if (format == MeshFormat::csv_profile) {
    write_csv_profile(a, os);
    return;
  }
  if (a.params.n != 2)
    throw Error(ErrorKind::unsupported, "export_mesh: OBJ and PLY need n = 2");
  const Mesh m = build_mesh(a);
  const std::vector<Vec> pts =
      projection == Projection::stereo ? project_stereo(m.vertices) : m.vertices;
  const int dim = static_cast<int>(pts.front().size());
  if (format == MeshFormat::obj) {
    for (const Vec& p : pts) {
      os << 'v';
      for (int i = 0; i < dim; ++i) os << ' ' << p(i);
      os << '\n';
    }
    for (const RegionKind kind : {RegionKind::neck, RegionKind::transition, RegionKind::exterior}) {
      os << "g " << to_string(kind) << '\n';
      for (std::size_t f = 0; f < m.faces.size(); ++f)
        if (m.face_region[f] == kind)
          os << "f " << m.faces[f][0] + 1 << ' ' << m.faces[f][1] + 1 << ' ' << m.faces[f][2] + 1
             << '\n';
    }
    return;
  }
  os << "ply\nformat ascii 1.0\nelement vertex " << pts.size() << '\n';
  const char* names[] = {"x", "y", "z", "w"};
  for (int i = 0; i < dim; ++i) os << "property double " << names[i] << '\n';
  os << "element face " << m.faces.size() << '\n'
     << "property list uchar int vertex_indices\nproperty uchar region\nend_header\n";
  for (const Vec& p : pts) {
    for (int i = 0; i < dim; ++i) os << (i ? " " : "") << p(i);
    os << '\n';
  }
  for (std::size_t f = 0; f < m.faces.size(); ++f)
    os << "3 " << m.faces[f][0] << ' ' << m.faces[f][1] << ' ' << m.faces[f][2] << ' '
       << static_cast<int>(m.face_region[f]) << '\n';
}

}  // namespace cmcglue
