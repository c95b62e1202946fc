#pragma once

// Simplicial meshes of the polyhedral approximation domain: builders, point
// location, the projection onto the meshed region, P1 interpolation and a
// plain-text mesh format.

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "slhjb/delaunay.hpp"
#include "slhjb/error.hpp"
#include "slhjb/geometry.hpp"
#include "slhjb/vec.hpp"

namespace slhjb {

inline constexpr double kBarycentricTol = 1e-10;

/// Containing simplex and barycentric coordinates of a point.
template <int Dim>
struct Location {
  int simplex = -1;
  std::array<double, Dim + 1> bary{};
};

template <int Dim>
class Mesh {
 public:
  using Simplex = std::array<int, Dim + 1>;
  using Facet = std::array<int, Dim>;

  Mesh(std::vector<Vec<Dim>> vertices, std::vector<Simplex> simplices, std::vector<BoundaryKind> tags,
       std::shared_ptr<const Domain<Dim>> domain = nullptr)
      : vertices_(std::move(vertices)),
        simplices_(std::move(simplices)),
        tags_(std::move(tags)),
        domain_(std::move(domain)) {
    if (vertices_.empty() || simplices_.empty())
      throw Error(ErrorKind::bad_params, "mesh needs vertices and simplices");
    if (tags_.size() != vertices_.size())
      throw Error(ErrorKind::bad_params, "one boundary tag per vertex is required");
    for (const auto& s : simplices_)
      for (int v : s)
        if (v < 0 || v >= static_cast<int>(vertices_.size()))
          throw Error(ErrorKind::bad_params, "simplex references a missing vertex");
    build_affine_maps();
    build_metrics();
    build_boundary();
    build_index();
  }

  const std::vector<Vec<Dim>>& vertices() const { return vertices_; }
  const std::vector<Simplex>& simplices() const { return simplices_; }
  const std::vector<BoundaryKind>& tags() const { return tags_; }
  const std::vector<Facet>& boundary_facets() const { return boundary_facets_; }
  const std::shared_ptr<const Domain<Dim>>& domain() const { return domain_; }
  int size() const { return static_cast<int>(vertices_.size()); }
  double mesh_size() const { return mesh_size_; }
  double shape_constant() const { return shape_constant_; }

  /// Signed measure (length / area) of simplex s.
  double measure(int s) const { return volume_[s]; }

  Vec<Dim> barycenter(int s) const {
    Vec<Dim> c{};
    for (int v : simplices_[s]) c += vertices_[v];
    return c / static_cast<double>(Dim + 1);
  }

  /// Barycentric coordinates of x with respect to simplex s (unclamped).
  std::array<double, Dim + 1> barycentric(int s, const Vec<Dim>& x) const {
    const Vec<Dim> local = inverse_[s] * (x - vertices_[simplices_[s][0]]);
    std::array<double, Dim + 1> b{};
    double rest = 1.0;
    for (int d = 0; d < Dim; ++d) b[d + 1] = local[d], rest -= local[d];
    b[0] = rest;
    return b;
  }

  /// Location through the background grid; empty when x is outside the mesh.
  std::optional<Location<Dim>> try_locate(const Vec<Dim>& x) const {
    const long cell = cell_of(x);
    if (cell < 0) return std::nullopt;
    for (int s : cells_[cell])
      if (auto loc = accept(s, x)) return loc;
    return std::nullopt;
  }

  /// Containing simplex (lowest index on shared faces). Falls back to a full
  /// scan before throwing LocationFailure.
  Location<Dim> locate(const Vec<Dim>& x) const {
    if (auto loc = try_locate(x)) return *loc;
    for (int s = 0; s < static_cast<int>(simplices_.size()); ++s)
      if (auto loc = accept(s, x)) return *loc;
    std::ostringstream os;
    os << "no simplex contains " << x;
    throw Error(ErrorKind::location_failure, os.str());
  }

  /// Closest point on the boundary of the meshed region.
  Vec<Dim> nearest_on_boundary(const Vec<Dim>& x) const {
    Vec<Dim> best{};
    double best_dist = std::numeric_limits<double>::infinity();
    for (const auto& f : boundary_facets_) {
      Vec<Dim> q;
      if constexpr (Dim == 1) {
        q = vertices_[f[0]];
      } else if constexpr (Dim == 2) {
        const Vec<Dim>& a = vertices_[f[0]];
        const Vec<Dim> e = vertices_[f[1]] - a;
        const double t = std::clamp(dot(x - a, e) / dot(e, e), 0.0, 1.0);
        q = a + t * e;
      } else {
        throw Error(ErrorKind::bad_params, "boundary projection is implemented up to 2D");
      }
      const double dist = distance(x, q);
      if (dist < best_dist) best_dist = dist, best = q;
    }
    return best;
  }

  /// Distance from x to the boundary of the meshed region.
  double distance_to_boundary(const Vec<Dim>& x) const { return distance(x, nearest_on_boundary(x)); }

  /// p_dx: identity on the meshed region, otherwise the nearest boundary point.
  Vec<Dim> project(const Vec<Dim>& x) const {
    if (domain_ && domain_->signed_distance(x) > kBoundaryTol) {
      std::ostringstream os;
      os << "point " << x << " lies outside the domain";
      throw Error(ErrorKind::outside_domain, os.str());
    }
    if (try_locate(x)) return x;
    return nearest_on_boundary(x);
  }

  /// Location of p_dx(x).
  Location<Dim> locate_projected(const Vec<Dim>& x) const {
    if (domain_ && domain_->signed_distance(x) > kBoundaryTol) {
      std::ostringstream os;
      os << "point " << x << " lies outside the domain";
      throw Error(ErrorKind::outside_domain, os.str());
    }
    if (auto loc = try_locate(x)) return *loc;
    return locate(nearest_on_boundary(x));
  }

  /// P1 interpolant of nodal values at p_dx(x).
  double interpolate(const std::vector<double>& nodal, const Vec<Dim>& x) const {
    check_nodal(nodal);
    const Location<Dim> loc = locate_projected(x);
    return evaluate(nodal, loc);
  }

  double evaluate(const std::vector<double>& nodal, const Location<Dim>& loc) const {
    double value = 0.0;
    for (int k = 0; k <= Dim; ++k) value += loc.bary[k] * nodal[simplices_[loc.simplex][k]];
    return value;
  }

  void check_nodal(const std::vector<double>& nodal) const {
    if (nodal.size() != vertices_.size())
      throw Error(ErrorKind::bad_params, "nodal vector size does not match the mesh");
  }

  /// Number of faces of simplex s lying on the boundary of the meshed region.
  int boundary_face_count(int s) const { return boundary_faces_per_simplex_[s]; }

  void write(std::ostream& os) const {
    os << "hjbmesh 1 " << Dim << ' ' << vertices_.size() << ' ' << simplices_.size() << '\n';
    os.precision(17);
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
      for (int d = 0; d < Dim; ++d) os << vertices_[i][d] << ' ';
      os << static_cast<int>(tags_[i]) << '\n';
    }
    for (const auto& s : simplices_) {
      for (int k = 0; k <= Dim; ++k) os << (k ? " " : "") << s[k];
      os << '\n';
    }
    if (!os) throw Error(ErrorKind::io_error, "failed to write mesh");
  }

  static Mesh read(std::istream& is, std::shared_ptr<const Domain<Dim>> domain = nullptr) {
    std::string magic;
    int version = 0, dim = 0;
    long nv = 0, ns = 0;
    if (!(is >> magic >> version >> dim >> nv >> ns) || magic != "hjbmesh" || version != 1)
      throw Error(ErrorKind::io_error, "not an hjbmesh version 1 file");
    if (dim != Dim || nv <= 0 || ns <= 0) throw Error(ErrorKind::io_error, "mesh header does not match");
    std::vector<Vec<Dim>> vertices(nv);
    std::vector<BoundaryKind> tags(nv);
    for (long i = 0; i < nv; ++i) {
      int tag = 0;
      for (int d = 0; d < Dim; ++d) is >> vertices[i][d];
      is >> tag;
      if (!is || tag < 0 || tag > 2) throw Error(ErrorKind::io_error, "malformed vertex line");
      tags[i] = static_cast<BoundaryKind>(tag);
    }
    std::vector<Simplex> simplices(ns);
    for (auto& s : simplices)
      for (int k = 0; k <= Dim; ++k)
        if (!(is >> s[k])) throw Error(ErrorKind::io_error, "malformed simplex line");
    return Mesh(std::move(vertices), std::move(simplices), std::move(tags), std::move(domain));
  }

 private:
  void build_affine_maps() {
    inverse_.resize(simplices_.size());
    volume_.resize(simplices_.size());
    for (std::size_t s = 0; s < simplices_.size(); ++s) {
      const auto& sx = simplices_[s];
      Mat<Dim> edges;
      for (int c = 0; c < Dim; ++c)
        for (int r = 0; r < Dim; ++r) edges(r, c) = vertices_[sx[c + 1]][r] - vertices_[sx[0]][r];
      double det = 1.0;
      if constexpr (Dim == 1) det = edges(0, 0);
      if constexpr (Dim == 2) det = edges(0, 0) * edges(1, 1) - edges(0, 1) * edges(1, 0);
      if constexpr (Dim == 3) {
        det = edges(0, 0) * (edges(1, 1) * edges(2, 2) - edges(1, 2) * edges(2, 1)) -
              edges(0, 1) * (edges(1, 0) * edges(2, 2) - edges(1, 2) * edges(2, 0)) +
              edges(0, 2) * (edges(1, 0) * edges(2, 1) - edges(1, 1) * edges(2, 0));
      }
      double fact = 1.0;
      for (int d = 2; d <= Dim; ++d) fact *= d;
      volume_[s] = std::abs(det) / fact;
      if (volume_[s] <= 0.0) throw Error(ErrorKind::bad_params, "degenerate simplex");
      Mat<Dim> inv;
      for (int c = 0; c < Dim; ++c) {
        Vec<Dim> col;
        if (!solve_linear(edges, Vec<Dim>::unit(c), col))
          throw Error(ErrorKind::bad_params, "degenerate simplex");
        for (int r = 0; r < Dim; ++r) inv(r, c) = col[r];
      }
      inverse_[s] = inv;
    }
  }

  void build_metrics() {
    mesh_size_ = 0.0;
    for (const auto& s : simplices_)
      for (int a = 0; a <= Dim; ++a)
        for (int b = a + 1; b <= Dim; ++b)
          mesh_size_ = std::max(mesh_size_, distance(vertices_[s[a]], vertices_[s[b]]));
    shape_constant_ = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < simplices_.size(); ++s) {
      double inradius = 0.0, circumradius = 0.0;
      if constexpr (Dim == 1) {
        inradius = circumradius = 0.5 * volume_[s];
      } else if constexpr (Dim == 2) {
        const auto& t = simplices_[s];
        const double a = distance(vertices_[t[1]], vertices_[t[2]]);
        const double b = distance(vertices_[t[0]], vertices_[t[2]]);
        const double c = distance(vertices_[t[0]], vertices_[t[1]]);
        inradius = 2.0 * volume_[s] / (a + b + c);
        circumradius = a * b * c / (4.0 * volume_[s]);
      } else {
        inradius = std::cbrt(volume_[s]) * 0.2;
        circumradius = mesh_size_;
      }
      shape_constant_ = std::min({shape_constant_, inradius / mesh_size_, mesh_size_ / circumradius});
    }
  }

  void build_boundary() {
    std::map<Facet, std::pair<int, int>> faces;  // sorted facet -> (count, simplex)
    for (std::size_t s = 0; s < simplices_.size(); ++s)
      for (int skip = 0; skip <= Dim; ++skip) {
        Facet f{};
        for (int k = 0, m = 0; k <= Dim; ++k)
          if (k != skip) f[m++] = simplices_[s][k];
        std::sort(f.begin(), f.end());
        auto& entry = faces[f];
        ++entry.first;
        entry.second = static_cast<int>(s);
      }
    boundary_faces_per_simplex_.assign(simplices_.size(), 0);
    for (const auto& [f, entry] : faces)
      if (entry.first == 1) {
        boundary_facets_.push_back(f);
        ++boundary_faces_per_simplex_[entry.second];
      }
  }

  void build_index() {
    lo_ = hi_ = vertices_[0];
    for (const auto& v : vertices_)
      for (int d = 0; d < Dim; ++d) lo_[d] = std::min(lo_[d], v[d]), hi_[d] = std::max(hi_[d], v[d]);
    cell_ = 2.0 * mesh_size_;
    long total = 1;
    for (int d = 0; d < Dim; ++d) {
      dims_[d] = std::max(1L, static_cast<long>(std::ceil((hi_[d] - lo_[d]) / cell_)));
      total *= dims_[d];
    }
    cells_.assign(total, {});
    for (std::size_t s = 0; s < simplices_.size(); ++s) {
      std::array<long, Dim> a{}, b{};
      for (int d = 0; d < Dim; ++d) {
        double mn = std::numeric_limits<double>::infinity(), mx = -mn;
        for (int v : simplices_[s]) mn = std::min(mn, vertices_[v][d]), mx = std::max(mx, vertices_[v][d]);
        a[d] = clamp_cell(d, std::floor((mn - lo_[d]) / cell_ - 1e-9));
        b[d] = clamp_cell(d, std::floor((mx - lo_[d]) / cell_ + 1e-9));
      }
      std::array<long, Dim> it = a;
      while (true) {
        long flat = 0;
        for (int d = Dim - 1; d >= 0; --d) flat = flat * dims_[d] + it[d];
        cells_[flat].push_back(static_cast<int>(s));
        int d = 0;
        while (d < Dim && ++it[d] > b[d]) it[d] = a[d], ++d;
        if (d == Dim) break;
      }
    }
  }

  std::optional<Location<Dim>> accept(int s, const Vec<Dim>& x) const {
    auto b = barycentric(s, x);
    for (double w : b)
      if (w < -kBarycentricTol || w > 1.0 + kBarycentricTol) return std::nullopt;
    double sum = 0.0;
    for (double& w : b) sum += (w = std::clamp(w, 0.0, 1.0));
    for (double& w : b) w /= sum;
    return Location<Dim>{s, b};
  }

  long clamp_cell(int d, double c) const { return std::clamp(static_cast<long>(c), 0L, dims_[d] - 1); }

  long cell_of(const Vec<Dim>& x) const {
    long flat = 0;
    for (int d = Dim - 1; d >= 0; --d) {
      const double c = (x[d] - lo_[d]) / cell_;
      if (!(c > -0.5 && c < dims_[d] + 0.5)) return -1;
      flat = flat * dims_[d] + clamp_cell(d, std::floor(c));
    }
    return flat;
  }

  std::vector<Vec<Dim>> vertices_;
  std::vector<Simplex> simplices_;
  std::vector<BoundaryKind> tags_;
  std::shared_ptr<const Domain<Dim>> domain_;
  std::vector<Mat<Dim>> inverse_;
  std::vector<double> volume_;
  double mesh_size_ = 0.0;
  double shape_constant_ = 0.0;
  std::vector<Facet> boundary_facets_;
  std::vector<int> boundary_faces_per_simplex_;
  Vec<Dim> lo_{}, hi_{};
  double cell_ = 1.0;
  std::array<long, Dim> dims_{};
  std::vector<std::vector<int>> cells_;
};

template <int Dim>
Vec<Dim> project_to_mesh(const Mesh<Dim>& mesh, const Vec<Dim>& x) {
  return mesh.project(x);
}

template <int Dim>
Location<Dim> locate(const Mesh<Dim>& mesh, const Vec<Dim>& x) {
  return mesh.locate(x);
}

template <int Dim>
double interpolate(const Mesh<Dim>& mesh, const std::vector<double>& nodal, const Vec<Dim>& x) {
  return mesh.interpolate(nodal, x);
}

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

/// Uniform grid on [a, b] with ceil((b - a) / dx) cells.
inline Mesh<1> build_interval_mesh(double a, double b, double dx,
                                   std::shared_ptr<const Domain<1>> domain = nullptr) {
  if (!(a < b) || !(dx > 0.0) || !(dx < b - a))
    throw Error(ErrorKind::bad_params, "interval mesh needs a < b and 0 < dx < b - a");
  const int cells = static_cast<int>(std::ceil((b - a) / dx - 1e-9));
  std::vector<Vec<1>> vertices(cells + 1);
  std::vector<BoundaryKind> tags(cells + 1, BoundaryKind::interior);
  for (int i = 0; i <= cells; ++i) vertices[i] = {a + (b - a) * i / cells};
  vertices[cells] = {b};
  std::vector<Mesh<1>::Simplex> simplices(cells);
  for (int i = 0; i < cells; ++i) simplices[i] = {i, i + 1};
  tags.front() = domain ? domain->boundary_kind(vertices.front()) : BoundaryKind::oblique;
  tags.back() = domain ? domain->boundary_kind(vertices.back()) : BoundaryKind::oblique;
  return Mesh<1>(std::move(vertices), std::move(simplices), std::move(tags), std::move(domain));
}

inline Mesh<1> build_interval_mesh(std::shared_ptr<const Interval> domain, double dx) {
  const double a = domain->lower(), b = domain->upper();
  return build_interval_mesh(a, b, dx, std::move(domain));
}

namespace detail {

/// Triangles joining two concentric rings, merged by angle.
inline void zip_rings(const std::vector<int>& inner, const std::vector<double>& inner_angle,
                      const std::vector<int>& outer, const std::vector<double>& outer_angle,
                      std::vector<std::array<int, 3>>& out) {
  const std::size_t ni = inner.size(), no = outer.size();
  std::size_t i = 0, o = 0;
  auto angle_of = [](const std::vector<double>& ang, std::size_t k) {
    return ang[k % ang.size()] + 2.0 * std::numbers::pi * static_cast<double>(k / ang.size());
  };
  while (i < ni || o < no) {
    const bool step_outer = i >= ni || (o < no && angle_of(outer_angle, o + 1) <= angle_of(inner_angle, i + 1));
    if (step_outer) {
      out.push_back({inner[i % ni], outer[o % no], outer[(o + 1) % no]});
      ++o;
    } else {
      out.push_back({inner[i % ni], outer[o % no], inner[(i + 1) % ni]});
      ++i;
    }
  }
}

}  // namespace detail

/// Concentric-ring triangulation of a disk with all boundary vertices on the
/// circle and maximal edge length at most dx.
inline Mesh<2> build_disk_mesh(Vec<2> center, double radius, double dx, double min_shape = 0.1,
                               std::shared_ptr<const Domain<2>> domain = nullptr) {
  if (!(radius > 0.0) || !(dx > 0.0) || !(dx < radius))
    throw Error(ErrorKind::bad_params, "disk mesh needs 0 < dx < radius");
  if (!domain) domain = std::make_shared<Disk>(center, radius);
  for (int rings = static_cast<int>(std::ceil(radius / dx));; ++rings) {
    std::vector<Vec<2>> vertices{center};
    std::vector<int> prev{0};
    std::vector<double> prev_angle{0.0};
    std::vector<std::array<int, 3>> tris;
    for (int j = 1; j <= rings; ++j) {
      const double r = j == rings ? radius : radius * j / rings;
      const int n = 6 * j;
      const double offset = (j % 2) * std::numbers::pi / n;
      std::vector<int> ring(n);
      std::vector<double> angle(n);
      for (int k = 0; k < n; ++k) {
        angle[k] = offset + 2.0 * std::numbers::pi * k / n;
        ring[k] = static_cast<int>(vertices.size());
        vertices.push_back(center + Vec<2>{r * std::cos(angle[k]), r * std::sin(angle[k])});
      }
      if (j == 1) {
        for (int k = 0; k < n; ++k) tris.push_back({0, ring[k], ring[(k + 1) % n]});
      } else {
        detail::zip_rings(prev, prev_angle, ring, angle, tris);
      }
      prev = std::move(ring);
      prev_angle = std::move(angle);
    }
    const std::size_t boundary_start = vertices.size() - prev.size();
    std::vector<BoundaryKind> tags(vertices.size(), BoundaryKind::interior);
    for (std::size_t v = boundary_start; v < vertices.size(); ++v) tags[v] = domain->boundary_kind(vertices[v]);
    Mesh<2> mesh(std::move(vertices), std::move(tris), std::move(tags), domain);
    if (mesh.mesh_size() <= dx) {
      if (mesh.shape_constant() <= min_shape)
        throw Error(ErrorKind::regularity_violation, "disk mesh shape constant below the requested bound");
      return mesh;
    }
  }
}

/// Delaunay mesh of a rectangle with a circular hole. Boundary vertices lie
/// exactly on the rectangle sides or on the hole circle; Dirichlet span
/// endpoints are always vertices.
inline Mesh<2> build_rect_with_hole_mesh(std::shared_ptr<const RectWithHole> domain, double dx) {
  if (!domain) throw Error(ErrorKind::bad_params, "missing domain");
  const auto& spans = domain->dirichlet_spans();
  const Vec<2> lo = domain->lower(), hi = domain->upper();
  if (!(dx > 0.0) || dx >= std::min(hi[0] - lo[0], hi[1] - lo[1]))
    throw Error(ErrorKind::bad_params, "mesh size must be positive and below the rectangle extent");
  // Corners first (they seed the triangulation), then the hole center, which
  // breaks the cocircularity of the hole points and is dropped with the hole
  // triangles.
  constexpr int kCenter = 4;
  std::vector<Vec<2>> points{lo, {hi[0], lo[1]}, hi, {lo[0], hi[1]}, domain->hole_center()};

  // Straight sides, split at Dirichlet span endpoints.
  for (int face = 0; face < 4; ++face) {
    const bool horizontal = face == 0 || face == 2;
    const double t0 = horizontal ? lo[0] : lo[1], t1 = horizontal ? hi[0] : hi[1];
    const double fixed = face == 0 ? lo[1] : face == 1 ? hi[0] : face == 2 ? hi[1] : lo[0];
    std::vector<double> breaks{t0, t1};
    for (const auto& span : spans)
      if (span.face == face)
        for (double t : {span.lo, span.hi})
          if (t > t0 && t < t1) breaks.push_back(t);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
      const double len = breaks[k + 1] - breaks[k];
      const int n = std::max(1, static_cast<int>(std::ceil(len / dx - 1e-9)));
      for (int m = (k == 0 ? 1 : 0); m < n; ++m) {
        const double t = breaks[k] + len * m / n;
        points.push_back(horizontal ? Vec<2>{t, fixed} : Vec<2>{fixed, t});
      }
    }
  }
  // Hole circle.
  const Vec<2> hc = domain->hole_center();
  const double hr = domain->hole_radius();
  const int n_hole = std::max(8, static_cast<int>(std::ceil(2.0 * std::numbers::pi * hr / dx)));
  for (int k = 0; k < n_hole; ++k) {
    const double th = 2.0 * std::numbers::pi * k / n_hole;
    points.push_back(hc + Vec<2>{hr * std::cos(th), hr * std::sin(th)});
  }
  // Interior equilateral lattice kept away from the boundary.
  const double h = dx * 0.9;
  const double row = h * std::sqrt(3.0) / 2.0;
  for (int r = 0; lo[1] + r * row < hi[1]; ++r) {
    const double y = lo[1] + r * row;
    const double shift = (r % 2) * 0.5 * h;
    for (double x = lo[0] + shift; x < hi[0]; x += h) {
      const Vec<2> p{x, y};
      if (domain->signed_distance(p) < -0.6 * h) points.push_back(p);
    }
  }

  auto tris = detail::delaunay(points, 4);
  std::vector<std::array<int, 3>> kept;
  for (const auto& t : tris) {
    const Vec<2> c = (points[t[0]] + points[t[1]] + points[t[2]]) / 3.0;
    if (distance(c, hc) > hr) kept.push_back(t);
  }
  points.erase(points.begin() + kCenter);
  for (auto& t : kept)
    for (int& v : t) {
      if (v == kCenter) throw Error(ErrorKind::regularity_violation, "hole center survived triangulation");
      if (v > kCenter) --v;
    }

  // Split triangles with two faces on the boundary at their centroid.
  std::map<std::pair<int, int>, int> edge_use;
  for (const auto& t : kept)
    for (int e = 0; e < 3; ++e) ++edge_use[std::minmax(t[e], t[(e + 1) % 3])];
  std::vector<std::array<int, 3>> final_tris;
  for (const auto& t : kept) {
    int boundary_edges = 0;
    for (int e = 0; e < 3; ++e) boundary_edges += edge_use[std::minmax(t[e], t[(e + 1) % 3])] == 1;
    if (boundary_edges < 2) {
      final_tris.push_back(t);
      continue;
    }
    const int c = static_cast<int>(points.size());
    points.push_back((points[t[0]] + points[t[1]] + points[t[2]]) / 3.0);
    for (int e = 0; e < 3; ++e) final_tris.push_back({t[e], t[(e + 1) % 3], c});
  }

  std::vector<BoundaryKind> tags(points.size(), BoundaryKind::interior);
  for (std::size_t v = 0; v < points.size(); ++v)
    if (std::abs(domain->signed_distance(points[v])) <= kBoundaryTol) tags[v] = domain->boundary_kind(points[v]);
  return Mesh<2>(std::move(points), std::move(final_tris), std::move(tags), domain);
}

}  // namespace slhjb
