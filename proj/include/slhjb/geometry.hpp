#pragma once

// Bounded domains: signed distance, normals, nearest-point and oblique
// projections onto the boundary, and boundary-layer distances.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "slhjb/error.hpp"
#include "slhjb/vec.hpp"

namespace slhjb {

/// A control value (an element of A or B).
using Control = std::vector<double>;

enum class DomainKind { interval, disk, rect_with_hole, parameterized };

/// Boundary condition attached to a boundary point; doubles as the mesh vertex tag.
enum class BoundaryKind { interior = 0, oblique = 1, dirichlet = 2 };

inline constexpr double kBoundaryTol = 1e-9;
inline constexpr double kProjectionTol = 1e-12;
inline constexpr int kProjectionMaxIter = 50;

/// x = p + d * direction with p on the boundary and direction = gamma_b(p).
template <int Dim>
struct ObliqueProjection {
  Vec<Dim> p{};
  double d = 0.0;
  double residual = 0.0;
  int iterations = 0;
  Vec<Dim> direction{};
};

/// First point where a straight segment leaves the closed domain.
template <int Dim>
struct Crossing {
  Vec<Dim> point{};
  double t = 0.0;  ///< segment parameter in [0, 1]
  BoundaryKind kind = BoundaryKind::oblique;
};

/// Radii within which the boundary projections are unique.
struct TubeRadii {
  double nearest = 0.0;  ///< nearest-point projection
  double oblique = 0.0;  ///< oblique projection (must not exceed `nearest`)
  double layer = 0.0;    ///< largest admissible boundary-layer width
};

inline Vec<2> rotate(const Vec<2>& v, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * v[0] - s * v[1], s * v[0] + c * v[1]};
}

template <int Dim>
class Domain;

/// Reflection direction field gamma_b(p) on the boundary.
///
/// `normal` is the outward unit normal; `rotated_normal` rotates it by a fixed
/// angle (2D only); `custom` evaluates user handles. A custom field may carry a
/// Jacobian in p; otherwise Newton solvers fall back to central differences.
template <int Dim>
class ObliqueField {
 public:
  enum class Kind { normal, rotated_normal, custom };
  using Value = std::function<Vec<Dim>(const Vec<Dim>&, const Control&)>;
  using Jacobian = std::function<Mat<Dim>(const Vec<Dim>&, const Control&)>;

  static ObliqueField normal() { return ObliqueField(Kind::normal, 0.0, {}, {}); }

  static ObliqueField rotated_normal(double angle) {
    static_assert(Dim == 2, "rotated normal fields are two-dimensional");
    if (!(std::abs(angle) < std::numbers::pi / 2))
      throw Error(ErrorKind::bad_params, "rotation angle must keep the field non-tangent");
    return ObliqueField(Kind::rotated_normal, angle, {}, {});
  }

  static ObliqueField custom(Value value, Jacobian jacobian = {}) {
    if (!value) throw Error(ErrorKind::bad_params, "custom oblique field needs a value handle");
    return ObliqueField(Kind::custom, 0.0, std::move(value), std::move(jacobian));
  }

  Kind kind() const { return kind_; }
  double angle() const { return angle_; }
  bool has_jacobian() const { return static_cast<bool>(jacobian_); }

  /// gamma_b(p) for a boundary point p.
  Vec<Dim> operator()(const Domain<Dim>& domain, const Vec<Dim>& p, const Control& b) const;

  Mat<Dim> jacobian(const Vec<Dim>& p, const Control& b) const { return jacobian_(p, b); }
  Vec<Dim> evaluate_custom(const Vec<Dim>& p, const Control& b) const { return value_(p, b); }

 private:
  ObliqueField(Kind kind, double angle, Value value, Jacobian jacobian)
      : kind_(kind), angle_(angle), value_(std::move(value)), jacobian_(std::move(jacobian)) {}

  Kind kind_;
  double angle_;
  Value value_;
  Jacobian jacobian_;
};

/// Abstract bounded domain. Sign convention: signed_distance < 0 strictly
/// inside, 0 on the boundary, > 0 outside.
template <int Dim>
class Domain {
 public:
  explicit Domain(TubeRadii radii) : radii_(radii) {
    if (!(radii.oblique > 0 && radii.oblique <= radii.nearest && radii.layer > 0))
      throw Error(ErrorKind::bad_params, "tube radii must satisfy 0 < R <= R_nearest, eta > 0");
  }
  virtual ~Domain() = default;

  virtual DomainKind kind() const = 0;
  virtual double signed_distance(const Vec<Dim>& x) const = 0;
  /// Throws NotOnBoundary when p is farther than kBoundaryTol from the boundary.
  virtual Vec<Dim> outward_normal(const Vec<Dim>& p) const = 0;
  /// Throws OutsideTube beyond the nearest-point radius.
  virtual Vec<Dim> nearest_point(const Vec<Dim>& x) const = 0;
  /// Throws OutsideTube / NoConvergence.
  virtual ObliqueProjection<Dim> oblique_projection(const ObliqueField<Dim>& gamma, const Control& b,
                                                    const Vec<Dim>& x) const = 0;
  /// First exit point of the segment [from, to], if it leaves the closed domain.
  virtual std::optional<Crossing<Dim>> first_exit(const Vec<Dim>& from, const Vec<Dim>& to) const = 0;

  virtual BoundaryKind boundary_kind(const Vec<Dim>&) const { return BoundaryKind::oblique; }
  virtual bool has_dirichlet() const { return false; }
  /// False for boundaries with corners; reflection then repeats per face.
  virtual bool smooth() const { return true; }
  /// How far outside the closed domain oblique projections remain well defined.
  virtual double exterior_reach() const { return radii_.oblique; }

  const TubeRadii& radii() const { return radii_; }
  bool contains(const Vec<Dim>& x) const { return signed_distance(x) <= kBoundaryTol; }

  /// d(x, dD_delta) where D_delta is the set of points deeper than delta.
  /// Computed through the projection p - delta n(p) onto dD_delta.
  double layer_distance(double delta, const Vec<Dim>& x) const {
    if (!(delta >= 0.0 && delta <= radii_.layer))
      throw Error(ErrorKind::out_of_layer, "layer width outside [0, eta]");
    const double sd = signed_distance(x);
    if (sd > kBoundaryTol || -sd > delta + kBoundaryTol)
      throw Error(ErrorKind::out_of_layer, "point is not in the boundary layer");
    if (std::abs(sd) <= 0.0 && delta == 0.0) return 0.0;
    const Vec<Dim> p = nearest_point(x);
    const Vec<Dim> inner = p - delta * outward_normal(p);
    return distance(x, inner);
  }

 protected:
  void check_oblique_reach(double sd) const {
    if (sd < 0 ? -sd >= radii_.oblique : sd >= exterior_reach())
      throw Error(ErrorKind::outside_tube, "point outside the oblique projection tube");
  }

  TubeRadii radii_;
};

template <int Dim>
Vec<Dim> ObliqueField<Dim>::operator()(const Domain<Dim>& domain, const Vec<Dim>& p,
                                       const Control& b) const {
  switch (kind_) {
    case Kind::normal: return domain.outward_normal(p);
    case Kind::rotated_normal:
      if constexpr (Dim == 2) return rotate(domain.outward_normal(p), angle_);
      break;
    case Kind::custom: return value_(p, b);
  }
  return domain.outward_normal(p);
}

// ---------------------------------------------------------------------------
// Interval (a, b)
// ---------------------------------------------------------------------------

class Interval final : public Domain<1> {
 public:
  Interval(double a, double b)
      : Domain<1>(TubeRadii{0.5 * (b - a), 0.5 * (b - a), 0.4 * (b - a)}), a_(a), b_(b) {
    if (!(a < b)) throw Error(ErrorKind::bad_params, "interval needs a < b");
  }

  /// Per-endpoint boundary condition (index 0: left, 1: right).
  void set_endpoint_kind(int endpoint, BoundaryKind kind) { kinds_.at(endpoint) = kind; }

  double lower() const { return a_; }
  double upper() const { return b_; }

  DomainKind kind() const override { return DomainKind::interval; }

  double signed_distance(const Vec<1>& x) const override { return std::max(a_ - x[0], x[0] - b_); }

  Vec<1> outward_normal(const Vec<1>& p) const override {
    if (std::abs(p[0] - a_) <= kBoundaryTol) return {-1.0};
    if (std::abs(p[0] - b_) <= kBoundaryTol) return {1.0};
    throw Error(ErrorKind::not_on_boundary, "point is not an interval endpoint");
  }

  Vec<1> nearest_point(const Vec<1>& x) const override {
    if (std::abs(signed_distance(x)) >= radii_.nearest && x[0] > a_ && x[0] < b_)
      throw Error(ErrorKind::outside_tube, "midpoint has no unique nearest endpoint");
    return {(x[0] - a_ <= b_ - x[0]) ? a_ : b_};
  }

  ObliqueProjection<1> oblique_projection(const ObliqueField<1>& gamma, const Control& b,
                                          const Vec<1>& x) const override {
    const double sd = signed_distance(x);
    check_oblique_reach(sd);
    ObliqueProjection<1> out;
    out.p = {(x[0] - a_ <= b_ - x[0]) ? a_ : b_};
    out.direction = gamma(*this, out.p, b);
    out.d = (x[0] - out.p[0]) / out.direction[0];
    out.residual = std::abs(x[0] - out.p[0] - out.d * out.direction[0]);
    return out;
  }

  std::optional<Crossing<1>> first_exit(const Vec<1>& from, const Vec<1>& to) const override {
    if (signed_distance(to) <= kBoundaryTol) return std::nullopt;
    const int end = to[0] > b_ ? 1 : 0;
    const double wall = end ? b_ : a_;
    const double span = to[0] - from[0];
    const double t = span == 0.0 ? 0.0 : std::clamp((wall - from[0]) / span, 0.0, 1.0);
    return Crossing<1>{{wall}, t, kinds_[end]};
  }

  BoundaryKind boundary_kind(const Vec<1>& p) const override {
    return kinds_[std::abs(p[0] - a_) <= std::abs(p[0] - b_) ? 0 : 1];
  }

  bool has_dirichlet() const override {
    return kinds_[0] == BoundaryKind::dirichlet || kinds_[1] == BoundaryKind::dirichlet;
  }

  double exterior_reach() const override { return std::numeric_limits<double>::infinity(); }

 private:
  double a_, b_;
  std::array<BoundaryKind, 2> kinds_{BoundaryKind::oblique, BoundaryKind::oblique};
};

// ---------------------------------------------------------------------------
// Smooth closed curve in the plane (counterclockwise parameterization)
// ---------------------------------------------------------------------------

/// Domain enclosed by a C^2 closed curve z -> g(z) of period `period`,
/// traversed counterclockwise. Projections use Newton's method on the
/// parameterization; subclasses may override them with closed forms.
class CurveDomain : public Domain<2> {
 public:
  struct Curve {
    std::function<Vec<2>(double)> g;
    std::function<Vec<2>(double)> dg;
    std::function<Vec<2>(double)> ddg;
    double period = 2.0 * std::numbers::pi;
  };

  CurveDomain(Curve curve, TubeRadii radii, int samples = 512)
      : Domain<2>(radii), curve_(std::move(curve)), samples_(samples) {
    if (!curve_.g || !curve_.dg || !curve_.ddg)
      throw Error(ErrorKind::bad_params, "curve domain needs g, g' and g''");
  }

  DomainKind kind() const override { return DomainKind::parameterized; }

  Vec<2> point(double z) const { return curve_.g(z); }
  Vec<2> tangent(double z) const { return curve_.dg(z); }
  double period() const { return curve_.period; }

  /// Unit outward normal at parameter z (right of the counterclockwise tangent).
  Vec<2> normal_at(double z) const {
    const Vec<2> t = curve_.dg(z);
    return Vec<2>{t[1], -t[0]} / norm(t);
  }

  /// d/dz of normal_at(z).
  Vec<2> normal_derivative(double z) const {
    const Vec<2> t = curve_.dg(z), tt = curve_.ddg(z);
    const double len = norm(t);
    const Vec<2> rt{t[1], -t[0]}, rtt{tt[1], -tt[0]};
    return rtt / len - rt * (dot(t, tt) / (len * len * len));
  }

  /// Parameter of the nearest boundary point (sampling + Newton).
  double nearest_parameter(const Vec<2>& x) const {
    double best_z = 0.0, best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < samples_; ++k) {
      const double z = curve_.period * k / samples_;
      const double dist = distance(curve_.g(z), x);
      if (dist < best) best = dist, best_z = z;
    }
    double z = best_z;
    for (int it = 0; it < kProjectionMaxIter; ++it) {
      const Vec<2> r = curve_.g(z) - x, t = curve_.dg(z), tt = curve_.ddg(z);
      const double f = dot(r, t);
      double df = dot(t, t) + dot(r, tt);
      if (df <= 0.0) df = dot(t, t);
      const double step = f / df;
      z -= step;
      if (std::abs(step) <= 1e-15 * (1.0 + std::abs(z))) break;
    }
    return z;
  }

  Vec<2> nearest_point_newton(const Vec<2>& x) const { return curve_.g(nearest_parameter(x)); }

  double signed_distance(const Vec<2>& x) const override {
    const double z = nearest_parameter(x);
    const Vec<2> r = x - curve_.g(z);
    const double dist = norm(r);
    return dot(r, normal_at(z)) >= 0.0 ? dist : -dist;
  }

  Vec<2> outward_normal(const Vec<2>& p) const override {
    const double z = nearest_parameter(p);
    if (distance(curve_.g(z), p) > kBoundaryTol)
      throw Error(ErrorKind::not_on_boundary, "point is not on the curve");
    return normal_at(z);
  }

  Vec<2> nearest_point(const Vec<2>& x) const override {
    if (std::abs(signed_distance(x)) >= radii_.nearest)
      throw Error(ErrorKind::outside_tube, "point outside the nearest-point tube");
    return nearest_point_newton(x);
  }

  ObliqueProjection<2> oblique_projection(const ObliqueField<2>& gamma, const Control& b,
                                          const Vec<2>& x) const override {
    return oblique_projection_newton(gamma, b, x);
  }

  /// Newton iteration on G(z, lambda) = g(z) + lambda * gamma_b(g(z)) = x,
  /// started from the nearest-point parameter and the signed distance.
  ObliqueProjection<2> oblique_projection_newton(const ObliqueField<2>& gamma, const Control& b,
                                                 const Vec<2>& x) const {
    const double sd = signed_distance(x);
    check_oblique_reach(sd);
    double z = nearest_parameter(x);
    double lambda = sd;
    auto residual_at = [&](double zz, double ll) {
      return curve_.g(zz) + ll * direction_at(gamma, b, zz) - x;
    };
    Vec<2> res = residual_at(z, lambda);
    double res_norm = norm(res);
    int it = 0;
    while (res_norm > kProjectionTol) {
      if (++it > kProjectionMaxIter)
        throw Error(ErrorKind::no_convergence, "oblique projection did not converge");
      const Vec<2> dir = direction_at(gamma, b, z);
      const Vec<2> col_z = curve_.dg(z) + lambda * direction_derivative(gamma, b, z);
      Mat<2> jac;
      jac(0, 0) = col_z[0], jac(0, 1) = dir[0];
      jac(1, 0) = col_z[1], jac(1, 1) = dir[1];
      Vec<2> step;
      if (!solve_linear(jac, -res, step))
        throw Error(ErrorKind::no_convergence, "singular oblique projection Jacobian");
      double scale = 1.0;
      for (int ls = 0; ls < 30; ++ls, scale *= 0.5) {
        const Vec<2> trial = residual_at(z + scale * step[0], lambda + scale * step[1]);
        if (norm(trial) < res_norm || ls == 29) {
          z += scale * step[0];
          lambda += scale * step[1];
          res = trial;
          res_norm = norm(trial);
          break;
        }
      }
    }
    ObliqueProjection<2> out;
    out.p = curve_.g(z);
    out.d = lambda;
    out.direction = direction_at(gamma, b, z);
    out.residual = norm(x - out.p - lambda * out.direction);
    out.iterations = it;
    return out;
  }

  std::optional<Crossing<2>> first_exit(const Vec<2>& from, const Vec<2>& to) const override {
    if (signed_distance(to) <= kBoundaryTol) return std::nullopt;
    constexpr int kScan = 64;
    double lo = 0.0, hi = 1.0;
    for (int k = 1; k <= kScan; ++k) {
      const double t = static_cast<double>(k) / kScan;
      if (signed_distance(from + t * (to - from)) > 0.0) {
        hi = t;
        break;
      }
      lo = t;
    }
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (signed_distance(from + mid * (to - from)) > 0.0 ? hi : lo) = mid;
    }
    const Vec<2> q = from + hi * (to - from);
    return Crossing<2>{q, hi, boundary_kind(q)};
  }

 protected:
  Vec<2> direction_at(const ObliqueField<2>& gamma, const Control& b, double z) const {
    switch (gamma.kind()) {
      case ObliqueField<2>::Kind::normal: return normal_at(z);
      case ObliqueField<2>::Kind::rotated_normal: return rotate(normal_at(z), gamma.angle());
      case ObliqueField<2>::Kind::custom: break;
    }
    return gamma.evaluate_custom(curve_.g(z), b);
  }

  Vec<2> direction_derivative(const ObliqueField<2>& gamma, const Control& b, double z) const {
    switch (gamma.kind()) {
      case ObliqueField<2>::Kind::normal: return normal_derivative(z);
      case ObliqueField<2>::Kind::rotated_normal:
        return rotate(normal_derivative(z), gamma.angle());
      case ObliqueField<2>::Kind::custom: break;
    }
    if (gamma.has_jacobian()) return gamma.jacobian(curve_.g(z), b) * curve_.dg(z);
    constexpr double h = 1e-6;
    return (gamma.evaluate_custom(curve_.g(z + h), b) - gamma.evaluate_custom(curve_.g(z - h), b)) /
           (2.0 * h);
  }

  Curve curve_;
  int samples_;
};

// ---------------------------------------------------------------------------
// Disk
// ---------------------------------------------------------------------------

/// Disk with closed-form distances and projections. For normal and
/// rotated-normal reflection fields the oblique projection of an exterior
/// point is unique at any distance, so exterior reach is unbounded there.
class Disk final : public CurveDomain {
 public:
  Disk(Vec<2> center, double radius)
      : CurveDomain(make_curve(center, radius), TubeRadii{radius, 0.5 * radius, 0.5 * radius}),
        center_(center),
        radius_(radius) {
    if (!(radius > 0)) throw Error(ErrorKind::bad_params, "disk radius must be positive");
  }

  DomainKind kind() const override { return DomainKind::disk; }
  const Vec<2>& center() const { return center_; }
  double radius() const { return radius_; }

  double signed_distance(const Vec<2>& x) const override { return distance(x, center_) - radius_; }

  Vec<2> outward_normal(const Vec<2>& p) const override {
    if (std::abs(signed_distance(p)) > kBoundaryTol)
      throw Error(ErrorKind::not_on_boundary, "point is not on the circle");
    return (p - center_) / radius_;
  }

  Vec<2> nearest_point(const Vec<2>& x) const override {
    const double r = distance(x, center_);
    if (std::abs(r - radius_) >= radii_.nearest || r == 0.0)
      throw Error(ErrorKind::outside_tube, "point outside the nearest-point tube");
    return center_ + (x - center_) * (radius_ / r);
  }

  ObliqueProjection<2> oblique_projection(const ObliqueField<2>& gamma, const Control& b,
                                          const Vec<2>& x) const override {
    if (gamma.kind() == ObliqueField<2>::Kind::custom) return oblique_projection_newton(gamma, b, x);
    const double sd = signed_distance(x);
    check_oblique_reach(sd);
    // x - c = (r I + d Rot) u with |u| = 1  =>  |x - c|^2 = r^2 + 2 r d cos + d^2.
    const double angle = gamma.kind() == ObliqueField<2>::Kind::rotated_normal ? gamma.angle() : 0.0;
    const double cs = std::cos(angle), sn = std::sin(angle);
    const Vec<2> rel = x - center_;
    const double rr = dot(rel, rel);
    const double disc = radius_ * radius_ * (cs * cs - 1.0) + rr;
    if (disc < 0.0) throw Error(ErrorKind::outside_tube, "no oblique projection for this point");
    const double d = -radius_ * cs + std::sqrt(disc);
    // Solve (r I + d Rot) u = rel, Rot = [[cs, -sn], [sn, cs]].
    const double a = radius_ + d * cs, s = d * sn;
    const double det = a * a + s * s;
    const Vec<2> u{(a * rel[0] + s * rel[1]) / det, (-s * rel[0] + a * rel[1]) / det};
    ObliqueProjection<2> out;
    out.p = center_ + radius_ * u;
    out.d = d;
    out.direction = rotate(u, angle);
    out.residual = norm(x - out.p - d * out.direction);
    return out;
  }

  std::optional<Crossing<2>> first_exit(const Vec<2>& from, const Vec<2>& to) const override {
    if (signed_distance(to) <= kBoundaryTol) return std::nullopt;
    // Largest root of |from - c + t (to - from)| = r: the segment leaves there.
    const Vec<2> f = from - center_, dir = to - from;
    const double qa = dot(dir, dir), qb = 2.0 * dot(f, dir), qc = dot(f, f) - radius_ * radius_;
    const double disc = std::max(0.0, qb * qb - 4.0 * qa * qc);
    const double t = std::clamp((-qb + std::sqrt(disc)) / (2.0 * qa), 0.0, 1.0);
    const Vec<2> q = from + t * dir;
    return Crossing<2>{q, t, boundary_kind(q)};
  }

  double exterior_reach() const override { return std::numeric_limits<double>::infinity(); }

 private:
  static Curve make_curve(Vec<2> c, double r) {
    Curve curve;
    curve.g = [c, r](double z) { return c + Vec<2>{r * std::cos(z), r * std::sin(z)}; };
    curve.dg = [r](double z) { return Vec<2>{-r * std::sin(z), r * std::cos(z)}; };
    curve.ddg = [r](double z) { return Vec<2>{-r * std::cos(z), -r * std::sin(z)}; };
    return curve;
  }

  Vec<2> center_;
  double radius_;
};

/// Axis-aligned ellipse centered at `center`, handy as a generic curved domain.
inline std::shared_ptr<CurveDomain> make_ellipse(Vec<2> center, double ax, double ay, TubeRadii radii) {
  CurveDomain::Curve curve;
  curve.g = [=](double z) { return center + Vec<2>{ax * std::cos(z), ay * std::sin(z)}; };
  curve.dg = [=](double z) { return Vec<2>{-ax * std::sin(z), ay * std::cos(z)}; };
  curve.ddg = [=](double z) { return Vec<2>{-ax * std::cos(z), -ay * std::sin(z)}; };
  return std::make_shared<CurveDomain>(std::move(curve), radii);
}

// ---------------------------------------------------------------------------
// Rectangle with a circular hole
// ---------------------------------------------------------------------------

/// (xmin, xmax) x (ymin, ymax) minus a closed disk strictly inside it.
///
/// Faces: 0 bottom, 1 right, 2 top, 3 left, 4 hole. The boundary has corners,
/// so projections are computed per face; at a corner the face with the
/// smaller index wins. Only the normal reflection field is supported.
class RectWithHole final : public Domain<2> {
 public:
  /// Dirichlet span on a straight face, in that face's tangential coordinate.
  struct DirichletSpan {
    int face;
    double lo, hi;
  };

  RectWithHole(Vec<2> lower, Vec<2> upper, Vec<2> hole_center, double hole_radius,
               std::vector<DirichletSpan> dirichlet = {})
      : Domain<2>(TubeRadii{0.5 * hole_radius, 0.5 * hole_radius, 0.5 * hole_radius}),
        lo_(lower),
        hi_(upper),
        hc_(hole_center),
        hr_(hole_radius),
        dirichlet_(std::move(dirichlet)) {
    const double gap = std::min({hc_[0] - lo_[0], hi_[0] - hc_[0], hc_[1] - lo_[1], hi_[1] - hc_[1]});
    if (!(lo_[0] < hi_[0] && lo_[1] < hi_[1] && hr_ > 0 && gap > hr_))
      throw Error(ErrorKind::bad_params, "hole must lie strictly inside the rectangle");
    for (const auto& span : dirichlet_)
      if (span.face < 0 || span.face > 3 || !(span.lo <= span.hi))
        throw Error(ErrorKind::bad_params, "Dirichlet spans must lie on straight faces");
  }

  DomainKind kind() const override { return DomainKind::rect_with_hole; }
  bool smooth() const override { return false; }
  bool has_dirichlet() const override { return !dirichlet_.empty(); }
  double exterior_reach() const override { return std::numeric_limits<double>::infinity(); }

  const Vec<2>& lower() const { return lo_; }
  const Vec<2>& upper() const { return hi_; }
  const Vec<2>& hole_center() const { return hc_; }
  double hole_radius() const { return hr_; }
  const std::vector<DirichletSpan>& dirichlet_spans() const { return dirichlet_; }

  double signed_distance(const Vec<2>& x) const override {
    const double qx = std::max(lo_[0] - x[0], x[0] - hi_[0]);
    const double qy = std::max(lo_[1] - x[1], x[1] - hi_[1]);
    const double outside = std::hypot(std::max(qx, 0.0), std::max(qy, 0.0));
    const double rect = outside > 0.0 ? outside : std::max(qx, qy);
    return std::max(rect, hr_ - distance(x, hc_));
  }

  static Vec<2> face_normal_straight(int face) {
    switch (face) {
      case 0: return {0.0, -1.0};
      case 1: return {1.0, 0.0};
      case 2: return {0.0, 1.0};
      default: return {-1.0, 0.0};
    }
  }

  /// Closest point on face `face` (clamped to the face).
  Vec<2> face_foot(int face, const Vec<2>& x) const {
    switch (face) {
      case 0: return {std::clamp(x[0], lo_[0], hi_[0]), lo_[1]};
      case 1: return {hi_[0], std::clamp(x[1], lo_[1], hi_[1])};
      case 2: return {std::clamp(x[0], lo_[0], hi_[0]), hi_[1]};
      case 3: return {lo_[0], std::clamp(x[1], lo_[1], hi_[1])};
      default: {
        const double r = distance(x, hc_);
        const Vec<2> u = r > 0.0 ? (x - hc_) / r : Vec<2>{1.0, 0.0};
        return hc_ + hr_ * u;
      }
    }
  }

  /// Index of the face closest to x (smaller index on ties).
  int nearest_face(const Vec<2>& x) const {
    int best_face = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int f = 0; f < 5; ++f) {
      const double dist = distance(face_foot(f, x), x);
      if (dist < best - 1e-14) best = dist, best_face = f;
    }
    return best_face;
  }

  Vec<2> outward_normal(const Vec<2>& p) const override {
    for (int f = 0; f < 5; ++f)
      if (distance(face_foot(f, p), p) <= kBoundaryTol) return face_normal(f, p);
    throw Error(ErrorKind::not_on_boundary, "point is not on the boundary");
  }

  Vec<2> nearest_point(const Vec<2>& x) const override {
    if (std::abs(signed_distance(x)) >= radii_.nearest && contains(x))
      throw Error(ErrorKind::outside_tube, "point outside the nearest-point tube");
    return face_foot(nearest_face(x), x);
  }

  /// Projection along the normal of the nearest face. In the exterior corner
  /// regions the foot lies on the face's supporting line, past the corner.
  ObliqueProjection<2> oblique_projection(const ObliqueField<2>& gamma, const Control&,
                                          const Vec<2>& x) const override {
    if (gamma.kind() != ObliqueField<2>::Kind::normal)
      throw Error(ErrorKind::bad_params, "rectangle-with-hole supports normal reflection only");
    const double sd = signed_distance(x);
    check_oblique_reach(sd);
    const int face = nearest_face(x);
    ObliqueProjection<2> out;
    if (face == 4) {
      out.p = face_foot(4, x);
      out.direction = face_normal(4, out.p);
      out.d = hr_ - distance(x, hc_);
    } else {
      out.direction = face_normal_straight(face);
      const Vec<2> anchor = face == 0 || face == 3 ? lo_ : hi_;
      out.d = dot(x - anchor, out.direction);
      out.p = x - out.d * out.direction;
    }
    out.residual = norm(x - out.p - out.d * out.direction);
    return out;
  }

  std::optional<Crossing<2>> first_exit(const Vec<2>& from, const Vec<2>& to) const override {
    if (signed_distance(to) <= kBoundaryTol) return std::nullopt;
    const Vec<2> dir = to - from;
    double best_t = std::numeric_limits<double>::infinity();
    int best_face = -1;
    auto consider = [&](double t, int face) {
      if (t >= -1e-12 && t <= 1.0 + 1e-12 && t < best_t) best_t = t, best_face = face;
    };
    // Straight faces: leaving through the supporting line within the face extent.
    const double walls[4] = {lo_[1], hi_[0], hi_[1], lo_[0]};
    for (int f = 0; f < 4; ++f) {
      const int axis = (f == 0 || f == 2) ? 1 : 0;
      const double outward = (f == 1 || f == 2) ? 1.0 : -1.0;
      if (dir[axis] * outward <= 0.0) continue;
      const double t = (walls[f] - from[axis]) / dir[axis];
      const Vec<2> q = from + t * dir;
      const int other = 1 - axis;
      if (q[other] >= lo_[other] - 1e-12 && q[other] <= hi_[other] + 1e-12) consider(t, f);
    }
    // Hole: entering the disk is leaving the domain.
    const Vec<2> f0 = from - hc_;
    const double qa = dot(dir, dir), qb = 2.0 * dot(f0, dir), qc = dot(f0, f0) - hr_ * hr_;
    const double disc = qb * qb - 4.0 * qa * qc;
    if (qa > 0.0 && disc >= 0.0) consider((-qb - std::sqrt(disc)) / (2.0 * qa), 4);
    if (best_face < 0) {
      // Start point already outside: exit happens immediately.
      best_t = 0.0;
      best_face = nearest_face(from);
    }
    const double t = std::clamp(best_t, 0.0, 1.0);
    const Vec<2> q = face_foot(best_face, from + t * dir);
    return Crossing<2>{q, t, kind_on_face(best_face, q)};
  }

  BoundaryKind boundary_kind(const Vec<2>& p) const override {
    BoundaryKind kind = BoundaryKind::oblique;
    for (int f = 0; f < 4; ++f)
      if (distance(face_foot(f, p), p) <= kBoundaryTol && kind_on_face(f, p) == BoundaryKind::dirichlet)
        kind = BoundaryKind::dirichlet;
    return kind;
  }

 private:
  Vec<2> face_normal(int face, const Vec<2>& p) const {
    return face == 4 ? (hc_ - p) / hr_ : face_normal_straight(face);
  }

  BoundaryKind kind_on_face(int face, const Vec<2>& q) const {
    if (face == 4) return BoundaryKind::oblique;
    const double tangential = (face == 0 || face == 2) ? q[0] : q[1];
    for (const auto& span : dirichlet_)
      if (span.face == face && tangential >= span.lo - kBoundaryTol && tangential <= span.hi + kBoundaryTol)
        return BoundaryKind::dirichlet;
    return BoundaryKind::oblique;
  }

  Vec<2> lo_, hi_, hc_;
  double hr_;
  std::vector<DirichletSpan> dirichlet_;
};

// ---------------------------------------------------------------------------
// Free-function surface
// ---------------------------------------------------------------------------

template <int Dim>
double signed_distance(const Domain<Dim>& domain, const Vec<Dim>& x) {
  return domain.signed_distance(x);
}

template <int Dim>
Vec<Dim> outward_normal(const Domain<Dim>& domain, const Vec<Dim>& p) {
  return domain.outward_normal(p);
}

template <int Dim>
Vec<Dim> nearest_point_projection(const Domain<Dim>& domain, const Vec<Dim>& x) {
  return domain.nearest_point(x);
}

template <int Dim>
ObliqueProjection<Dim> oblique_projection(const Domain<Dim>& domain, const ObliqueField<Dim>& gamma,
                                          const Control& b, const Vec<Dim>& x) {
  return domain.oblique_projection(gamma, b, x);
}

template <int Dim>
double layer_distance(const Domain<Dim>& domain, double delta, const Vec<Dim>& x) {
  return domain.layer_distance(delta, x);
}

/// Checks |gamma| = 1 and <n, gamma> > 0 at `samples` boundary points of a curve domain.
inline bool oblique_field_admissible(const CurveDomain& domain, const ObliqueField<2>& gamma,
                                     const std::vector<Control>& controls, int samples = 256) {
  for (const Control& b : controls)
    for (int k = 0; k < samples; ++k) {
      const Vec<2> p = domain.point(domain.period() * k / samples);
      const Vec<2> g = gamma(domain, p, b);
      if (std::abs(norm(g) - 1.0) > 1e-12 || dot(g, domain.outward_normal(p)) <= 0.0) return false;
    }
  return true;
}

}  // namespace slhjb
