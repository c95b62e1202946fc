#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "slhjb/geometry.hpp"

using namespace slhjb;

namespace {

const Disk kUnitDisk({0.0, 0.0}, 1.0);
const Interval kUnitInterval(0.0, 1.0);

template <typename Fn>
void expect_error(ErrorKind kind, Fn&& fn) {
  try {
    fn();
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), kind) << e.what();
  }
}

// Independent oracle: for the unit disk and gamma = Rot(angle) n, x = p + d Rot(angle) p
// reduces to |x|^2 = 1 + 2 d cos(angle) + d^2.
double rotated_disk_depth(const Vec<2>& x, double angle) {
  const double c = std::cos(angle);
  return -c + std::sqrt(c * c - 1.0 + dot(x, x));
}

}  // namespace

TEST(SignedDistance, DiskCenterAndBoundary) {
  EXPECT_NEAR(signed_distance(kUnitDisk, Vec<2>{0.0, 0.0}), -1.0, 1e-15);
  EXPECT_NEAR(signed_distance(kUnitDisk, Vec<2>{1.0, 0.0}), 0.0, 1e-15);
  EXPECT_NEAR(signed_distance(kUnitDisk, Vec<2>{0.0, 2.0}), 1.0, 1e-15);
}

TEST(SignedDistance, IntervalOutsideRight) {
  EXPECT_NEAR(signed_distance(kUnitInterval, Vec<1>{1.25}), 0.25, 1e-15);
  EXPECT_NEAR(signed_distance(kUnitInterval, Vec<1>{0.5}), -0.5, 1e-15);
  EXPECT_NEAR(signed_distance(kUnitInterval, Vec<1>{-0.1}), 0.1, 1e-15);
}

TEST(SignedDistance, RectWithHoleFaces) {
  const RectWithHole d({-1.0, -0.5}, {1.0, 0.5}, {-0.5, 0.0}, 0.2);
  EXPECT_NEAR(d.signed_distance({0.5, 0.0}), -0.5, 1e-15);
  EXPECT_NEAR(d.signed_distance({-0.5, 0.3}), -0.1, 1e-15);
  EXPECT_NEAR(d.signed_distance({-0.5, 0.1}), 0.1, 1e-15);
  EXPECT_NEAR(d.signed_distance({-0.5, 0.0}), 0.2, 1e-15);
  EXPECT_NEAR(d.signed_distance({1.1, 0.0}), 0.1, 1e-15);
}

TEST(OutwardNormal, KnownPoints) {
  const Vec<2> n = outward_normal(kUnitDisk, Vec<2>{0.0, 1.0});
  EXPECT_NEAR(n[0], 0.0, 1e-15);
  EXPECT_NEAR(n[1], 1.0, 1e-15);
  EXPECT_EQ(outward_normal(kUnitInterval, Vec<1>{0.0})[0], -1.0);
  EXPECT_EQ(outward_normal(kUnitInterval, Vec<1>{1.0})[0], 1.0);
  const double r = std::sqrt(0.5);
  const Vec<2> diag = outward_normal(kUnitDisk, Vec<2>{r, r});
  EXPECT_NEAR(diag[0], r, 1e-15);
  EXPECT_NEAR(diag[1], r, 1e-15);
}

TEST(OutwardNormal, OffBoundaryThrows) {
  expect_error(ErrorKind::not_on_boundary, [] { outward_normal(kUnitDisk, Vec<2>{0.5, 0.0}); });
  expect_error(ErrorKind::not_on_boundary, [] { outward_normal(kUnitInterval, Vec<1>{0.5}); });
}

TEST(OutwardNormal, UnitLengthOnEllipse) {
  const auto ellipse = make_ellipse({0.0, 0.0}, 1.5, 1.0, TubeRadii{0.6, 0.3, 0.3});
  for (int k = 0; k < 64; ++k) {
    const Vec<2> p = ellipse->point(ellipse->period() * k / 64.0);
    const Vec<2> n = ellipse->outward_normal(p);
    EXPECT_NEAR(norm(n), 1.0, 1e-12);
    EXPECT_GT(dot(n, p), 0.0);
  }
}

TEST(NearestPoint, KnownPoints) {
  const Vec<2> a = nearest_point_projection(kUnitDisk, Vec<2>{0.0, 0.5});
  EXPECT_NEAR(a[0], 0.0, 1e-15);
  EXPECT_NEAR(a[1], 1.0, 1e-15);
  const Vec<2> b = nearest_point_projection(kUnitDisk, Vec<2>{1.2, 0.0});
  EXPECT_NEAR(b[0], 1.0, 1e-15);
  EXPECT_NEAR(b[1], 0.0, 1e-15);
  EXPECT_EQ(nearest_point_projection(kUnitInterval, Vec<1>{0.1})[0], 0.0);
}

TEST(NearestPoint, OutsideTubeThrows) {
  expect_error(ErrorKind::outside_tube, [] { nearest_point_projection(kUnitDisk, Vec<2>{0.0, 0.0}); });
  expect_error(ErrorKind::outside_tube, [] { nearest_point_projection(kUnitDisk, Vec<2>{2.5, 0.0}); });
  expect_error(ErrorKind::outside_tube, [] { nearest_point_projection(kUnitInterval, Vec<1>{0.5}); });
}

TEST(ObliqueProjection, NormalFieldOnDisk) {
  const auto proj = oblique_projection(kUnitDisk, ObliqueField<2>::normal(), {}, Vec<2>{0.0, 1.5});
  EXPECT_NEAR(proj.p[0], 0.0, 1e-15);
  EXPECT_NEAR(proj.p[1], 1.0, 1e-15);
  EXPECT_NEAR(proj.d, 0.5, 1e-15);
}

TEST(ObliqueProjection, RotatedFieldMatchesQuadraticOracle) {
  const double angle = -std::numbers::pi / 6.0;
  const auto field = ObliqueField<2>::rotated_normal(angle);
  const Vec<2> x{1.2, 0.0};
  const auto proj = oblique_projection(kUnitDisk, field, {}, x);
  EXPECT_LE(proj.residual, 1e-10);
  EXPECT_NEAR(norm(proj.p), 1.0, 1e-12);
  EXPECT_NEAR(proj.d, rotated_disk_depth(x, angle), 1e-12);
  const Vec<2> g = field(kUnitDisk, proj.p, {});
  EXPECT_LE(norm(x - proj.p - proj.d * g), 1e-10);
}

TEST(ObliqueProjection, IntervalRight) {
  const auto proj = oblique_projection(kUnitInterval, ObliqueField<1>::normal(), {}, Vec<1>{1.3});
  EXPECT_EQ(proj.p[0], 1.0);
  EXPECT_NEAR(proj.d, 0.3, 1e-15);
}

TEST(ObliqueProjection, InteriorDepthIsNegative) {
  const auto proj = oblique_projection(kUnitDisk, ObliqueField<2>::normal(), {}, Vec<2>{0.8, 0.0});
  EXPECT_NEAR(proj.d, -0.2, 1e-15);
}

TEST(ObliqueProjection, DeepInteriorThrows) {
  expect_error(ErrorKind::outside_tube,
               [] { oblique_projection(kUnitDisk, ObliqueField<2>::normal(), {}, Vec<2>{0.1, 0.0}); });
}

TEST(ObliqueProjection, NewtonOnEllipseMatchesDefinition) {
  const auto ellipse = make_ellipse({0.0, 0.0}, 1.5, 1.0, TubeRadii{0.6, 0.3, 0.3});
  const auto field = ObliqueField<2>::rotated_normal(0.4);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi), depth(-0.25, 0.25);
  for (int k = 0; k < 200; ++k) {
    const Vec<2> p = ellipse->point(angle(rng));
    const double d = depth(rng);
    const Vec<2> x = p + d * field(*ellipse, p, {});
    const auto proj = ellipse->oblique_projection(field, {}, x);
    EXPECT_LE(proj.residual, 1e-10);
    EXPECT_NEAR(proj.d, d, 1e-8);
    EXPECT_LE(distance(proj.p, p), 1e-8);
  }
}

TEST(ObliqueProjection, NormalFieldEqualsNearestPoint) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi), radius(0.6, 1.4);
  for (int k = 0; k < 500; ++k) {
    const double th = angle(rng), r = radius(rng);
    const Vec<2> x{r * std::cos(th), r * std::sin(th)};
    const auto proj = kUnitDisk.oblique_projection(ObliqueField<2>::normal(), {}, x);
    EXPECT_LE(distance(proj.p, kUnitDisk.nearest_point(x)), 1e-12);
    EXPECT_NEAR(proj.d, kUnitDisk.signed_distance(x), 1e-12);
  }
}

TEST(ObliqueProjection, DepthBoundedByDistance) {
  const double angle = std::numbers::pi / 4.0;
  const auto field = ObliqueField<2>::rotated_normal(angle);
  // |d| <= C d(x, boundary) inside the tube; C tends to 1 / cos(angle) at the boundary.
  const double c = 2.0;
  for (double r : {0.8, 0.9, 0.95, 1.05, 1.2, 1.5}) {
    const Vec<2> x{r, 0.3 * r};
    const auto proj = kUnitDisk.oblique_projection(field, {}, x);
    EXPECT_LE(std::abs(proj.d), c * std::abs(kUnitDisk.signed_distance(x)) + 1e-12);
  }
}

TEST(ObliqueField, TangentRotationRejected) {
  expect_error(ErrorKind::bad_params, [] { ObliqueField<2>::rotated_normal(std::numbers::pi / 2); });
  expect_error(ErrorKind::bad_params, [] { ObliqueField<2>::custom({}); });
}

TEST(ObliqueField, Admissibility) {
  const auto ellipse = make_ellipse({0.0, 0.0}, 1.5, 1.0, TubeRadii{0.6, 0.3, 0.3});
  EXPECT_TRUE(oblique_field_admissible(*ellipse, ObliqueField<2>::rotated_normal(1.0), {Control{}}));
  const auto inward = ObliqueField<2>::custom([](const Vec<2>& p, const Control&) { return -1.0 / norm(p) * p; });
  EXPECT_FALSE(oblique_field_admissible(kUnitDisk, inward, {Control{}}));
}

TEST(LayerDistance, KnownPoints) {
  EXPECT_NEAR(layer_distance(kUnitDisk, 0.2, Vec<2>{0.9, 0.0}), 0.1, 1e-15);
  EXPECT_NEAR(layer_distance(kUnitDisk, 0.2, Vec<2>{0.8, 0.0}), 0.0, 1e-15);
  EXPECT_NEAR(layer_distance(kUnitInterval, 0.3, Vec<1>{0.05}), 0.25, 1e-15);
}

TEST(LayerDistance, OutsideLayerThrows) {
  expect_error(ErrorKind::out_of_layer, [] { layer_distance(kUnitDisk, 0.2, Vec<2>{0.5, 0.0}); });
  expect_error(ErrorKind::out_of_layer, [] { layer_distance(kUnitDisk, 0.2, Vec<2>{1.1, 0.0}); });
  expect_error(ErrorKind::out_of_layer, [] { layer_distance(kUnitDisk, 0.9, Vec<2>{0.9, 0.0}); });
}

TEST(LayerDistance, IdentityWithSignedDistance) {
  // For x in the layer, d(x, inner boundary) = delta + sd(x).
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi), depth(0.0, 0.3);
  for (int k = 0; k < 500; ++k) {
    const double th = angle(rng), r = 1.0 - depth(rng);
    const Vec<2> x{r * std::cos(th), r * std::sin(th)};
    EXPECT_NEAR(kUnitDisk.layer_distance(0.3, x), 0.3 + kUnitDisk.signed_distance(x), 1e-12);
  }
}

TEST(RectWithHole, BoundaryKinds) {
  const RectWithHole d({-1.0, -0.5}, {1.0, 0.5}, {-0.5, 0.0}, 0.2, {{3, -0.2, 0.2}, {1, -0.2, 0.2}});
  EXPECT_TRUE(d.has_dirichlet());
  EXPECT_FALSE(d.smooth());
  EXPECT_EQ(d.boundary_kind({1.0, 0.1}), BoundaryKind::dirichlet);
  EXPECT_EQ(d.boundary_kind({-1.0, -0.2}), BoundaryKind::dirichlet);
  EXPECT_EQ(d.boundary_kind({1.0, 0.3}), BoundaryKind::oblique);
  EXPECT_EQ(d.boundary_kind({0.0, 0.5}), BoundaryKind::oblique);
  EXPECT_EQ(d.boundary_kind({-0.3, 0.0}), BoundaryKind::oblique);
}

TEST(RectWithHole, BadGeometryThrows) {
  expect_error(ErrorKind::bad_params, [] { RectWithHole({-1.0, -0.5}, {1.0, 0.5}, {-0.5, 0.0}, 2.0); });
  expect_error(ErrorKind::bad_params,
               [] { RectWithHole({-1.0, -0.5}, {1.0, 0.5}, {-0.5, 0.0}, 0.2, {{4, 0.0, 1.0}}); });
}

TEST(FirstExit, DiskAndInterval) {
  const auto c = kUnitDisk.first_exit({0.0, 0.0}, {2.0, 0.0});
  ASSERT_TRUE(c.has_value());
  EXPECT_NEAR(c->point[0], 1.0, 1e-14);
  EXPECT_NEAR(c->t, 0.5, 1e-14);
  EXPECT_FALSE(kUnitDisk.first_exit({0.0, 0.0}, {0.5, 0.0}).has_value());
  const auto e = kUnitInterval.first_exit({0.5}, {-0.5});
  ASSERT_TRUE(e.has_value());
  EXPECT_EQ(e->point[0], 0.0);
  EXPECT_NEAR(e->t, 0.5, 1e-15);
}

TEST(Domain, InvalidConstruction) {
  expect_error(ErrorKind::bad_params, [] { Interval(1.0, 0.0); });
  expect_error(ErrorKind::bad_params, [] { Disk({0.0, 0.0}, -1.0); });
}
