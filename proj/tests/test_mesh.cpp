#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "slhjb/mesh.hpp"

using namespace slhjb;

namespace {

template <typename Fn>
void expect_error(ErrorKind kind, Fn&& fn) {
  try {
    fn();
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), kind) << e.what();
  }
}

std::vector<double> boundary_angles(const Mesh<2>& mesh) {
  std::vector<double> out;
  for (int v = 0; v < mesh.size(); ++v)
    if (mesh.tags()[v] != BoundaryKind::interior)
      out.push_back(std::atan2(mesh.vertices()[v][1], mesh.vertices()[v][0]));
  std::sort(out.begin(), out.end());
  return out;
}

double total_measure(const Mesh<2>& mesh) {
  double a = 0.0;
  for (int s = 0; s < static_cast<int>(mesh.simplices().size()); ++s) a += mesh.measure(s);
  return a;
}

std::shared_ptr<const RectWithHole> exit_domain() {
  return std::make_shared<RectWithHole>(Vec<2>{-1.0, -0.5}, Vec<2>{1.0, 0.5}, Vec<2>{-0.5, 0.0}, 0.2,
                                        std::vector<RectWithHole::DirichletSpan>{{3, -0.2, 0.2}, {1, -0.2, 0.2}});
}

}  // namespace

TEST(IntervalMesh, VertexCounts) {
  EXPECT_EQ(build_interval_mesh(0.0, 1.0, 0.25).size(), 5);
  EXPECT_EQ(build_interval_mesh(0.0, 1.0, 0.5).size(), 3);
  const Mesh<1> m = build_interval_mesh(0.0, 1.0, 0.3);
  ASSERT_EQ(m.size(), 5);
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(m.vertices()[i][0], 0.25 * i, 1e-15);
  EXPECT_EQ(m.tags().front(), BoundaryKind::oblique);
  EXPECT_EQ(m.tags()[2], BoundaryKind::interior);
}

TEST(IntervalMesh, BadStepThrows) {
  expect_error(ErrorKind::bad_params, [] { build_interval_mesh(0.0, 1.0, 0.0); });
  expect_error(ErrorKind::bad_params, [] { build_interval_mesh(0.0, 1.0, 1.5); });
}

TEST(DiskMesh, BoundaryVerticesOnCircle) {
  const Mesh<2> m = build_disk_mesh({0.0, 0.0}, 1.0, 0.5);
  int boundary = 0;
  for (int v = 0; v < m.size(); ++v)
    if (m.tags()[v] != BoundaryKind::interior) {
      ++boundary;
      EXPECT_NEAR(norm(m.vertices()[v]), 1.0, 1e-12);
    } else {
      EXPECT_LT(norm(m.vertices()[v]), 1.0 - 1e-6);
    }
  EXPECT_GE(boundary, 6);
}

TEST(DiskMesh, HausdorffGapBelowDxSquared) {
  for (double dx : {0.25, 0.125}) {
    const auto angles = boundary_angles(build_disk_mesh({0.0, 0.0}, 1.0, dx));
    double gap = 0.0;
    for (std::size_t k = 0; k < angles.size(); ++k) {
      const double next = k + 1 < angles.size() ? angles[k + 1] : angles[0] + 2.0 * std::numbers::pi;
      gap = std::max(gap, 1.0 - std::cos(0.5 * (next - angles[k])));
    }
    EXPECT_LE(gap, dx * dx) << "dx = " << dx;
  }
}

TEST(DiskMesh, AreaAndShape) {
  const Mesh<2> m = build_disk_mesh({0.0, 0.0}, 1.0, 0.1);
  EXPECT_NEAR(total_measure(m), std::numbers::pi, 0.01);
  EXPECT_GE(m.shape_constant(), 0.1);
  EXPECT_LE(m.mesh_size(), 2.0 * 0.1);
}

TEST(DiskMesh, BadStepThrows) {
  expect_error(ErrorKind::bad_params, [] { build_disk_mesh({0.0, 0.0}, 1.0, 1.0); });
  expect_error(ErrorKind::bad_params, [] { build_disk_mesh({0.0, 0.0}, 1.0, -0.1); });
}

TEST(RectMesh, HoleAndDirichletVertices) {
  const auto domain = exit_domain();
  const Mesh<2> m = build_rect_with_hole_mesh(domain, 0.1);
  bool lower = false, upper = false;
  for (int v = 0; v < m.size(); ++v) {
    const Vec<2>& p = m.vertices()[v];
    const double r = distance(p, Vec<2>{-0.5, 0.0});
    EXPECT_GE(r, 0.2 - 1e-12);
    if (std::abs(r - 0.2) <= 1e-9) {
      EXPECT_NEAR(r, 0.2, 1e-12);
    }
    if (distance(p, Vec<2>{-1.0, -0.2}) < 1e-12) {
      lower = true;
      EXPECT_EQ(m.tags()[v], BoundaryKind::dirichlet);
    }
    if (distance(p, Vec<2>{-1.0, 0.2}) < 1e-12) {
      upper = true;
      EXPECT_EQ(m.tags()[v], BoundaryKind::dirichlet);
    }
  }
  EXPECT_TRUE(lower);
  EXPECT_TRUE(upper);
}

TEST(RectMesh, AreaConverges) {
  const double exact = 2.0 - std::numbers::pi * 0.04;
  const Mesh<2> m = build_rect_with_hole_mesh(exit_domain(), 0.05);
  EXPECT_NEAR(total_measure(m), exact, 0.01);
  EXPECT_LE(m.mesh_size(), 2.0 * 0.05);
}

TEST(RectMesh, BadHoleThrows) {
  expect_error(ErrorKind::bad_params, [] {
    auto d = std::make_shared<RectWithHole>(Vec<2>{-1.0, -0.5}, Vec<2>{1.0, 0.5}, Vec<2>{-0.5, 0.0}, 2.0);
    build_rect_with_hole_mesh(d, 0.1);
  });
  expect_error(ErrorKind::bad_params, [] { build_rect_with_hole_mesh(exit_domain(), 0.0); });
}

TEST(Mesh, AtMostOneBoundaryFacePerSimplex) {
  const Mesh<2> disk = build_disk_mesh({0.0, 0.0}, 1.0, 0.2);
  for (int s = 0; s < static_cast<int>(disk.simplices().size()); ++s) EXPECT_LE(disk.boundary_face_count(s), 1);
  const Mesh<2> rect = build_rect_with_hole_mesh(exit_domain(), 0.1);
  for (int s = 0; s < static_cast<int>(rect.simplices().size()); ++s) EXPECT_LE(rect.boundary_face_count(s), 1);
}

TEST(Mesh, ConstructorValidation) {
  expect_error(ErrorKind::bad_params, [] { Mesh<1>({{0.0}, {1.0}}, {{0, 2}}, {BoundaryKind::oblique, BoundaryKind::oblique}); });
  expect_error(ErrorKind::bad_params, [] { Mesh<1>({{0.0}, {1.0}}, {{0, 1}}, {BoundaryKind::oblique}); });
  expect_error(ErrorKind::bad_params,
               [] { Mesh<2>({{0.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}}, {{0, 1, 2}}, std::vector<BoundaryKind>(3)); });
}

TEST(ProjectToMesh, IdentityInside) {
  const auto disk = std::make_shared<Disk>(Vec<2>{0.0, 0.0}, 1.0);
  const Mesh<2> m = build_disk_mesh({0.0, 0.0}, 1.0, 0.5, 0.1, disk);
  const Vec<2> v = m.vertices()[3];
  EXPECT_EQ(project_to_mesh(m, v), v);
  const Mesh<1> line = build_interval_mesh(0.0, 1.0, 0.25);
  EXPECT_EQ(project_to_mesh(line, Vec<1>{0.3})[0], 0.3);
}

TEST(ProjectToMesh, ArcMidpointMovesBySagitta) {
  const auto disk = std::make_shared<Disk>(Vec<2>{0.0, 0.0}, 1.0);
  const Mesh<2> m = build_disk_mesh({0.0, 0.0}, 1.0, 0.5, 0.1, disk);
  const auto angles = boundary_angles(m);
  const double mid = 0.5 * (angles[0] + angles[1]);
  const Vec<2> x{std::cos(mid), std::sin(mid)};
  const double sagitta = 1.0 - std::cos(0.5 * (angles[1] - angles[0]));
  EXPECT_NEAR(distance(project_to_mesh(m, x), x), sagitta, 1e-12);
}

TEST(ProjectToMesh, OutsideDomainThrows) {
  const auto disk = std::make_shared<Disk>(Vec<2>{0.0, 0.0}, 1.0);
  const Mesh<2> m = build_disk_mesh({0.0, 0.0}, 1.0, 0.5, 0.1, disk);
  expect_error(ErrorKind::outside_domain, [&] { project_to_mesh(m, Vec<2>{1.5, 0.0}); });
  auto interval = std::make_shared<Interval>(0.0, 1.0);
  const Mesh<1> line = build_interval_mesh(interval, 0.25);
  expect_error(ErrorKind::outside_domain, [&] { line.interpolate(std::vector<double>(5, 0.0), Vec<1>{1.2}); });
}

TEST(Locate, VertexGivesLowestIndexSimplex) {
  const Mesh<1> line = build_interval_mesh(0.0, 1.0, 0.5);
  const auto loc = locate(line, Vec<1>{0.5});
  EXPECT_EQ(loc.simplex, 0);
  EXPECT_NEAR(loc.bary[1], 1.0, 1e-15);
  const auto mid = locate(line, Vec<1>{0.25});
  EXPECT_EQ(mid.simplex, 0);
  EXPECT_NEAR(mid.bary[0], 0.5, 1e-15);
  EXPECT_NEAR(mid.bary[1], 0.5, 1e-15);
}

TEST(Locate, SharedVertexInTwoDimensions) {
  const Mesh<2> m = build_disk_mesh({0.0, 0.0}, 1.0, 0.5);
  const auto loc = locate(m, Vec<2>{0.0, 0.0});
  int lowest = -1;
  for (int s = 0; s < static_cast<int>(m.simplices().size()) && lowest < 0; ++s)
    for (int v : m.simplices()[s])
      if (v == 0) lowest = s;
  EXPECT_EQ(loc.simplex, lowest);
  EXPECT_NEAR(*std::max_element(loc.bary.begin(), loc.bary.end()), 1.0, 1e-12);
}

TEST(Locate, BarycenterHasEqualWeights) {
  const Mesh<2> m = build_disk_mesh({0.0, 0.0}, 1.0, 0.25);
  for (int s : {0, 5, 17}) {
    const auto loc = locate(m, m.barycenter(s));
    EXPECT_EQ(loc.simplex, s);
    for (double b : loc.bary) EXPECT_NEAR(b, 1.0 / 3.0, 1e-12);
  }
}

TEST(Locate, FailureOutsideMesh) {
  const Mesh<2> m = build_disk_mesh({0.0, 0.0}, 1.0, 0.5);
  expect_error(ErrorKind::location_failure, [&] { m.locate({3.0, 3.0}); });
}

TEST(Interpolate, ConstantsAndAffineReproduced) {
  const Mesh<2> m = build_disk_mesh({0.0, 0.0}, 1.0, 0.2);
  std::vector<double> c(m.size(), 2.5), affine(m.size());
  for (int v = 0; v < m.size(); ++v) affine[v] = 1.0 + 2.0 * m.vertices()[v][0] - 0.5 * m.vertices()[v][1];
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.65, 0.65);
  for (int k = 0; k < 500; ++k) {
    const Vec<2> x{u(rng), u(rng)};
    EXPECT_NEAR(interpolate(m, c, x), 2.5, 1e-13);
    EXPECT_NEAR(interpolate(m, affine, x), 1.0 + 2.0 * x[0] - 0.5 * x[1], 1e-12);
  }
}

TEST(Interpolate, QuadraticErrorBound) {
  for (double dx : {0.1, 0.05}) {
    const Mesh<1> m = build_interval_mesh(0.0, 1.0, dx);
    std::vector<double> sq(m.size());
    for (int v = 0; v < m.size(); ++v) sq[v] = m.vertices()[v][0] * m.vertices()[v][0];
    double worst = 0.0;
    for (int k = 0; k <= 10000; ++k) {
      const double x = k / 10000.0;
      worst = std::max(worst, std::abs(m.interpolate(sq, Vec<1>{x}) - x * x));
    }
    EXPECT_LE(worst, dx * dx / 4.0 + 1e-15);
    EXPECT_GE(worst, 0.9 * dx * dx / 4.0);
  }
}

TEST(Interpolate, MonotoneAndPartitionOfUnity) {
  const Mesh<2> m = build_disk_mesh({0.0, 0.0}, 1.0, 0.2);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0), ang(0.0, 2.0 * std::numbers::pi);
  std::vector<double> low(m.size()), high(m.size());
  for (int v = 0; v < m.size(); ++v) {
    low[v] = u(rng);
    high[v] = low[v] + u(rng);
  }
  for (int k = 0; k < 10000; ++k) {
    const double r = 0.99 * std::sqrt(u(rng)), th = ang(rng);
    const Vec<2> x{r * std::cos(th), r * std::sin(th)};
    const auto loc = m.locate_projected(x);
    double sum = 0.0;
    for (double b : loc.bary) {
      EXPECT_GE(b, 0.0);
      sum += b;
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
    EXPECT_LE(m.evaluate(low, loc), m.evaluate(high, loc));
  }
}

TEST(Interpolate, WrongSizeThrows) {
  const Mesh<1> m = build_interval_mesh(0.0, 1.0, 0.25);
  expect_error(ErrorKind::bad_params, [&] { m.interpolate({1.0, 2.0}, Vec<1>{0.5}); });
}

TEST(MeshFile, RoundTrip) {
  const Mesh<2> m = build_rect_with_hole_mesh(exit_domain(), 0.2);
  std::stringstream ss;
  m.write(ss);
  const Mesh<2> back = Mesh<2>::read(ss);
  ASSERT_EQ(back.size(), m.size());
  EXPECT_EQ(back.simplices(), m.simplices());
  EXPECT_EQ(back.tags(), m.tags());
  for (int v = 0; v < m.size(); ++v) EXPECT_EQ(back.vertices()[v], m.vertices()[v]);
}

TEST(MeshFile, MalformedInputThrows) {
  std::stringstream bad_magic("mesh 1 1 2 1\n");
  expect_error(ErrorKind::io_error, [&] { Mesh<1>::read(bad_magic); });
  std::stringstream wrong_dim("hjbmesh 1 2 3 1\n");
  expect_error(ErrorKind::io_error, [&] { Mesh<1>::read(wrong_dim); });
  std::stringstream truncated("hjbmesh 1 1 2 1\n0 1\n");
  expect_error(ErrorKind::io_error, [&] { Mesh<1>::read(truncated); });
}
