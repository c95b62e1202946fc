#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "slhjb/problems.hpp"

using namespace slhjb;

namespace {

constexpr double kPi = std::numbers::pi;

// Central differences of the exact value; independent of the hand-coded derivatives.
template <int Dim>
double fd_time(const ExactSolution<Dim>& u, double t, const Vec<Dim>& x, double h = 1e-5) {
  return (u.value(t + h, x) - u.value(t - h, x)) / (2.0 * h);
}

template <int Dim>
Vec<Dim> fd_gradient(const ExactSolution<Dim>& u, double t, const Vec<Dim>& x, double h = 1e-5) {
  Vec<Dim> g{};
  for (int d = 0; d < Dim; ++d) {
    Vec<Dim> e{};
    e[d] = h;
    g[d] = (u.value(t, x + e) - u.value(t, x - e)) / (2.0 * h);
  }
  return g;
}

template <int Dim>
Mat<Dim> fd_hessian(const ExactSolution<Dim>& u, double t, const Vec<Dim>& x, double h = 1e-4) {
  Mat<Dim> m;
  for (int i = 0; i < Dim; ++i)
    for (int j = 0; j < Dim; ++j) {
      Vec<Dim> ei{}, ej{};
      ei[i] = h;
      ej[j] = h;
      m(i, j) = (u.value(t, x + ei + ej) - u.value(t, x + ei - ej) - u.value(t, x - ei + ej) +
                 u.value(t, x - ei - ej)) /
                (4.0 * h * h);
    }
  return m;
}

/// max over the listed controls of <a, p>.
double discrete_norm(const std::vector<Control>& controls, const Vec<2>& p) {
  double best = -1e300;
  for (const auto& a : controls) best = std::max(best, a[0] * p[0] + a[1] * p[1]);
  return best;
}

}  // namespace

TEST(Test1, KnownValues) {
  const auto b = make_test1(0.0);
  EXPECT_NEAR(b.exact->value(1.0, Vec<1>{0.0}), 1.0, 1e-15);
  EXPECT_NEAR(b.exact->value(0.0, Vec<1>{0.0}), 1.5, 1e-15);
  EXPECT_NEAR(b.exact->value(0.0, Vec<1>{1.0}), 1.5 * (1.0 + std::exp(-1.0)), 1e-15);
}

TEST(Test1, PdeResidualFromDifferences) {
  for (double eps : {0.0, 0.05, 0.01}) {
    const auto b = make_test1(eps);
    const auto& u = *b.exact;
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> ut(0.05, 0.95), ux(0.02, 0.98);
    for (int k = 0; k < 1000; ++k) {
      const double t = ut(rng);
      const Vec<1> x{ux(rng)};
      const double uxx = fd_hessian(u, t, x, 1e-4)(0, 0);
      const double residual =
          -fd_time(u, t, x) - eps * uxx + fd_gradient(u, t, x)[0] - b.problem.running_cost(t, x, {});
      // Second differences of a profile with an eps-wide layer lose accuracy near x = 1.
      EXPECT_LE(std::abs(residual), eps > 0.0 ? 2e-3 : 1e-8) << "eps = " << eps << ", x = " << x[0];
    }
  }
}

TEST(Test1, HandCodedDerivatives) {
  const auto b = make_test1(0.05);
  const auto& u = *b.exact;
  for (double x : {0.1, 0.5, 0.9})
    for (double t : {0.2, 0.7}) {
      EXPECT_NEAR(u.time_derivative(t, Vec<1>{x}), fd_time(u, t, Vec<1>{x}), 1e-8);
      EXPECT_NEAR(u.gradient(t, Vec<1>{x})[0], fd_gradient(u, t, Vec<1>{x})[0], 1e-7);
      EXPECT_NEAR(u.hessian(t, Vec<1>{x})(0, 0), fd_hessian(u, t, Vec<1>{x})(0, 0), 1e-3);
    }
}

TEST(Test1, HomogeneousNeumannData) {
  for (double eps : {0.05, 0.1}) {
    const auto b = make_test1(eps);
    for (double t : {0.0, 0.5, 1.0}) {
      EXPECT_NEAR(b.exact->gradient(t, Vec<1>{0.0})[0], 0.0, 1e-12);
      EXPECT_NEAR(b.exact->gradient(t, Vec<1>{1.0})[0], 0.0, 1e-12);
    }
  }
}

TEST(Test1, TerminalDatumMatchesExact) {
  for (double eps : {0.0, 0.05}) {
    const auto b = make_test1(eps);
    for (int k = 0; k <= 100; ++k) {
      const Vec<1> x{k / 100.0};
      EXPECT_NEAR(b.problem.terminal(x), b.exact->value(1.0, x), 1e-12);
    }
  }
}

TEST(Test1, NegativeViscosityRejected) {
  EXPECT_THROW(make_test1(-0.1), Error);
}

TEST(Test2, KnownValues) {
  const auto b = make_test2(BoundaryCondition::neumann);
  EXPECT_NEAR(b.exact->value(1.0, Vec<2>{1.0, 0.0}), 0.0, 1e-15);
  EXPECT_NEAR(b.exact->value(0.0, Vec<2>{kPi / 2, kPi / 2}), 1.5, 1e-15);
  EXPECT_EQ(b.problem.orientation, Orientation::forward_initial);
}

TEST(Test2, ObliqueFieldDirection) {
  const auto b = make_test2(BoundaryCondition::oblique);
  const Vec<2> g = b.problem.reflection(*b.problem.domain, Vec<2>{1.0, 0.0}, {});
  EXPECT_NEAR(g[0], std::cos(kPi / 6), 1e-15);
  EXPECT_NEAR(g[1], -std::sin(kPi / 6), 1e-15);
}

TEST(Test2, PdeResidualFromDifferences) {
  // u_t - 1/2 Tr(sigma sigma^T D^2u) + |Du| - f = 0 inside the disk.
  const auto b = make_test2(BoundaryCondition::neumann);
  const auto& u = *b.exact;
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> ut(0.05, 0.95), ur(0.0, 1.0), ua(0.0, 2.0 * kPi);
  for (int k = 0; k < 1000; ++k) {
    const double t = ut(rng), r = std::sqrt(ur(rng)), th = ua(rng);
    const Vec<2> x{r * std::cos(th), r * std::sin(th)};
    const auto sigma = b.problem.sigma(t, x, {});
    const Mat<2> h = fd_hessian(u, t, x);
    double trace = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) trace += sigma[0][i] * sigma[0][j] * h(i, j);
    const double residual =
        fd_time(u, t, x) - 0.5 * trace + norm(fd_gradient(u, t, x)) - b.problem.running_cost(t, x, {});
    EXPECT_LE(std::abs(residual), 1e-6);
  }
}

TEST(Test2, HandCodedDerivatives) {
  const auto b = make_test2(BoundaryCondition::neumann);
  const auto& u = *b.exact;
  for (const Vec<2>& x : {Vec<2>{0.3, -0.4}, Vec<2>{-0.7, 0.1}, Vec<2>{0.0, 0.9}}) {
    EXPECT_NEAR(u.time_derivative(0.4, x), fd_time(u, 0.4, x), 1e-8);
    EXPECT_LE(norm(u.gradient(0.4, x) - fd_gradient(u, 0.4, x)), 1e-8);
    const Mat<2> h = u.hessian(0.4, x), fd = fd_hessian(u, 0.4, x);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) EXPECT_NEAR(h(i, j), fd(i, j), 1e-6);
  }
}

TEST(Test2, BoundaryConditionsHold) {
  for (auto bc : {BoundaryCondition::neumann, BoundaryCondition::oblique}) {
    const auto b = make_test2(bc);
    for (int k = 0; k < 64; ++k) {
      const double th = 2.0 * kPi * k / 64;
      const Vec<2> p{std::cos(th), std::sin(th)};
      for (double t : {0.0, 0.3, 1.0}) {
        const Vec<2> gamma = b.problem.reflection(*b.problem.domain, p, {});
        EXPECT_NEAR(dot(gamma, fd_gradient(*b.exact, t, p)), b.problem.boundary_cost(t, p, {}), 1e-8);
      }
    }
  }
}

TEST(Test2, InitialDatumMatchesExact) {
  const auto b = make_test2(BoundaryCondition::oblique);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-0.7, 0.7);
  for (int k = 0; k < 200; ++k) {
    const Vec<2> x{u(rng), u(rng)};
    EXPECT_NEAR(b.problem.terminal(x), b.exact->value(0.0, x), 1e-12);
  }
}

TEST(Test2, DiscreteHamiltonianBound) {
  for (int n_a : {8, 16, 32}) {
    const auto b = make_test2(BoundaryCondition::neumann, n_a);
    ASSERT_EQ(static_cast<int>(b.problem.controls_a.size()), n_a);
    std::mt19937_64 rng(n_a);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int k = 0; k < 500; ++k) {
      const Vec<2> p{u(rng), u(rng)};
      const double gap = norm(p) - discrete_norm(b.problem.controls_a, p);
      EXPECT_GE(gap, -1e-12);
      EXPECT_LE(gap, norm(p) * (1.0 - std::cos(kPi / n_a)) + 1e-12);
    }
  }
}

TEST(Test3, Data) {
  const auto b = make_test3();
  EXPECT_FALSE(b.exact.has_value());
  EXPECT_EQ(b.problem.terminal(Vec<2>{0.3, 0.2}), 0.0);
  EXPECT_EQ(b.problem.running_cost(0.5, Vec<2>{0.3, 0.2}, b.problem.controls_a[3]), 1.0);
  EXPECT_EQ(b.problem.domain->boundary_kind(Vec<2>{1.0, 0.1}), BoundaryKind::dirichlet);
  EXPECT_EQ(b.problem.dirichlet(0.0, Vec<2>{1.0, 0.1}), 0.2);
  EXPECT_EQ(b.problem.dirichlet(0.0, Vec<2>{-1.0, 0.1}), 0.0);
  EXPECT_EQ(b.problem.domain->boundary_kind(Vec<2>{1.0, 0.4}), BoundaryKind::oblique);
  EXPECT_EQ(b.problem.horizon, 3.0);
  EXPECT_NO_THROW(b.problem.validate());
}

TEST(ProblemSetup, ValidateRejectsIncompleteData) {
  auto b = make_test2(BoundaryCondition::neumann, 4);
  b.problem.controls_a.clear();
  EXPECT_THROW(b.problem.validate(), Error);
  auto c = make_test2(BoundaryCondition::neumann, 4);
  c.problem.n_sigma = 3;
  EXPECT_THROW(c.problem.validate(), Error);
  EXPECT_THROW(unit_circle_controls(0), Error);
}

TEST(ProblemSetup, TimeStepCount) {
  EXPECT_EQ(time_steps(1.0, 0.1), 10);
  EXPECT_EQ(time_steps(1.0, 0.3), 3);
  EXPECT_EQ(time_steps(3.0, 0.025), 120);
  EXPECT_THROW(time_steps(1.0, 1.5), Error);
}
