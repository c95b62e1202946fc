#pragma once

// Built-in benchmark problems with their exact solutions.

#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "slhjb/error.hpp"
#include "slhjb/geometry.hpp"
#include "slhjb/mesh.hpp"
#include "slhjb/problem.hpp"
#include "slhjb/vec.hpp"

namespace slhjb {

/// Exact solution u(t, x) with hand-coded derivatives.
template <int Dim>
struct ExactSolution {
  std::function<double(double, const Vec<Dim>&)> value;
  std::function<double(double, const Vec<Dim>&)> time_derivative;
  std::function<Vec<Dim>(double, const Vec<Dim>&)> gradient;
  std::function<Mat<Dim>(double, const Vec<Dim>&)> hessian;
};

template <int Dim>
struct Benchmark {
  std::string name;
  Problem<Dim> problem;
  std::optional<ExactSolution<Dim>> exact;
  double default_cbar = 0.25;
  double parameter = 0.0;  ///< epsilon for the 1D family
  std::function<Mesh<Dim>(double)> build_mesh;
};

enum class BoundaryCondition { neumann, oblique };

namespace detail {

/// Closed form on (0, 1) for -u_t - eps u_xx + u_x = f with homogeneous
/// Neumann data. Written with exponents <= 0 so that small eps does not overflow.
struct ViscousProfile {
  double eps;
  double lp = 0.0, lm = 0.0;

  explicit ViscousProfile(double e) : eps(e) {
    if (eps > 0.0) {
      const double root = std::sqrt(1.0 + 4.0 * eps);
      lp = (1.0 + root) / (2.0 * eps);
      lm = (1.0 - root) / (2.0 * eps);
    }
  }

  // A(x) = e^{lp x}(e^{lm} - 1)/(e^{lp} - e^{lm}), B(x) = e^{lm x}(1 - e^{lp})/(e^{lp} - e^{lm}).
  double a(double x) const { return std::expm1(lm) * std::exp(lp * (x - 1.0)) / -std::expm1(lm - lp); }
  double b(double x) const { return std::expm1(-lp) * std::exp(lm * x) / -std::expm1(lm - lp); }

  /// w with u = (3 - t)/2 w, and its first two derivatives.
  double w(double x) const { return eps > 0.0 ? x + a(x) / lp + b(x) / lm : x + std::exp(-x); }
  double dw(double x) const { return eps > 0.0 ? 1.0 + a(x) + b(x) : 1.0 - std::exp(-x); }
  double ddw(double x) const { return eps > 0.0 ? lp * a(x) + lm * b(x) : std::exp(-x); }
};

}  // namespace detail

/// 1D linear problem on (0, 1): -u_t - eps u_xx + u_x = f, homogeneous Neumann
/// data, terminal datum u(1, .). eps = 0 gives the first-order limit.
inline Benchmark<1> make_test1(double eps) {
  if (!(eps >= 0.0)) throw Error(ErrorKind::bad_params, "eps must be nonnegative");
  const detail::ViscousProfile prof(eps);
  auto domain = std::make_shared<Interval>(0.0, 1.0);
  const double sigma = std::sqrt(2.0 * eps);

  Benchmark<1> bench;
  bench.name = "test1";
  bench.parameter = eps;
  bench.default_cbar = 0.025 + sigma / 2.0;

  ExactSolution<1> exact;
  exact.value = [prof](double t, const Vec<1>& x) { return 0.5 * (3.0 - t) * prof.w(x[0]); };
  exact.time_derivative = [prof](double, const Vec<1>& x) { return -0.5 * prof.w(x[0]); };
  exact.gradient = [prof](double t, const Vec<1>& x) { return Vec<1>{0.5 * (3.0 - t) * prof.dw(x[0])}; };
  exact.hessian = [prof](double t, const Vec<1>& x) {
    Mat<1> m;
    m(0, 0) = 0.5 * (3.0 - t) * prof.ddw(x[0]);
    return m;
  };
  bench.exact = exact;

  Problem<1>& p = bench.problem;
  p.domain = domain;
  p.horizon = 1.0;
  p.n_sigma = 1;
  p.sigma = [sigma](double, const Vec<1>&, const Control&) { return DiffusionColumns<1>{Vec<1>{sigma}}; };
  p.drift = [](double, const Vec<1>&, const Control&) { return Vec<1>{-1.0}; };
  p.running_cost = [prof](double t, const Vec<1>& x, const Control&) {
    // -u_t - eps u_xx + u_x evaluated on the exact solution.
    return 0.5 * prof.w(x[0]) + 0.5 * (3.0 - t) * (prof.dw(x[0]) - prof.eps * prof.ddw(x[0]));
  };
  p.boundary_cost = [](double, const Vec<1>&, const Control&) { return 0.0; };
  p.terminal = [prof](const Vec<1>& x) { return prof.w(x[0]); };
  p.orientation = Orientation::backward_terminal;
  bench.build_mesh = [domain](double dx) { return build_interval_mesh(domain, dx); };
  return bench;
}

/// Nonlinear problem on the unit disk: u_t - 1/2 Tr(sigma sigma^T D^2u) + |Du| = f
/// with Neumann or oblique boundary data; |Du| is realized as the maximum of
/// <a, Du> over n_a equispaced unit controls with drift -a.
inline Benchmark<2> make_test2(BoundaryCondition bc, int n_a = 16) {
  auto domain = std::make_shared<Disk>(Vec<2>{0.0, 0.0}, 1.0);
  Benchmark<2> bench;
  bench.name = bc == BoundaryCondition::neumann ? "test2_neumann" : "test2_oblique";
  bench.default_cbar = 0.25;

  ExactSolution<2> exact;
  exact.value = [](double t, const Vec<2>& x) { return (1.5 - t) * std::sin(x[0]) * std::sin(x[1]); };
  exact.time_derivative = [](double, const Vec<2>& x) { return -std::sin(x[0]) * std::sin(x[1]); };
  exact.gradient = [](double t, const Vec<2>& x) {
    return (1.5 - t) * Vec<2>{std::cos(x[0]) * std::sin(x[1]), std::sin(x[0]) * std::cos(x[1])};
  };
  exact.hessian = [](double t, const Vec<2>& x) {
    const double s = std::sin(x[0]) * std::sin(x[1]), c = std::cos(x[0]) * std::cos(x[1]);
    Mat<2> m;
    m(0, 0) = m(1, 1) = -(1.5 - t) * s;
    m(0, 1) = m(1, 0) = (1.5 - t) * c;
    return m;
  };
  bench.exact = exact;

  Problem<2>& p = bench.problem;
  p.domain = domain;
  p.horizon = 1.0;
  p.n_sigma = 1;
  p.sigma = [](double, const Vec<2>& x, const Control&) {
    const double r = std::sqrt(2.0);
    return DiffusionColumns<2>{Vec<2>{r * std::sin(x[0] + x[1]), r * std::cos(x[0] + x[1])}, Vec<2>{}};
  };
  p.drift = [](double, const Vec<2>&, const Control& a) { return Vec<2>{-a[0], -a[1]}; };
  p.running_cost = [](double t, const Vec<2>& x, const Control&) {
    const double s1 = std::sin(x[0]), c1 = std::cos(x[0]), s2 = std::sin(x[1]), c2 = std::cos(x[1]);
    const double ss = std::sin(x[0] + x[1]), cc = std::cos(x[0] + x[1]);
    return (0.5 - t) * s1 * s2 +
           (1.5 - t) * (std::sqrt(c1 * c1 * s2 * s2 + s1 * s1 * c2 * c2) - 2.0 * ss * cc * c1 * c2);
  };
  if (bc == BoundaryCondition::neumann) {
    p.boundary_cost = [](double t, const Vec<2>& x, const Control&) {
      return (1.5 - t) * (x[0] * std::cos(x[0]) * std::sin(x[1]) + x[1] * std::sin(x[0]) * std::cos(x[1]));
    };
  } else {
    constexpr double angle = -std::numbers::pi / 6.0;
    p.reflection = ObliqueField<2>::rotated_normal(angle);
    p.boundary_cost = [](double t, const Vec<2>& x, const Control&) {
      const double c = std::cos(std::numbers::pi / 6.0), s = std::sin(std::numbers::pi / 6.0);
      return (1.5 - t) * ((x[0] * c + x[1] * s) * std::cos(x[0]) * std::sin(x[1]) +
                          (x[1] * c - x[0] * s) * std::sin(x[0]) * std::cos(x[1]));
    };
  }
  p.terminal = [](const Vec<2>& x) { return 1.5 * std::sin(x[0]) * std::sin(x[1]); };
  p.controls_a = unit_circle_controls(n_a);
  p.orientation = Orientation::forward_initial;
  bench.build_mesh = [domain](double dx) { return build_disk_mesh({0.0, 0.0}, 1.0, dx, 0.1, domain); };
  return bench;
}

/// Exit problem on ((-1, 1) x (-0.5, 0.5)) minus the disk of radius 0.2 at
/// (-0.5, 0): unit-speed drift, sigma = 0.1 I, running cost 1, exit costs 0 on
/// {x1 = -1, |x2| <= 0.2} and 0.2 on {x1 = 1, |x2| <= 0.2}, Neumann elsewhere.
inline Benchmark<2> make_test3(int n_a = 16) {
  auto domain = std::make_shared<RectWithHole>(
      Vec<2>{-1.0, -0.5}, Vec<2>{1.0, 0.5}, Vec<2>{-0.5, 0.0}, 0.2,
      std::vector<RectWithHole::DirichletSpan>{{3, -0.2, 0.2}, {1, -0.2, 0.2}});
  Benchmark<2> bench;
  bench.name = "test3_exit";
  bench.default_cbar = 0.25;

  Problem<2>& p = bench.problem;
  p.domain = domain;
  p.horizon = 3.0;
  p.n_sigma = 2;
  p.sigma = [](double, const Vec<2>&, const Control&) {
    return DiffusionColumns<2>{Vec<2>{0.1, 0.0}, Vec<2>{0.0, 0.1}};
  };
  p.drift = [](double, const Vec<2>&, const Control& a) { return Vec<2>{a[0], a[1]}; };
  p.running_cost = [](double, const Vec<2>&, const Control&) { return 1.0; };
  p.boundary_cost = [](double, const Vec<2>&, const Control&) { return 0.0; };
  p.terminal = [](const Vec<2>&) { return 0.0; };
  p.controls_a = unit_circle_controls(n_a);
  p.orientation = Orientation::forward_initial;
  p.dirichlet = [](double, const Vec<2>& x) { return x[0] < 0.0 ? 0.0 : 0.2; };
  bench.build_mesh = [domain](double dx) { return build_rect_with_hole_mesh(domain, dx); };
  return bench;
}

}  // namespace slhjb
