#pragma once

// Property suites: randomized and oracle-based checks of the scheme's
// structural properties. Each check reports a pass flag and a short summary.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "slhjb/error.hpp"
#include "slhjb/geometry.hpp"
#include "slhjb/markov.hpp"
#include "slhjb/mesh.hpp"
#include "slhjb/problems.hpp"
#include "slhjb/scheme.hpp"
#include "slhjb/study.hpp"

namespace slhjb {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

namespace detail {

inline std::string sci(double v) { return format_double(v, "%.3e"); }

template <int Dim>
struct MonotonicityCase {
  Problem<Dim> problem;
  Mesh<Dim> mesh;
  SchemeParams params;
};

/// Worst violations of S[U] <= S[V] for U <= V and of S[U + c] = S[U] + c over
/// every node of one random instance.
template <int Dim>
std::pair<double, double> monotonicity_violation(const MonotonicityCase<Dim>& c, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = c.mesh.size();
  const int steps = time_steps(c.problem.horizon, c.params.dt);
  const int k = std::uniform_int_distribution<int>(0, steps - 1)(rng);
  std::vector<double> u(n), v(n), shifted(n);
  const double shift = 4.0 * unit(rng) - 2.0;
  for (int i = 0; i < n; ++i) {
    u[i] = 2.0 * unit(rng) - 1.0;
    v[i] = unit(rng) < 0.3 ? u[i] : u[i] + unit(rng);
    shifted[i] = u[i] + shift;
  }
  double mono = 0.0, comm = 0.0;
  for (int i = 0; i < n; ++i) {
    const double su = apply_S(c.problem, c.mesh, u, k, i, c.params);
    const double sv = apply_S(c.problem, c.mesh, v, k, i, c.params);
    const double sc = apply_S(c.problem, c.mesh, shifted, k, i, c.params);
    mono = std::max(mono, su - sv);
    comm = std::max(comm, std::abs(sc - su - shift));
  }
  return {mono, comm};
}

inline double max_difference(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

/// Tiny 1D instance on (0, 1): drift scale * a, constant sigma, f = 1 + a x,
/// boundary cost b[0] (or 0.3 without B controls), psi = x^2.
inline Problem<1> tiny_interval_problem(std::vector<Control> a_set, std::vector<Control> b_set, double sigma,
                                        double horizon) {
  Problem<1> p;
  p.domain = std::make_shared<Interval>(0.0, 1.0);
  p.horizon = horizon;
  p.sigma = [sigma](double, const Vec<1>&, const Control&) { return DiffusionColumns<1>{Vec<1>{sigma}}; };
  p.drift = [](double, const Vec<1>&, const Control& a) { return Vec<1>{0.5 * a[0]}; };
  p.running_cost = [](double t, const Vec<1>& x, const Control& a) { return 1.0 + a[0] * x[0] + t; };
  p.boundary_cost = [](double, const Vec<1>&, const Control& b) { return b.empty() ? 0.3 : b[0]; };
  p.terminal = [](const Vec<1>& x) { return x[0] * x[0]; };
  p.controls_a = std::move(a_set);
  p.controls_b = std::move(b_set);
  return p;
}

/// Tiny instance on the unit disk with two diffusion columns.
inline Problem<2> tiny_disk_problem(int n_a, ObliqueField<2> field, double horizon) {
  Problem<2> p;
  p.domain = std::make_shared<Disk>(Vec<2>{0.0, 0.0}, 1.0);
  p.horizon = horizon;
  p.n_sigma = 2;
  p.sigma = [](double, const Vec<2>& x, const Control&) {
    return DiffusionColumns<2>{Vec<2>{0.3, 0.1 * x[1]}, Vec<2>{0.0, 0.25}};
  };
  p.drift = [](double, const Vec<2>&, const Control& a) { return Vec<2>{a[0], a[1]}; };
  p.running_cost = [](double, const Vec<2>& x, const Control& a) { return 1.0 + a[0] * x[1] - 0.5 * a[1] * x[0]; };
  p.reflection = field;
  p.boundary_cost = [](double, const Vec<2>& x, const Control&) { return 0.2 + 0.1 * x[0]; };
  p.terminal = [](const Vec<2>& x) { return x[0] * x[0] - x[1]; };
  p.controls_a = unit_circle_controls(n_a);
  return p;
}

/// Center plus six boundary vertices of the unit disk.
inline Mesh<2> hexagon_mesh(std::shared_ptr<const Domain<2>> domain) {
  std::vector<Vec<2>> vertices{{0.0, 0.0}};
  std::vector<std::array<int, 3>> simplices;
  std::vector<BoundaryKind> tags{BoundaryKind::interior};
  for (int k = 0; k < 6; ++k) {
    const double th = std::numbers::pi * k / 3.0;
    vertices.push_back({std::cos(th), std::sin(th)});
    tags.push_back(BoundaryKind::oblique);
    simplices.push_back({0, 1 + k, 1 + (k + 1) % 6});
  }
  return Mesh<2>(std::move(vertices), std::move(simplices), std::move(tags), std::move(domain));
}

}  // namespace detail

/// Monotonicity and commutation by constants of the one-step operator on
/// randomized instances built from the 1D and disk benchmarks.
inline CheckResult check_monotonicity(int instances = 100, std::uint64_t seed = 1, double tol = 1e-12) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double mono = 0.0, comm = 0.0;
  const auto disk_neumann = make_test2(BoundaryCondition::neumann, 4);
  const auto disk_oblique = make_test2(BoundaryCondition::oblique, 4);
  const Mesh<2> disk_mesh = disk_neumann.build_mesh(0.25);
  for (int inst = 0; inst < instances; ++inst) {
    std::pair<double, double> v;
    if (inst % 3 == 0) {
      const auto b = make_test1(0.1 * unit(rng));
      SchemeParams params;
      params.dt = 0.02 + 0.08 * unit(rng);
      params.c_bar = b.default_cbar;
      v = detail::monotonicity_violation(detail::MonotonicityCase<1>{b.problem, b.build_mesh(0.1), params}, rng);
    } else {
      const auto& b = inst % 3 == 1 ? disk_neumann : disk_oblique;
      SchemeParams params;
      params.dt = 0.05 + 0.2 * unit(rng);
      params.c_bar = 0.25 + 0.25 * unit(rng);
      v = detail::monotonicity_violation(detail::MonotonicityCase<2>{b.problem, disk_mesh, params}, rng);
    }
    mono = std::max(mono, v.first);
    comm = std::max(comm, v.second);
  }
  return {"monotonicity and commutation by constants", mono <= tol && comm <= tol,
          std::to_string(instances) + " instances, max S[U]-S[V] = " + detail::sci(mono) +
              ", max |S[U+c]-S[U]-c| = " + detail::sci(comm)};
}

/// Sweep against brute-force enumeration of all policies on tiny instances.
inline CheckResult check_dp_equivalence(double tol = 1e-10) {
  double worst = 0.0;
  int cases = 0;
  auto run = [&](const auto& problem, const auto& mesh, double dt) {
    SchemeParams params;
    params.dt = dt;
    params.c_bar = 0.25;
    const auto vf = sweep(problem, mesh, params);
    worst = std::max(worst, detail::max_difference(vf.values[0], dp_oracle(problem, mesh, params)));
    ++cases;
  };
  {
    auto p = detail::tiny_interval_problem({{-1.0}, {1.0}}, {{}}, 0.4, 0.5);
    run(p, build_interval_mesh(std::static_pointer_cast<const Interval>(p.domain), 0.5), 0.25);
  }
  {
    auto p = detail::tiny_interval_problem({{-1.0}, {0.5}}, {{}}, 0.6, 0.5);
    run(p, build_interval_mesh(std::static_pointer_cast<const Interval>(p.domain), 1.0 / 3.0), 0.25);
  }
  {
    auto p = detail::tiny_interval_problem({{0.0}}, {{0.2}, {-0.1}}, 0.8, 0.5);
    run(p, build_interval_mesh(std::static_pointer_cast<const Interval>(p.domain), 0.5), 0.25);
  }
  {
    auto p = detail::tiny_interval_problem({{-1.0}, {0.0}, {1.0}}, {{0.4}, {0.1}}, 0.5, 0.3);
    run(p, build_interval_mesh(std::static_pointer_cast<const Interval>(p.domain), 0.5), 0.15);
  }
  {
    auto p = detail::tiny_disk_problem(3, ObliqueField<2>::normal(), 0.25);
    run(p, detail::hexagon_mesh(p.domain), 0.25);
  }
  {
    auto p = detail::tiny_disk_problem(2, ObliqueField<2>::rotated_normal(-std::numbers::pi / 6.0), 0.5);
    run(p, detail::hexagon_mesh(p.domain), 0.25);
  }
  return {"scheme equals policy enumeration", worst <= tol,
          std::to_string(cases) + " instances, max |U - U_dp| = " + detail::sci(worst)};
}

/// Oblique projection residuals on tube samples of a disk (closed form) and
/// an ellipse (Newton), plus the layer identity.
inline CheckResult check_oblique_projection(int samples = 10000, std::uint64_t seed = 2, double tol = 1e-10,
                                            double layer_tol = 1e-12) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto disk = std::make_shared<Disk>(Vec<2>{0.0, 0.0}, 1.0);
  const auto ellipse = make_ellipse({0.2, -0.1}, 1.5, 1.0, TubeRadii{0.6, 0.3, 0.3});
  const auto rotated = ObliqueField<2>::rotated_normal(-std::numbers::pi / 6.0);
  const auto normal = ObliqueField<2>::normal();
  double residual = 0.0, on_boundary = 0.0;
  auto probe = [&](const CurveDomain& domain, const ObliqueField<2>& field) {
    const double reach = domain.radii().oblique;
    for (int s = 0; s < samples; ++s) {
      const double th = domain.period() * unit(rng);
      const double off = reach * (2.0 * unit(rng) - 1.0) * 0.99;
      const Vec<2> x = domain.point(th) + off * domain.normal_at(th);
      if (std::abs(domain.signed_distance(x)) >= reach) continue;
      const auto proj = domain.oblique_projection(field, {}, x);
      residual = std::max(residual, norm(x - proj.p - proj.d * field(domain, proj.p, {})));
      on_boundary = std::max(on_boundary, std::abs(domain.signed_distance(proj.p)));
    }
  };
  probe(*disk, rotated);
  probe(*disk, normal);
  probe(*ellipse, rotated);

  double layer = 0.0;
  for (int s = 0; s < samples; ++s) {
    const double delta = disk->radii().layer * unit(rng);
    const double depth = delta * unit(rng);
    const double th = 2.0 * std::numbers::pi * unit(rng);
    const Vec<2> x = (1.0 - depth) * Vec<2>{std::cos(th), std::sin(th)};
    layer = std::max(layer, std::abs(disk->layer_distance(delta, x) - disk->signed_distance(x) - delta));
  }
  const bool ok = residual <= tol && on_boundary <= tol && layer <= layer_tol;
  return {"oblique projection residuals and layer identity", ok,
          "max |x - p - d gamma| = " + detail::sci(residual) + ", max |sd(p)| = " + detail::sci(on_boundary) +
              ", layer identity defect = " + detail::sci(layer)};
}

/// Supremum of |phi - I[phi]| for phi = sin x1 sin x2 on the unit disk,
/// sampled at barycenters, edge midpoints and near the curved boundary.
inline double interpolation_sup_error(double dx) {
  const auto disk = std::make_shared<Disk>(Vec<2>{0.0, 0.0}, 1.0);
  const Mesh<2> mesh = build_disk_mesh({0.0, 0.0}, 1.0, dx, 0.1, disk);
  auto phi = [](const Vec<2>& x) { return std::sin(x[0]) * std::sin(x[1]); };
  std::vector<double> nodal(mesh.size());
  for (int i = 0; i < mesh.size(); ++i) nodal[i] = phi(mesh.vertices()[i]);
  double worst = 0.0;
  auto sample = [&](const Vec<2>& x) { worst = std::max(worst, std::abs(phi(x) - mesh.interpolate(nodal, x))); };
  for (int s = 0; s < static_cast<int>(mesh.simplices().size()); ++s) {
    const auto& t = mesh.simplices()[s];
    sample(mesh.barycenter(s));
    for (int e = 0; e < 3; ++e) sample(0.5 * (mesh.vertices()[t[e]] + mesh.vertices()[t[(e + 1) % 3]]));
  }
  for (int k = 0; k < 2000; ++k) {
    const double th = 2.0 * std::numbers::pi * (k + 0.5) / 2000.0;
    sample(Vec<2>{std::cos(th), std::sin(th)});
  }
  return worst;
}

/// Interpolation order on the disk and row sums of the transition law.
inline CheckResult check_interpolation_and_rows(double min_slope = 1.8, double row_tol = 1e-12) {
  const std::vector<double> ladder{0.25, 0.125, 0.0625};
  std::vector<double> errors;
  for (double dx : ladder) errors.push_back(interpolation_sup_error(dx));
  const double slope = fitted_rate(ladder, errors);

  double row = 0.0;
  for (auto bc : {BoundaryCondition::neumann, BoundaryCondition::oblique}) {
    const auto b = make_test2(bc, 8);
    const Mesh<2> mesh = b.build_mesh(0.25);
    SchemeParams params;
    params.dt = 0.25;
    params.c_bar = 0.25;
    for (int i = 0; i < mesh.size(); ++i)
      for (const Control& a : b.problem.controls_a)
        row = std::max(row, std::abs(transition_law(b.problem, mesh, 0, i, a, {}, params).sum() - 1.0));
  }
  const auto t1 = make_test1(0.05);
  const Mesh<1> mesh1 = t1.build_mesh(0.05);
  SchemeParams p1;
  p1.dt = 0.05;
  p1.c_bar = t1.default_cbar;
  for (int i = 0; i < mesh1.size(); ++i)
    row = std::max(row, std::abs(transition_law(t1.problem, mesh1, 0, i, {}, {}, p1).sum() - 1.0));

  return {"interpolation order and stochastic rows", slope >= min_slope && row <= row_tol,
          "sup-error slope = " + format_double(slope, "%.3f") + " (errors " + detail::sci(errors[0]) + ", " +
              detail::sci(errors[1]) + ", " + detail::sci(errors[2]) + "), max |row sum - 1| = " +
              detail::sci(row)};
}

/// Log-log slope of the interior consistency residual for phi = x^2 at x = 0.5
/// on the 1D benchmark data, over a dt ladder with dx = dt.
inline CheckResult check_consistency_order(double min_slope = 1.4) {
  const std::vector<double> ladder{1e-2, 5e-3, 2.5e-3};
  const auto b = make_test1(0.05);
  SmoothFunction<1> phi{[](const Vec<1>& x) { return x[0] * x[0]; }, [](const Vec<1>& x) { return Vec<1>{2.0 * x[0]}; },
                        [](const Vec<1>&) {
                          Mat<1> m;
                          m(0, 0) = 2.0;
                          return m;
                        }};
  std::vector<double> residuals;
  for (double dt : ladder) {
    const Mesh<1> mesh = b.build_mesh(dt);
    SchemeParams params;
    params.dt = dt;
    params.dx = dt;
    params.c_bar = b.default_cbar;
    residuals.push_back(std::abs(consistency_residual_at(b.problem, mesh, phi, 0.0, Vec<1>{0.5}, {}, {}, params)));
  }
  const double slope = fitted_rate(ladder, residuals);
  return {"interior consistency order", slope >= min_slope,
          "residual slope = " + format_double(slope, "%.3f") + " (residuals " + detail::sci(residuals[0]) + ", " +
              detail::sci(residuals[1]) + ", " + detail::sci(residuals[2]) + ")"};
}

/// Max-norm of the sweep along the 1D ladder and the scaling of the expected
/// number of boundary-layer visits with dt.
inline CheckResult check_stability(int n_paths = 2000, std::uint64_t seed = 3) {
  double growth = 0.0;
  std::string norms;
  for (double eps : {0.0, 0.05}) {
    const auto b = make_test1(eps);
    double previous = 0.0;
    for (double dx : {5e-2, 2.5e-2, 1.25e-2, 6.25e-3}) {
      SchemeParams params;
      params.dt = dx;
      params.dx = dx;
      params.c_bar = b.default_cbar;
      const double m = sweep(b.problem, b.build_mesh(dx), params).max_abs();
      if (previous > 0.0) growth = std::max(growth, m / previous - 1.0);
      previous = m;
    }
  }
  const auto b = make_test1(0.05);
  std::vector<double> scaled;
  for (double dt : {4e-2, 1e-2, 2.5e-3}) {
    const Mesh<1> mesh = b.build_mesh(dt);
    SchemeParams params;
    params.dt = dt;
    params.dx = dt;
    params.c_bar = b.default_cbar;
    int start = 0;
    for (int i = 0; i < mesh.size(); ++i)
      if (std::abs(mesh.vertices()[i][0] - 0.5) < std::abs(mesh.vertices()[start][0] - 0.5)) start = i;
    const Policy policy = Policy::constant(time_steps(b.problem.horizon, dt), mesh.size(), 0);
    const auto est = estimate_sojourn(b.problem, mesh, policy, params, 0, start, n_paths, seed);
    scaled.push_back(est.mean * std::sqrt(dt));
  }
  double ratio = 1.0;
  for (std::size_t l = 0; l + 1 < scaled.size(); ++l) {
    const double r = scaled[l + 1] / scaled[l];
    ratio = std::max({ratio, r, 1.0 / r});
  }
  const bool ok = growth <= 0.01 && ratio <= 2.5 && scaled.front() > 0.0;
  return {"stability and boundary sojourn scaling", ok,
          "max relative growth of max|U| = " + format_double(growth * 100.0, "%.3f") +
              "%, sojourn*sqrt(dt) = " + format_double(scaled[0], "%.3f") + ", " + format_double(scaled[1], "%.3f") +
              ", " + format_double(scaled[2], "%.3f") + " (worst ratio " + format_double(ratio, "%.3f") + ")"};
}

inline std::vector<CheckResult> run_property_suite(std::uint64_t seed = 1) {
  return {check_monotonicity(100, seed),        check_dp_equivalence(),   check_oblique_projection(10000, seed + 1),
          check_interpolation_and_rows(),       check_consistency_order(), check_stability(2000, seed + 2)};
}

}  // namespace slhjb
