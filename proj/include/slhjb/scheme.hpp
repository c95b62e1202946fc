#pragma once

// The fully discrete semi-Lagrangian scheme: characteristics, reflection at
// the boundary, the one-step operators and the backward sweep.

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <thread>
#include <utility>
#include <vector>

#include "slhjb/error.hpp"
#include "slhjb/geometry.hpp"
#include "slhjb/mesh.hpp"
#include "slhjb/problem.hpp"
#include "slhjb/vec.hpp"

namespace slhjb {

template <int Dim>
struct ReflectedPoint {
  Vec<Dim> y_tilde{};
  double d_tilde = 0.0;
  double g_tilde = 0.0;
  bool exited = false;
  Vec<Dim> foot{};       ///< oblique projection of y onto the boundary (first pass)
  Vec<Dim> direction{};  ///< gamma_b at the foot (first pass)
  int passes = 0;        ///< > 1 only on boundaries with corners
};

/// Where one characteristic lands: a reflected point, or a Dirichlet datum
/// when the segment from the node first leaves through a Dirichlet piece.
template <int Dim>
struct CharacteristicImage {
  ReflectedPoint<Dim> reflected;
  bool dirichlet = false;
  double dirichlet_value = 0.0;
};

/// y^{+-,l} = x + dt mu +- sqrt(n_sigma dt) sigma^l, ordered (+,1), (-,1), (+,2), ...
template <int Dim>
std::vector<Vec<Dim>> discrete_characteristics(const Problem<Dim>& problem, double t, const Vec<Dim>& x,
                                               const Control& a, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorKind::bad_params, "time step must be positive");
  const Vec<Dim> center = x + dt * problem.drift(t, x, a);
  const auto sigma = problem.sigma(t, x, a);
  const double scale = std::sqrt(problem.n_sigma * dt);
  std::vector<Vec<Dim>> out;
  out.reserve(2 * problem.n_sigma);
  for (int l = 0; l < problem.n_sigma; ++l) {
    out.push_back(center + scale * sigma[l]);
    out.push_back(center - scale * sigma[l]);
  }
  return out;
}

/// Pulls an exited characteristic back inside along gamma_b, c_bar sqrt(dt)
/// past the boundary. On boundaries with corners the step is repeated until
/// the point is inside.
template <int Dim>
ReflectedPoint<Dim> reflect(const Problem<Dim>& problem, const Control& b, const Vec<Dim>& y, double t,
                            double dt, double c_bar) {
  const Domain<Dim>& domain = *problem.domain;
  ReflectedPoint<Dim> out;
  out.y_tilde = y;
  if (domain.signed_distance(y) <= kBoundaryTol) return out;
  out.exited = true;
  const double push = c_bar * std::sqrt(dt);
  const int max_passes = domain.smooth() ? 1 : 4;
  Vec<Dim> z = y;
  double d_sum = 0.0, dg_sum = 0.0;
  for (int pass = 0; pass < max_passes; ++pass) {
    const ObliqueProjection<Dim> proj = domain.oblique_projection(problem.reflection, b, z);
    if (pass == 0) out.foot = proj.p, out.direction = proj.direction;
    const double d = proj.d + push;
    d_sum += d;
    dg_sum += d * problem.boundary_cost(t, proj.p, b);
    z = proj.p - push * proj.direction;
    ++out.passes;
    if (domain.signed_distance(z) <= kBoundaryTol) break;
  }
  if (domain.signed_distance(z) > kBoundaryTol)
    throw Error(ErrorKind::outside_tube, "reflected characteristic is outside the domain; time step too large");
  out.y_tilde = z;
  out.d_tilde = d_sum;
  out.g_tilde = dg_sum / d_sum;
  return out;
}

/// Dirichlet datum at the first crossing of the segment [x, y], when that
/// crossing lies on a Dirichlet piece. Throws NoCrossing otherwise.
template <int Dim>
double dirichlet_extension(const Problem<Dim>& problem, const Vec<Dim>& x, const Vec<Dim>& y, double t) {
  const Domain<Dim>& domain = *problem.domain;
  if (domain.signed_distance(y) <= kBoundaryTol)
    throw Error(ErrorKind::no_crossing, "characteristic stays in the domain");
  const auto crossing = domain.first_exit(x, y);
  if (!crossing || crossing->kind != BoundaryKind::dirichlet)
    throw Error(ErrorKind::no_crossing, "first crossing is not on a Dirichlet piece");
  return problem.dirichlet(t, crossing->point);
}

template <int Dim>
CharacteristicImage<Dim> resolve_characteristic(const Problem<Dim>& problem, const Vec<Dim>& x, const Vec<Dim>& y,
                                                const Control& b, double t, const SchemeParams& params) {
  CharacteristicImage<Dim> out;
  const Domain<Dim>& domain = *problem.domain;
  if (domain.has_dirichlet() && domain.signed_distance(y) > kBoundaryTol) {
    const auto crossing = domain.first_exit(x, y);
    if (crossing && crossing->kind == BoundaryKind::dirichlet) {
      out.dirichlet = true;
      out.dirichlet_value = problem.dirichlet(t, crossing->point);
      out.reflected.exited = true;
      return out;
    }
  }
  out.reflected = reflect(problem, b, y, t, params.dt, params.c_bar);
  return out;
}

/// S[Phi](a, b) at an arbitrary point x and data time t.
template <int Dim>
double control_value_at(const Problem<Dim>& problem, const Mesh<Dim>& mesh, const std::vector<double>& next,
                        double t, const Vec<Dim>& x, const Control& a, const Control& b,
                        const SchemeParams& params) {
  const auto ys = discrete_characteristics(problem, t, x, a, params.dt);
  double sum = 0.0;
  for (const auto& y : ys) {
    const auto image = resolve_characteristic(problem, x, y, b, t, params);
    if (image.dirichlet) {
      sum += image.dirichlet_value;
    } else {
      sum += mesh.interpolate(next, image.reflected.y_tilde) + image.reflected.d_tilde * image.reflected.g_tilde;
    }
  }
  return sum / static_cast<double>(ys.size()) + params.dt * problem.running_cost(t, x, a);
}

template <int Dim>
double apply_S_control(const Problem<Dim>& problem, const Mesh<Dim>& mesh, const std::vector<double>& next, int k,
                       int i, const Control& a, const Control& b, const SchemeParams& params) {
  mesh.check_nodal(next);
  return control_value_at(problem, mesh, next, data_time(problem, k, params.dt), mesh.vertices()[i], a, b, params);
}

struct NodeUpdate {
  double value = std::numeric_limits<double>::infinity();
  int control = -1;  ///< index into A x B, a-major
};

/// Minimum over the listed controls; ties keep the first-listed pair.
template <int Dim>
NodeUpdate apply_S_argmin(const Problem<Dim>& problem, const Mesh<Dim>& mesh, const std::vector<double>& next,
                          int k, int i, const SchemeParams& params) {
  NodeUpdate best;
  for (int c = 0; c < problem.control_count(); ++c) {
    const double v = apply_S_control(problem, mesh, next, k, i, problem.a_of(c), problem.b_of(c), params);
    if (v < best.value) best = {v, c};
  }
  return best;
}

template <int Dim>
double apply_S(const Problem<Dim>& problem, const Mesh<Dim>& mesh, const std::vector<double>& next, int k, int i,
               const SchemeParams& params) {
  return apply_S_argmin(problem, mesh, next, k, i, params).value;
}

/// Nodal values on the time grid t_k = k dt, indexed in the problem's own
/// time direction: values[steps] = psi for backward problems, values[0] = psi
/// for forward ones.
template <int Dim>
struct ValueFunction {
  std::vector<std::vector<double>> values;
  double dt = 0.0;
  int steps = 0;
  Orientation orientation = Orientation::backward_terminal;
  /// policy[k][i]: minimizing control at backward step k (empty unless recorded).
  std::vector<std::vector<int>> policy;

  double time(int k) const { return k * dt; }
  /// Index at which errors are reported: t = 0 backward, t = steps dt forward.
  int reporting_index() const { return orientation == Orientation::backward_terminal ? 0 : steps; }
  double max_abs() const {
    double m = 0.0;
    for (const auto& level : values)
      for (double v : level) m = std::max(m, std::abs(v));
    return m;
  }
};

namespace detail {

template <typename Fn>
void parallel_for(int n, int workers, Fn&& fn) {
  workers = std::max(1, std::min(workers, n));
  if (workers == 1) {
    fn(0, 0, n);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      const int lo = static_cast<int>(static_cast<long>(n) * w / workers);
      const int hi = static_cast<int>(static_cast<long>(n) * (w + 1) / workers);
      pool.emplace_back([&, w, lo, hi] {
        try {
          fn(w, lo, hi);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace detail

/// Backward recursion U_N = psi, U_k = S[U_{k+1}]. Nodes within a step are
/// split across workers; each node's reduction is sequential, so results do
/// not depend on the worker count.
template <int Dim>
ValueFunction<Dim> sweep(const Problem<Dim>& problem, const Mesh<Dim>& mesh, const SchemeParams& params,
                         bool record_policy = false) {
  problem.validate();
  params.validate();
  const int steps = time_steps(problem.horizon, params.dt);
  const int n = mesh.size();
  std::vector<std::vector<double>> backward(steps + 1, std::vector<double>(n));
  double psi_norm = 0.0;
  for (int i = 0; i < n; ++i) {
    backward[steps][i] = problem.terminal(mesh.vertices()[i]);
    psi_norm = std::max(psi_norm, std::abs(backward[steps][i]));
  }
  ValueFunction<Dim> out;
  out.dt = params.dt;
  out.steps = steps;
  out.orientation = problem.orientation;
  if (record_policy) out.policy.assign(steps, std::vector<int>(n, -1));

  const int workers = std::max(1, std::min(params.workers, n));
  std::vector<double> f_seen(workers, 0.0);
  for (int k = steps - 1; k >= 0; --k) {
    const double t = data_time(problem, k, params.dt);
    detail::parallel_for(n, workers, [&](int w, int lo, int hi) {
      for (int i = lo; i < hi; ++i) {
        const NodeUpdate u = apply_S_argmin(problem, mesh, backward[k + 1], k, i, params);
        backward[k][i] = u.value;
        if (record_policy) out.policy[k][i] = u.control;
        for (const Control& a : problem.controls_a)
          f_seen[w] = std::max(f_seen[w], std::abs(problem.running_cost(t, mesh.vertices()[i], a)));
      }
    });
    const double f_norm = *std::max_element(f_seen.begin(), f_seen.end());
    const double guard = params.blowup_factor * (psi_norm + problem.horizon * f_norm + 1.0);
    for (double v : backward[k])
      if (!std::isfinite(v) || std::abs(v) > guard)
        throw Error(ErrorKind::unstable, "value function exceeded the blow-up guard");
  }
  if (problem.orientation == Orientation::forward_initial) std::reverse(backward.begin(), backward.end());
  out.values = std::move(backward);
  return out;
}

// ---------------------------------------------------------------------------
// Consistency probe
// ---------------------------------------------------------------------------

/// Smooth test function with its gradient and Hessian.
template <int Dim>
struct SmoothFunction {
  std::function<double(const Vec<Dim>&)> value;
  std::function<Vec<Dim>(const Vec<Dim>&)> gradient;
  std::function<Mat<Dim>(const Vec<Dim>&)> hessian;
};

enum class Probe { interior, boundary };

/// H_a(t, x, p, M) = -1/2 Tr(sigma sigma^T M) - <mu, p> - f.
template <int Dim>
double control_hamiltonian(const Problem<Dim>& problem, double t, const Vec<Dim>& x, const Control& a,
                           const Vec<Dim>& p, const Mat<Dim>& m) {
  const auto sigma = problem.sigma(t, x, a);
  double trace = 0.0;
  for (int l = 0; l < problem.n_sigma; ++l) trace += quadratic_form(m, sigma[l], sigma[l]);
  return -0.5 * trace - dot(problem.drift(t, x, a), p) - problem.running_cost(t, x, a);
}

/// S[phi|_G](a, b) - phi(x) + dt H_a(t, x, Dphi, D^2phi). The boundary probe
/// adds (1/2N) sum_s d_s (L_s - sqrt(dt) K_s), which cancels the first-order
/// reflection contribution.
template <int Dim>
double consistency_residual_at(const Problem<Dim>& problem, const Mesh<Dim>& mesh, const SmoothFunction<Dim>& phi,
                               double t, const Vec<Dim>& x, const Control& a, const Control& b,
                               const SchemeParams& params, Probe probe = Probe::interior) {
  std::vector<double> nodal(mesh.size());
  for (int j = 0; j < mesh.size(); ++j) nodal[j] = phi.value(mesh.vertices()[j]);
  const Vec<Dim> grad = phi.gradient(x);
  const Mat<Dim> hess = phi.hessian(x);
  const double dt = params.dt;

  const auto ys = discrete_characteristics(problem, t, x, a, dt);
  const auto sigma = problem.sigma(t, x, a);
  double correction = 0.0;
  for (std::size_t s = 0; s < ys.size(); ++s) {
    const auto image = resolve_characteristic(problem, x, ys[s], b, t, params);
    if (image.dirichlet) throw Error(ErrorKind::bad_params, "consistency probe does not cover Dirichlet exits");
    const auto& r = image.reflected;
    if (!r.exited) continue;
    if (probe == Probe::interior)
      throw Error(ErrorKind::bad_params, "interior probe requires all characteristics to stay inside");
    const Vec<Dim>& gamma = r.direction;
    const double sign = (s % 2 == 0) ? 1.0 : -1.0;
    const double l_term = dot(gamma, grad) - problem.boundary_cost(t, r.foot, b);
    const double k_term = r.d_tilde / (2.0 * std::sqrt(dt)) * quadratic_form(hess, gamma, gamma) -
                          sign * std::sqrt(static_cast<double>(problem.n_sigma)) *
                              quadratic_form(hess, gamma, sigma[s / 2]);
    correction += r.d_tilde * (l_term - std::sqrt(dt) * k_term);
  }
  correction /= static_cast<double>(ys.size());
  const double s_value = control_value_at(problem, mesh, nodal, t, x, a, b, params);
  return s_value - phi.value(x) + dt * control_hamiltonian(problem, t, x, a, grad, hess) + correction;
}

template <int Dim>
double consistency_residual(const Problem<Dim>& problem, const Mesh<Dim>& mesh, const SmoothFunction<Dim>& phi,
                            int k, int i, const Control& a, const Control& b, const SchemeParams& params,
                            Probe probe = Probe::interior) {
  return consistency_residual_at(problem, mesh, phi, data_time(problem, k, params.dt), mesh.vertices()[i], a, b,
                                 params, probe);
}

}  // namespace slhjb
