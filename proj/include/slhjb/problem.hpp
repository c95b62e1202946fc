#pragma once

// Data of a controlled HJB problem and the discretization parameters.

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "slhjb/error.hpp"
#include "slhjb/geometry.hpp"
#include "slhjb/vec.hpp"

namespace slhjb {

/// backward_terminal: -u_t + H = 0 with u(T) = psi.
/// forward_initial:    u_t + H = 0 with u(0) = psi; swept in reversed time.
enum class Orientation { backward_terminal, forward_initial };

template <int Dim>
struct Problem {
  using Field = std::function<Vec<Dim>(double, const Vec<Dim>&, const Control&)>;
  using Columns = std::function<DiffusionColumns<Dim>(double, const Vec<Dim>&, const Control&)>;
  using Scalar = std::function<double(double, const Vec<Dim>&, const Control&)>;

  std::shared_ptr<const Domain<Dim>> domain;
  double horizon = 1.0;
  int n_sigma = 1;
  Columns sigma;          ///< columns sigma^1..sigma^{n_sigma}
  Field drift;            ///< mu(t, x, a)
  Scalar running_cost;    ///< f(t, x, a)
  ObliqueField<Dim> reflection = ObliqueField<Dim>::normal();
  Scalar boundary_cost;   ///< g(t, p, b)
  std::function<double(const Vec<Dim>&)> terminal;  ///< psi
  std::vector<Control> controls_a{Control{}};
  std::vector<Control> controls_b{Control{}};
  Orientation orientation = Orientation::backward_terminal;
  std::function<double(double, const Vec<Dim>&)> dirichlet;  ///< datum on Dirichlet pieces

  int control_count() const { return static_cast<int>(controls_a.size() * controls_b.size()); }
  const Control& a_of(int c) const { return controls_a[c / controls_b.size()]; }
  const Control& b_of(int c) const { return controls_b[c % controls_b.size()]; }

  void validate() const {
    if (!domain) throw Error(ErrorKind::bad_params, "problem has no domain");
    if (!(horizon > 0.0)) throw Error(ErrorKind::bad_params, "horizon must be positive");
    if (n_sigma < 1 || n_sigma > Dim) throw Error(ErrorKind::bad_params, "n_sigma must lie in [1, dim]");
    if (!sigma || !drift || !running_cost || !boundary_cost || !terminal)
      throw Error(ErrorKind::bad_params, "problem data handles are incomplete");
    if (controls_a.empty() || controls_b.empty())
      throw Error(ErrorKind::bad_params, "control sets must be nonempty");
    if (domain->has_dirichlet() && !dirichlet)
      throw Error(ErrorKind::bad_params, "Dirichlet boundary pieces need a datum");
  }
};

struct SchemeParams {
  double dt = 0.0;
  double c_bar = 0.25;
  double dx = 0.0;     ///< target mesh size, for reporting
  int workers = 1;
  double blowup_factor = 1e3;

  void validate() const {
    if (!(dt > 0.0)) throw Error(ErrorKind::bad_params, "time step must be positive");
    if (!(c_bar > 0.0)) throw Error(ErrorKind::bad_params, "c_bar must be positive");
    if (workers < 1) throw Error(ErrorKind::bad_params, "at least one worker is required");
  }
};

/// floor(T / dt), guarded against representation error in T / dt.
inline int time_steps(double horizon, double dt) {
  const int n = static_cast<int>(std::floor(horizon / dt + 1e-9));
  if (n < 1) throw Error(ErrorKind::bad_params, "time step exceeds the horizon");
  return n;
}

/// Time at which the data are evaluated for backward step k. Forward problems
/// use the forward time of the known level, (N - k - 1) dt.
template <int Dim>
double data_time(const Problem<Dim>& problem, int k, double dt) {
  const int n = time_steps(problem.horizon, dt);
  return problem.orientation == Orientation::backward_terminal ? k * dt : (n - k - 1) * dt;
}

/// Largest difference quotient of sigma and mu along the given point pairs,
/// over all listed controls.
template <int Dim>
double lipschitz_estimate(const Problem<Dim>& problem, double t,
                          const std::vector<std::pair<Vec<Dim>, Vec<Dim>>>& pairs) {
  double worst = 0.0;
  for (const Control& a : problem.controls_a)
    for (const auto& [x, y] : pairs) {
      const double h = distance(x, y);
      if (h <= 0.0) continue;
      double ds = 0.0;
      const auto sx = problem.sigma(t, x, a), sy = problem.sigma(t, y, a);
      for (int l = 0; l < problem.n_sigma; ++l) ds = std::max(ds, norm(sx[l] - sy[l]));
      const double dm = norm(problem.drift(t, x, a) - problem.drift(t, y, a));
      worst = std::max({worst, ds / h, dm / h});
    }
  return worst;
}

/// N equispaced unit vectors, starting at angle 0.
inline std::vector<Control> unit_circle_controls(int n) {
  if (n < 1) throw Error(ErrorKind::bad_params, "control count must be positive");
  std::vector<Control> out;
  for (int k = 0; k < n; ++k) {
    const double th = 2.0 * std::numbers::pi * k / n;
    out.push_back({std::cos(th), std::sin(th)});
  }
  return out;
}

}  // namespace slhjb
