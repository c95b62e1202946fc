#pragma once

// Controlled Markov chain behind the scheme: transition laws, policy costs by
// exact propagation or Monte Carlo, brute-force policy enumeration and the
// boundary-layer sojourn estimate.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <tuple>
#include <utility>
#include <vector>

#include "slhjb/error.hpp"
#include "slhjb/mesh.hpp"
#include "slhjb/problem.hpp"
#include "slhjb/scheme.hpp"

namespace slhjb {

/// Row p_{k,i,.}(a, b) of the transition matrix, sorted by target vertex.
struct TransitionLaw {
  std::vector<std::pair<int, double>> entries;

  double sum() const {
    double s = 0.0;
    for (const auto& e : entries) s += e.second;
    return s;
  }
  double probability(int j) const {
    for (const auto& [v, p] : entries)
      if (v == j) return p;
    return 0.0;
  }
};

/// policy.choice[k][i] is an index into A x B (a-major), for k = 0 .. steps-1.
struct Policy {
  std::vector<std::vector<int>> choice;

  static Policy constant(int steps, int vertices, int control) {
    return Policy{std::vector<std::vector<int>>(steps, std::vector<int>(vertices, control))};
  }
};

/// One step of the chain from vertex i under a fixed control: for every
/// characteristic s, the vertices and weights of the located landing point and
/// the boundary cost d_s g_s.
struct StepLaw {
  struct Branch {
    std::vector<std::pair<int, double>> weights;
    double boundary_cost = 0.0;
    bool exited = false;
  };
  std::vector<Branch> branches;
  double running_cost = 0.0;  ///< dt f(t_k, x_i, a)

  double expected_cost() const {
    double h = 0.0;
    for (const auto& b : branches) h += b.boundary_cost;
    return running_cost + h / static_cast<double>(branches.size());
  }
  bool touches_boundary() const {
    return std::any_of(branches.begin(), branches.end(), [](const Branch& b) { return b.exited; });
  }
};

template <int Dim>
StepLaw step_law(const Problem<Dim>& problem, const Mesh<Dim>& mesh, int k, int i, const Control& a,
                 const Control& b, const SchemeParams& params) {
  if (problem.domain->has_dirichlet())
    throw Error(ErrorKind::bad_params, "the chain interpretation covers oblique boundaries only");
  const double t = data_time(problem, k, params.dt);
  const Vec<Dim>& x = mesh.vertices()[i];
  StepLaw law;
  law.running_cost = params.dt * problem.running_cost(t, x, a);
  for (const auto& y : discrete_characteristics(problem, t, x, a, params.dt)) {
    const ReflectedPoint<Dim> r = reflect(problem, b, y, t, params.dt, params.c_bar);
    const Location<Dim> loc = mesh.locate_projected(r.y_tilde);
    StepLaw::Branch branch;
    for (int v = 0; v <= Dim; ++v)
      if (loc.bary[v] > 0.0) branch.weights.emplace_back(mesh.simplices()[loc.simplex][v], loc.bary[v]);
    branch.boundary_cost = r.d_tilde * r.g_tilde;
    branch.exited = r.exited;
    law.branches.push_back(std::move(branch));
  }
  return law;
}

/// p_{k,i,j}(a, b) = (1 / 2N) sum_s psi_j(y_s).
template <int Dim>
TransitionLaw transition_law(const Problem<Dim>& problem, const Mesh<Dim>& mesh, int k, int i, const Control& a,
                             const Control& b, const SchemeParams& params) {
  const StepLaw law = step_law(problem, mesh, k, i, a, b, params);
  std::map<int, double> acc;
  const double w = 1.0 / static_cast<double>(law.branches.size());
  for (const auto& branch : law.branches)
    for (const auto& [j, p] : branch.weights) acc[j] += w * p;
  TransitionLaw out;
  out.entries.assign(acc.begin(), acc.end());
  return out;
}

namespace detail {

/// Step laws for every (step, vertex, control) pair that a computation needs,
/// computed on first use.
template <int Dim>
class LawCache {
 public:
  LawCache(const Problem<Dim>& problem, const Mesh<Dim>& mesh, const SchemeParams& params)
      : problem_(problem), mesh_(mesh), params_(params) {}

  const StepLaw& get(int k, int i, int c) {
    const auto key = std::make_tuple(k, i, c);
    auto it = cache_.find(key);
    if (it == cache_.end())
      it = cache_.emplace(key, step_law(problem_, mesh_, k, i, problem_.a_of(c), problem_.b_of(c), params_)).first;
    return it->second;
  }

 private:
  const Problem<Dim>& problem_;
  const Mesh<Dim>& mesh_;
  const SchemeParams& params_;
  std::map<std::tuple<int, int, int>, StepLaw> cache_;
};

inline void check_policy(const Policy& policy, int steps, int vertices, int controls) {
  if (static_cast<int>(policy.choice.size()) != steps)
    throw Error(ErrorKind::bad_params, "policy must cover every time step");
  for (const auto& level : policy.choice) {
    if (static_cast<int>(level.size()) != vertices)
      throw Error(ErrorKind::bad_params, "policy must cover every vertex");
    for (int c : level)
      if (c < 0 || c >= controls) throw Error(ErrorKind::bad_params, "policy control index out of range");
  }
}

/// Forward propagation of the distribution started at vertex i at step k.
template <int Dim>
double propagate_cost(LawCache<Dim>& cache, const Problem<Dim>& problem, const Mesh<Dim>& mesh, const Policy& policy,
                      int steps, int k, int i) {
  const int n = mesh.size();
  std::vector<double> dist(n, 0.0), next(n);
  dist[i] = 1.0;
  double cost = 0.0;
  for (int m = k; m < steps; ++m) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int v = 0; v < n; ++v) {
      if (dist[v] == 0.0) continue;
      const StepLaw& law = cache.get(m, v, policy.choice[m][v]);
      cost += dist[v] * law.expected_cost();
      const double w = dist[v] / static_cast<double>(law.branches.size());
      for (const auto& branch : law.branches)
        for (const auto& [j, p] : branch.weights) next[j] += w * p;
    }
    std::swap(dist, next);
  }
  for (int v = 0; v < n; ++v)
    if (dist[v] != 0.0) cost += dist[v] * problem.terminal(mesh.vertices()[v]);
  return cost;
}

/// Uniform double in [0, 1) from the top 53 bits.
inline double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Per-path generator keyed by (seed, path), independent of scheduling.
inline std::mt19937_64 path_generator(std::uint64_t seed, std::uint64_t path) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(path >> 32)};
  return std::mt19937_64(seq);
}

/// Simulates one path; returns the accumulated cost and the number of steps
/// spent on nodes with an exiting characteristic.
template <int Dim>
std::pair<double, int> simulate_path(LawCache<Dim>& cache, const Problem<Dim>& problem, const Mesh<Dim>& mesh,
                                     const Policy& policy, int steps, int k, int i, std::mt19937_64& rng) {
  double cost = 0.0;
  int sojourn = 0;
  int v = i;
  for (int m = k; m < steps; ++m) {
    const StepLaw& law = cache.get(m, v, policy.choice[m][v]);
    if (law.touches_boundary()) ++sojourn;
    const int branches = static_cast<int>(law.branches.size());
    const int s = std::min(branches - 1, static_cast<int>(unit_draw(rng) * branches));
    const auto& branch = law.branches[s];
    cost += law.running_cost + branch.boundary_cost;
    const double u = unit_draw(rng);
    double acc = 0.0;
    int target = branch.weights.back().first;
    for (const auto& [j, p] : branch.weights) {
      acc += p;
      if (u < acc) {
        target = j;
        break;
      }
    }
    v = target;
  }
  return {cost + problem.terminal(mesh.vertices()[v]), sojourn};
}

}  // namespace detail

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  int n_paths = 0;
  std::uint64_t seed = 0;

  static MonteCarloEstimate from_sums(double sum, double sum_sq, int n_paths, std::uint64_t seed) {
    MonteCarloEstimate out;
    out.n_paths = n_paths;
    out.seed = seed;
    out.mean = sum / n_paths;
    const double var = n_paths > 1 ? std::max(0.0, (sum_sq - n_paths * out.mean * out.mean) / (n_paths - 1)) : 0.0;
    out.std_error = std::sqrt(var / n_paths);
    return out;
  }
};

enum class CostMode { exact, monte_carlo };

/// J_{k,i}(policy) by exact propagation of the distribution.
template <int Dim>
double policy_cost(const Problem<Dim>& problem, const Mesh<Dim>& mesh, const Policy& policy, int k, int i,
                   const SchemeParams& params) {
  params.validate();
  const int steps = time_steps(problem.horizon, params.dt);
  detail::check_policy(policy, steps, mesh.size(), problem.control_count());
  if (k < 0 || k > steps || i < 0 || i >= mesh.size()) throw Error(ErrorKind::bad_params, "bad (k, i)");
  detail::LawCache<Dim> cache(problem, mesh, params);
  return detail::propagate_cost(cache, problem, mesh, policy, steps, k, i);
}

/// J_{k,i}(policy) as the mean over simulated chains.
template <int Dim>
MonteCarloEstimate policy_cost_monte_carlo(const Problem<Dim>& problem, const Mesh<Dim>& mesh, const Policy& policy,
                                           int k, int i, const SchemeParams& params, int n_paths,
                                           std::uint64_t seed) {
  params.validate();
  if (n_paths < 1) throw Error(ErrorKind::bad_params, "n_paths must be positive");
  const int steps = time_steps(problem.horizon, params.dt);
  detail::check_policy(policy, steps, mesh.size(), problem.control_count());
  detail::LawCache<Dim> cache(problem, mesh, params);
  double sum = 0.0, sum_sq = 0.0;
  for (int path = 0; path < n_paths; ++path) {
    auto rng = detail::path_generator(seed, static_cast<std::uint64_t>(path));
    const double c = detail::simulate_path(cache, problem, mesh, policy, steps, k, i, rng).first;
    sum += c;
    sum_sq += c * c;
  }
  return MonteCarloEstimate::from_sums(sum, sum_sq, n_paths, seed);
}

/// Minimum of the exact policy cost over all policies, per starting vertex at
/// k = 0. Throws TooLarge beyond 10^6 policies.
template <int Dim>
std::vector<double> dp_oracle(const Problem<Dim>& problem, const Mesh<Dim>& mesh, const SchemeParams& params,
                              double max_policies = 1e6) {
  params.validate();
  const int steps = time_steps(problem.horizon, params.dt);
  const int n = mesh.size();
  const int controls = problem.control_count();
  const int digits = n * steps;
  if (digits * std::log10(static_cast<double>(controls)) > std::log10(max_policies) + 1e-12)
    throw Error(ErrorKind::too_large, "too many policies to enumerate");
  detail::LawCache<Dim> cache(problem, mesh, params);
  Policy policy = Policy::constant(steps, n, 0);
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  while (true) {
    for (int i = 0; i < n; ++i)
      best[i] = std::min(best[i], detail::propagate_cost(cache, problem, mesh, policy, steps, 0, i));
    int d = 0;
    for (; d < digits; ++d) {
      int& c = policy.choice[d / n][d % n];
      if (++c < controls) break;
      c = 0;
    }
    if (d == digits) break;
  }
  return best;
}

/// Expected number of steps the chain started at (k, i) spends on nodes from
/// which some characteristic leaves the domain.
template <int Dim>
MonteCarloEstimate estimate_sojourn(const Problem<Dim>& problem, const Mesh<Dim>& mesh, const Policy& policy,
                                    const SchemeParams& params, int k, int i, int n_paths, std::uint64_t seed) {
  params.validate();
  if (n_paths < 1) throw Error(ErrorKind::bad_params, "n_paths must be positive");
  const int steps = time_steps(problem.horizon, params.dt);
  detail::check_policy(policy, steps, mesh.size(), problem.control_count());
  detail::LawCache<Dim> cache(problem, mesh, params);
  double sum = 0.0, sum_sq = 0.0;
  for (int path = 0; path < n_paths; ++path) {
    auto rng = detail::path_generator(seed, static_cast<std::uint64_t>(path));
    const double c = detail::simulate_path(cache, problem, mesh, policy, steps, k, i, rng).second;
    sum += c;
    sum_sq += c * c;
  }
  return MonteCarloEstimate::from_sums(sum, sum_sq, n_paths, seed);
}

}  // namespace slhjb
