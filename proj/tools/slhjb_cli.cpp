#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "slhjb/slhjb.hpp"
#include "slhjb/verify.hpp"

namespace {

using namespace slhjb;

struct Flags {
  std::string benchmark;
  std::optional<double> eps, cbar;
  std::string ladder, dt_rule, out, config;
  std::optional<int> n_a, n_b, workers;
  std::optional<std::uint64_t> seed;
  bool no_timing = false;
};

void add_problem_flags(CLI::App* app, Flags& f) {
  app->add_option("--benchmark", f.benchmark, "test1 | test2_neumann | test2_oblique | test3_exit");
  app->add_option("--eps", f.eps, "viscosity of test1");
  app->add_option("--cbar", f.cbar, "reflection push-back constant");
  app->add_option("--na", f.n_a, "number of controls in A (disk and exit problems)");
  app->add_option("--nb", f.n_b, "number of controls in B");
  app->add_option("--workers", f.workers, "threads per sweep");
  app->add_option("--out", f.out, "output directory");
}

StudyConfig resolve(const Flags& f) {
  StudyConfig cfg = f.config.empty() ? StudyConfig{} : load_config(f.config);
  if (!f.benchmark.empty()) cfg.benchmark = f.benchmark;
  if (f.eps) cfg.eps = *f.eps;
  if (f.cbar) cfg.c_bar = *f.cbar;
  if (!f.ladder.empty()) cfg.dx_ladder = parse_ladder(f.ladder);
  if (!f.dt_rule.empty()) cfg.dt_rule = parse_dt_rule(f.dt_rule);
  if (f.n_a) cfg.n_a = *f.n_a;
  if (f.n_b) cfg.n_b = *f.n_b;
  if (f.seed) cfg.seed = *f.seed;
  if (f.workers) cfg.workers = *f.workers;
  if (f.no_timing) cfg.timing = false;
  if (!f.out.empty()) cfg.out = f.out;
  return cfg;
}

int cmd_study(const Flags& f) {
  const StudyConfig cfg = resolve(f);
  const ErrorReport report = run_and_emit(cfg);
  write_report(report, ReportFormat::table, std::cout);
  if (!cfg.out.empty()) std::cout << "wrote " << cfg.out << "/report.csv, report.txt, study.ini\n";
  return 0;
}

template <int Dim>
int solve_benchmark(const Benchmark<Dim>& bench, const StudyConfig& cfg, double dt, std::optional<int> index) {
  const double dx = cfg.dx_ladder.front();
  const Mesh<Dim> mesh = bench.build_mesh(dx);
  SchemeParams params;
  params.dt = dt;
  params.dx = dx;
  params.c_bar = cfg.c_bar.value_or(bench.default_cbar);
  params.workers = cfg.workers;
  const ValueFunction<Dim> vf = sweep(bench.problem, mesh, params);
  const int k = index.value_or(vf.reporting_index());
  if (k < 0 || k > vf.steps) throw Error(ErrorKind::bad_params, "time index out of range");
  const auto& u = vf.values[k];
  std::cout << bench.name << ": " << mesh.size() << " vertices, " << vf.steps << " steps, t = " << vf.time(k)
            << "\n  min U = " << *std::min_element(u.begin(), u.end())
            << ", max U = " << *std::max_element(u.begin(), u.end()) << '\n';
  if (bench.exact) {
    const auto [e_inf, e_1] = solution_errors(mesh, vf, k, *bench.exact);
    std::cout << "  E_inf = " << e_inf << ", E_1 = " << e_1 << '\n';
  }
  if (!cfg.out.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.out, ec);
    if (ec) throw Error(ErrorKind::io_error, "cannot create " + cfg.out);
    const std::string path = (std::filesystem::path(cfg.out) / "solution.csv").string();
    dump_solution(vf, mesh, k, path);
    std::cout << "wrote " << path << '\n';
  }
  return 0;
}

int cmd_solve(const Flags& f, double dx, std::optional<double> dt, std::optional<int> index) {
  StudyConfig cfg = resolve(f);
  cfg.dx_ladder = {dx};
  cfg.validate();
  if (cfg.n_b != 1) throw Error(ErrorKind::config_error, "the built-in benchmarks have a single boundary control");
  const double step = dt.value_or(cfg.dt_for(dx));
  if (cfg.benchmark == "test1") return solve_benchmark(make_test1(cfg.eps), cfg, step, index);
  if (cfg.benchmark == "test2_neumann")
    return solve_benchmark(make_test2(BoundaryCondition::neumann, cfg.n_a), cfg, step, index);
  if (cfg.benchmark == "test2_oblique")
    return solve_benchmark(make_test2(BoundaryCondition::oblique, cfg.n_a), cfg, step, index);
  return solve_benchmark(make_test3(cfg.n_a), cfg, step, index);
}

int cmd_verify(std::uint64_t seed) {
  bool ok = true;
  for (const auto& r : run_property_suite(seed)) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
    ok = ok && r.passed;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semi-Lagrangian solver for HJB equations with oblique boundary conditions"};
  app.require_subcommand(1);

  Flags study_flags;
  auto* study = app.add_subcommand("study", "run a refinement ladder and report errors and rates");
  add_problem_flags(study, study_flags);
  study->add_option("--dx-ladder", study_flags.ladder, "space steps, comma or space separated");
  study->add_option("--dt-rule", study_flags.dt_rule, "equal (dt = dx) | half (dt = dx/2)");
  study->add_option("--seed", study_flags.seed, "recorded in the echoed config");
  study->add_option("--config", study_flags.config, "INI file; flags given here override it");
  study->add_flag("--no-timing", study_flags.no_timing, "report zero wall time for reproducible output");

  Flags solve_flags;
  double solve_dx = 0.05;
  std::optional<double> solve_dt;
  std::optional<int> time_index;
  auto* solve = app.add_subcommand("solve", "single sweep; writes per-vertex values");
  add_problem_flags(solve, solve_flags);
  solve->add_option("--dx", solve_dx, "space step")->capture_default_str();
  solve->add_option("--dt", solve_dt, "time step (default from --dt-rule)");
  solve->add_option("--dt-rule", solve_flags.dt_rule, "equal | half");
  solve->add_option("--time-index", time_index, "time level to dump (default: reporting level)");
  solve->add_option("--config", solve_flags.config, "INI file; flags given here override it");

  std::uint64_t verify_seed = 1;
  auto* verify = app.add_subcommand("verify", "run the property suites");
  verify->add_option("--seed", verify_seed, "seed of the randomized checks")->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  try {
    if (study->parsed()) return cmd_study(study_flags);
    if (solve->parsed()) return cmd_solve(solve_flags, solve_dx, solve_dt, time_index);
    return cmd_verify(verify_seed);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 100;
  }
}
