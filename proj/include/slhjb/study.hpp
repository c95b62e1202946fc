#pragma once

// Refinement studies: configuration, error reports, and their CSV / table /
// solution-dump outputs.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "slhjb/error.hpp"
#include "slhjb/mesh.hpp"
#include "slhjb/problems.hpp"
#include "slhjb/scheme.hpp"

namespace slhjb {

enum class DtRule { equal, half };

struct StudyConfig {
  std::string benchmark = "test1";
  double eps = 0.0;
  std::vector<double> dx_ladder;
  DtRule dt_rule = DtRule::equal;
  std::optional<double> c_bar;
  int n_a = 16;
  int n_b = 1;
  std::uint64_t seed = 1;
  int workers = 1;
  bool timing = true;
  std::string out;  ///< output directory; empty writes nothing

  double dt_for(double dx) const { return dt_rule == DtRule::equal ? dx : dx / 2.0; }

  void validate() const {
    static const std::vector<std::string> known{"test1", "test2_neumann", "test2_oblique", "test3_exit"};
    if (std::find(known.begin(), known.end(), benchmark) == known.end())
      throw Error(ErrorKind::config_error, "unknown benchmark '" + benchmark + "'");
    if (dx_ladder.empty()) throw Error(ErrorKind::config_error, "dx ladder is empty");
    for (double dx : dx_ladder)
      if (!(dx > 0.0)) throw Error(ErrorKind::config_error, "ladder steps must be positive");
    if (c_bar && !(*c_bar > 0.0)) throw Error(ErrorKind::config_error, "c_bar must be positive");
    if (!(eps >= 0.0)) throw Error(ErrorKind::config_error, "eps must be nonnegative");
    if (n_a < 1 || n_b < 1) throw Error(ErrorKind::config_error, "control counts must be positive");
    if (workers < 1) throw Error(ErrorKind::config_error, "workers must be positive");
  }
};

inline std::string format_double(double v, const char* spec = "%.17g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

inline std::vector<double> parse_ladder(const std::string& text) {
  std::string cleaned = text;
  std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
  std::istringstream is(cleaned);
  std::vector<double> out;
  std::string token;
  while (is >> token) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(token, &used));
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw Error(ErrorKind::config_error, "bad ladder entry '" + token + "'");
    }
  }
  return out;
}

inline DtRule parse_dt_rule(const std::string& text) {
  if (text == "equal" || text == "dt=dx") return DtRule::equal;
  if (text == "half" || text == "dt=dx/2") return DtRule::half;
  throw Error(ErrorKind::config_error, "dt rule must be 'equal' or 'half'");
}

namespace detail {

/// Value of `key`, or `fallback` when absent; a present but unparsable value is an error.
template <typename T>
T config_value(const boost::property_tree::ptree& tree, const std::string& key, T fallback) {
  const auto node = tree.get_child_optional(key);
  if (!node) return fallback;
  const auto value = node->get_value_optional<T>();
  if (!value) throw Error(ErrorKind::config_error, "bad value for " + key + ": '" + node->data() + "'");
  return *value;
}

}  // namespace detail

/// Reads a key = value file with [study] and [output] sections.
inline StudyConfig load_config(const std::string& path) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(path, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorKind::config_error, e.what());
  }
  StudyConfig cfg;
  cfg.benchmark = detail::config_value<std::string>(tree, "study.benchmark", cfg.benchmark);
  cfg.eps = detail::config_value<double>(tree, "study.eps", cfg.eps);
  cfg.dx_ladder = parse_ladder(detail::config_value<std::string>(tree, "study.dx_ladder", ""));
  cfg.dt_rule = parse_dt_rule(detail::config_value<std::string>(tree, "study.dt_rule", "equal"));
  if (tree.get_child_optional("study.c_bar")) cfg.c_bar = detail::config_value<double>(tree, "study.c_bar", 0.0);
  cfg.n_a = detail::config_value<int>(tree, "study.na", cfg.n_a);
  cfg.n_b = detail::config_value<int>(tree, "study.nb", cfg.n_b);
  cfg.seed = detail::config_value<std::uint64_t>(tree, "study.seed", cfg.seed);
  cfg.workers = detail::config_value<int>(tree, "study.workers", cfg.workers);
  cfg.timing = detail::config_value<bool>(tree, "study.timing", cfg.timing);
  cfg.out = detail::config_value<std::string>(tree, "output.dir", cfg.out);
  cfg.validate();
  return cfg;
}

inline void save_config(const StudyConfig& cfg, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorKind::io_error, "cannot write " + path);
  os << "[study]\n";
  os << "benchmark = " << cfg.benchmark << '\n';
  os << "eps = " << format_double(cfg.eps) << '\n';
  os << "dx_ladder =";
  for (double dx : cfg.dx_ladder) os << ' ' << format_double(dx);
  os << '\n';
  os << "dt_rule = " << (cfg.dt_rule == DtRule::equal ? "equal" : "half") << '\n';
  if (cfg.c_bar) os << "c_bar = " << format_double(*cfg.c_bar) << '\n';
  os << "na = " << cfg.n_a << '\n';
  os << "nb = " << cfg.n_b << '\n';
  os << "seed = " << cfg.seed << '\n';
  os << "workers = " << cfg.workers << '\n';
  os << "timing = " << (cfg.timing ? "true" : "false") << '\n';
  os << "\n[output]\n";
  os << "dir = " << cfg.out << '\n';
  if (!os) throw Error(ErrorKind::io_error, "cannot write " + path);
}

struct ErrorReport {
  struct Level {
    double dx = 0.0, dt = 0.0;
    double e_inf = 0.0, e_1 = 0.0;
    std::optional<double> p_inf, p_1;
    double max_u = 0.0;
    double wall_seconds = 0.0;
  };
  std::string title;
  std::vector<Level> levels;
};

/// log2(E_l / E_{l+1}) when both errors are positive.
inline std::optional<double> convergence_rate(double coarse, double fine) {
  if (coarse > 0.0 && fine > 0.0) return std::log2(coarse / fine);
  return std::nullopt;
}

/// Least-squares slope of log(err) against log(step).
inline double fitted_rate(const std::vector<double>& steps, const std::vector<double>& errors) {
  const std::size_t n = steps.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < n; ++k) mx += std::log(steps[k]), my += std::log(errors[k]);
  mx /= n, my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double dx = std::log(steps[k]) - mx;
    sxy += dx * (std::log(errors[k]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

/// E_inf over vertices and E_1 (dx-weighted sum in 1D, barycenter quadrature in 2D)
/// of the value function at time index k.
template <int Dim>
std::pair<double, double> solution_errors(const Mesh<Dim>& mesh, const ValueFunction<Dim>& vf, int k,
                                          const ExactSolution<Dim>& exact) {
  const double t = vf.time(k);
  const auto& u = vf.values[k];
  double e_inf = 0.0, e_1 = 0.0;
  for (int i = 0; i < mesh.size(); ++i) {
    const double err = std::abs(u[i] - exact.value(t, mesh.vertices()[i]));
    e_inf = std::max(e_inf, err);
    if constexpr (Dim == 1) e_1 += err;
  }
  if constexpr (Dim == 1) {
    e_1 *= mesh.mesh_size();
  } else {
    for (int s = 0; s < static_cast<int>(mesh.simplices().size()); ++s) {
      const Location<Dim> loc{s, [] {
                                std::array<double, Dim + 1> b{};
                                b.fill(1.0 / (Dim + 1));
                                return b;
                              }()};
      e_1 += mesh.measure(s) * std::abs(mesh.evaluate(u, loc) - exact.value(t, mesh.barycenter(s)));
    }
  }
  return {e_inf, e_1};
}

template <int Dim>
ErrorReport run_ladder(const Benchmark<Dim>& bench, const StudyConfig& cfg) {
  if (!bench.exact) throw Error(ErrorKind::config_error, "benchmark '" + bench.name + "' has no exact solution");
  ErrorReport report;
  report.title = bench.name;
  if (bench.name == "test1") report.title += " (eps = " + format_double(cfg.eps, "%g") + ")";
  report.title += cfg.dt_rule == DtRule::equal ? ", dt = dx" : ", dt = dx/2";
  for (double dx : cfg.dx_ladder) {
    ErrorReport::Level level;
    level.dx = dx;
    level.dt = cfg.dt_for(dx);
    try {
      const auto start = std::chrono::steady_clock::now();
      const Mesh<Dim> mesh = bench.build_mesh(dx);
      SchemeParams params;
      params.dt = level.dt;
      params.c_bar = cfg.c_bar.value_or(bench.default_cbar);
      params.dx = dx;
      params.workers = cfg.workers;
      const ValueFunction<Dim> vf = sweep(bench.problem, mesh, params);
      std::tie(level.e_inf, level.e_1) = solution_errors(mesh, vf, vf.reporting_index(), *bench.exact);
      level.max_u = vf.max_abs();
      if (cfg.timing)
        level.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    } catch (const Error& e) {
      throw Error(e.kind(), "level dx = " + format_double(dx, "%g") + ": " + e.detail());
    }
    if (!report.levels.empty()) {
      level.p_inf = convergence_rate(report.levels.back().e_inf, level.e_inf);
      level.p_1 = convergence_rate(report.levels.back().e_1, level.e_1);
    }
    report.levels.push_back(level);
  }
  return report;
}

inline ErrorReport run_study(const StudyConfig& cfg) {
  cfg.validate();
  if (cfg.n_b != 1) throw Error(ErrorKind::config_error, "the built-in benchmarks have a single boundary control");
  if (cfg.benchmark == "test1") return run_ladder(make_test1(cfg.eps), cfg);
  if (cfg.benchmark == "test2_neumann") return run_ladder(make_test2(BoundaryCondition::neumann, cfg.n_a), cfg);
  if (cfg.benchmark == "test2_oblique") return run_ladder(make_test2(BoundaryCondition::oblique, cfg.n_a), cfg);
  return run_ladder(make_test3(cfg.n_a), cfg);
}

enum class ReportFormat { csv, table };

inline void write_report(const ErrorReport& report, ReportFormat format, std::ostream& os) {
  auto rate = [](const std::optional<double>& p, const char* spec) {
    return p ? format_double(*p, spec) : std::string();
  };
  if (format == ReportFormat::csv) {
    os << "dx,dt,e_inf,e_1,p_inf,p_1,max_u,wall_seconds\n";
    for (const auto& l : report.levels)
      os << format_double(l.dx) << ',' << format_double(l.dt) << ',' << format_double(l.e_inf) << ','
         << format_double(l.e_1) << ',' << rate(l.p_inf, "%.17g") << ',' << rate(l.p_1, "%.17g") << ','
         << format_double(l.max_u) << ',' << format_double(l.wall_seconds, "%.6f") << '\n';
    return;
  }
  char line[160];
  os << report.title << '\n';
  std::snprintf(line, sizeof line, "%-12s %-12s %-12s %-8s %-8s\n", "dx", "E_inf", "E_1", "p_inf", "p_1");
  os << line;
  for (const auto& l : report.levels) {
    const std::string pi = l.p_inf ? format_double(*l.p_inf, "%.2f") : "-";
    const std::string p1 = l.p_1 ? format_double(*l.p_1, "%.2f") : "-";
    std::snprintf(line, sizeof line, "%-12.3e %-12.3e %-12.3e %-8s %-8s\n", l.dx, l.e_inf, l.e_1, pi.c_str(),
                  p1.c_str());
    os << line;
  }
}

inline void emit_report(const ErrorReport& report, ReportFormat format, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorKind::io_error, "cannot open " + path + " for writing");
  write_report(report, format, os);
  os.flush();
  if (!os) throw Error(ErrorKind::io_error, "failed writing " + path);
}

/// Per-vertex rows "coordinates..., value" at time index k.
template <int Dim>
void dump_solution(const ValueFunction<Dim>& vf, const Mesh<Dim>& mesh, int k, const std::string& path) {
  if (k < 0 || k >= static_cast<int>(vf.values.size()))
    throw Error(ErrorKind::bad_params, "time index out of range");
  std::ofstream os(path);
  if (!os) throw Error(ErrorKind::io_error, "cannot open " + path + " for writing");
  for (int d = 0; d < Dim; ++d) os << 'x' << d + 1 << ',';
  os << "value\n";
  for (int i = 0; i < mesh.size(); ++i) {
    for (int d = 0; d < Dim; ++d) os << format_double(mesh.vertices()[i][d]) << ',';
    os << format_double(vf.values[k][i]) << '\n';
  }
  os.flush();
  if (!os) throw Error(ErrorKind::io_error, "failed writing " + path);
}

/// Runs the study and writes report.csv, report.txt and the echoed study.ini
/// into cfg.out (when set).
inline ErrorReport run_and_emit(const StudyConfig& cfg) {
  ErrorReport report = run_study(cfg);
  if (!cfg.out.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.out, ec);
    if (ec) throw Error(ErrorKind::io_error, "cannot create " + cfg.out);
    const std::filesystem::path dir(cfg.out);
    emit_report(report, ReportFormat::csv, (dir / "report.csv").string());
    emit_report(report, ReportFormat::table, (dir / "report.txt").string());
    save_config(cfg, (dir / "study.ini").string());
  }
  return report;
}

}  // namespace slhjb
