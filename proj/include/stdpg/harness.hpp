#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "dpg.hpp"
#include "error.hpp"
#include "fe_spaces.hpp"
#include "mesh.hpp"
#include "physics.hpp"
#include "quadrature.hpp"
#include "ref_element.hpp"
#include "spectral.hpp"

namespace stdpg {

inline constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

// ---------------------------------------------------------------------------
// Configuration

struct StudyConfig {
  std::string case_name = "gaussian"; ///< gaussian | wavepacket | polynomial | zero | counterexample
  double M = 1.5;
  double T0 = 1.5;
  double beta = 2.5;
  double omega = 20.0;
  std::size_t modes = 5; ///< counterexample truncation
  double L = 1.0;
  double T = 1.0;
  std::size_t p = 3;
  std::size_t dp = 1;
  Variant variant = Variant::practical;
  std::vector<std::size_t> levels{2, 4, 8, 16, 32};
  SolverKind solver = SolverKind::automatic;
  double tol = 0.0;
  std::string out; ///< empty: standard output
  bool condition = false;
  bool timing = true;
  std::string field = "sine";                   ///< interp study: sine | poly
  std::vector<std::size_t> oracle_M{1, 5, 10, 50};

  void validate() const {
    STDPG_REQUIRE(p >= 3, UnsupportedOrder, "p must be >= 3");
    STDPG_REQUIRE(dp >= 1, InvalidArgument, "dp must be >= 1");
    STDPG_REQUIRE(!levels.empty(), InvalidArgument, "levels must not be empty");
    for (std::size_t i = 0; i < levels.size(); ++i) {
      STDPG_REQUIRE(levels[i] >= 1, InvalidArgument, "levels must be positive");
      STDPG_REQUIRE(i == 0 || levels[i] > levels[i - 1], InvalidArgument,
                    "levels must be strictly increasing");
    }
    STDPG_REQUIRE(beta > 0.0, InvalidArgument, "beta must be positive");
    STDPG_REQUIRE(L > 0.0 && T > 0.0, InvalidArgument, "L and T must be positive");
    STDPG_REQUIRE(tol >= 0.0, InvalidArgument, "tol must be non-negative");
    for (std::size_t m : oracle_M) STDPG_REQUIRE(m >= 1, InvalidArgument, "oracle M must be >= 1");
  }

  /// Tolerance the solver actually uses.
  [[nodiscard]] double effective_tol() const {
    if (tol > 0.0) return tol;
    return solver == SolverKind::cg ? 1e-10 : 1e-12;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
  const std::string s = trim(v);
  char* end = nullptr;
  const double d = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size())
    throw InvalidArgument("key '" + key + "': '" + v + "' is not a number");
  return d;
}

inline std::size_t parse_size(const std::string& key, const std::string& v) {
  const std::string s = trim(v);
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
    throw InvalidArgument("key '" + key + "': '" + v + "' is not a non-negative integer");
  return static_cast<std::size_t>(std::stoull(s));
}

inline std::vector<std::size_t> parse_size_list(const std::string& key, const std::string& v) {
  std::vector<std::size_t> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_size(key, item));
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  const std::string s = trim(v);
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  throw InvalidArgument("key '" + key + "': '" + v + "' is not a boolean");
}

} // namespace detail

/// Set one configuration key from its textual value.
inline void set_config_value(StudyConfig& c, const std::string& key, const std::string& value) {
  using namespace detail;
  const std::string v = trim(value);
  if (key == "case") c.case_name = v;
  else if (key == "M") c.M = parse_double(key, v);
  else if (key == "T0") c.T0 = parse_double(key, v);
  else if (key == "beta") c.beta = parse_double(key, v);
  else if (key == "omega") c.omega = parse_double(key, v);
  else if (key == "modes") c.modes = parse_size(key, v);
  else if (key == "L") c.L = parse_double(key, v);
  else if (key == "T") c.T = parse_double(key, v);
  else if (key == "p") c.p = parse_size(key, v);
  else if (key == "dp") c.dp = parse_size(key, v);
  else if (key == "variant") c.variant = parse_variant(v);
  else if (key == "levels") c.levels = parse_size_list(key, v);
  else if (key == "solver") c.solver = parse_solver(v);
  else if (key == "tol") c.tol = parse_double(key, v);
  else if (key == "out") c.out = v;
  else if (key == "condition") c.condition = parse_bool(key, v);
  else if (key == "timing") c.timing = parse_bool(key, v);
  else if (key == "field") c.field = v;
  else if (key == "oracle_M") c.oracle_M = parse_size_list(key, v);
  else throw InvalidArgument("unknown configuration key '" + key + "'");
}

/// Flat key=value text; '#' starts a comment, blank lines are ignored.
inline StudyConfig parse_config(std::istream& in, StudyConfig base = {}) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InvalidArgument("config line " + std::to_string(lineno) + ": expected key=value");
    set_config_value(base, detail::trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  base.validate();
  return base;
}

inline StudyConfig parse_config(const std::string& text, StudyConfig base = {}) {
  std::istringstream in(text);
  return parse_config(in, std::move(base));
}

inline ManufacturedCase make_case(const StudyConfig& c) {
  if (c.case_name == "gaussian") return gaussian_case(c.M, c.T0, c.beta);
  if (c.case_name == "wavepacket") return wavepacket_case(c.omega, c.beta);
  if (c.case_name == "polynomial") return polynomial_case(c.beta);
  if (c.case_name == "zero") return zero_case(c.beta);
  if (c.case_name == "counterexample") return counterexample_case(c.modes, c.L, c.beta);
  throw InvalidArgument("unknown case '" + c.case_name +
                        "' (expected gaussian|wavepacket|polynomial|zero|counterexample)");
}

// ---------------------------------------------------------------------------
// Rate fitting

struct FitResult {
  double slope = 0.0;
  std::vector<std::size_t> used; ///< indices of the pairs that entered the fit
  std::vector<std::string> warnings;
};

/// Least-squares slope of log(error) against log(x). Non-positive or non-finite
/// pairs are skipped with a warning; fewer than two usable pairs is a FitFailure.
inline FitResult fit_loglog(const std::vector<double>& x, const std::vector<double>& error) {
  STDPG_REQUIRE(x.size() == error.size(), InvalidArgument, "fit: length mismatch");
  FitResult r;
  std::vector<double> lx, le;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(error[i] > 0.0) || !std::isfinite(x[i]) || !std::isfinite(error[i])) {
      r.warnings.push_back("excluded pair " + std::to_string(i) + " (non-positive or non-finite)");
      continue;
    }
    r.used.push_back(i);
    lx.push_back(std::log(x[i]));
    le.push_back(std::log(error[i]));
  }
  if (lx.size() < 2) throw FitFailure("rate fit needs at least 2 positive pairs");
  const double n = static_cast<double>(lx.size());
  double mx = 0.0, me = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    me += le[i];
  }
  mx /= n;
  me /= n;
  double sxx = 0.0, sxe = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxe += (lx[i] - mx) * (le[i] - me);
  }
  if (sxx <= 0.0) throw FitFailure("rate fit needs at least 2 distinct abscissae");
  r.slope = sxe / sxx;
  return r;
}

/// Convergence rate in h: error ~ h^rate.
inline double fit_rate(const std::vector<double>& h, const std::vector<double>& error) {
  return fit_loglog(h, error).slope;
}

/// Convergence rate in the number of unknowns: error ~ n^(-rate).
inline double fit_rate_n(const std::vector<double>& n, const std::vector<double>& error) {
  return -fit_loglog(n, error).slope;
}

/// Levels on the asymptotic branch: stops at the first error at or below
/// `floor`, or at the first level that fails to halve the previous error.
inline std::vector<std::size_t> pre_plateau_levels(const std::vector<double>& error,
                                                   const std::vector<bool>& ok, double floor) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < error.size(); ++i) {
    if (!ok[i] || !std::isfinite(error[i])) continue;
    if (error[i] <= floor) break;
    if (!keep.empty() && error[i] > 0.5 * error[keep.back()]) break;
    keep.push_back(i);
  }
  return keep;
}

// ---------------------------------------------------------------------------
// Convergence study

struct ConvergenceRow {
  std::size_t level = 0; ///< nx = nt
  double h = 0.0;
  std::size_t n_free_dofs = 0;
  double l2_error = nan_value;
  double eta = nan_value;
  double condition = nan_value;
  double wall_time = 0.0;
  std::string status = "ok";

  [[nodiscard]] bool ok() const { return status == "ok"; }
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  double rate_h = nan_value;
  double rate_n = nan_value;
  std::vector<std::size_t> fitted_levels;
  std::vector<std::string> warnings;
};

inline ConvergenceRow run_level(const StudyConfig& c, const ManufacturedCase& mc, std::size_t n) {
  ConvergenceRow row;
  row.level = n;
  row.h = c.L / static_cast<double>(n);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const Mesh mesh(c.L, c.T, n, n);
    const Skeleton sk(mesh);
    const DofMap dofs(mesh, sk, c.p, c.dp, c.variant);
    row.n_free_dofs = dofs.free_count();
    const DpgSystem sys = assemble(dofs, Problem::from_case(mc, c.L));
    SolveOptions so;
    so.solver = c.solver;
    so.tol = c.tol;
    const SolveReport rep = solve(sys, so);
    row.l2_error = l2_error(rep, dofs, mc.u.value);
    row.eta = rep.eta;
    if (c.condition) row.condition = condition_estimate(sys).estimate;
  } catch (const Error& e) {
    row.status = std::string("failed: ") + e.what();
  }
  if (c.timing)
    row.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return row;
}

inline void fit_table(ConvergenceTable& t, double floor) {
  std::vector<double> err;
  std::vector<bool> ok;
  for (const auto& r : t.rows) {
    err.push_back(r.l2_error);
    ok.push_back(r.ok());
  }
  const auto keep = pre_plateau_levels(err, ok, floor);
  std::vector<double> hs, ns, es;
  for (std::size_t i : keep) {
    hs.push_back(t.rows[i].h);
    ns.push_back(static_cast<double>(t.rows[i].n_free_dofs));
    es.push_back(t.rows[i].l2_error);
    t.fitted_levels.push_back(t.rows[i].level);
  }
  try {
    t.rate_h = fit_rate(hs, es);
    t.rate_n = fit_rate_n(ns, es);
  } catch (const FitFailure& e) {
    t.warnings.push_back(e.what());
  }
}

/// Uniform refinement over `levels`; rates are fitted on the pre-plateau levels
/// whose error exceeds 100 × the solver tolerance.
inline ConvergenceTable run_convergence(const StudyConfig& c) {
  c.validate();
  const ManufacturedCase mc = make_case(c);
  ConvergenceTable t;
  for (std::size_t n : c.levels) {
    t.rows.push_back(run_level(c, mc, n));
    if (!t.rows.back().ok())
      t.warnings.push_back("level " + std::to_string(n) + ": " + t.rows.back().status);
  }
  fit_table(t, 100.0 * c.effective_tol());
  return t;
}

/// One mesh, no rate fit.
inline ConvergenceTable run_solve(const StudyConfig& c, std::size_t n) {
  c.validate();
  ConvergenceTable t;
  t.rows.push_back(run_level(c, make_case(c), n));
  if (!t.rows.back().ok()) t.warnings.push_back(t.rows.back().status);
  return t;
}

// ---------------------------------------------------------------------------
// Interpolation study

struct InterpRow {
  std::size_t level = 0;
  double h = 0.0;
  double l2 = 0.0;
  double dt = 0.0;
  double dxx = 0.0;
};

struct InterpTable {
  std::vector<InterpRow> rows;
  double slope_l2 = nan_value;
  double slope_dt = nan_value;
  double slope_dxx = nan_value;
  std::vector<std::string> warnings;
};

/// sin(πx) e^{−t} with closed-form derivatives.
inline ScalarField sine_field() {
  using std::numbers::pi;
  return {[](double x, double t) { return std::sin(pi * x) * std::exp(-t); },
          [](double x, double t) { return pi * std::cos(pi * x) * std::exp(-t); },
          [](double x, double t) { return -std::sin(pi * x) * std::exp(-t); },
          [](double x, double t) { return -pi * pi * std::sin(pi * x) * std::exp(-t); }};
}

/// x^p t^p, which Π reproduces exactly.
inline ScalarField polynomial_field(std::size_t p) {
  const double q = static_cast<double>(p);
  return {[q](double x, double t) { return std::pow(x, q) * std::pow(t, q); },
          [q](double x, double t) { return q * std::pow(x, q - 1) * std::pow(t, q); },
          [q](double x, double t) { return q * std::pow(x, q) * std::pow(t, q - 1); },
          [q](double x, double t) { return q * (q - 1) * std::pow(x, q - 2) * std::pow(t, q); }};
}

/// Global ‖w − Πw‖, ‖∂ₜ(w − Πw)‖ and ‖∂ₓₓ(w − Πw)‖ on (0,1)² for each level, with
/// slopes fitted in h. Errors at or below 1e−10 are treated as exact and excluded.
inline InterpTable run_interp_study(std::size_t p, const std::vector<std::size_t>& levels,
                                    const ScalarField& w) {
  const DualBasis basis(p);
  const QuadratureRule rule = gauss_legendre_2d(p + 6);
  InterpTable t;
  for (std::size_t n : levels) {
    const Mesh mesh(1.0, 1.0, n, n);
    InterpolationError sum;
    for (const auto& K : mesh.elements()) {
      const auto e = interpolation_error_squared(basis, w, K, rule);
      sum.l2 += e.l2;
      sum.dt += e.dt;
      sum.dxx += e.dxx;
    }
    t.rows.push_back({n, 1.0 / static_cast<double>(n), std::sqrt(sum.l2), std::sqrt(sum.dt),
                      std::sqrt(sum.dxx)});
  }
  const auto slope = [&](auto get) {
    std::vector<double> err;
    for (const auto& r : t.rows) err.push_back(get(r));
    const auto keep = pre_plateau_levels(err, std::vector<bool>(err.size(), true), 1e-10);
    std::vector<double> hs, es;
    for (std::size_t i : keep) {
      hs.push_back(t.rows[i].h);
      es.push_back(err[i]);
    }
    try {
      return fit_rate(hs, es);
    } catch (const FitFailure& e) {
      t.warnings.push_back(e.what());
      return nan_value;
    }
  };
  t.slope_l2 = slope([](const InterpRow& r) { return r.l2; });
  t.slope_dt = slope([](const InterpRow& r) { return r.dt; });
  t.slope_dxx = slope([](const InterpRow& r) { return r.dxx; });
  return t;
}

// ---------------------------------------------------------------------------
// Oracle study

struct OracleRow {
  std::size_t M = 0;
  BlowupNorms closed;
  BlowupNorms quadrature;
};

inline std::vector<OracleRow> run_oracle(const std::vector<std::size_t>& Ms, double T,
                                         double beta = 2.0) {
  std::vector<OracleRow> rows;
  for (std::size_t M : Ms) {
    STDPG_REQUIRE(M >= 1, InvalidArgument, "oracle M must be >= 1");
    rows.push_back({M, blowup_norms(M, T), blowup_norms_quadrature(M, T, beta)});
  }
  return rows;
}

// ---------------------------------------------------------------------------
// CSV

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline const char* convergence_header = "level,h,n_free_dofs,l2_error,eta,condition,wall_time_s,status";

inline void write_csv(std::ostream& os, const ConvergenceTable& t) {
  os << convergence_header << '\n';
  for (const auto& r : t.rows) {
    std::string status = r.status;
    for (char& ch : status)
      if (ch == ',' || ch == '\n') ch = ';';
    os << r.level << ',' << format_double(r.h) << ',' << r.n_free_dofs << ','
       << format_double(r.l2_error) << ',' << format_double(r.eta) << ','
       << format_double(r.condition) << ',' << format_double(r.wall_time) << ',' << status
       << '\n';
  }
  os << "# rate_h=" << format_double(t.rate_h) << '\n';
  os << "# rate_n=" << format_double(t.rate_n) << '\n';
  os << "# fitted_levels=";
  for (std::size_t i = 0; i < t.fitted_levels.size(); ++i)
    os << (i ? ";" : "") << t.fitted_levels[i];
  os << '\n';
}

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep, std::size_t max_fields) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (out.size() + 1 < max_fields) {
    const auto pos = s.find(sep, start);
    if (pos == std::string::npos) break;
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  out.push_back(s.substr(start));
  return out;
}

} // namespace detail

inline ConvergenceTable read_convergence_csv(std::istream& in) {
  ConvergenceTable t;
  std::string line;
  STDPG_REQUIRE(std::getline(in, line) && detail::trim(line) == convergence_header,
                InvalidArgument, "missing or unexpected CSV header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("# rate_h=", 0) == 0) {
      t.rate_h = detail::parse_double("rate_h", line.substr(9));
    } else if (line.rfind("# rate_n=", 0) == 0) {
      t.rate_n = detail::parse_double("rate_n", line.substr(9));
    } else if (line.rfind("# fitted_levels=", 0) == 0) {
      std::stringstream ss(line.substr(16));
      std::string item;
      while (std::getline(ss, item, ';'))
        if (!item.empty()) t.fitted_levels.push_back(detail::parse_size("fitted_levels", item));
    } else if (line[0] != '#') {
      const auto f = detail::split(line, ',', 8);
      STDPG_REQUIRE(f.size() == 8, InvalidArgument, "CSV row has the wrong number of columns");
      ConvergenceRow r;
      r.level = detail::parse_size("level", f[0]);
      r.h = detail::parse_double("h", f[1]);
      r.n_free_dofs = detail::parse_size("n_free_dofs", f[2]);
      r.l2_error = detail::parse_double("l2_error", f[3]);
      r.eta = detail::parse_double("eta", f[4]);
      r.condition = detail::parse_double("condition", f[5]);
      r.wall_time = detail::parse_double("wall_time_s", f[6]);
      r.status = f[7];
      t.rows.push_back(r);
    }
  }
  return t;
}

inline void write_csv(std::ostream& os, const InterpTable& t) {
  os << "level,h,l2_error,dt_error,dxx_error\n";
  for (const auto& r : t.rows)
    os << r.level << ',' << format_double(r.h) << ',' << format_double(r.l2) << ','
       << format_double(r.dt) << ',' << format_double(r.dxx) << '\n';
  os << "# slope_l2=" << format_double(t.slope_l2) << '\n';
  os << "# slope_dt=" << format_double(t.slope_dt) << '\n';
  os << "# slope_dxx=" << format_double(t.slope_dxx) << '\n';
}

inline void write_csv(std::ostream& os, const std::vector<OracleRow>& rows) {
  os << "M,u2_closed,dx2_closed,u2_quadrature,dx2_quadrature\n";
  for (const auto& r : rows)
    os << r.M << ',' << format_double(r.closed.u2) << ',' << format_double(r.closed.dx2) << ','
       << format_double(r.quadrature.u2) << ',' << format_double(r.quadrature.dx2) << '\n';
}

} // namespace stdpg
