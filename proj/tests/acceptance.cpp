// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "stdpg/stdpg.hpp"

#include "skeleton_pairing.hpp"

using namespace stdpg;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void run(int id, const char* title, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("%s [%d] %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), s);
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string levels_text(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

ConvergenceTable gaussian_p3;

} // namespace

int main() {
  run(1, "unisolvency and duality, p = 3,4,5", [] {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0, cond = 0.0;
    for (std::size_t p : {3u, 4u, 5u}) {
      const DualBasis b(p);
      const auto n = static_cast<Eigen::Index>(b.size());
      worst = std::max(worst, (b.duality_matrix() - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff());
      cond = std::max(cond, b.vandermonde_condition());
    }
    const double s = seconds_since(t0);
    return Outcome{worst <= 1e-10 && std::isfinite(cond) && s < 1.0,
                   fmt("max |D - I| = %.2e (<= 1e-10), max cond = %.3e, %.3f s (< 1 s)", worst, cond, s)};
  });

  run(2, "interpolation rates for sin(pi x) exp(-t)", [] {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::string d;
    for (std::size_t p : {3u, 4u}) {
      const auto t = run_interp_study(p, {2, 4, 8, 16}, sine_field());
      const double q = static_cast<double>(p);
      ok = ok && std::abs(t.slope_l2 - (q + 1)) <= 0.2 && std::abs(t.slope_dt - q) <= 0.2 &&
           std::abs(t.slope_dxx - (q - 1)) <= 0.2;
      d += fmt("p=%zu slopes (%.3f, %.3f, %.3f) vs (%g, %g, %g) +-0.2; ", p, t.slope_l2, t.slope_dt,
               t.slope_dxx, q + 1, q, q - 1);
    }
    const double s = seconds_since(t0);
    return Outcome{ok && s < 30.0, d + fmt("%.2f s (< 30 s)", s)};
  });

  run(3, "counterexample blowup norms", [] {
    const auto t0 = std::chrono::steady_clock::now();
    const double pi2 = std::numbers::pi * std::numbers::pi;
    double worst = 0.0;
    std::vector<double> dx2;
    std::vector<std::size_t> Ms{1, 5, 10, 50};
    for (std::size_t M : Ms) {
      double zeta = 0.0;
      for (std::size_t k = 1; k <= M; ++k) zeta += 1.0 / static_cast<double>(k * k);
      const auto q = blowup_norms_quadrature(M, 1.0);
      worst = std::max({worst, std::abs(q.u2 - zeta / 3.0) / (zeta / 3.0),
                        std::abs(q.dx2 - pi2 * M / 3.0) / (pi2 * M / 3.0)});
      dx2.push_back(q.dx2);
    }
    double slope_dev = 0.0;
    for (std::size_t i = 1; i < Ms.size(); ++i) {
      const double slope = (dx2[i] - dx2[0]) / static_cast<double>(Ms[i] - Ms[0]);
      slope_dev = std::max(slope_dev, std::abs(slope - pi2 / 3.0) / (pi2 / 3.0));
    }
    const double s = seconds_since(t0);
    return Outcome{worst <= 1e-8 && slope_dev <= 1e-8 && s < 10.0,
                   fmt("max rel dev %.2e (<= 1e-8), slope dev %.2e, %.2f s (< 10 s)", worst, slope_dev, s)};
  });

  run(4, "zero problem on 4x4, p = 3", [] {
    const Mesh mesh(1.0, 1.0, 4, 4);
    const Skeleton sk(mesh);
    const DofMap dofs(mesh, sk, 3, 1, Variant::practical);
    const auto c = zero_case();
    const auto rep = solve(assemble(dofs, Problem::from_case(c, 1.0)));
    const double norm = l2_error(rep, dofs, c.u.value);
    return Outcome{norm <= 1e-10 && rep.eta <= 1e-10,
                   fmt("||u_h|| = %.2e, eta = %.2e (both <= 1e-10)", norm, rep.eta)};
  });

  run(5, "polynomial exactness u = x t on 2x2, p = 3", [] {
    const Mesh mesh(1.0, 1.0, 2, 2);
    const Skeleton sk(mesh);
    const DofMap dofs(mesh, sk, 3, 1, Variant::practical);
    const auto c = polynomial_case();
    const auto rep = solve(assemble(dofs, Problem::from_case(c, 1.0)));
    const double err = l2_error(rep, dofs, c.u.value);
    return Outcome{err <= 1e-8, fmt("||u - u_h|| = %.2e (<= 1e-8)", err)};
  });

  run(6, "convergence rates in n, Gaussian and wavepacket", [] {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::string d;
    for (const char* name : {"gaussian", "wavepacket"})
      for (std::size_t p : {3u, 4u}) {
        StudyConfig c;
        c.case_name = name;
        c.p = p;
        c.tol = 1e-14;
        const auto t = run_convergence(c);
        if (c.case_name == "gaussian" && p == 3) gaussian_p3 = t;
        const double threshold = p == 3 ? 1.4 : 1.5;
        const bool pass = std::isfinite(t.rate_n) && t.rate_n >= threshold;
        ok = ok && pass;
        d += fmt("%s p=%zu rate_n %.3f (>= %.1f, levels %s); ", name, p, t.rate_n, threshold,
                 levels_text(t.fitted_levels).c_str());
      }
    const double s = seconds_since(t0);
    return Outcome{ok && s <= 600.0, d + fmt("%.1f s (<= 600 s)", s)};
  });

  run(7, "condition estimate after 4 refinements, p = 3", [] {
    std::vector<double> est;
    for (std::size_t n : {1u, 2u, 4u, 8u, 16u}) {
      const Mesh mesh(1.0, 1.0, n, n);
      const Skeleton sk(mesh);
      const DofMap dofs(mesh, sk, 3, 1, Variant::practical);
      est.push_back(condition_estimate(assemble(dofs, Problem::from_case(gaussian_case(), 1.0))).estimate);
    }
    bool monotone = true;
    for (std::size_t i = 1; i < est.size(); ++i) monotone = monotone && est[i] > est[i - 1];
    const double last = est.back();
    return Outcome{monotone && last >= 1e7 && last <= 1e12,
                   fmt("kappa(16x16) = %.3e in [1e7, 1e12], sequence %.2e %.2e %.2e %.2e %.2e %s", last,
                       est[0], est[1], est[2], est[3], est[4], monotone ? "increasing" : "NOT increasing")};
  });

  run(8, "DPG vs spectral oracle for F_5, 16x16, p = 3", [] {
    const double beta = 2.0;
    const Mesh mesh(1.0, 1.0, 16, 16);
    const Skeleton sk(mesh);
    const DofMap dofs(mesh, sk, 3, 1, Variant::practical);
    const Problem problem{SchrodingerOperator(beta), counterexample_field(5, 1.0, beta), BoundaryData::zero()};
    SolveOptions so;
    so.tol = 1e-14;
    const auto rep = solve(assemble(dofs, problem), so);
    const SpectralSolution oracle(counterexample_forcing(5, 1.0, beta), 1.0, 1.0, beta);
    const double err = l2_error(rep, dofs, [&](double x, double t) { return oracle.evaluate(x, t); });
    const double norm = std::sqrt(blowup_norms(5, 1.0).u2);

    double reference = std::numeric_limits<double>::quiet_NaN();
    for (const auto& r : gaussian_p3.rows)
      if (r.level == 16 && r.ok()) reference = r.l2_error;
    if (!std::isfinite(reference)) {
      StudyConfig c;
      c.levels = {16};
      c.tol = 1e-14;
      reference = run_convergence(c).rows.front().l2_error;
    }
    return Outcome{err < 10.0 * reference,
                   fmt("||u_h - U_5|| = %.3e (%.0f%% of ||U_5||) vs 10 x Gaussian error %.3e", err,
                       100.0 * err / norm, 10.0 * reference)};
  });

  run(9, "interior skeleton pairings cancel on random 4x4 meshes", [] {
    std::mt19937 gen(12345);
    std::uniform_real_distribution<double> extent(0.25, 4.0), beta(0.5, 4.0);
    double worst = 0.0, scale = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const Mesh mesh(extent(gen), extent(gen), 4, 4);
      const Skeleton sk(mesh);
      const support::PlaneWaves u(gen, 4), v(gen, 4);
      const auto d = support::skeleton_defect(mesh, sk, beta(gen), u, v);
      worst = std::max(worst, d.max_interior);
      scale = std::max(scale, d.max_single);
    }
    return Outcome{worst <= 1e-10,
                   fmt("max interior defect %.2e (<= 1e-10), largest single-side term %.2e", worst, scale)};
  });

  std::printf("%d criterion/criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
