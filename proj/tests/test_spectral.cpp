#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "stdpg/spectral.hpp"

using namespace stdpg;
using std::numbers::pi;

namespace {

double partial_zeta2(std::size_t M) {
  double s = 0.0;
  for (std::size_t k = 1; k <= M; ++k) s += 1.0 / static_cast<double>(k * k);
  return s;
}

} // namespace

TEST(SineModes, Orthonormal) {
  const SineModes m{2.0};
  const Rule1D r = composite_gauss(0.0, 2.0, 8, 10);
  for (std::size_t j = 1; j <= 6; ++j)
    for (std::size_t k = 1; k <= 6; ++k) {
      double s = 0.0;
      for (std::size_t q = 0; q < r.points.size(); ++q) s += r.weights[q] * m.e(j, r.points[q]) * m.e(k, r.points[q]);
      EXPECT_NEAR(s, j == k ? 1.0 : 0.0, 1e-13);
    }
}

TEST(SineModes, VanishOnBoundary) {
  const SineModes m{1.0};
  for (std::size_t k = 1; k <= 10; ++k) {
    EXPECT_NEAR(m.e(k, 0.0), 0.0, 1e-15);
    EXPECT_NEAR(m.e(k, 1.0), 0.0, 1e-13);
  }
}

TEST(ExpandForcing, SingleModeProjection) {
  const SineModes m{1.0};
  const auto g = [](double t) { return Complex(std::cos(t), t * t); };
  const auto f = [m, g](double x, double t) { return m.e(3, x) * g(t); };
  const auto ex = expand_forcing(f, 6, 1.0, 1.0);
  ASSERT_EQ(ex.modes.size(), 6u);
  EXPECT_FALSE(ex.under_resolved);
  for (double t : {0.0, 0.4, 1.0})
    for (std::size_t k = 1; k <= 6; ++k)
      EXPECT_LE(std::abs(ex.modes[k - 1](t) - (k == 3 ? g(t) : Complex(0.0))), 1e-10);
}

TEST(ExpandForcing, CounterexampleCoefficients) {
  const auto ex = expand_forcing(counterexample_field(4), 4, 1.0, 1.0);
  for (std::size_t k = 1; k <= 4; ++k) {
    const double w2 = static_cast<double>(k * k) * pi * pi;
    for (double s : {0.1, 0.7})
      EXPECT_LE(std::abs(ex.modes[k - 1](s) - std::exp(I * w2 * s) / static_cast<double>(k)), 1e-10);
  }
}

TEST(ExpandForcing, ZeroField) {
  const auto ex = expand_forcing([](double, double) { return Complex(0.0); }, 3, 1.0, 1.0);
  for (const auto& m : ex.modes) EXPECT_EQ(m(0.5), Complex(0.0));
}

TEST(ExpandForcing, FlagsUnresolvedForcing) {
  const auto rough = [](double x, double) { return Complex(std::sin(400.0 * x)); };
  EXPECT_TRUE(expand_forcing(rough, 2, 1.0, 1.0).under_resolved);
}

TEST(Duhamel, ZeroForcingAndZeroStart) {
  EXPECT_EQ(duhamel(ModeForcing{}, 5.0, 0.8), Complex(0.0));
  EXPECT_EQ(duhamel(ModeForcing::exponential(1.0, 3.0), 3.0, 0.0), Complex(0.0));
  const DuhamelIntegral d(ModeForcing::sampled([](double s) { return Complex(s, 1.0); }), 7.0, 1.0);
  EXPECT_EQ(d(0.0), Complex(0.0));
}

TEST(Duhamel, ResonantClosedForm) {
  for (std::size_t k : {1u, 3u, 7u}) {
    const double w2 = static_cast<double>(k * k) * pi * pi;
    for (double t : {0.25, 1.0})
      EXPECT_LE(std::abs(duhamel(ModeForcing::exponential(1.0 / static_cast<double>(k), w2), w2, t) -
                         counterexample_mode(k, t)),
                1e-13);
  }
}

TEST(Duhamel, QuadratureMatchesClosedForm) {
  for (double lambda : {pi * pi, 25.0 * pi * pi, 100.0 * pi * pi}) {
    for (double mu : {lambda, 0.3 * lambda, -2.0}) {
      const ModeForcing exact = ModeForcing::exponential(Complex(0.5, -0.2), mu);
      const ModeForcing sampled =
          ModeForcing::sampled([exact](double s) { return exact(s); });
      const DuhamelIntegral a(exact, lambda, 1.0), b(sampled, lambda, 1.0);
      for (double t : {0.13, 0.5, 1.0}) EXPECT_LE(std::abs(a(t) - b(t)), 1e-11) << lambda << " " << mu;
    }
  }
}

TEST(Duhamel, PanelCountFollowsFastestPhase) {
  const auto f = ModeForcing::sampled([](double) { return Complex(1.0); });
  EXPECT_EQ(DuhamelIntegral(f, 1.0, 1.0).panels(), 40u);
  const double lambda = 50.0 * 2.0 * pi;
  const auto panels = DuhamelIntegral(f, lambda, 1.0).panels();
  EXPECT_GE(panels, 2000u);
  EXPECT_LE(panels, 2001u);
}

TEST(Duhamel, OutsideHorizonRejected) {
  const DuhamelIntegral d(ModeForcing::exponential(1.0, 1.0), 1.0, 1.0);
  EXPECT_THROW((void)d(1.5), InvalidArgument);
}

TEST(SpectralSolution, EmptyExpansionIsZero) {
  const SpectralSolution s({}, 1.0, 1.0);
  EXPECT_EQ(s.evaluate(0.3, 0.4), Complex(0.0));
}

TEST(SpectralSolution, DirichletAtEnds) {
  const SpectralSolution s(counterexample_forcing(6), 1.0, 1.0);
  for (double t : {0.2, 0.9}) {
    EXPECT_LE(std::abs(s.evaluate(0.0, t)), 1e-15);
    EXPECT_LE(std::abs(s.evaluate(1.0, t)), 1e-13);
  }
}

TEST(SpectralSolution, ResidualOfCounterexample) {
  const SpectralSolution s(counterexample_forcing(5), 1.0, 1.0);
  for (double x : {0.2, 0.55})
    for (double t : {0.3, 0.8}) EXPECT_LE(std::abs(s.residual(x, t)), 1e-5);
}

TEST(SpectralSolution, GeneralBetaUsesScaledEigenvalue) {
  const double beta = 3.0;
  const SpectralSolution s(counterexample_forcing(3, 1.0, beta), 1.0, 1.0, beta);
  for (std::size_t k = 1; k <= 3; ++k)
    EXPECT_LE(std::abs(s.u_k(k, 0.6) - counterexample_mode(k, 0.6, 1.0, beta)), 1e-13);
  EXPECT_LE(std::abs(s.residual(0.4, 0.5)), 1e-5);
}

TEST(SpectralSolution, MatchesClosedFormCase) {
  const SpectralSolution s(counterexample_forcing(4), 1.0, 1.0);
  const auto c = counterexample_case(4);
  for (double x : {0.1, 0.6})
    for (double t : {0.2, 0.7}) {
      EXPECT_LE(std::abs(s.evaluate(x, t) - c.u.eval(x, t)), 1e-13);
      EXPECT_LE(std::abs(s.evaluate_dx(x, t) - c.u.eval_dx(x, t)), 1e-12);
      EXPECT_LE(std::abs(c.forcing(x, t) - counterexample_field(4)(x, t)), 1e-11);
    }
}

TEST(SpectralSolution, Parseval) {
  const SpectralSolution s(counterexample_forcing(5), 1.0, 1.0);
  const auto c = parseval(s);
  EXPECT_NEAR(c.field, c.modal, 1e-10 * c.modal);
  EXPECT_NEAR(c.modal, partial_zeta2(5), 1e-12);
}

TEST(BlowupNorms, SingleMode) {
  const auto n = blowup_norms(1, 1.0);
  EXPECT_NEAR(n.u2, 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(n.dx2, pi * pi / 3.0, 1e-14);
}

TEST(BlowupNorms, TenModes) {
  const auto n = blowup_norms(10, 1.0);
  EXPECT_NEAR(n.u2, partial_zeta2(10) / 3.0, 1e-15);
  EXPECT_NEAR(n.dx2, 10.0 * pi * pi / 3.0, 1e-13);
}

TEST(BlowupNorms, QuadratureAgreesWithClosedForm) {
  for (std::size_t M : {1u, 5u, 10u}) {
    for (double T : {1.0, 0.5}) {
      const auto a = blowup_norms(M, T), b = blowup_norms_quadrature(M, T);
      EXPECT_NEAR(b.u2, a.u2, 1e-8 * a.u2);
      EXPECT_NEAR(b.dx2, a.dx2, 1e-8 * a.dx2);
    }
  }
}

TEST(BlowupNorms, MonotoneAndBounded) {
  const double limit = pi * pi / 18.0;
  double prev = 0.0;
  for (std::size_t M = 1; M <= 200; M += 11) {
    const auto n = blowup_norms(M, 1.0);
    EXPECT_GT(n.u2, prev);
    EXPECT_LT(n.u2, limit);
    prev = n.u2;
  }
  EXPECT_NEAR(blowup_norms(100000, 1.0).u2, limit, 1e-5);
  // second norm is linear in M with slope π²T³/3
  EXPECT_NEAR(blowup_norms(8, 2.0).dx2 - blowup_norms(7, 2.0).dx2, pi * pi * 8.0 / 3.0, 1e-12);
}
