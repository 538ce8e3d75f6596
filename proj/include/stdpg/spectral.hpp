#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <vector>

#include "error.hpp"
#include "physics.hpp"
#include "quadrature.hpp"

namespace stdpg {

/// Dirichlet eigenpairs of −∂ₓₓ on (0, L): e_k = sqrt(2/L) sin(kπx/L), ω_k² = (kπ/L)².
struct SineModes {
  double length = 1.0;

  [[nodiscard]] double omega2(std::size_t k) const {
    const double w = static_cast<double>(k) * std::numbers::pi / length;
    return w * w;
  }
  [[nodiscard]] double e(std::size_t k, double x) const {
    return std::sqrt(2.0 / length) *
           std::sin(static_cast<double>(k) * std::numbers::pi * x / length);
  }
  [[nodiscard]] double de(std::size_t k, double x) const {
    const double w = static_cast<double>(k) * std::numbers::pi / length;
    return std::sqrt(2.0 / length) * w * std::cos(w * x);
  }
};

/// One modal forcing coefficient f_k(t): either c·e^{iμt} (closed form) or a
/// general callable.
struct ModeForcing {
  enum class Kind { zero, exponential, sampled };
  Kind kind = Kind::zero;
  Complex amplitude = 0.0;
  double rate = 0.0;
  std::function<Complex(double)> sample;

  static ModeForcing exponential(Complex c, double mu) {
    return {Kind::exponential, c, mu, {}};
  }
  static ModeForcing sampled(std::function<Complex(double)> f) {
    return {Kind::sampled, 0.0, 0.0, std::move(f)};
  }

  [[nodiscard]] Complex operator()(double t) const {
    switch (kind) {
    case Kind::zero: return 0.0;
    case Kind::exponential: return amplitude * std::exp(I * rate * t);
    case Kind::sampled: return sample(t);
    }
    return 0.0;
  }
};

/// u_k(t) = −i ∫₀ᵗ e^{iλ(t−s)} f_k(s) ds on [0, T]. Sampled forcings use a
/// composite 6-point Gauss rule on 40·max(1, λT/2π) uniform panels with
/// precomputed panel integrals; exponentials use the closed form.
class DuhamelIntegral {
public:
  static constexpr std::size_t points_per_panel = 6;

  DuhamelIntegral(ModeForcing f, double lambda, double horizon)
      : f_(std::move(f)), lambda_(lambda), horizon_(horizon) {
    STDPG_REQUIRE(horizon > 0.0, InvalidArgument, "time horizon must be positive");
    if (f_.kind != ModeForcing::Kind::sampled) return;
    panels_ = static_cast<std::size_t>(
        std::ceil(40.0 * std::max(1.0, lambda * horizon / (2.0 * std::numbers::pi))));
    width_ = horizon / static_cast<double>(panels_);
    base_ = gauss_legendre_1d(points_per_panel);
    prefix_.assign(panels_ + 1, Complex(0.0));
    for (std::size_t m = 0; m < panels_; ++m)
      prefix_[m + 1] = prefix_[m] + panel(static_cast<double>(m) * width_, width_);
  }

  [[nodiscard]] std::size_t panels() const { return panels_; }

  [[nodiscard]] Complex operator()(double t) const {
    STDPG_REQUIRE(t >= -1e-14 && t <= horizon_ * (1.0 + 1e-14), InvalidArgument,
                  "Duhamel time outside [0, T]");
    t = std::clamp(t, 0.0, horizon_);
    const Complex phase = std::exp(I * lambda_ * t);
    switch (f_.kind) {
    case ModeForcing::Kind::zero: return 0.0;
    case ModeForcing::Kind::exponential: {
      const double d = f_.rate - lambda_;
      const Complex integral = std::abs(d * t) < 1e-12
                                   ? f_.amplitude * t
                                   : f_.amplitude * (std::exp(I * d * t) - 1.0) / (I * d);
      return -I * phase * integral;
    }
    case ModeForcing::Kind::sampled: {
      const auto m = std::min(panels_, static_cast<std::size_t>(t / width_));
      Complex integral = prefix_[m];
      const double left = static_cast<double>(m) * width_;
      if (t > left) integral += panel(left, t - left);
      return -I * phase * integral;
    }
    }
    return 0.0;
  }

private:
  [[nodiscard]] Complex panel(double left, double width) const {
    Complex acc = 0.0;
    for (std::size_t i = 0; i < base_.points.size(); ++i) {
      const double s = left + width * base_.points[i];
      acc += base_.weights[i] * std::exp(-I * lambda_ * s) * f_(s);
    }
    return acc * width;
  }

  ModeForcing f_;
  double lambda_;
  double horizon_;
  std::size_t panels_ = 0;
  double width_ = 0.0;
  Rule1D base_;
  std::vector<Complex> prefix_;
};

inline Complex duhamel(const ModeForcing& f, double lambda, double t) {
  if (t <= 0.0) return 0.0;
  return DuhamelIntegral(f, lambda, t)(t);
}

struct ForcingExpansion {
  std::vector<ModeForcing> modes; ///< modes[k-1] = f_k
  bool under_resolved = false;    ///< mode-M coefficient unstable under panel doubling
};

/// f_k(t) = ∫ f(x,t) e_k(x) dx with composite 8-point Gauss on 2M panels
/// (at least 8 points per half-wave of e_M).
inline ForcingExpansion expand_forcing(std::function<Complex(double, double)> f, std::size_t M,
                                       double length, double horizon) {
  ForcingExpansion out;
  if (M == 0) return out;
  const SineModes modes{length};
  const auto project = [f, modes, length](std::size_t k, std::size_t panels) {
    const Rule1D rule = composite_gauss(0.0, length, panels, 8);
    std::vector<double> ek(rule.points.size());
    for (std::size_t q = 0; q < rule.points.size(); ++q)
      ek[q] = rule.weights[q] * modes.e(k, rule.points[q]);
    return [f, rule, ek](double t) {
      Complex acc = 0.0;
      for (std::size_t q = 0; q < ek.size(); ++q) acc += f(rule.points[q], t) * ek[q];
      return acc;
    };
  };
  for (std::size_t k = 1; k <= M; ++k) out.modes.push_back(ModeForcing::sampled(project(k, 2 * M)));

  const auto fine = project(M, 4 * M);
  double scale = 0.0, diff = 0.0;
  for (double t : {0.0, 0.5 * horizon, horizon}) {
    const Complex a = out.modes.back()(t), b = fine(t);
    scale = std::max(scale, std::abs(b));
    diff = std::max(diff, std::abs(a - b));
  }
  out.under_resolved = diff > 1e-8 * std::max(scale, 1e-300) && diff > 1e-13;
  return out;
}

/// U_M(x,t) = Σ_{k≤M} u_k(t) e_k(x) for i∂ₜu − (β/2)∂ₓₓu = F_M with zero data.
/// β enters through the mode eigenvalue λ_k = (β/2)ω_k².
class SpectralSolution {
public:
  SpectralSolution(std::vector<ModeForcing> forcing, double length, double horizon,
                   double beta = 2.0)
      : modes_{length}, horizon_(horizon), beta_(beta), forcing_(std::move(forcing)) {
    STDPG_REQUIRE(length > 0.0 && horizon > 0.0, InvalidArgument, "domain must be non-empty");
    for (std::size_t k = 1; k <= forcing_.size(); ++k)
      integrals_.emplace_back(forcing_[k - 1], eigenvalue(k), horizon);
  }

  [[nodiscard]] std::size_t size() const { return forcing_.size(); }
  [[nodiscard]] double length() const { return modes_.length; }
  [[nodiscard]] double horizon() const { return horizon_; }
  [[nodiscard]] const SineModes& modes() const { return modes_; }
  [[nodiscard]] double eigenvalue(std::size_t k) const { return 0.5 * beta_ * modes_.omega2(k); }

  [[nodiscard]] Complex f_k(std::size_t k, double t) const { return forcing_.at(k - 1)(t); }
  [[nodiscard]] Complex u_k(std::size_t k, double t) const { return integrals_.at(k - 1)(t); }

  /// All mode amplitudes at one time; reuse across many x.
  [[nodiscard]] std::vector<Complex> amplitudes(double t) const {
    std::vector<Complex> a(size());
    for (std::size_t k = 1; k <= size(); ++k) a[k - 1] = u_k(k, t);
    return a;
  }

  [[nodiscard]] Complex evaluate(double x, double t) const {
    return synthesize(amplitudes(t), x);
  }
  [[nodiscard]] Complex evaluate_dx(double x, double t) const {
    const auto a = amplitudes(t);
    Complex acc = 0.0;
    for (std::size_t k = 1; k <= a.size(); ++k) acc += a[k - 1] * modes_.de(k, x);
    return acc;
  }
  [[nodiscard]] Complex synthesize(const std::vector<Complex>& a, double x) const {
    Complex acc = 0.0;
    for (std::size_t k = 1; k <= a.size(); ++k) acc += a[k - 1] * modes_.e(k, x);
    return acc;
  }
  [[nodiscard]] Complex forcing(double x, double t) const {
    Complex acc = 0.0;
    for (std::size_t k = 1; k <= size(); ++k) acc += f_k(k, t) * modes_.e(k, x);
    return acc;
  }

  /// A U_M − F_M at (x,t), with ∂ₜu_k = −i f_k + iλ_k u_k from the Duhamel ODE
  /// replaced by a central difference in t so the check is independent of it.
  [[nodiscard]] Complex residual(double x, double t, double h = 1e-6) const {
    const SchrodingerOperator op(beta_);
    const Complex ut = (evaluate(x, t + h) - evaluate(x, t - h)) / (2.0 * h);
    Complex uxx = 0.0;
    const auto a = amplitudes(t);
    for (std::size_t k = 1; k <= a.size(); ++k) uxx -= modes_.omega2(k) * a[k - 1] * modes_.e(k, x);
    return op.apply(ut, uxx) - forcing(x, t);
  }

private:
  SineModes modes_;
  double horizon_;
  double beta_;
  std::vector<ModeForcing> forcing_;
  std::vector<DuhamelIntegral> integrals_;
};

/// f = Σ_{k≤M} (1/k) e^{iλ_k t} e_k(x): resonant forcing whose solution has
/// ‖∂ₓU_M‖ → ∞ as M → ∞.
inline std::vector<ModeForcing> counterexample_forcing(std::size_t M, double length = 1.0,
                                                       double beta = 2.0) {
  const SineModes modes{length};
  std::vector<ModeForcing> f;
  for (std::size_t k = 1; k <= M; ++k)
    f.push_back(ModeForcing::exponential(1.0 / static_cast<double>(k),
                                         0.5 * beta * modes.omega2(k)));
  return f;
}

/// The counterexample forcing F_M as a spacetime field.
inline std::function<Complex(double, double)> counterexample_field(std::size_t M,
                                                                   double length = 1.0,
                                                                   double beta = 2.0) {
  const SineModes modes{length};
  return [M, modes, beta](double x, double t) {
    Complex acc = 0.0;
    for (std::size_t k = 1; k <= M; ++k)
      acc += std::exp(I * 0.5 * beta * modes.omega2(k) * t) / static_cast<double>(k) *
             modes.e(k, x);
    return acc;
  };
}

/// Closed-form u_k = −i t e^{iλ_k t}/k of the counterexample.
inline Complex counterexample_mode(std::size_t k, double t, double length = 1.0,
                                   double beta = 2.0) {
  const double lambda = 0.5 * beta * SineModes{length}.omega2(k);
  return -I * t * std::exp(I * lambda * t) / static_cast<double>(k);
}

/// U_M with closed-form derivatives, packaged so that A U_M = F_M.
inline ManufacturedCase counterexample_case(std::size_t M, double length = 1.0,
                                            double beta = 2.0) {
  STDPG_REQUIRE(M >= 1, InvalidArgument, "counterexample needs M >= 1");
  ManufacturedCase c{"counterexample", SchrodingerOperator(beta), {}};
  const SineModes modes{length};
  const auto sum = [M, modes, beta](double x, double t, int what) {
    Complex acc = 0.0;
    for (std::size_t k = 1; k <= M; ++k) {
      const double lambda = 0.5 * beta * modes.omega2(k);
      const Complex phase = std::exp(I * lambda * t) / static_cast<double>(k);
      const Complex uk = -I * t * phase;
      switch (what) {
      case 0: acc += uk * modes.e(k, x); break;
      case 1: acc += uk * modes.de(k, x); break;
      case 2: acc += (-I * phase + lambda * t * phase) * modes.e(k, x); break;
      default: acc += -modes.omega2(k) * uk * modes.e(k, x); break;
      }
    }
    return acc;
  };
  c.u.value = [sum](double x, double t) { return sum(x, t, 0); };
  c.u.dx = [sum](double x, double t) { return sum(x, t, 1); };
  c.u.dt = [sum](double x, double t) { return sum(x, t, 2); };
  c.u.dxx = [sum](double x, double t) { return sum(x, t, 3); };
  return c;
}

struct BlowupNorms {
  double u2 = 0.0;  ///< ‖U_M‖²_Ω
  double dx2 = 0.0; ///< ‖∂ₓU_M‖²_Ω
};

/// Closed forms for L = 1: ((T³/3) Σ 1/k², (π²/3) T³ M).
inline BlowupNorms blowup_norms(std::size_t M, double T) {
  BlowupNorms n;
  double s = 0.0;
  for (std::size_t k = M; k >= 1; --k) s += 1.0 / (static_cast<double>(k) * static_cast<double>(k));
  n.u2 = T * T * T / 3.0 * s;
  n.dx2 = std::numbers::pi * std::numbers::pi / 3.0 * T * T * T * static_cast<double>(M);
  return n;
}

/// The same two norms integrated from U_M on (0,1) × (0,T): composite 12-point
/// Gauss in x on 2M panels and 4 × 8 Gauss points in t.
inline BlowupNorms blowup_norms_quadrature(std::size_t M, double T, double beta = 2.0) {
  BlowupNorms n;
  if (M == 0) return n;
  const SpectralSolution sol(counterexample_forcing(M, 1.0, beta), 1.0, T, beta);
  const Rule1D rx = composite_gauss(0.0, 1.0, 2 * M, 12);
  const Rule1D rt = composite_gauss(0.0, T, 4, 8);
  for (std::size_t j = 0; j < rt.points.size(); ++j) {
    const auto a = sol.amplitudes(rt.points[j]);
    double su = 0.0, sd = 0.0;
    for (std::size_t i = 0; i < rx.points.size(); ++i) {
      const double x = rx.points[i];
      Complex v = 0.0, d = 0.0;
      for (std::size_t k = 1; k <= M; ++k) {
        v += a[k - 1] * sol.modes().e(k, x);
        d += a[k - 1] * sol.modes().de(k, x);
      }
      su += rx.weights[i] * std::norm(v);
      sd += rx.weights[i] * std::norm(d);
    }
    n.u2 += rt.weights[j] * su;
    n.dx2 += rt.weights[j] * sd;
  }
  return n;
}

/// ‖F‖²_Ω by direct 2D quadrature and Σ_k ∫|f_k|² dt, for Parseval checks.
struct ParsevalCheck {
  double field = 0.0;
  double modal = 0.0;
};

inline ParsevalCheck parseval(const SpectralSolution& sol, std::size_t time_panels = 16) {
  ParsevalCheck c;
  const std::size_t M = sol.size();
  const Rule1D rx = composite_gauss(0.0, sol.length(), 2 * std::max<std::size_t>(M, 1), 12);
  const Rule1D rt = composite_gauss(0.0, sol.horizon(), time_panels, 8);
  for (std::size_t j = 0; j < rt.points.size(); ++j) {
    const double t = rt.points[j];
    double s = 0.0;
    for (std::size_t i = 0; i < rx.points.size(); ++i)
      s += rx.weights[i] * std::norm(sol.forcing(rx.points[i], t));
    c.field += rt.weights[j] * s;
    double m = 0.0;
    for (std::size_t k = 1; k <= M; ++k) m += std::norm(sol.f_k(k, t));
    c.modal += rt.weights[j] * m;
  }
  return c;
}

} // namespace stdpg
