#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <string>

#include "error.hpp"
#include "fe_spaces.hpp"

namespace stdpg {

inline constexpr Complex I{0.0, 1.0};

/// Complex spacetime field with optional closed-form derivatives; missing ones
/// are replaced by central differences.
struct ComplexField {
  using Fn = std::function<Complex(double, double)>;
  Fn value;
  Fn dx;
  Fn dt;
  Fn dxx;

  [[nodiscard]] Complex eval(double x, double t) const { return value(x, t); }
  [[nodiscard]] Complex eval_dx(double x, double t) const {
    if (dx) return dx(x, t);
    constexpr double h = 1e-6;
    return (value(x + h, t) - value(x - h, t)) / (2.0 * h);
  }
  [[nodiscard]] Complex eval_dt(double x, double t) const {
    if (dt) return dt(x, t);
    constexpr double h = 1e-6;
    return (value(x, t + h) - value(x, t - h)) / (2.0 * h);
  }
  [[nodiscard]] Complex eval_dxx(double x, double t) const {
    if (dxx) return dxx(x, t);
    constexpr double h = 1e-4;
    return (value(x + h, t) - 2.0 * value(x, t) + value(x - h, t)) / (h * h);
  }
};

/// A u = i ∂ₜu − (β/2) ∂ₓₓu.
struct SchrodingerOperator {
  double beta = 2.0;

  explicit SchrodingerOperator(double b = 2.0) : beta(b) {
    STDPG_REQUIRE(b > 0.0, InvalidArgument, "dispersion coefficient β must be positive");
  }

  [[nodiscard]] Complex apply(Complex u_t, Complex u_xx) const {
    return I * u_t - 0.5 * beta * u_xx;
  }
};

inline Complex apply_operator(const SchrodingerOperator& op, const ComplexField& u, double x,
                              double t) {
  return op.apply(u.eval_dt(x, t), u.eval_dxx(x, t));
}

/// Exact solution plus the forcing f = A u that manufactures it.
struct ManufacturedCase {
  std::string name;
  SchrodingerOperator op;
  ComplexField u;

  [[nodiscard]] Complex forcing(double x, double t) const {
    return op.apply(u.eval_dt(x, t), u.eval_dxx(x, t));
  }
  [[nodiscard]] std::function<Complex(double, double)> forcing_fn() const {
    return [c = *this](double x, double t) { return c.forcing(x, t); };
  }
  /// Traces of u on Γ of (0, L) × (0, T).
  [[nodiscard]] BoundaryData boundary_data(double length) const {
    auto v = u.value;
    return {[v](double x) { return v(x, 0.0); }, [v](double t) { return v(0.0, t); },
            [v, length](double t) { return v(length, t); }};
  }
};

/// u = M T₀ / sqrt(T₀² − iβt) · exp(−x² / (T₀² − iβt)), principal square root.
inline ManufacturedCase gaussian_case(double M = 1.5, double T0 = 1.5, double beta = 2.5) {
  STDPG_REQUIRE(T0 > 0.0, InvalidArgument, "T0 must be positive");
  ManufacturedCase c{"gaussian", SchrodingerOperator(beta), {}};
  const auto z = [T0, beta](double t) { return Complex(T0 * T0, -beta * t); };
  const auto u = [M, T0, z](double x, double t) {
    const Complex zt = z(t);
    return M * T0 / std::sqrt(zt) * std::exp(-x * x / zt);
  };
  c.u.value = u;
  c.u.dx = [u, z](double x, double t) { return u(x, t) * (-2.0 * x / z(t)); };
  c.u.dxx = [u, z](double x, double t) {
    const Complex zt = z(t);
    return u(x, t) * (4.0 * x * x / (zt * zt) - 2.0 / zt);
  };
  c.u.dt = [u, z, beta](double x, double t) {
    const Complex zt = z(t);
    return u(x, t) * (-I * beta) * (-0.5 / zt + x * x / (zt * zt));
  };
  return c;
}

/// u = a₀ exp(−(x² + t²)/ω²), a₀ = (2/ω²)^{1/4}.
inline ManufacturedCase wavepacket_case(double omega = 20.0, double beta = 2.5) {
  STDPG_REQUIRE(omega > 0.0, InvalidArgument, "ω must be positive");
  ManufacturedCase c{"wavepacket", SchrodingerOperator(beta), {}};
  const double w2 = omega * omega;
  const double a0 = std::pow(2.0 / w2, 0.25);
  const auto u = [a0, w2](double x, double t) {
    return Complex(a0 * std::exp(-(x * x + t * t) / w2), 0.0);
  };
  c.u.value = u;
  c.u.dx = [u, w2](double x, double t) { return u(x, t) * (-2.0 * x / w2); };
  c.u.dt = [u, w2](double x, double t) { return u(x, t) * (-2.0 * t / w2); };
  c.u.dxx = [u, w2](double x, double t) {
    return u(x, t) * (4.0 * x * x / (w2 * w2) - 2.0 / w2);
  };
  return c;
}

inline double wavepacket_amplitude(double omega) { return std::pow(2.0 / (omega * omega), 0.25); }

/// u = x·t, which lies in Q_{p-1} for every p >= 3.
inline ManufacturedCase polynomial_case(double beta = 2.5) {
  ManufacturedCase c{"polynomial", SchrodingerOperator(beta), {}};
  c.u.value = [](double x, double t) { return Complex(x * t); };
  c.u.dx = [](double, double t) { return Complex(t); };
  c.u.dt = [](double x, double) { return Complex(x); };
  c.u.dxx = [](double, double) { return Complex(0.0); };
  return c;
}

inline ManufacturedCase zero_case(double beta = 2.5) {
  ManufacturedCase c{"zero", SchrodingerOperator(beta), {}};
  const auto z = [](double, double) { return Complex(0.0); };
  c.u = {z, z, z, z};
  return c;
}

} // namespace stdpg
