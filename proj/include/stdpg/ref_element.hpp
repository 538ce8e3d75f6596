#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"
#include "mesh.hpp"
#include "quadrature.hpp"

namespace stdpg {

/// Value and the derivatives the Schrödinger graph norm needs.
struct TensorJet {
  double v = 0.0;
  double dx = 0.0;
  double dt = 0.0;
  double dxx = 0.0;
};

/// Tensor shifted-Legendre basis of Q_order on (0,1)^2. Entry a + (order+1) b is
/// L_a(x̂) L_b(t̂).
inline std::vector<TensorJet> legendre_tensor(std::size_t order, double xr, double tr) {
  const auto lx = shifted_legendre(order, xr);
  const auto lt = shifted_legendre(order, tr);
  const std::size_t n = order + 1;
  std::vector<TensorJet> out(n * n);
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t a = 0; a < n; ++a)
      out[a + n * b] = {lx[a].value * lt[b].value, lx[a].d1 * lt[b].value,
                        lx[a].value * lt[b].d1, lx[a].d2 * lt[b].value};
  return out;
}

/// Pull a reference jet back to element K via T_K(x̂,t̂) = (x_K + h_x x̂, t_K + h_t t̂).
inline TensorJet to_physical(const TensorJet& ref, const Element& K) {
  return {ref.v, ref.dx / K.hx, ref.dt / K.ht, ref.dxx / (K.hx * K.hx)};
}

/// Real scalar field with optional analytic derivatives. Missing derivatives fall
/// back to central differences with step 1e-6.
struct ScalarField {
  std::function<double(double, double)> value;
  std::function<double(double, double)> dx;
  std::function<double(double, double)> dt;
  std::function<double(double, double)> dxx;

  static constexpr double fd_step = 1e-6;

  [[nodiscard]] double eval(double x, double t) const { return value(x, t); }
  [[nodiscard]] double eval_dx(double x, double t) const {
    if (dx) return dx(x, t);
    return (value(x + fd_step, t) - value(x - fd_step, t)) / (2.0 * fd_step);
  }
  [[nodiscard]] double eval_dt(double x, double t) const {
    if (dt) return dt(x, t);
    return (value(x, t + fd_step) - value(x, t - fd_step)) / (2.0 * fd_step);
  }
  [[nodiscard]] double eval_dxx(double x, double t) const {
    if (dxx) return dxx(x, t);
    constexpr double h = 1e-4;
    return (value(x + h, t) - 2.0 * value(x, t) + value(x - h, t)) / (h * h);
  }
};

enum class DofKind { value, dx_left, dx_right };

struct DofFunctional {
  DofKind kind = DofKind::value;
  double x = 0.0;
  double t = 0.0;
};

/// The point-value and x-derivative functionals Σ of Q_p(K̂):
///   σ_ij(w) = w(i/(p-2), j/p),  σ_j⁰(w) = ∂ₓw(0, j/p),  σ_j¹(w) = ∂ₓw(1, j/p).
class DofSet {
public:
  explicit DofSet(std::size_t p) : p_(p) {
    STDPG_REQUIRE(p >= 3, UnsupportedOrder, "Σ is unisolvent only for p >= 3");
    for (std::size_t j = 0; j <= p; ++j) {
      const double t = static_cast<double>(j) / static_cast<double>(p);
      for (std::size_t i = 0; i <= p - 2; ++i)
        functionals_.push_back(
            {DofKind::value, static_cast<double>(i) / static_cast<double>(p - 2), t});
      functionals_.push_back({DofKind::dx_left, 0.0, t});
      functionals_.push_back({DofKind::dx_right, 1.0, t});
    }
  }

  [[nodiscard]] std::size_t order() const { return p_; }
  [[nodiscard]] std::size_t size() const { return functionals_.size(); }
  [[nodiscard]] const std::vector<DofFunctional>& functionals() const { return functionals_; }

  [[nodiscard]] double apply(const DofFunctional& s, const TensorJet& jet) const {
    return s.kind == DofKind::value ? jet.v : jet.dx;
  }

private:
  std::size_t p_;
  std::vector<DofFunctional> functionals_;
};

/// Shape functions of Q_p(K̂) dual to Σ, stored as tensor-Legendre coefficients.
class DualBasis {
public:
  explicit DualBasis(std::size_t p) : dofs_(p) {
    const std::size_t n = dofs_.size();
    vandermonde_.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < n; ++r) {
      const auto& s = dofs_.functionals()[r];
      const auto modal = legendre_tensor(p, s.x, s.t);
      for (std::size_t m = 0; m < n; ++m)
        vandermonde_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(m)) =
            dofs_.apply(s, modal[m]);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(vandermonde_);
    const auto& sv = svd.singularValues();
    condition_ = sv(0) / sv(sv.size() - 1);
    STDPG_REQUIRE(std::isfinite(condition_) && sv(sv.size() - 1) > 1e-14 * sv(0),
                  AssemblyFailure, "Σ Vandermonde matrix is singular");
    coefficients_ = vandermonde_.partialPivLu().inverse();
  }

  [[nodiscard]] std::size_t order() const { return dofs_.order(); }
  [[nodiscard]] std::size_t size() const { return dofs_.size(); }
  [[nodiscard]] const DofSet& dofs() const { return dofs_; }
  /// 2-norm condition number of the generalized Vandermonde matrix.
  [[nodiscard]] double vandermonde_condition() const { return condition_; }
  /// Column σ holds the modal coefficients of φ_σ.
  [[nodiscard]] const Eigen::MatrixXd& coefficients() const { return coefficients_; }

  [[nodiscard]] std::vector<TensorJet> evaluate(double xr, double tr) const {
    const auto modal = legendre_tensor(order(), xr, tr);
    const std::size_t n = size();
    std::vector<TensorJet> out(n);
    for (std::size_t s = 0; s < n; ++s) {
      TensorJet acc;
      for (std::size_t m = 0; m < n; ++m) {
        const double c =
            coefficients_(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(s));
        acc.v += c * modal[m].v;
        acc.dx += c * modal[m].dx;
        acc.dt += c * modal[m].dt;
        acc.dxx += c * modal[m].dxx;
      }
      out[s] = acc;
    }
    return out;
  }

  /// Matrix of η(φ_σ); the identity up to rounding.
  [[nodiscard]] Eigen::MatrixXd duality_matrix() const {
    const std::size_t n = size();
    Eigen::MatrixXd d(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < n; ++r) {
      const auto& eta = dofs_.functionals()[r];
      const auto phi = evaluate(eta.x, eta.t);
      for (std::size_t s = 0; s < n; ++s)
        d(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(s)) =
            dofs_.apply(eta, phi[s]);
    }
    return d;
  }

  /// Π̂w evaluated at a reference point, given the DOF values σ(w).
  [[nodiscard]] TensorJet evaluate_interpolant(const Eigen::VectorXd& dof_values, double xr,
                                               double tr) const {
    STDPG_REQUIRE(static_cast<std::size_t>(dof_values.size()) == size(), InvalidArgument,
                  "coefficient vector has the wrong length");
    const auto phi = evaluate(xr, tr);
    TensorJet acc;
    for (std::size_t s = 0; s < size(); ++s) {
      const double c = dof_values(static_cast<Eigen::Index>(s));
      acc.v += c * phi[s].v;
      acc.dx += c * phi[s].dx;
      acc.dt += c * phi[s].dt;
      acc.dxx += c * phi[s].dxx;
    }
    return acc;
  }

private:
  DofSet dofs_;
  Eigen::MatrixXd vandermonde_;
  Eigen::MatrixXd coefficients_;
  double condition_ = 0.0;
};

inline DualBasis dual_basis(std::size_t p) { return DualBasis(p); }

/// DOF values σ(w) of a field given on the reference element; these are the
/// coefficients of Π̂w in the dual basis.
inline Eigen::VectorXd interpolate(const DualBasis& basis, const ScalarField& w) {
  const auto& fs = basis.dofs().functionals();
  Eigen::VectorXd c(static_cast<Eigen::Index>(fs.size()));
  for (std::size_t i = 0; i < fs.size(); ++i) {
    const auto& s = fs[i];
    c(static_cast<Eigen::Index>(i)) =
        s.kind == DofKind::value ? w.eval(s.x, s.t) : w.eval_dx(s.x, s.t);
  }
  return c;
}

/// Pull back a physical field to the reference element of K (ŵ = w ∘ T_K).
inline ScalarField pull_back(const ScalarField& w, const Element& K) {
  ScalarField r;
  r.value = [w, K](double xr, double tr) {
    const auto P = K.map(xr, tr);
    return w.eval(P.x, P.t);
  };
  r.dx = [w, K](double xr, double tr) {
    const auto P = K.map(xr, tr);
    return K.hx * w.eval_dx(P.x, P.t);
  };
  r.dt = [w, K](double xr, double tr) {
    const auto P = K.map(xr, tr);
    return K.ht * w.eval_dt(P.x, P.t);
  };
  r.dxx = [w, K](double xr, double tr) {
    const auto P = K.map(xr, tr);
    return K.hx * K.hx * w.eval_dxx(P.x, P.t);
  };
  return r;
}

/// Interpolation errors measured on one cell.
struct InterpolationError {
  double l2 = 0.0;  ///< ‖w − Πw‖
  double dt = 0.0;  ///< ‖∂ₜ(w − Πw)‖
  double dxx = 0.0; ///< ‖∂ₓₓ(w − Πw)‖
};

/// Squared interpolation errors of w on element K, integrated with `rule`.
/// Passing a "unit" element (corner 0, h = 1) measures reference-element errors.
inline InterpolationError interpolation_error_squared(const DualBasis& basis,
                                                      const ScalarField& w,
                                                      const Element& K,
                                                      const QuadratureRule& rule) {
  const Eigen::VectorXd c = interpolate(basis, pull_back(w, K));
  InterpolationError e;
  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    const auto [xr, tr] = rule.points[q];
    const TensorJet pi = to_physical(basis.evaluate_interpolant(c, xr, tr), K);
    const auto P = K.map(xr, tr);
    const double wq = rule.weights[q] * K.area();
    const double d0 = w.eval(P.x, P.t) - pi.v;
    const double d1 = w.eval_dt(P.x, P.t) - pi.dt;
    const double d2 = w.eval_dxx(P.x, P.t) - pi.dxx;
    e.l2 += wq * d0 * d0;
    e.dt += wq * d1 * d1;
    e.dxx += wq * d2 * d2;
  }
  return e;
}

} // namespace stdpg
