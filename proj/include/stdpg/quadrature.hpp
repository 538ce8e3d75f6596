#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "error.hpp"

namespace stdpg {

/// Values and first two derivatives of a 1D function at a point.
struct Jet {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// Shifted Legendre polynomials L_n(s) = P_n(2s - 1) on [0, 1], n = 0..order,
/// with first and second derivatives in s.
inline std::vector<Jet> shifted_legendre(std::size_t order, double s) {
  std::vector<Jet> out(order + 1);
  const double y = 2.0 * s - 1.0;
  // recurrences in y; derivatives converted to s at the end
  double p0 = 1.0, d0 = 0.0, dd0 = 0.0;
  double p1 = y, d1 = 1.0, dd1 = 0.0;
  out[0] = {p0, d0, dd0};
  if (order >= 1) out[1] = {p1, d1, dd1};
  for (std::size_t n = 1; n < order; ++n) {
    const double a = static_cast<double>(2 * n + 1);
    const double b = static_cast<double>(n);
    const double c = static_cast<double>(n + 1);
    const double p2 = (a * y * p1 - b * p0) / c;
    const double d2 = (a * (p1 + y * d1) - b * d0) / c;
    const double dd2 = (a * (2.0 * d1 + y * dd1) - b * dd0) / c;
    out[n + 1] = {p2, d2, dd2};
    p0 = p1, d0 = d1, dd0 = dd1;
    p1 = p2, d1 = d2, dd1 = dd2;
  }
  for (auto& j : out) {
    j.d1 *= 2.0;
    j.d2 *= 4.0;
  }
  return out;
}

struct Rule1D {
  std::vector<double> points;
  std::vector<double> weights;
};

/// Gauss-Legendre rule with n nodes on [0, 1]; exact through degree 2n - 1.
inline Rule1D gauss_legendre_1d(std::size_t n) {
  STDPG_REQUIRE(n >= 1, InvalidArgument, "quadrature needs at least one point");
  Rule1D r;
  r.points.resize(n);
  r.weights.resize(n);
  // P_n(y) and P_n'(y) by the three-term recurrence
  const auto legendre = [n](double y) {
    double p0 = 1.0, p1 = y;
    for (std::size_t k = 1; k < n; ++k) {
      const double p2 = (static_cast<double>(2 * k + 1) * y * p1 -
                         static_cast<double>(k) * p0) /
                        static_cast<double>(k + 1);
      p0 = p1;
      p1 = p2;
    }
    return std::array<double, 2>{p1, static_cast<double>(n) * (y * p1 - p0) / (y * y - 1.0)};
  };
  for (std::size_t i = 0; i < n; ++i) {
    double y = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(y);
      const double dy = p / dp;
      y -= dy;
      if (std::abs(dy) < 1e-16) break;
    }
    const double dp = legendre(y)[1];
    const double w = 2.0 / ((1.0 - y * y) * dp * dp);
    // ascending order on [0, 1]
    r.points[n - 1 - i] = 0.5 * (y + 1.0);
    r.weights[n - 1 - i] = 0.5 * w;
  }
  return r;
}

/// Gauss-Lobatto nodes on [0, 1]: endpoints plus the roots of L_n'.
inline std::vector<double> gauss_lobatto_points(std::size_t n_intervals) {
  STDPG_REQUIRE(n_intervals >= 1, InvalidArgument, "Lobatto rule needs n >= 1");
  const std::size_t n = n_intervals;
  std::vector<double> pts(n + 1);
  pts.front() = 0.0;
  pts.back() = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    double s = 0.5 * (1.0 - std::cos(std::numbers::pi * static_cast<double>(i) /
                                     static_cast<double>(n)));
    for (int it = 0; it < 100; ++it) {
      const auto L = shifted_legendre(n, s);
      const double ds = L[n].d1 / L[n].d2;
      s -= ds;
      if (std::abs(ds) < 1e-16) break;
    }
    pts[i] = s;
  }
  return pts;
}

/// Tensor Gauss rule on (0,1)^2 with q nodes per direction.
struct QuadratureRule {
  std::vector<std::array<double, 2>> points; ///< (x̂, t̂)
  std::vector<double> weights;
  Rule1D line; ///< the underlying 1D rule
};

inline QuadratureRule gauss_legendre_2d(std::size_t q) {
  STDPG_REQUIRE(q >= 1, InvalidArgument, "quadrature order must be >= 1");
  QuadratureRule rule;
  rule.line = gauss_legendre_1d(q);
  rule.points.reserve(q * q);
  rule.weights.reserve(q * q);
  for (std::size_t j = 0; j < q; ++j)
    for (std::size_t i = 0; i < q; ++i) {
      rule.points.push_back({rule.line.points[i], rule.line.points[j]});
      rule.weights.push_back(rule.line.weights[i] * rule.line.weights[j]);
    }
  return rule;
}

/// Composite Gauss rule with `panels` equal panels of `n` nodes on [a, b].
inline Rule1D composite_gauss(double a, double b, std::size_t panels, std::size_t n) {
  STDPG_REQUIRE(panels >= 1, InvalidArgument, "composite rule needs >= 1 panel");
  const Rule1D base = gauss_legendre_1d(n);
  Rule1D r;
  r.points.reserve(panels * n);
  r.weights.reserve(panels * n);
  const double h = (b - a) / static_cast<double>(panels);
  for (std::size_t k = 0; k < panels; ++k) {
    const double left = a + static_cast<double>(k) * h;
    for (std::size_t i = 0; i < n; ++i) {
      r.points.push_back(left + h * base.points[i]);
      r.weights.push_back(h * base.weights[i]);
    }
  }
  return r;
}

} // namespace stdpg
