#pragma once

#include <algorithm>
#include <array>
#include <random>
#include <vector>

#include "stdpg/dpg.hpp"

namespace stdpg::support {

/// Σ c_m exp(i(a_m x + b_m t)) with random complex c_m and real a_m, b_m.
struct PlaneWaves {
  std::vector<Complex> c;
  std::vector<double> a, b;

  PlaneWaves(std::mt19937& gen, int terms) {
    std::uniform_real_distribution<double> U(-3.0, 3.0);
    for (int m = 0; m < terms; ++m) {
      c.emplace_back(U(gen), U(gen));
      a.push_back(U(gen));
      b.push_back(U(gen));
    }
  }
  [[nodiscard]] Complex value(double x, double t) const {
    Complex s = 0.0;
    for (std::size_t m = 0; m < c.size(); ++m) s += c[m] * std::exp(I * (a[m] * x + b[m] * t));
    return s;
  }
  [[nodiscard]] Complex dx(double x, double t) const {
    Complex s = 0.0;
    for (std::size_t m = 0; m < c.size(); ++m)
      s += I * a[m] * c[m] * std::exp(I * (a[m] * x + b[m] * t));
    return s;
  }
};

struct PairingDefect {
  double max_interior = 0.0; ///< max over interior edges of |sum of the two sides|
  double max_single = 0.0;   ///< max single-side contribution, for scale
  std::size_t interior_edges = 0;
};

/// Accumulates the trace/flux pairing of every element side per skeleton edge,
/// with trace q⁺ = u, flux q^∣ = ∂ₓu and a globally smooth test function v.
inline PairingDefect skeleton_defect(const Mesh& mesh, const Skeleton& sk, double beta,
                                     const PlaneWaves& u, const PlaneWaves& v) {
  const Rule1D rule = gauss_legendre_1d(10);
  std::vector<Complex> sum(sk.edges().size(), 0.0);
  PairingDefect d;
  for (const auto& K : mesh.elements()) {
    const auto& sides = sk.element_edges(K.id);
    for (std::size_t s = 0; s < 4; ++s) {
      const auto side = static_cast<Side>(s);
      const auto at = [&](double r) {
        const auto [xr, tr] = side_point(side, r);
        return K.map(xr, tr);
      };
      const Complex c = side_pairing(
          K, side, sides[s].nx, sides[s].nt, beta, rule,
          [&](Point P) { return std::pair<Complex, Complex>{v.value(P.x, P.t), v.dx(P.x, P.t)}; },
          [&](double r) { const Point P = at(r); return u.value(P.x, P.t); },
          [&](double r) { const Point P = at(r); return u.dx(P.x, P.t); });
      sum[sides[s].edge] += c;
      d.max_single = std::max(d.max_single, std::abs(c));
    }
  }
  for (const auto& e : sk.edges()) {
    if (!e.interior()) continue;
    ++d.interior_edges;
    d.max_interior = std::max(d.max_interior, std::abs(sum[e.id]));
  }
  return d;
}

} // namespace stdpg::support
