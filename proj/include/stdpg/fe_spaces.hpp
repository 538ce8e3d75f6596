#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "error.hpp"
#include "mesh.hpp"
#include "quadrature.hpp"

namespace stdpg {

using Complex = std::complex<double>;

/// Flux order p (ideal, matches the interpolation theory) or p - 1 (practical).
enum class Variant { ideal, practical };

inline std::string to_string(Variant v) { return v == Variant::ideal ? "ideal" : "practical"; }

inline Variant parse_variant(const std::string& s) {
  if (s == "ideal") return Variant::ideal;
  if (s == "practical") return Variant::practical;
  throw InvalidArgument("unknown variant '" + s + "' (expected ideal|practical)");
}

/// Lagrange basis at the Gauss-Lobatto nodes of an edge.
struct EdgeLagrange {
  std::vector<double> nodes;

  [[nodiscard]] std::vector<double> values(double s) const {
    std::vector<double> out(nodes.size(), 1.0);
    for (std::size_t a = 0; a < nodes.size(); ++a)
      for (std::size_t b = 0; b < nodes.size(); ++b)
        if (a != b) out[a] *= (s - nodes[b]) / (nodes[a] - nodes[b]);
    return out;
  }
};

/// Where a skeleton DOF lives and whether it is prescribed by Γ data.
struct TraceSlot {
  bool constrained = false;
  std::size_t index = 0; ///< global free index, or index into the constrained list
};

/// Global reference of one local trial DOF.
struct LocalDof {
  bool constrained = false;
  std::size_t index = 0;
};

/// Numbering of the trial unknowns: u-block (Q_{p-1} per element), continuous
/// trace q⁺ (degree p, zero/prescribed on Γ), and vertical-edge flux q^∣.
///
/// Local trial layout per element: [u: p²][trace: 4 sides × (p+1) Lobatto nodes,
/// sides ordered bottom, right, top, left][flux: left, right × (flux order + 1)].
class DofMap {
public:
  DofMap(const Mesh& mesh, const Skeleton& skeleton, std::size_t p, std::size_t dp,
         Variant variant)
      : p_(p), dp_(dp), variant_(variant), mesh_(&mesh), skeleton_(&skeleton) {
    STDPG_REQUIRE(p >= 3, UnsupportedOrder, "trial order p must be >= 3");
    STDPG_REQUIRE(dp >= 1, InvalidArgument, "test enrichment Δp must be >= 1");
    flux_order_ = variant == Variant::ideal ? p : p - 1;
    lagrange_.nodes = gauss_lobatto_points(p);

    n_u_ = mesh.size() * p * p;
    std::size_t next_free = n_u_;
    std::size_t next_fixed = 0;
    const auto classify = [&](bool on_gamma) {
      TraceSlot s;
      s.constrained = on_gamma;
      s.index = on_gamma ? next_fixed++ : next_free++;
      return s;
    };

    vertex_slots_.resize(mesh.vertex_count());
    for (std::size_t j = 0; j <= mesh.nt(); ++j)
      for (std::size_t i = 0; i <= mesh.nx(); ++i) {
        const bool on_gamma = (j == 0) || (i == 0) || (i == mesh.nx());
        vertex_slots_[mesh.vertex_id(i, j)] = classify(on_gamma);
      }
    edge_slots_.resize(skeleton.edges().size());
    for (const auto& e : skeleton.edges()) {
      edge_slots_[e.id].reserve(p - 1);
      for (std::size_t k = 1; k < p; ++k) edge_slots_[e.id].push_back(classify(e.on_gamma));
    }
    n_trace_free_ = next_free - n_u_;
    n_constrained_ = next_fixed;
    flux_offset_ = next_free;
    n_flux_ = skeleton.vertical_count() * (flux_order_ + 1);

    constrained_edge_node_.resize(n_constrained_);
    for (const auto& e : skeleton.edges()) {
      if (!e.on_gamma) continue;
      for (std::size_t k = 0; k <= p; ++k) {
        const TraceSlot s = slot(e.id, k);
        constrained_edge_node_[s.index] = {e.id, k};
      }
    }
  }

  [[nodiscard]] std::size_t order() const { return p_; }
  [[nodiscard]] std::size_t enrichment() const { return dp_; }
  [[nodiscard]] Variant variant() const { return variant_; }
  [[nodiscard]] std::size_t flux_order() const { return flux_order_; }
  [[nodiscard]] std::size_t test_order() const { return p_ + dp_; }
  [[nodiscard]] std::size_t test_dim() const { return (p_ + dp_ + 1) * (p_ + dp_ + 1); }

  [[nodiscard]] std::size_t u_count() const { return n_u_; }
  [[nodiscard]] std::size_t trace_free_count() const { return n_trace_free_; }
  [[nodiscard]] std::size_t trace_count() const { return n_trace_free_ + n_constrained_; }
  [[nodiscard]] std::size_t flux_count() const { return n_flux_; }
  [[nodiscard]] std::size_t constrained_count() const { return n_constrained_; }
  [[nodiscard]] std::size_t free_count() const { return n_u_ + n_trace_free_ + n_flux_; }

  [[nodiscard]] std::size_t local_u_count() const { return p_ * p_; }
  [[nodiscard]] std::size_t local_trace_count() const { return 4 * (p_ + 1); }
  [[nodiscard]] std::size_t local_flux_count() const { return 2 * (flux_order_ + 1); }
  [[nodiscard]] std::size_t local_count() const {
    return local_u_count() + local_trace_count() + local_flux_count();
  }

  [[nodiscard]] const EdgeLagrange& trace_basis() const { return lagrange_; }
  [[nodiscard]] const Mesh& mesh() const { return *mesh_; }
  [[nodiscard]] const Skeleton& skeleton() const { return *skeleton_; }

  [[nodiscard]] std::size_t u_offset(std::size_t element) const { return element * p_ * p_; }
  [[nodiscard]] std::size_t flux_dof(std::size_t vertical_edge, std::size_t k) const {
    return flux_offset_ + vertical_edge * (flux_order_ + 1) + k;
  }

  /// Slot of Lobatto node k (0..p) on an edge; endpoints map to vertex slots.
  [[nodiscard]] TraceSlot slot(std::size_t edge, std::size_t k) const {
    const auto& e = skeleton_->edge(edge);
    if (k == 0) return vertex_slots_[e.vertices[0]];
    if (k == p_) return vertex_slots_[e.vertices[1]];
    return edge_slots_[edge][k - 1];
  }

  /// Edge and node index that define constrained DOF c (one representative).
  [[nodiscard]] std::pair<std::size_t, std::size_t> constrained_location(std::size_t c) const {
    return constrained_edge_node_.at(c);
  }

  [[nodiscard]] std::vector<LocalDof> local_to_global(std::size_t element) const {
    std::vector<LocalDof> map;
    map.reserve(local_count());
    const std::size_t u0 = u_offset(element);
    for (std::size_t k = 0; k < local_u_count(); ++k) map.push_back({false, u0 + k});
    const auto& sides = skeleton_->element_edges(element);
    for (const auto& se : sides)
      for (std::size_t k = 0; k <= p_; ++k) {
        const TraceSlot s = slot(se.edge, k);
        map.push_back({s.constrained, s.index});
      }
    for (Side side : {Side::left, Side::right}) {
      const std::size_t edge_id = sides[static_cast<std::size_t>(side)].edge;
      for (std::size_t k = 0; k <= flux_order_; ++k)
        map.push_back({false, flux_dof(edge_id, k)}); // vertical ids start at 0
    }
    return map;
  }

private:
  std::size_t p_;
  std::size_t dp_;
  Variant variant_;
  const Mesh* mesh_;
  const Skeleton* skeleton_;
  std::size_t flux_order_ = 0;
  EdgeLagrange lagrange_;
  std::size_t n_u_ = 0;
  std::size_t n_trace_free_ = 0;
  std::size_t n_constrained_ = 0;
  std::size_t n_flux_ = 0;
  std::size_t flux_offset_ = 0;
  std::vector<TraceSlot> vertex_slots_;
  std::vector<std::vector<TraceSlot>> edge_slots_;
  std::vector<std::pair<std::size_t, std::size_t>> constrained_edge_node_;
};

inline DofMap build_dofmap(const Mesh& mesh, const Skeleton& skeleton, std::size_t p,
                           std::size_t dp = 1, Variant variant = Variant::practical) {
  return DofMap(mesh, skeleton, p, dp, variant);
}

/// Dirichlet data on Γ: u(x,0) = initial(x), u(0,t) = left(t), u(L,t) = right(t).
struct BoundaryData {
  std::function<Complex(double)> initial;
  std::function<Complex(double)> left;
  std::function<Complex(double)> right;

  static BoundaryData zero() {
    const auto z = [](double) { return Complex(0.0); };
    return {z, z, z};
  }
};

/// Nodal values of the degree-p interpolant of g at the Lobatto nodes of an edge.
inline std::vector<Complex> trace_dof_values(const Edge& edge, const EdgeLagrange& basis,
                                             const std::function<Complex(Point)>& g) {
  STDPG_REQUIRE(edge.on_gamma, InvalidArgument, "trace data is only prescribed on Γ edges");
  std::vector<Complex> out;
  out.reserve(basis.nodes.size());
  for (double s : basis.nodes) out.push_back(g(edge.at(s)));
  return out;
}

/// Values of every constrained trace DOF, checking that edges meeting at a Γ
/// vertex agree to 1e-10.
inline std::vector<Complex> constrained_values(const DofMap& dofs, const BoundaryData& data) {
  const auto& sk = dofs.skeleton();
  std::vector<Complex> values(dofs.constrained_count(), Complex(0.0));
  std::vector<bool> seen(dofs.constrained_count(), false);
  for (const auto& e : sk.edges()) {
    if (!e.on_gamma) continue;
    std::function<Complex(Point)> g;
    if (e.orientation == Orientation::horizontal)
      g = [&](Point P) { return data.initial(P.x); };
    else if (e.elements[0] < 0)
      g = [&](Point P) { return data.left(P.t); };
    else
      g = [&](Point P) { return data.right(P.t); };
    const auto nodal = trace_dof_values(e, dofs.trace_basis(), g);
    for (std::size_t k = 0; k < nodal.size(); ++k) {
      const TraceSlot s = dofs.slot(e.id, k);
      if (seen[s.index]) {
        if (std::abs(values[s.index] - nodal[k]) > 1e-10)
          throw InconsistentBoundaryData("boundary data disagree at a Γ vertex of edge " +
                                         std::to_string(e.id));
      } else {
        values[s.index] = nodal[k];
        seen[s.index] = true;
      }
    }
  }
  return values;
}

} // namespace stdpg
