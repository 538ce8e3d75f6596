#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "error.hpp"

namespace stdpg {

struct Point {
  double x = 0.0;
  double t = 0.0;
};

/// Axis-aligned spacetime rectangle [x0, x0 + hx] x [t0, t0 + ht].
struct Element {
  std::size_t id = 0;
  std::size_t ix = 0; ///< column index (space)
  std::size_t jt = 0; ///< row index (time)
  Point corner;       ///< lower-left vertex (x_K, t_K)
  double hx = 0.0;
  double ht = 0.0;

  [[nodiscard]] double area() const { return hx * ht; }
  [[nodiscard]] Point map(double xr, double tr) const {
    return {corner.x + hx * xr, corner.t + ht * tr};
  }
};

/// Uniform tensor mesh of (0, L) x (0, T), elements numbered row by row in time.
class Mesh {
public:
  Mesh(double length, double duration, std::size_t nx, std::size_t nt)
      : length_(length), duration_(duration), nx_(nx), nt_(nt) {
    STDPG_REQUIRE(length > 0.0 && duration > 0.0, InvalidArgument,
                  "mesh extents must be positive");
    STDPG_REQUIRE(nx >= 1 && nt >= 1, InvalidArgument,
                  "mesh needs at least one element per direction");
    hx_ = length / static_cast<double>(nx);
    ht_ = duration / static_cast<double>(nt);
    elements_.reserve(nx * nt);
    for (std::size_t j = 0; j < nt; ++j)
      for (std::size_t i = 0; i < nx; ++i)
        elements_.push_back(Element{j * nx + i, i, j,
                                    {static_cast<double>(i) * hx_,
                                     static_cast<double>(j) * ht_},
                                    hx_, ht_});
  }

  [[nodiscard]] double length() const { return length_; }
  [[nodiscard]] double duration() const { return duration_; }
  [[nodiscard]] std::size_t nx() const { return nx_; }
  [[nodiscard]] std::size_t nt() const { return nt_; }
  [[nodiscard]] double hx() const { return hx_; }
  [[nodiscard]] double ht() const { return ht_; }
  [[nodiscard]] std::size_t size() const { return elements_.size(); }
  [[nodiscard]] bool square_elements() const {
    return std::abs(hx_ - ht_) <= 1e-14 * std::max(hx_, ht_);
  }
  [[nodiscard]] const std::vector<Element>& elements() const { return elements_; }
  [[nodiscard]] const Element& element(std::size_t i, std::size_t j) const {
    return elements_.at(j * nx_ + i);
  }
  [[nodiscard]] std::size_t vertex_id(std::size_t i, std::size_t j) const {
    return j * (nx_ + 1) + i;
  }
  [[nodiscard]] std::size_t vertex_count() const { return (nx_ + 1) * (nt_ + 1); }
  [[nodiscard]] Point vertex(std::size_t i, std::size_t j) const {
    return {static_cast<double>(i) * hx_, static_cast<double>(j) * ht_};
  }

private:
  double length_;
  double duration_;
  std::size_t nx_;
  std::size_t nt_;
  double hx_ = 0.0;
  double ht_ = 0.0;
  std::vector<Element> elements_;
};

inline Mesh build_mesh(double length, double duration, std::size_t nx, std::size_t nt) {
  return Mesh(length, duration, nx, nt);
}

enum class Orientation { vertical, horizontal };

/// Local edge slots of an element, in the order used by the element matrices.
enum class Side : std::size_t { bottom = 0, right = 1, top = 2, left = 3 };

struct Edge {
  std::size_t id = 0;
  Orientation orientation = Orientation::vertical;
  Point start; ///< lower (vertical) or left (horizontal) endpoint
  Point end;
  std::array<std::size_t, 2> vertices{}; ///< vertex ids of start and end
  bool on_gamma = false;      ///< part of the inflow boundary (sides + t = 0)
  bool on_gamma_star = false; ///< part of the outflow boundary (sides + t = T)
  /// Adjacent elements; for vertical edges {left, right}, horizontal {below, above}.
  std::array<long, 2> elements{-1, -1};

  [[nodiscard]] bool interior() const { return elements[0] >= 0 && elements[1] >= 0; }
  [[nodiscard]] double length() const {
    return std::hypot(end.x - start.x, end.t - start.t);
  }
  [[nodiscard]] Point at(double s) const {
    return {start.x + s * (end.x - start.x), start.t + s * (end.t - start.t)};
  }
};

struct ElementEdge {
  std::size_t edge = 0;
  int nx = 0; ///< outward normal components
  int nt = 0;
};

/// Edges stored once; Γ/Γ* flags follow Γ = ∂Ω₀×[0,T] ∪ Ω₀×{0}, Γ* = ∂Ω₀×[0,T] ∪ Ω₀×{T}.
class Skeleton {
public:
  explicit Skeleton(const Mesh& mesh) : nx_(mesh.nx()), nt_(mesh.nt()) {
    const std::size_t nx = mesh.nx();
    const std::size_t nt = mesh.nt();
    edges_.reserve(vertical_count() + horizontal_count());
    // vertical edges: id = j * (nx + 1) + i
    for (std::size_t j = 0; j < nt; ++j)
      for (std::size_t i = 0; i <= nx; ++i) {
        Edge e;
        e.id = edges_.size();
        e.orientation = Orientation::vertical;
        e.start = mesh.vertex(i, j);
        e.end = mesh.vertex(i, j + 1);
        e.vertices = {mesh.vertex_id(i, j), mesh.vertex_id(i, j + 1)};
        const bool side = (i == 0 || i == nx);
        e.on_gamma = side;
        e.on_gamma_star = side;
        e.elements = {i > 0 ? static_cast<long>(j * nx + i - 1) : -1,
                      i < nx ? static_cast<long>(j * nx + i) : -1};
        edges_.push_back(e);
      }
    // horizontal edges: id = offset + j * nx + i
    for (std::size_t j = 0; j <= nt; ++j)
      for (std::size_t i = 0; i < nx; ++i) {
        Edge e;
        e.id = edges_.size();
        e.orientation = Orientation::horizontal;
        e.start = mesh.vertex(i, j);
        e.end = mesh.vertex(i + 1, j);
        e.vertices = {mesh.vertex_id(i, j), mesh.vertex_id(i + 1, j)};
        e.on_gamma = (j == 0);
        e.on_gamma_star = (j == nt);
        e.elements = {j > 0 ? static_cast<long>((j - 1) * nx + i) : -1,
                      j < nt ? static_cast<long>(j * nx + i) : -1};
        edges_.push_back(e);
      }

    adjacency_.resize(mesh.size());
    for (const auto& K : mesh.elements()) {
      const std::size_t i = K.ix, j = K.jt;
      auto& a = adjacency_[K.id];
      a[static_cast<std::size_t>(Side::bottom)] = {horizontal_id(i, j), 0, -1};
      a[static_cast<std::size_t>(Side::right)] = {vertical_id(i + 1, j), 1, 0};
      a[static_cast<std::size_t>(Side::top)] = {horizontal_id(i, j + 1), 0, 1};
      a[static_cast<std::size_t>(Side::left)] = {vertical_id(i, j), -1, 0};
    }
  }

  [[nodiscard]] std::size_t vertical_count() const { return (nx_ + 1) * nt_; }
  [[nodiscard]] std::size_t horizontal_count() const { return nx_ * (nt_ + 1); }
  [[nodiscard]] std::size_t vertical_id(std::size_t i, std::size_t j) const {
    return j * (nx_ + 1) + i;
  }
  [[nodiscard]] std::size_t horizontal_id(std::size_t i, std::size_t j) const {
    return vertical_count() + j * nx_ + i;
  }
  [[nodiscard]] const std::vector<Edge>& edges() const { return edges_; }
  [[nodiscard]] const Edge& edge(std::size_t id) const { return edges_.at(id); }
  [[nodiscard]] const std::array<ElementEdge, 4>& element_edges(std::size_t element) const {
    return adjacency_.at(element);
  }

private:
  std::size_t nx_;
  std::size_t nt_;
  std::vector<Edge> edges_;
  std::vector<std::array<ElementEdge, 4>> adjacency_;
};

inline Skeleton build_skeleton(const Mesh& mesh) { return Skeleton(mesh); }

} // namespace stdpg
