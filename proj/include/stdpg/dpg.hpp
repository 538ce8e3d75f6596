#pragma once

#include <chrono>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "error.hpp"
#include "fe_spaces.hpp"
#include "mesh.hpp"
#include "physics.hpp"
#include "quadrature.hpp"
#include "ref_element.hpp"

namespace stdpg {

using MatrixXc = Eigen::MatrixXcd;
using VectorXc = Eigen::VectorXcd;
using SparseMatrixC = Eigen::SparseMatrix<Complex>;

/// Right-hand side data of i∂ₜu − (β/2)∂ₓₓu = f with Dirichlet data on Γ.
struct Problem {
  SchrodingerOperator op;
  std::function<Complex(double, double)> forcing;
  BoundaryData data;

  static Problem from_case(const ManufacturedCase& c, double length) {
    return {c.op, c.forcing_fn(), c.boundary_data(length)};
  }
};

struct AssemblyOptions {
  std::size_t quad_order = 0;      ///< points per direction; 0 means p + Δp + 1
  std::size_t load_quad_order = 0; ///< for (f, v); 0 means p + Δp + 5
};

/// Reference position of parameter s along a side, oriented like the skeleton edge.
inline std::array<double, 2> side_point(Side side, double s) {
  switch (side) {
  case Side::bottom: return {s, 0.0};
  case Side::right: return {1.0, s};
  case Side::top: return {s, 1.0};
  case Side::left: return {0.0, s};
  }
  return {0.0, 0.0};
}

inline double side_length(Side side, const Element& K) {
  return (side == Side::bottom || side == Side::top) ? K.hx : K.ht;
}

/// Trace and flux contributions of one element side to ⟨q, v⟩:
///   ∫ q⁺ (i n_t v̄ + (β/2) n_x ∂ₓv̄) − (β/2) ∫ q^∣ n_x v̄.
/// `test` returns (v, ∂ₓv) at a physical point; `trace` gives q⁺ at the side
/// parameter s; `flux` gives q^∣ (ignored on horizontal sides).
template <class TestFn, class TraceFn, class FluxFn>
Complex side_pairing(const Element& K, Side side, int nx, int nt, double beta,
                     const Rule1D& rule, const TestFn& test, const TraceFn& trace,
                     const FluxFn& flux) {
  const double len = side_length(side, K);
  Complex acc = 0.0;
  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    const double s = rule.points[q];
    const auto [xr, tr] = side_point(side, s);
    const Point P = K.map(xr, tr);
    const auto [v, vx] = test(P);
    const double w = rule.weights[q] * len;
    acc += w * trace(s) *
           (I * static_cast<double>(nt) * std::conj(v) +
            0.5 * beta * static_cast<double>(nx) * std::conj(vx));
    if (nx != 0) acc -= w * 0.5 * beta * flux(s) * static_cast<double>(nx) * std::conj(v);
  }
  return acc;
}

/// Gram matrix and B for one element geometry; independent of the data.
struct LocalOperator {
  MatrixXc G; ///< (v_j, v_i)_K + (A v_j, A v_i)_K
  MatrixXc B; ///< b(trial_j, v_i), all local trial columns
  Eigen::LLT<MatrixXc> gram;
  double regularization = 0.0;
};

struct ElementMatrices {
  MatrixXc G;
  MatrixXc B;
  VectorXc l; ///< (f, v_i)_K minus constrained columns of B times their data
};

inline std::size_t resolved_quad(const DofMap& dofs, const AssemblyOptions& o) {
  return o.quad_order ? o.quad_order : dofs.order() + dofs.enrichment() + 1;
}
inline std::size_t resolved_load_quad(const DofMap& dofs, const AssemblyOptions& o) {
  return o.load_quad_order ? o.load_quad_order : dofs.order() + dofs.enrichment() + 5;
}

namespace detail {

/// Factor G, retrying with ε·trace(G)/dim·I, ε = 1e-14, if plain LLT fails.
inline void factor_gram(LocalOperator& lo) {
  lo.gram.compute(lo.G);
  if (lo.gram.info() == Eigen::Success) return;
  const double eps = 1e-14 * lo.G.trace().real() / static_cast<double>(lo.G.rows());
  lo.regularization = eps;
  lo.gram.compute(lo.G + eps * MatrixXc::Identity(lo.G.rows(), lo.G.cols()));
  if (lo.gram.info() != Eigen::Success)
    throw AssemblyFailure("element Gram matrix is not positive definite");
}

} // namespace detail

inline LocalOperator local_operator(const Element& K, const DofMap& dofs,
                                    const SchrodingerOperator& op,
                                    const AssemblyOptions& options = {}) {
  const std::size_t p = dofs.order();
  const std::size_t ptest = dofs.test_order();
  const auto nt = static_cast<Eigen::Index>(dofs.test_dim());
  const auto nl = static_cast<Eigen::Index>(dofs.local_count());
  const auto nu = static_cast<Eigen::Index>(dofs.local_u_count());
  const std::size_t q = resolved_quad(dofs, options);
  const QuadratureRule rule = gauss_legendre_2d(q);
  const double beta = op.beta;

  LocalOperator lo;
  lo.G = MatrixXc::Zero(nt, nt);
  lo.B = MatrixXc::Zero(nt, nl);

  const auto nq = static_cast<Eigen::Index>(rule.points.size());
  Eigen::MatrixXd V(nq, nt);  // test values
  MatrixXc AV(nq, nt);        // A applied to test functions
  Eigen::MatrixXd U(nq, nu);  // trial u basis
  Eigen::VectorXd W(nq);
  for (Eigen::Index iq = 0; iq < nq; ++iq) {
    const auto [xr, tr] = rule.points[static_cast<std::size_t>(iq)];
    const auto test = legendre_tensor(ptest, xr, tr);
    for (Eigen::Index i = 0; i < nt; ++i) {
      const TensorJet v = to_physical(test[static_cast<std::size_t>(i)], K);
      V(iq, i) = v.v;
      AV(iq, i) = op.apply(v.dt, v.dxx);
    }
    const auto trial = legendre_tensor(p - 1, xr, tr);
    for (Eigen::Index j = 0; j < nu; ++j) U(iq, j) = trial[static_cast<std::size_t>(j)].v;
    W(iq) = rule.weights[static_cast<std::size_t>(iq)] * K.area();
  }
  lo.G = (V.transpose() * W.asDiagonal() * V).cast<Complex>() +
         AV.adjoint() * W.asDiagonal() * AV;
  lo.B.leftCols(nu) = AV.adjoint() * W.asDiagonal() * U.cast<Complex>();

  // skeleton columns
  const Rule1D& line = rule.line;
  const auto& lag = dofs.trace_basis();
  const std::size_t fo = dofs.flux_order();
  const auto zero = [](double) { return Complex(0.0); };
  const std::array<std::pair<Side, std::array<int, 2>>, 4> sides{{{Side::bottom, {0, -1}},
                                                                   {Side::right, {1, 0}},
                                                                   {Side::top, {0, 1}},
                                                                   {Side::left, {-1, 0}}}};
  for (Eigen::Index i = 0; i < nt; ++i) {
    const auto test = [&](Point P) {
      const double xr = (P.x - K.corner.x) / K.hx;
      const double tr = (P.t - K.corner.t) / K.ht;
      const TensorJet v =
          to_physical(legendre_tensor(ptest, xr, tr)[static_cast<std::size_t>(i)], K);
      return std::pair<Complex, Complex>{v.v, v.dx};
    };
    Eigen::Index col = nu;
    for (const auto& [side, n] : sides) {
      for (std::size_t k = 0; k <= p; ++k, ++col) {
        const auto trace = [&](double s) { return Complex(lag.values(s)[k]); };
        lo.B(i, col) = side_pairing(K, side, n[0], n[1], beta, line, test, trace, zero);
      }
    }
    for (Side side : {Side::left, Side::right}) {
      const int nx = side == Side::left ? -1 : 1;
      for (std::size_t k = 0; k <= fo; ++k, ++col) {
        const auto flux = [&](double s) { return Complex(shifted_legendre(fo, s)[k].value); };
        lo.B(i, col) = side_pairing(K, side, nx, 0, beta, line, test, zero, flux);
      }
    }
  }
  detail::factor_gram(lo);
  return lo;
}

/// (f, v_i)_K for the tensor-Legendre test basis of Q_{p+Δp}.
inline VectorXc element_load(const Element& K, const DofMap& dofs,
                             const std::function<Complex(double, double)>& f,
                             const AssemblyOptions& options = {}) {
  const QuadratureRule rule = gauss_legendre_2d(resolved_load_quad(dofs, options));
  const auto nt = static_cast<Eigen::Index>(dofs.test_dim());
  VectorXc l = VectorXc::Zero(nt);
  for (std::size_t iq = 0; iq < rule.points.size(); ++iq) {
    const auto [xr, tr] = rule.points[iq];
    const Point P = K.map(xr, tr);
    const Complex fw = f(P.x, P.t) * rule.weights[iq] * K.area();
    if (fw == Complex(0.0)) continue;
    const auto test = legendre_tensor(dofs.test_order(), xr, tr);
    for (Eigen::Index i = 0; i < nt; ++i) l(i) += fw * test[static_cast<std::size_t>(i)].v;
  }
  return l;
}

/// Subtract B·g for local columns mapped to constrained trace DOFs.
inline void lift_boundary(VectorXc& l, const MatrixXc& B, const std::vector<LocalDof>& map,
                          const std::vector<Complex>& constrained) {
  for (std::size_t a = 0; a < map.size(); ++a)
    if (map[a].constrained && constrained[map[a].index] != Complex(0.0))
      l -= B.col(static_cast<Eigen::Index>(a)) * constrained[map[a].index];
}

inline ElementMatrices element_matrices(const Element& K, const DofMap& dofs,
                                        const Problem& problem,
                                        const AssemblyOptions& options = {}) {
  const LocalOperator lo = local_operator(K, dofs, problem.op, options);
  ElementMatrices m{lo.G, lo.B, element_load(K, dofs, problem.forcing, options)};
  lift_boundary(m.l, m.B, dofs.local_to_global(K.id), constrained_values(dofs, problem.data));
  return m;
}

/// Assembled normal equations S x = r over the free DOFs, with the per-element
/// data kept for the error indicator.
struct DpgSystem {
  const DofMap* dofs = nullptr;
  SparseMatrixC S;
  VectorXc r;
  std::vector<Complex> constrained;
  std::vector<std::shared_ptr<const LocalOperator>> local; ///< per element
  std::vector<VectorXc> loads;                             ///< lifted l per element
  std::vector<std::vector<LocalDof>> maps;                 ///< per element
};

/// Builds S = Σ Bᴴ G⁻¹ B and r = Σ Bᴴ G⁻¹ l in fixed element order.
/// Geometrically identical elements share one LocalOperator.
inline DpgSystem assemble(const DofMap& dofs, const Problem& problem,
                          const AssemblyOptions& options = {}) {
  const Mesh& mesh = dofs.mesh();
  DpgSystem sys;
  sys.dofs = &dofs;
  sys.constrained = constrained_values(dofs, problem.data);
  const auto n = static_cast<Eigen::Index>(dofs.free_count());
  sys.r = VectorXc::Zero(n);

  std::map<std::pair<double, double>, std::shared_ptr<const LocalOperator>> cache;
  std::map<const LocalOperator*, MatrixXc> normal_cache;

  std::vector<Eigen::Triplet<Complex>> triplets;
  triplets.reserve(mesh.size() * dofs.local_count() * dofs.local_count());
  for (const auto& K : mesh.elements()) {
    auto& lo = cache[{K.hx, K.ht}];
    if (!lo) lo = std::make_shared<const LocalOperator>(local_operator(K, dofs, problem.op, options));
    auto& S_loc = normal_cache[lo.get()];
    if (S_loc.size() == 0) S_loc = lo->B.adjoint() * lo->gram.solve(lo->B);

    auto map = dofs.local_to_global(K.id);
    VectorXc l = element_load(K, dofs, problem.forcing, options);
    lift_boundary(l, lo->B, map, sys.constrained);
    const VectorXc r_loc = lo->B.adjoint() * lo->gram.solve(l);

    for (std::size_t a = 0; a < map.size(); ++a) {
      if (map[a].constrained) continue;
      const auto ga = static_cast<Eigen::Index>(map[a].index);
      sys.r(ga) += r_loc(static_cast<Eigen::Index>(a));
      for (std::size_t b = 0; b < map.size(); ++b) {
        if (map[b].constrained) continue;
        triplets.emplace_back(ga, static_cast<Eigen::Index>(map[b].index),
                              S_loc(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)));
      }
    }
    sys.local.push_back(lo);
    sys.loads.push_back(std::move(l));
    sys.maps.push_back(std::move(map));
  }
  sys.S.resize(n, n);
  sys.S.setFromTriplets(triplets.begin(), triplets.end());
  sys.S.makeCompressed();
  return sys;
}

enum class SolverKind { automatic, direct, cg };

inline SolverKind parse_solver(const std::string& s) {
  if (s == "auto") return SolverKind::automatic;
  if (s == "direct") return SolverKind::direct;
  if (s == "cg") return SolverKind::cg;
  throw InvalidArgument("unknown solver '" + s + "' (expected auto|direct|cg)");
}

struct SolveOptions {
  SolverKind solver = SolverKind::automatic;
  double tol = 0.0; ///< 0 means 1e-12 (direct) / 1e-10 (cg)
  std::size_t direct_limit = 200000;
  int max_refinement_steps = 3;
};

struct SolveReport {
  VectorXc x;                  ///< free coefficients (u-block, trace, flux)
  std::vector<Complex> constrained;
  double relative_residual = 0.0; ///< ‖Sx − r‖ / ‖r‖ (absolute if r = 0)
  VectorXc indicator_vector;   ///< Σ_K Bᴷᴴ(Gᴷ)⁻¹(lᴷ − Bᴷxᴷ) over free DOFs
  std::vector<double> eta_k;   ///< per-element indicators
  double eta = 0.0;
  std::string method;
  int iterations = 0;          ///< CG iterations or refinement steps
  double solve_seconds = 0.0;
};

namespace detail {

inline VectorXc element_residual(const DpgSystem& sys, std::size_t e, const VectorXc& x) {
  const auto& lo = *sys.local[e];
  const auto& map = sys.maps[e];
  VectorXc xl = VectorXc::Zero(static_cast<Eigen::Index>(map.size()));
  for (std::size_t a = 0; a < map.size(); ++a)
    if (!map[a].constrained) xl(static_cast<Eigen::Index>(a)) = x(static_cast<Eigen::Index>(map[a].index));
  return sys.loads[e] - lo.B * xl;
}

inline double relative(double num, double den) { return den > 0.0 ? num / den : num; }

} // namespace detail

/// Error indicators η_K² = (l − Bx)ᴴ G⁻¹ (l − Bx) and the global residual surrogate.
inline void compute_indicators(const DpgSystem& sys, SolveReport& rep) {
  const std::size_t ne = sys.local.size();
  rep.eta_k.assign(ne, 0.0);
  rep.indicator_vector = VectorXc::Zero(rep.x.size());
  double total = 0.0;
  for (std::size_t e = 0; e < ne; ++e) {
    const VectorXc res = detail::element_residual(sys, e, rep.x);
    const VectorXc riesz = sys.local[e]->gram.solve(res);
    const double eta2 = std::max(0.0, res.dot(riesz).real());
    rep.eta_k[e] = std::sqrt(eta2);
    total += eta2;
    const VectorXc back = sys.local[e]->B.adjoint() * riesz;
    const auto& map = sys.maps[e];
    for (std::size_t a = 0; a < map.size(); ++a)
      if (!map[a].constrained)
        rep.indicator_vector(static_cast<Eigen::Index>(map[a].index)) +=
            back(static_cast<Eigen::Index>(a));
  }
  rep.eta = std::sqrt(total);
}

inline SolveReport solve(const DpgSystem& sys, const SolveOptions& options = {}) {
  SolveReport rep;
  rep.constrained = sys.constrained;
  const auto n = sys.S.rows();
  const double rnorm = sys.r.norm();
  const auto t0 = std::chrono::steady_clock::now();

  SolverKind kind = options.solver;
  if (kind == SolverKind::automatic)
    kind = static_cast<std::size_t>(n) <= options.direct_limit ? SolverKind::direct : SolverKind::cg;

  if (rnorm == 0.0) {
    rep.x = VectorXc::Zero(n);
    rep.method = kind == SolverKind::direct ? "direct" : "cg";
  } else if (kind == SolverKind::direct) {
    const double tol = options.tol > 0.0 ? options.tol : 1e-12;
    Eigen::SimplicialLDLT<SparseMatrixC, Eigen::Lower> ldlt(sys.S);
    if (ldlt.info() != Eigen::Success)
      throw SolverFailure("sparse LDLT factorization failed (n = " + std::to_string(n) + ")");
    rep.x = ldlt.solve(sys.r);
    rep.method = "direct";
    for (int step = 0; step < options.max_refinement_steps; ++step) {
      const VectorXc res = sys.r - sys.S * rep.x;
      if (res.norm() <= tol * rnorm) break;
      rep.x += ldlt.solve(res);
      rep.iterations = step + 1;
    }
  } else {
    const double tol = options.tol > 0.0 ? options.tol : 1e-10;
    Eigen::ConjugateGradient<SparseMatrixC, Eigen::Lower | Eigen::Upper,
                             Eigen::DiagonalPreconditioner<Complex>>
        cg;
    cg.setTolerance(tol);
    cg.setMaxIterations(std::max<Eigen::Index>(1000, 20 * n));
    cg.compute(sys.S);
    rep.x = cg.solve(sys.r);
    rep.iterations = static_cast<int>(cg.iterations());
    rep.method = "cg";
    if (cg.info() != Eigen::Success)
      throw SolverFailure("conjugate gradient did not converge: " +
                          std::to_string(cg.iterations()) + " iterations, error " +
                          std::to_string(cg.error()));
  }
  rep.solve_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  rep.relative_residual = detail::relative((sys.r - sys.S * rep.x).norm(), rnorm);
  if (!rep.x.allFinite()) throw SolverFailure("solution contains non-finite values");
  compute_indicators(sys, rep);
  return rep;
}

/// u_h on element e at reference point (x̂, t̂).
inline Complex evaluate_u(const DofMap& dofs, const VectorXc& x, std::size_t element,
                          double xr, double tr) {
  const auto basis = legendre_tensor(dofs.order() - 1, xr, tr);
  const std::size_t off = dofs.u_offset(element);
  Complex v = 0.0;
  for (std::size_t k = 0; k < basis.size(); ++k)
    v += x(static_cast<Eigen::Index>(off + k)) * basis[k].v;
  return v;
}

/// ‖u_h − u‖²_K per element, Gauss rule with `quad` points per direction
/// (0 means p + Δp + 5).
inline std::vector<double> l2_error_squared(const DofMap& dofs, const VectorXc& x,
                                            const std::function<Complex(double, double)>& u,
                                            std::size_t quad = 0) {
  const QuadratureRule rule =
      gauss_legendre_2d(quad ? quad : dofs.order() + dofs.enrichment() + 5);
  const Mesh& mesh = dofs.mesh();
  std::vector<double> out(mesh.size(), 0.0);
  for (const auto& K : mesh.elements()) {
    double acc = 0.0;
    for (std::size_t iq = 0; iq < rule.points.size(); ++iq) {
      const auto [xr, tr] = rule.points[iq];
      const Point P = K.map(xr, tr);
      acc += rule.weights[iq] * std::norm(evaluate_u(dofs, x, K.id, xr, tr) - u(P.x, P.t));
    }
    out[K.id] = acc * K.area();
  }
  return out;
}

inline double l2_error(const SolveReport& rep, const DofMap& dofs,
                       const std::function<Complex(double, double)>& u, std::size_t quad = 0) {
  double total = 0.0;
  for (double e : l2_error_squared(dofs, rep.x, u, quad)) total += e;
  return std::sqrt(total);
}

struct ConditionEstimate {
  double estimate = 0.0;
  double lambda_max = 0.0;
  double lambda_min = 0.0;
  bool converged = false; ///< false: the pair is a bracket, treat with care
  int iterations_max = 0;
  int iterations_min = 0;
};

namespace detail {

inline VectorXc start_vector(Eigen::Index n) {
  VectorXc v(n);
  for (Eigen::Index i = 0; i < n; ++i)
    v(i) = Complex(1.0 + 0.5 * std::sin(0.7 * static_cast<double>(i)),
                   0.25 * std::cos(1.3 * static_cast<double>(i)));
  return v.normalized();
}

} // namespace detail

/// λ_max by power iteration and λ_min by inverse iteration (via sparse LDLT).
/// Stops after `max_iterations` or when the Rayleigh quotient changes by less
/// than `rel_change`.
template <class Matrix>
ConditionEstimate condition_estimate(const Matrix& S, int max_iterations = 50,
                                     double rel_change = 1e-3) {
  ConditionEstimate c;
  const Eigen::Index n = S.rows();
  STDPG_REQUIRE(n > 0, InvalidArgument, "empty matrix");
  bool conv_max = false, conv_min = false;

  VectorXc v = detail::start_vector(n);
  double lam = 0.0;
  for (int it = 1; it <= max_iterations; ++it) {
    VectorXc w = S * v;
    const double next = v.dot(w).real();
    v = w.normalized();
    c.iterations_max = it;
    if (it > 1 && std::abs(next - lam) <= rel_change * std::abs(next)) {
      lam = next;
      conv_max = true;
      break;
    }
    lam = next;
  }
  c.lambda_max = lam;

  SparseMatrixC Ss = SparseMatrixC(S.template cast<Complex>());
  Eigen::SimplicialLDLT<SparseMatrixC, Eigen::Lower> ldlt(Ss);
  if (ldlt.info() != Eigen::Success) throw SolverFailure("inverse iteration: factorization failed");
  v = detail::start_vector(n);
  double mu = 0.0;
  for (int it = 1; it <= max_iterations; ++it) {
    VectorXc w = ldlt.solve(v);
    const double next = v.dot(w).real(); // Rayleigh quotient of S⁻¹
    v = w.normalized();
    c.iterations_min = it;
    if (it > 1 && std::abs(next - mu) <= rel_change * std::abs(next)) {
      mu = next;
      conv_min = true;
      break;
    }
    mu = next;
  }
  c.lambda_min = 1.0 / mu;
  c.estimate = c.lambda_max / c.lambda_min;
  c.converged = conv_max && conv_min;
  return c;
}

inline ConditionEstimate condition_estimate(const DpgSystem& sys, int max_iterations = 50,
                                            double rel_change = 1e-3) {
  return condition_estimate(sys.S, max_iterations, rel_change);
}

} // namespace stdpg
