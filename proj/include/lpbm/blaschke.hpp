#pragma once

/// Blaschke-level algebra: (normalized) L_p-Blaschke sums, the (normalized)
/// symmetric L_p-curvature image, conversions between normalized and plain
/// valuations, and the planar quarter turn.

#include "lpbm/minkowski.hpp"

#include <optional>

namespace lpbm {

class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(SolverReport report)
      : std::runtime_error("solver did not converge (residual " + std::to_string(report.final_residual) + ")"),
        report_(std::move(report)) {}

  const SolverReport& report() const noexcept { return report_; }

 private:
  SolverReport report_;
};

enum class Equivariance { covariant, contravariant, none };

inline const char* to_string(Equivariance e) {
  switch (e) {
    case Equivariance::covariant: return "covariant";
    case Equivariance::contravariant: return "contravariant";
    default: return "none";
  }
}

/// A map from full-dimensional origin-interior polytopes to bodies, with the
/// homogeneity degree and GL(n) behaviour it claims to have.
struct BodyValuedOperator {
  std::string name;
  int dim = 0;
  std::function<Body(const Polytope&)> apply;
  std::optional<double> declared_degree;
  Equivariance equivariance = Equivariance::none;

  Body operator()(const Polytope& K) const {
    require(K.dim == dim, "dim", name + " is defined in dimension " + std::to_string(dim));
    return apply(K);
  }
};

inline Polytope converged_or_throw(SolveResult r) {
  if (!r.report.converged) throw ConvergenceError(std::move(r.report));
  return std::move(r.body);
}

/// Origin symmetry up to tol·scale on the facet data.
inline bool is_origin_symmetric(const Polytope& P, double tol = 1e-9) {
  const double s = P.scale();
  for (const auto& f : P.facets) {
    bool found = false;
    for (const auto& g : P.facets) {
      if ((f.normal + g.normal).norm() <= 1e-9 && std::abs(f.offset - g.offset) <= tol * s) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

namespace detail {

/// Sum of two atomic measures, atoms closer than 1e-9 merged, antipodes paired.
inline DiscreteMeasure merge_measures(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  require(a.dim == b.dim, "dim", "measures live on spheres of different dimensions");
  std::vector<Vec> dirs = a.directions;
  std::vector<double> mass = a.masses;
  for (std::size_t i = 0; i < b.size(); ++i) {
    bool merged = false;
    for (std::size_t j = 0; j < dirs.size(); ++j) {
      if ((dirs[j] - b.directions[i]).norm() <= 1e-9) {
        mass[j] += b.masses[i];
        merged = true;
        break;
      }
    }
    if (!merged) {
      dirs.push_back(b.directions[i]);
      mass.push_back(b.masses[i]);
    }
  }
  return even_part(atomic_measure(a.dim, std::move(dirs), std::move(mass)));
}

inline void check_summands(const Polytope& K, const Polytope& L, double p) {
  require(K.dim == L.dim, "dim", "summands must share a dimension");
  require(p > 1.0, "p", "Blaschke sums need p > 1");
  require(is_origin_symmetric(K) && is_origin_symmetric(L), "origin_symmetric",
          "L_p-Blaschke sums are defined for origin-symmetric bodies");
}

}  // namespace detail

/// The origin-symmetric K #̃_p L with S_p/V = S_p(K)/V(K) + S_p(L)/V(L).
inline SolveResult normalized_blaschke_sum_report(const Polytope& K, const Polytope& L, double p, const SolverConfig& cfg = {}) {
  detail::check_summands(K, L, p);
  return solve_normalized_even(detail::merge_measures(normalized_lp_measure(K, p), normalized_lp_measure(L, p)), p, cfg);
}

inline Polytope normalized_blaschke_sum(const Polytope& K, const Polytope& L, double p, const SolverConfig& cfg = {}) {
  return converged_or_throw(normalized_blaschke_sum_report(K, L, p, cfg));
}

/// K #_p L with S_p = S_p(K) + S_p(L), p ≠ n.
inline SolveResult blaschke_sum_report(const Polytope& K, const Polytope& L, double p, const SolverConfig& cfg = {}) {
  detail::check_summands(K, L, p);
  require(std::abs(p - K.dim) > 1e-6, "p_ne_n", "the L_p-Blaschke sum needs p != n");
  return solve_even(detail::merge_measures(lp_surface_area_measure(K, p), lp_surface_area_measure(L, p)), p, cfg);
}

inline Polytope blaschke_sum(const Polytope& K, const Polytope& L, double p, const SolverConfig& cfg = {}) {
  return converged_or_throw(blaschke_sum_report(K, L, p, cfg));
}

/// Grid data: cell means of ½ρ_K^{n+p} + ½ρ_{-K}^{n+p} times the quadrature weights.
inline DiscreteMeasure curvature_data(const Polytope& K, double p, std::shared_ptr<const DirectionGrid> grid) {
  require(K.contains_origin_interior(), "origin_interior", "curvature images need the origin in the interior");
  require(grid->dim == K.dim, "dim", "grid and body dimensions differ");
  const double e = K.dim + p;
  const RadialFunction rho(K);
  auto f = [&](const Vec& u) { return 0.5 * std::pow(rho(u), e) + 0.5 * std::pow(rho(Vec(-u)), e); };
  std::vector<double> mass = cell_averages(*grid, f);
  for (std::size_t i = 0; i < mass.size(); ++i) mass[i] *= grid->weights[i];
  return grid_measure(grid, std::move(mass));
}

inline std::shared_ptr<const DirectionGrid> grid_or_default(std::shared_ptr<const DirectionGrid> grid, int dim) {
  return grid ? grid : build_grid(dim, default_resolution(dim));
}

/// Λ̃K, the origin-symmetric body with S_p(Λ̃K)/V(Λ̃K) = (½ρ_K^{n+p} + ½ρ_{-K}^{n+p}) dσ.
inline SolveResult normalized_curvature_image_report(const Polytope& K, double p,
                                                     std::shared_ptr<const DirectionGrid> grid = nullptr,
                                                     const SolverConfig& cfg = {}) {
  require(K.dim == 2 || K.dim == 3, "dim", "curvature images are implemented in dimensions 2 and 3");
  require(p > 1.0, "p", "curvature images need p > 1");
  return solve_normalized_even(curvature_data(K, p, grid_or_default(std::move(grid), K.dim)), p, cfg);
}

inline Polytope normalized_curvature_image(const Polytope& K, double p, std::shared_ptr<const DirectionGrid> grid = nullptr,
                                           const SolverConfig& cfg = {}) {
  return converged_or_throw(normalized_curvature_image_report(K, p, std::move(grid), cfg));
}

/// Λ_c^p K = V(Λ̃K)^{1/(p-n)} Λ̃K, p ≠ n.
inline SolveResult curvature_image_report(const Polytope& K, double p, std::shared_ptr<const DirectionGrid> grid = nullptr,
                                          const SolverConfig& cfg = {}) {
  require(std::abs(p - K.dim) > 1e-6, "p_ne_n", "the plain curvature image needs p != n");
  require(p > 1.0, "p", "curvature images need p > 1");
  return solve_even(curvature_data(K, p, grid_or_default(std::move(grid), K.dim)), p, cfg);
}

inline Polytope curvature_image(const Polytope& K, double p, std::shared_ptr<const DirectionGrid> grid = nullptr,
                                const SolverConfig& cfg = {}) {
  return converged_or_throw(curvature_image_report(K, p, std::move(grid), cfg));
}

inline BodyValuedOperator normalized_curvature_operator(int dim, double p, std::shared_ptr<const DirectionGrid> grid = nullptr,
                                                        const SolverConfig& cfg = {}) {
  grid = grid_or_default(std::move(grid), dim);
  return {"normalized_curvature_image", dim,
          [p, grid, cfg](const Polytope& K) -> Body { return normalized_curvature_image(K, p, grid, cfg); },
          -static_cast<double>(dim) / p - 1.0, Equivariance::contravariant};
}

inline BodyValuedOperator curvature_operator(int dim, double p, std::shared_ptr<const DirectionGrid> grid = nullptr,
                                             const SolverConfig& cfg = {}) {
  require(std::abs(p - dim) > 1e-6, "p_ne_n", "the plain curvature image needs p != n");
  grid = grid_or_default(std::move(grid), dim);
  return {"curvature_image", dim, [p, grid, cfg](const Polytope& K) -> Body { return curvature_image(K, p, grid, cfg); },
          (-static_cast<double>(dim) / p - 1.0) * p / (p - dim), Equivariance::contravariant};
}

inline BodyValuedOperator identity_operator(int dim) {
  return {"identity", dim, [](const Polytope& K) -> Body { return K; }, 1.0, Equivariance::covariant};
}

/// Z̃K = V(ZK)^{-1/p} ZK.
inline BodyValuedOperator to_normalized(const BodyValuedOperator& Z, double p) {
  const int n = Z.dim;
  std::optional<double> q;
  if (Z.declared_degree) q = *Z.declared_degree * (p - n) / p;
  auto f = Z.apply;
  return {"normalized(" + Z.name + ")", n,
          [f, p](const Polytope& K) {
            const Body B = f(K);
            return dilate(B, std::pow(body_volume(B), -1.0 / p));
          },
          q, Z.equivariance};
}

/// ZK = V(Z̃K)^{1/(p-n)} Z̃K, p ≠ n.
inline BodyValuedOperator from_normalized(const BodyValuedOperator& Zn, double p) {
  const int n = Zn.dim;
  require(std::abs(p - n) > 1e-6, "p_ne_n", "from_normalized needs p != n");
  std::optional<double> q;
  if (Zn.declared_degree) q = *Zn.declared_degree * p / (p - n);
  auto f = Zn.apply;
  return {"plain(" + Zn.name + ")", n,
          [f, p, n](const Polytope& K) {
            const Body B = f(K);
            return dilate(B, std::pow(body_volume(B), 1.0 / (p - n)));
          },
          q, Zn.equivariance};
}

/// ψ_{π/2}: (x, y) ↦ (−y, x).
inline LinearMap quarter_turn_map() {
  Mat m(2, 2);
  m << 0.0, -1.0, 1.0, 0.0;
  return LinearMap::from(m);
}

inline Polytope rotate_quarter(const Polytope& K) {
  require(K.dim == 2, "dim", "the quarter turn is planar");
  return apply_linear(quarter_turn_map(), K);
}

/// For sampled bodies h_{ψK}(u) = h_K(ψ^{-1}u), a pure index shift on grids with resolution divisible by 4.
inline Body rotate_quarter(const Body& B) {
  require(body_dim(B) == 2, "dim", "the quarter turn is planar");
  if (const auto* P = std::get_if<Polytope>(&B)) return rotate_quarter(*P);
  const auto& S = std::get<SampledBody>(B);
  SampledBody out = S;
  const int n = S.grid->resolution();
  for (int i = 0; i < n; ++i) {
    const auto src = static_cast<std::size_t>(i);
    const auto dst = static_cast<std::size_t>(S.grid->quarter_turn(i));
    out.support_values[dst] = S.support_values[src];
    if (!S.radial_values.empty()) out.radial_values[dst] = S.radial_values[src];
  }
  if (S.exact) {
    auto e = S.exact;
    out.exact = [e](const Vec& x) { return e(make_vec({x[1], -x[0]})); };
  }
  return out;
}

inline BodyValuedOperator rotate_after(const BodyValuedOperator& Z) {
  require(Z.dim == 2, "dim", "the quarter turn is planar");
  auto f = Z.apply;
  const Equivariance e = Z.equivariance == Equivariance::contravariant ? Equivariance::covariant
                         : Z.equivariance == Equivariance::covariant   ? Equivariance::contravariant
                                                                       : Equivariance::none;
  return {"rotate_quarter(" + Z.name + ")", 2, [f](const Polytope& K) { return rotate_quarter(f(K)); }, Z.declared_degree, e};
}

}  // namespace lpbm
