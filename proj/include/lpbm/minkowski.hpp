#pragma once

/// Solver for the discrete even L_p-Minkowski problem, volume-normalized
/// (S_p(K,·)/V(K) = μ, any p > 1 including p = n) and plain (S_p(K,·) = μ, p ≠ n).
///
/// Facet normals are fixed to supp(μ) and the unknowns are the support numbers
/// of one direction per antipodal pair, h = exp(s). The normalized solution is
/// the unique minimizer of the convex functional
///   J(h) = (1/p) Σ μ_i h_i^p - log V(K(h)),
/// whose stationarity condition μ_i h_i^{p-1} = A_i(h)/V(h) is exactly the
/// normalized equation. Iterations are damped Newton steps using the mixed
/// volume Hessian ∂A_i/∂h_j = |F_i ∩ F_j| / sin θ_ij, taken multiplicatively in
/// h so that support numbers stay positive, with a backtracking line search on J.

#include "lpbm/convexbody.hpp"

#include <Eigen/SparseCholesky>

#include <random>

namespace lpbm {

struct StepControl {
  double shrink = 0.5;
  double growth = 1.1;
  double initial_step = 0.1;
};

struct SolverConfig {
  int max_iterations = 5000;
  double residual_tol = 1e-8;
  StepControl step_control;
  double min_support = 1e-10;
  /// 0: start from h ≡ 1. Otherwise start from h ~ Uniform[0.5, 2] drawn with this seed.
  std::uint64_t init_seed = 0;

  void validate() const {
    require(residual_tol > 0.0, "residual_tol", "residual tolerance must be positive");
    require(max_iterations > 0, "max_iterations", "iteration limit must be positive");
    require(0.0 < step_control.shrink && step_control.shrink < 1.0 && step_control.growth > 1.0, "step_control",
            "need 0 < shrink < 1 < growth");
    require(step_control.initial_step > 0.0, "step_control", "initial step must be positive");
    require(min_support > 0.0, "min_support", "support floor must be positive");
  }
};

struct SolverReport {
  int iterations = 0;
  double final_residual = 0.0;
  std::vector<double> objective_history;
  bool converged = false;
  double concentration_gap = 0.0;
};

struct SolveResult {
  Polytope body;
  SolverReport report;
};

inline constexpr double kMaxP = 12.0;
inline constexpr double kDegenerateSink = 0.01;
inline constexpr int kFacetKeepingTries = 12;

namespace detail {

struct MinkowskiProblem {
  int dim = 0;
  double p = 0.0;
  std::vector<Vec> normals;   ///< supp(μ), pairs adjacent: 2k and 2k+1
  std::vector<double> mu;     ///< masses on `normals`
  std::vector<int> source;    ///< index into the input measure
};

struct Iterate {
  std::vector<double> h;      ///< per normal
  HalfspaceBuild build;
  std::vector<double> area;   ///< A_i per normal, 0 when the facet is absent
  double volume = 0.0;
  double objective = 0.0;
};

inline MinkowskiProblem make_problem(const DiscreteMeasure& mu, double p) {
  require(mu.dim == 2 || mu.dim == 3, "dim", "unsupported dimension");
  require(p > 1.0 && p <= kMaxP, "p", "solver accepts p in (1, 12]");
  require(is_even(mu), "even", "the Minkowski solver needs an even measure");
  require(mu.total() > 0.0, "total_mass", "measure has zero total mass");
  MinkowskiProblem pr;
  pr.dim = mu.dim;
  pr.p = p;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const int j = mu.antipode[i];
    if (mu.masses[i] <= 0.0 || j < static_cast<int>(i)) continue;
    pr.normals.push_back(mu.directions[i]);
    pr.normals.push_back(mu.directions[static_cast<std::size_t>(j)]);
    pr.mu.push_back(mu.masses[i]);
    pr.mu.push_back(mu.masses[static_cast<std::size_t>(j)]);
    pr.source.push_back(static_cast<int>(i));
    pr.source.push_back(j);
  }
  return pr;
}

inline std::optional<Iterate> evaluate(const MinkowskiProblem& pr, const Eigen::VectorXd& s, double floor) {
  Iterate it;
  const std::size_t m = static_cast<std::size_t>(s.size());
  it.h.resize(2 * m);
  for (std::size_t k = 0; k < m; ++k) it.h[2 * k] = it.h[2 * k + 1] = std::max(std::exp(s[static_cast<Eigen::Index>(k)]), floor);
  try {
    it.build = polytope_from_halfspaces(pr.dim, pr.normals, it.h);
    it.volume = volume(it.build.polytope);
  } catch (const DegenerateError&) {
    return std::nullopt;
  }
  it.area.assign(pr.normals.size(), 0.0);
  for (std::size_t i = 0; i < pr.normals.size(); ++i) {
    const int f = it.build.facet_of[i];
    if (f >= 0) it.area[i] = it.build.polytope.facets[static_cast<std::size_t>(f)].measure;
  }
  double phi = 0.0;
  for (std::size_t i = 0; i < pr.normals.size(); ++i) phi += pr.mu[i] * std::pow(it.h[i], pr.p);
  it.objective = phi / pr.p - std::log(it.volume);
  return it;
}

/// Relative residuals r_i = h_i^{1-p} A_i / (V μ_i); the solution has r ≡ 1.
inline std::vector<double> ratios(const MinkowskiProblem& pr, const Iterate& it) {
  std::vector<double> r(pr.normals.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = std::pow(it.h[i], 1.0 - pr.p) * it.area[i] / (it.volume * pr.mu[i]);
  return r;
}

/// Dilation t minimizing Σ (t^{-p} r_i - 1)^2, and the residual after it.
inline std::pair<double, double> best_rescale(const MinkowskiProblem& pr, const Iterate& it) {
  const auto r = ratios(pr, it);
  double s1 = 0.0, s2 = 0.0;
  for (double x : r) s1 += x, s2 += x * x;
  const double c = s2 > 0.0 ? s1 / s2 : 1.0;  // = t^{-p}
  double res = 0.0;
  for (double x : r) res = std::max(res, std::abs(c * x - 1.0));
  return {std::pow(c, -1.0 / pr.p), res};
}

/// Newton direction in the reduced support numbers (one per antipodal pair).
inline std::optional<Eigen::VectorXd> newton_direction(const MinkowskiProblem& pr, const Iterate& it,
                                                       Eigen::VectorXd& grad) {
  const Eigen::Index m = static_cast<Eigen::Index>(pr.normals.size() / 2);
  const double p = pr.p;
  const double V = it.volume;
  grad = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd a = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(m);
  for (std::size_t i = 0; i < pr.normals.size(); ++i) {
    const Eigen::Index k = static_cast<Eigen::Index>(i / 2);
    grad[k] += pr.mu[i] * std::pow(it.h[i], p - 1.0) - it.area[i] / V;
    a[k] += it.area[i];
    diag[k] += (p - 1.0) * pr.mu[i] * std::pow(it.h[i], p - 2.0);
  }
  // Facet index -> normal index.
  const Polytope& P = it.build.polytope;
  std::vector<int> normal_of(P.facets.size(), -1);
  for (std::size_t i = 0; i < it.build.facet_of.size(); ++i) {
    if (it.build.facet_of[i] >= 0) normal_of[static_cast<std::size_t>(it.build.facet_of[i])] = static_cast<int>(i);
  }
  // Sparse part: μ-curvature minus the mixed-area Hessian over V.
  std::vector<Eigen::Triplet<double>> trip;
  for (Eigen::Index k = 0; k < m; ++k) trip.emplace_back(k, k, diag[k]);
  for (const Ridge& r : facet_ridges(P)) {
    const int i = normal_of[static_cast<std::size_t>(r.i)];
    const int j = normal_of[static_cast<std::size_t>(r.j)];
    const Vec& ui = pr.normals[static_cast<std::size_t>(i)];
    const Vec& uj = pr.normals[static_cast<std::size_t>(j)];
    const double c = ui.dot(uj);
    const double sn = pr.dim == 2 ? std::abs(ui[0] * uj[1] - ui[1] * uj[0]) : to3(ui).cross(to3(uj)).norm();
    if (sn <= 1e-14) continue;
    const Eigen::Index ki = i / 2, kj = j / 2;
    trip.emplace_back(ki, kj, -r.measure / sn / V);
    trip.emplace_back(kj, ki, -r.measure / sn / V);
    trip.emplace_back(ki, ki, r.measure * c / sn / V);
    trip.emplace_back(kj, kj, r.measure * c / sn / V);
  }
  Eigen::SparseMatrix<double> H0(m, m);
  H0.setFromTriplets(trip.begin(), trip.end());

  // Full Hessian H0 + a aᵀ/V², solved by Sherman–Morrison.
  const Eigen::VectorXd b = a / V;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> sparse(H0);
  if (sparse.info() == Eigen::Success) {
    const Eigen::VectorXd x = sparse.solve(grad);
    const Eigen::VectorXd y = sparse.solve(b);
    const double denom = 1.0 + b.dot(y);
    if (std::abs(denom) > 1e-12) {
      Eigen::VectorXd d = -(x - y * (b.dot(x) / denom));
      if (d.allFinite() && d.dot(grad) < 0.0) return d;
    }
  }
  Eigen::MatrixXd H = Eigen::MatrixXd(H0) + b * b.transpose();
  Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
  if (ldlt.info() == Eigen::Success) {
    Eigen::VectorXd d = -ldlt.solve(grad);
    if (d.allFinite() && d.dot(grad) < 0.0) return d;
  }
  return std::nullopt;
}

/// Lowers every support number to the actual support value of K(h). The body is
/// unchanged and J can only decrease.
inline void tighten(const MinkowskiProblem& pr, Eigen::VectorXd& s, std::optional<Iterate>& cur, double floor) {
  Eigen::VectorXd tight = s;
  bool slack = false;
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    if (cur->area[static_cast<std::size_t>(2 * k)] > 0.0) continue;
    const double h = support(cur->build.polytope, pr.normals[static_cast<std::size_t>(2 * k)]);
    const double t = std::log(std::max(h, floor));
    if (t < s[k] - 1e-13) {
      tight[k] = t;
      slack = true;
    }
  }
  if (!slack) return;
  auto next = evaluate(pr, tight, floor);
  if (next && next->objective <= cur->objective) {
    s = tight;
    cur = std::move(next);
  }
}

inline Eigen::VectorXd initial_log_support(std::size_t pairs, std::uint64_t seed) {
  Eigen::VectorXd s = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(pairs));
  if (seed != 0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(0.5, 2.0);
    for (Eigen::Index k = 0; k < s.size(); ++k) s[k] = std::log(dist(rng));
  }
  return s;
}

}  // namespace detail

inline double residual(const Polytope& K, double p, const DiscreteMeasure& mu, bool normalized);

/// Finds the origin-symmetric polytope K with facet normals in supp(μ) and
/// S_p(K,·)/V(K) = μ. Iteration-limit failures return the best iterate with
/// `converged == false`.
inline SolveResult solve_normalized_even(const DiscreteMeasure& mu, double p, const SolverConfig& cfg = {}) {
  cfg.validate();
  const detail::MinkowskiProblem pr = detail::make_problem(mu, p);
  SolverReport report;
  report.concentration_gap = concentration_gap(mu);
  require(report.concentration_gap >= kConcentrationThreshold, "concentration_gap",
          "measure is concentrated on a great subsphere (gap " + std::to_string(report.concentration_gap) + ")");

  const std::size_t pairs = pr.normals.size() / 2;
  Eigen::VectorXd s = detail::initial_log_support(pairs, cfg.init_seed);
  auto cur = detail::evaluate(pr, s, cfg.min_support);
  for (double scale = 1.0; !cur && scale < 1e6; scale *= 2.0) {
    s = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(pairs), std::log(scale));
    cur = detail::evaluate(pr, s, cfg.min_support);
  }
  if (!cur) throw DegenerateError("could not build an initial polytope from supp(mu)");
  detail::tighten(pr, s, cur, cfg.min_support);
  report.objective_history.push_back(cur->objective);

  double step_hint = 1.0;
  auto [t_best, res] = detail::best_rescale(pr, *cur);
  // Aim below the tolerance: rebuilding the polytope from halfspaces costs some rounding.
  const double target = 0.1 * cfg.residual_tol;
  for (int iter = 0; iter < cfg.max_iterations && res > target; ++iter) {
    report.iterations = iter + 1;
    Eigen::VectorXd grad;
    auto dir_h = detail::newton_direction(pr, *cur, grad);
    Eigen::VectorXd ds(static_cast<Eigen::Index>(pairs));
    Eigen::VectorXd gs(static_cast<Eigen::Index>(pairs));
    for (Eigen::Index k = 0; k < ds.size(); ++k) gs[k] = grad[k] * cur->h[static_cast<std::size_t>(2 * k)];
    bool newton = dir_h.has_value();
    if (newton) {
      for (Eigen::Index k = 0; k < ds.size(); ++k) ds[k] = (*dir_h)[k] / cur->h[static_cast<std::size_t>(2 * k)];
    } else {
      ds = -gs / std::max(gs.cwiseAbs().maxCoeff(), 1e-300) * cfg.step_control.initial_step;
    }
    // A facet of zero area has no volume curvature in the model; let it sink only slowly.
    for (Eigen::Index k = 0; k < ds.size(); ++k) {
      if (cur->area[static_cast<std::size_t>(2 * k)] <= 0.0) ds[k] = std::max(ds[k], -kDegenerateSink);
    }
    const double cap = ds.cwiseAbs().maxCoeff();
    if (cap > 1.0) ds /= cap;

    const double slope = gs.dot(ds);
    double t = newton ? 1.0 : std::min(1.0, step_hint);
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls, t *= cfg.step_control.shrink) {
      auto trial = detail::evaluate(pr, s + t * ds, cfg.min_support);
      if (!trial) continue;
      const double dJ = trial->objective - cur->objective;
      const bool armijo = dJ <= 1e-4 * t * slope;
      // Near the optimum J changes below rounding; accept if the residual still drops.
      const bool flat = dJ <= 1e-12 * std::abs(cur->objective) + 1e-15 &&
                        detail::best_rescale(pr, *trial).second < res;
      // Solutions carry every facet; early on, prefer steps that keep the ones already present.
      const bool keeps = ls >= kFacetKeepingTries || trial->build.polytope.facets.size() >= cur->build.polytope.facets.size();
      if ((armijo || flat) && keeps) {
        s += t * ds;
        cur = std::move(trial);
        detail::tighten(pr, s, cur, cfg.min_support);
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    step_hint = std::min(1.0, t * cfg.step_control.growth);
    report.objective_history.push_back(cur->objective);
    std::tie(t_best, res) = detail::best_rescale(pr, *cur);
  }

  // Final dilation read off by least squares from the stationarity ratios.
  std::vector<double> h = cur->h;
  for (double& x : h) x *= t_best;
  HalfspaceBuild final_build = polytope_from_halfspaces(pr.dim, pr.normals, h);
  report.final_residual = final_build.polytope.contains_origin_interior() ? residual(final_build.polytope, p, mu, true) : res;
  report.converged = report.final_residual <= cfg.residual_tol;
  return {std::move(final_build.polytope), std::move(report)};
}

/// max_i |h_i^{1-p} A_i (/V if normalized) - μ_i| / μ_i over supp(μ). Facets of
/// K must have normals in supp(μ); directions of supp(μ) that carry no facet
/// count as A_i = 0.
inline double residual(const Polytope& K, double p, const DiscreteMeasure& mu, bool normalized) {
  require(K.contains_origin_interior(), "origin_interior", "residual needs the origin in the interior");
  const double V = normalized ? volume(K) : 1.0;
  std::vector<double> value(mu.size(), 0.0);
  for (const auto& f : K.facets) {
    int match = -1;
    for (std::size_t i = 0; i < mu.size(); ++i) {
      if (mu.masses[i] > 0.0 && (mu.directions[i] - f.normal).norm() <= 1e-9) {
        match = static_cast<int>(i);
        break;
      }
    }
    require(match >= 0, "normals", "facet normal of K is not in supp(mu)");
    value[static_cast<std::size_t>(match)] += std::pow(f.offset, 1.0 - p) * f.measure / V;
  }
  double r = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (mu.masses[i] > 0.0) r = std::max(r, std::abs(value[i] - mu.masses[i]) / mu.masses[i]);
  }
  return r;
}

/// Plain even problem S_p(K,·) = μ for p ≠ n: K = V(K̃)^{1/(p-n)} K̃ with K̃ the normalized solution.
inline SolveResult solve_even(const DiscreteMeasure& mu, double p, const SolverConfig& cfg = {}) {
  require(std::abs(p - mu.dim) > 1e-6, "p_ne_n", "the plain L_p-Minkowski problem needs p != n");
  SolveResult r = solve_normalized_even(mu, p, cfg);
  const double t = std::pow(volume(r.body), 1.0 / (p - mu.dim));
  r.body = dilate(r.body, t);
  r.report.final_residual = residual(r.body, p, mu, false);
  r.report.converged = r.report.converged && r.report.final_residual <= std::max(cfg.residual_tol, 1e-8) * 10.0;
  return r;
}

}  // namespace lpbm
