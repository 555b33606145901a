#pragma once

/// The L_p-cosine transform and the bodies defined through it: L_p-projection
/// bodies (with the asymmetric and boundary-adapted variants), L_p-centroid
/// bodies, moment bodies M_p^τ, and the support point of a body whose p-th
/// power support function is a cosine transform.
///
/// Moment integrals are exact. For the degree-p homogeneous integrand
/// f(y) = (|u·y| + τ u·y)^p, Euler's relation reduces ∫_K f to facet integrals,
///   ∫_K f = 1/(n+p) Σ_F h_F ∫_F f,
/// and within a facet the same reduction about a point c of the facet plane
/// with u·c = 0 brings it down to edge integrals, which have closed forms.

#include "lpbm/convexbody.hpp"

#include <iostream>
#include <mutex>
#include <set>
#include <shared_mutex>

namespace lpbm {

namespace detail {

inline void warn_even_integer(double p) {
  static std::mutex mu;
  static std::set<double> seen;
  std::lock_guard lock(mu);
  if (seen.insert(p).second) {
    std::clog << "lpbm: warning: p = " << p
              << " is an even integer; cosine-transform injectivity is unavailable\n";
  }
}

inline void check_p(double p) {
  require(p > 1.0 && std::isfinite(p), "p", "transforms need p > 1");
  if (is_even_integer(p)) warn_even_integer(p);
}

/// g(t) = (|t| + τt)^p.
inline double tau_power(double t, double p, double tau) {
  return t >= 0.0 ? std::pow((1.0 + tau) * t, p) : std::pow((1.0 - tau) * -t, p);
}

/// C^1 antiderivative of g with G(0) = 0.
inline double tau_power_integral(double t, double p, double tau) {
  return t >= 0.0 ? std::pow(1.0 + tau, p) * std::pow(t, p + 1.0) / (p + 1.0)
                  : -std::pow(1.0 - tau, p) * std::pow(-t, p + 1.0) / (p + 1.0);
}

/// ∫_0^1 g(α + βt) dt.
inline double segment_average(double alpha, double beta, double p, double tau) {
  if (std::abs(beta) <= 1e-7 * std::abs(alpha)) return tau_power(alpha + 0.5 * beta, p, tau);
  return (tau_power_integral(alpha + beta, p, tau) - tau_power_integral(alpha, p, tau)) / beta;
}

/// ∫_F g(u·y) dA over a facet of a 3-polytope.
inline double facet_moment3(const Polytope& P, const Facet& F, const Vec& u, double p, double tau) {
  const Eigen::Vector3d nu = to3(F.normal);
  const Eigen::Vector3d uu = to3(u);
  const Eigen::Vector3d w = uu - uu.dot(nu) * nu;
  const double wn = w.norm();
  const std::size_t m = F.vertices.size();
  if (wn <= 1e-6 * uu.norm()) {
    // u·y is almost constant on F; the linear part integrates to zero about the centroid.
    Eigen::Vector3d c = Eigen::Vector3d::Zero();
    double area = 0.0;
    const Eigen::Vector3d o = to3(P.vertices[F.vertices[0]]);
    for (std::size_t k = 1; k + 1 < m; ++k) {
      const Eigen::Vector3d a = to3(P.vertices[F.vertices[k]]);
      const Eigen::Vector3d b = to3(P.vertices[F.vertices[k + 1]]);
      const double t = 0.5 * (a - o).cross(b - o).dot(nu);
      area += t;
      c += t * (o + a + b) / 3.0;
    }
    if (area == 0.0) return 0.0;
    return area * tau_power(uu.dot(c / area), p, tau);
  }
  const Eigen::Vector3d c = F.offset * nu - (F.offset * uu.dot(nu) / wn) * (w / wn);
  double s = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const Eigen::Vector3d a = to3(P.vertices[F.vertices[k]]);
    const Eigen::Vector3d b = to3(P.vertices[F.vertices[(k + 1) % m]]);
    const Eigen::Vector3d d = b - a;
    const double len = d.norm();
    if (len == 0.0) continue;
    const Eigen::Vector3d edge_normal = d.cross(nu) / len;
    const double dist = edge_normal.dot(a - c);
    s += dist * len * segment_average(uu.dot(a), uu.dot(d), p, tau);
  }
  return s / (2.0 + p);
}

}  // namespace detail

/// (C_p m)(x) = Σ |x·u_i|^p m_i.
inline double cosine_transform(const DiscreteMeasure& m, double p, const Vec& x) {
  detail::check_p(p);
  double s = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m.masses[i] != 0.0) s += std::pow(std::abs(x.dot(m.directions[i])), p) * m.masses[i];
  }
  return s;
}

/// Body with h(u) = (C_p m(u))^{1/p}, sampled on `grid`.
inline SampledBody cosine_body(const DiscreteMeasure& m, double p, std::shared_ptr<const DirectionGrid> grid) {
  detail::check_p(p);
  return sample(std::move(grid), [m, p](const Vec& x) { return std::pow(cosine_transform(m, p, x), 1.0 / p); });
}

// ---------------------------------------------------------------------------
// Projection bodies

namespace detail {

inline double tau_cosine_sum(const std::vector<Vec>& normals, const std::vector<double>& masses, double p, double tau,
                             const Vec& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < normals.size(); ++i) s += tau_power(x.dot(normals[i]), p, tau) * masses[i];
  return s;
}

inline SampledBody tau_projection(std::vector<Vec> normals, std::vector<double> masses, double p, double tau,
                                  std::shared_ptr<const DirectionGrid> grid) {
  return sample(std::move(grid), [normals = std::move(normals), masses = std::move(masses), p, tau](const Vec& x) {
    return std::pow(tau_cosine_sum(normals, masses, p, tau, x), 1.0 / p);
  });
}

}  // namespace detail

/// Π_p^τ K: h(u)^p = Σ (|u·u_i| + τ u·u_i)^p S_p(K, {u_i}). τ = 0 gives Π_p K.
inline SampledBody projection_body(const Polytope& K, double p, double tau, std::shared_ptr<const DirectionGrid> grid) {
  detail::check_p(p);
  require(tau >= -1.0 && tau <= 1.0, "tau", "tau must lie in [-1, 1]");
  require(grid->dim == K.dim, "dim", "grid and body dimensions differ");
  const DiscreteMeasure sp = lp_surface_area_measure(K, p);
  return detail::tau_projection(sp.directions, sp.masses, p, tau, std::move(grid));
}

/// Π̂_p^τ P for polytopes containing the origin, possibly on the boundary:
/// facets whose affine hull contains the origin are left out of the sum.
inline SampledBody projection_body_boundary(const Polytope& P, double p, double tau,
                                            std::shared_ptr<const DirectionGrid> grid) {
  detail::check_p(p);
  require(tau >= -1.0 && tau <= 1.0, "tau", "tau must lie in [-1, 1]");
  require(grid->dim == P.dim, "dim", "grid and body dimensions differ");
  const double cutoff = 1e-12 * P.diameter();
  std::vector<Vec> normals;
  std::vector<double> masses;
  for (const auto& f : P.facets) {
    require(f.offset >= -cutoff, "origin_in_body", "the origin lies outside the polytope");
    if (f.offset <= cutoff) continue;
    normals.push_back(f.normal);
    masses.push_back(std::pow(f.offset, 1.0 - p) * f.measure);
  }
  return detail::tau_projection(std::move(normals), std::move(masses), p, tau, std::move(grid));
}

// ---------------------------------------------------------------------------
// c_{n,p}

struct CnpConstant {
  int dim = 0;
  double p = 0.0;
  double value = 0.0;
};

namespace detail {

class CnpCache {
 public:
  std::optional<double> find(int dim, double p) const {
    std::shared_lock lock(mu_);
    auto it = table_.find({dim, p});
    if (it == table_.end()) return std::nullopt;
    return it->second;
  }
  void insert(int dim, double p, double value) {
    std::unique_lock lock(mu_);
    table_.emplace(std::make_pair(dim, p), value);
  }
  std::size_t size() const {
    std::shared_lock lock(mu_);
    return table_.size();
  }

 private:
  mutable std::shared_mutex mu_;
  std::map<std::pair<int, double>, double> table_;
};

inline CnpCache& cnp_cache() {
  static CnpCache cache;
  return cache;
}

}  // namespace detail

/// ∫_{S^{n-1}} |u·e|^p dσ(u) = 2π^{(n-1)/2} Γ((p+1)/2) / Γ((n+p)/2).
inline double sphere_abs_moment(int dim, double p) {
  return 2.0 * std::pow(std::numbers::pi, (dim - 1) / 2.0) * std::tgamma((p + 1.0) / 2.0) /
         std::tgamma((dim + p) / 2.0);
}

/// c_{n,p} = (1/κ_n) ∫_B |x·e|^p dx = ∫_{S^{n-1}} |u·e|^p dσ / ((n+p) κ_n), so that Γ_p B = B.
inline CnpConstant calibrate_cnp(int dim, double p) {
  require(dim == 2 || dim == 3, "dim", "unsupported dimension");
  require(p > 1.0, "p", "c_{n,p} needs p > 1");
  if (auto v = detail::cnp_cache().find(dim, p)) return {dim, p, *v};
  const double value = sphere_abs_moment(dim, p) / ((dim + p) * unit_ball_volume(dim));
  detail::cnp_cache().insert(dim, p, value);
  return {dim, p, value};
}

// ---------------------------------------------------------------------------
// Moment and centroid bodies

/// ∫_K (|x·y| + τ x·y)^p dy, exact.
inline double moment_integral(const Polytope& K, double p, double tau, const Vec& x) {
  const double r = x.norm();
  if (r == 0.0) return 0.0;
  const Vec u = x / r;
  double s = 0.0;
  for (const auto& F : K.facets) {
    if (F.offset == 0.0) continue;
    double facet;
    if (K.dim == 2) {
      const Vec& a = K.vertices[F.vertices[0]];
      const Vec& b = K.vertices[F.vertices[1]];
      facet = F.measure * detail::segment_average(u.dot(a), u.dot(b - a), p, tau);
    } else {
      facet = detail::facet_moment3(K, F, u, p, tau);
    }
    s += F.offset * facet;
  }
  return std::pow(r, p) * s / (K.dim + p);
}

/// M_p^τ K: h(x)^p = ∫_K (|x·y| + τ x·y)^p dy. Requires the origin in the interior.
inline SampledBody moment_body(const Polytope& K, double p, double tau, std::shared_ptr<const DirectionGrid> grid) {
  detail::check_p(p);
  require(tau >= -1.0 && tau <= 1.0, "tau", "tau must lie in [-1, 1]");
  require(K.contains_origin_interior(), "origin_interior", "moment body needs the origin in the interior");
  require(grid->dim == K.dim, "dim", "grid and body dimensions differ");
  return sample(std::move(grid), [K, p, tau](const Vec& x) { return std::pow(moment_integral(K, p, tau, x), 1.0 / p); });
}

/// Γ_p K: h(u)^p = ∫_K |u·y|^p dy / (c_{n,p} V(K)).
inline double centroid_support(const Polytope& K, double p, const Vec& x) {
  const double c = calibrate_cnp(K.dim, p).value;
  return std::pow(moment_integral(K, p, 0.0, x) / (c * volume(K)), 1.0 / p);
}

inline SampledBody centroid_body(const Polytope& K, double p, std::shared_ptr<const DirectionGrid> grid) {
  detail::check_p(p);
  require(K.contains_origin_interior(), "origin_interior", "centroid body needs the origin in the interior");
  require(grid->dim == K.dim, "dim", "grid and body dimensions differ");
  const double c = calibrate_cnp(K.dim, p).value;
  const double v = volume(K);
  return sample(std::move(grid), [K, p, c, v](const Vec& x) {
    return std::pow(moment_integral(K, p, 0.0, x) / (c * v), 1.0 / p);
  });
}

// ---------------------------------------------------------------------------
// Support sets

/// The unique point of the support set in direction e of the body with
/// h(u)^p = C_p m(u):
///   v_e = 2 (C_p m(e))^{1/p - 1} Σ_{u_i·e > 0} (e·u_i)^{p-1} m_i u_i.
inline Vec support_point(const DiscreteMeasure& m, double p, const Vec& e) {
  detail::check_p(p);
  require(is_even(m), "even", "support point formula needs an even measure");
  require(concentration_gap(m) > 0.0, "concentration_gap", "measure is concentrated on a great subsphere");
  const double ct = cosine_transform(m, p, e);
  require(ct > 0.0, "cosine_transform", "transform vanishes in direction e");
  Vec acc = Vec::Zero(m.dim);
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double c = e.dot(m.directions[i]);
    if (c > 0.0) acc += std::pow(c, p - 1.0) * m.masses[i] * m.directions[i];
  }
  return 2.0 * std::pow(ct, 1.0 / p - 1.0) * acc;
}

}  // namespace lpbm
