#pragma once

/// Convex polytopes in dimension 2 and 3 with matching vertex and facet
/// descriptions, sampled support functions, linear maps, and the basic
/// functionals of convex geometry built on them.

#include "lpbm/hull.hpp"
#include "lpbm/spherical.hpp"

#include <functional>
#include <map>
#include <optional>
#include <variant>

namespace lpbm {

struct Facet {
  Vec normal;                ///< outer unit normal u_i
  double offset = 0.0;       ///< support number h_i = h(P, u_i)
  double measure = 0.0;      ///< (n-1)-dimensional measure A_i
  std::vector<int> vertices; ///< counter-clockwise about `normal` (dim 3); endpoints (dim 2)
};

/// Full-dimensional convex polytope in V- and H-representation.
struct Polytope {
  int dim = 0;
  std::vector<Vec> vertices;
  std::vector<Facet> facets;

  double scale() const {
    double s = 0.0;
    for (const auto& v : vertices) s = std::max(s, v.norm());
    return s;
  }

  double diameter() const {
    double d = 0.0;
    for (std::size_t i = 0; i < vertices.size(); ++i) {
      for (std::size_t j = i + 1; j < vertices.size(); ++j) d = std::max(d, (vertices[i] - vertices[j]).norm());
    }
    return d;
  }

  bool contains_origin_interior() const {
    const double tol = 1e-12 * std::max(1.0, scale());
    for (const auto& f : facets) {
      if (f.offset <= tol) return false;
    }
    return !facets.empty();
  }

  std::vector<Vec> normals() const {
    std::vector<Vec> n;
    for (const auto& f : facets) n.push_back(f.normal);
    return n;
  }
};

/// Support (and optionally radial) samples on a grid. `exact` evaluates the
/// support function anywhere when the producer knows it in closed form.
struct SampledBody {
  std::shared_ptr<const DirectionGrid> grid;
  std::vector<double> support_values;
  std::vector<double> radial_values;
  std::function<double(const Vec&)> exact;

  int dim() const { return grid->dim; }
};

using Body = std::variant<Polytope, SampledBody>;

namespace detail {

inline double facet_measure(int dim, const std::vector<Vec>& verts, const std::vector<int>& ids, const Vec& normal) {
  if (dim == 2) return ids.size() == 2 ? (verts[ids[0]] - verts[ids[1]]).norm() : 0.0;
  if (ids.size() < 3) return 0.0;
  const Eigen::Vector3d n = to3(normal);
  double twice = 0.0;
  for (std::size_t k = 0; k < ids.size(); ++k) {
    twice += to3(verts[ids[k]]).cross(to3(verts[ids[(k + 1) % ids.size()]])).dot(n);
  }
  return 0.5 * std::abs(twice);
}

inline void order_around(std::vector<int>& ids, const std::vector<Vec>& verts, const Vec& normal) {
  if (normal.size() != 3 || ids.size() < 3) return;
  const Eigen::Vector3d n = to3(normal);
  const Eigen::Vector3d e1 = n.unitOrthogonal();
  const Eigen::Vector3d e2 = n.cross(e1);
  Eigen::Vector3d c = Eigen::Vector3d::Zero();
  for (int i : ids) c += to3(verts[i]);
  c /= static_cast<double>(ids.size());
  std::vector<std::pair<double, int>> keyed;
  for (int i : ids) {
    const Eigen::Vector3d d = to3(verts[i]) - c;
    keyed.emplace_back(std::atan2(d.dot(e2), d.dot(e1)), i);
  }
  std::sort(keyed.begin(), keyed.end());
  for (std::size_t k = 0; k < ids.size(); ++k) ids[k] = keyed[k].second;
}

}  // namespace detail

/// conv(points). Throws DegenerateError unless the hull is full-dimensional.
inline Polytope polytope_from_points(int dim, const std::vector<Vec>& points) {
  const std::vector<HullFace> faces = convex_hull(points, dim);
  std::map<int, int> remap;
  Polytope P;
  P.dim = dim;
  for (const auto& f : faces) {
    for (int v : f.vertices) {
      if (remap.emplace(v, static_cast<int>(P.vertices.size())).second) P.vertices.push_back(points[v]);
    }
  }
  for (const auto& f : faces) {
    Facet F;
    F.normal = f.normal;
    for (int v : f.vertices) F.vertices.push_back(remap.at(v));
    double off = -std::numeric_limits<double>::infinity();
    for (int v : F.vertices) off = std::max(off, F.normal.dot(P.vertices[v]));
    F.offset = off;
    F.measure = detail::facet_measure(dim, P.vertices, F.vertices, F.normal);
    if (F.measure > 0.0) P.facets.push_back(std::move(F));
  }
  return P;
}

/// Result of intersecting halfspaces {x·u_i ≤ h_i}; `facet_of[i]` is the facet
/// index of halfspace i, or -1 when that halfspace does not support a facet.
struct HalfspaceBuild {
  Polytope polytope;
  std::vector<int> facet_of;
};

/// Intersection of halfspaces with strictly positive offsets (origin in the
/// interior). Vertices come from the polar hull of {u_i / h_i}: each polar face
/// with plane n·y = c is the vertex n/c, and each polar vertex is a facet.
inline HalfspaceBuild polytope_from_halfspaces(int dim, const std::vector<Vec>& normals, const std::vector<double>& offsets) {
  require(normals.size() == offsets.size(), "facets", "one offset per normal required");
  require(normals.size() > static_cast<std::size_t>(dim), "facets", "too few halfspaces to bound a body");
  std::vector<Vec> polar(normals.size());
  std::vector<Vec> unit(normals.size());
  for (std::size_t i = 0; i < normals.size(); ++i) {
    require(normals[i].size() == dim && normals[i].norm() > 0.0, "facets", "normals must be nonzero vectors of the body's dimension");
    require(offsets[i] > 0.0 && std::isfinite(offsets[i]), "origin_interior",
            "halfspace offsets must be positive (origin in the interior)");
    unit[i] = normals[i].normalized();
    polar[i] = unit[i] / offsets[i];
  }
  const std::vector<HullFace> faces = convex_hull(polar, dim);

  HalfspaceBuild out;
  Polytope& P = out.polytope;
  P.dim = dim;
  std::vector<std::vector<int>> incident(normals.size());
  double polar_scale = detail::point_scale(polar);
  for (const auto& f : faces) {
    if (f.offset <= 1e-12 * polar_scale) throw DegenerateError("halfspaces do not bound a body");
    const int vid = static_cast<int>(P.vertices.size());
    P.vertices.push_back(f.normal / f.offset);
    for (int i : f.vertices) incident[static_cast<std::size_t>(i)].push_back(vid);
  }
  out.facet_of.assign(normals.size(), -1);
  for (std::size_t i = 0; i < normals.size(); ++i) {
    if (incident[i].size() < static_cast<std::size_t>(dim)) continue;
    Facet F;
    F.normal = unit[i];
    F.offset = offsets[i];
    F.vertices = incident[i];
    if (dim == 2) {
      // Endpoints ordered counter-clockwise around the boundary.
      const Vec& a = P.vertices[F.vertices[0]];
      const Vec& b = P.vertices[F.vertices[1]];
      const double cr = (b - a)[0] * F.normal[1] - (b - a)[1] * F.normal[0];
      if (cr > 0.0) std::swap(F.vertices[0], F.vertices[1]);
    } else {
      detail::order_around(F.vertices, P.vertices, F.normal);
    }
    F.measure = detail::facet_measure(dim, P.vertices, F.vertices, F.normal);
    if (F.measure <= 0.0) continue;
    out.facet_of[i] = static_cast<int>(P.facets.size());
    P.facets.push_back(std::move(F));
  }
  return out;
}

inline Polytope polytope_from_halfspaces_only(int dim, const std::vector<Vec>& normals, const std::vector<double>& offsets) {
  return polytope_from_halfspaces(dim, normals, offsets).polytope;
}

// ---------------------------------------------------------------------------
// Evaluation

inline double support(const Polytope& P, const Vec& x) {
  double h = -std::numeric_limits<double>::infinity();
  for (const auto& v : P.vertices) h = std::max(h, x.dot(v));
  return h;
}

/// Nearest-grid-direction value scaled by |x| unless an exact evaluator is attached.
inline double support(const SampledBody& S, const Vec& x) {
  if (S.exact) return S.exact(x);
  const double r = x.norm();
  if (r == 0.0) return 0.0;
  return r * S.support_values[static_cast<std::size_t>(S.grid->nearest(x / r))];
}

inline double support(const Body& B, const Vec& x) {
  return std::visit([&](const auto& b) { return support(b, x); }, B);
}

inline int body_dim(const Body& B) {
  return std::visit([](const auto& b) -> int {
    if constexpr (std::is_same_v<std::decay_t<decltype(b)>, Polytope>) return b.dim;
    else return b.dim();
  }, B);
}

/// ρ(P, u) = min over facets with u·u_i > 0 of h_i / (u·u_i).
inline double radial(const Polytope& P, const Vec& u) {
  require(P.contains_origin_interior(), "origin_interior", "radial function needs the origin in the interior");
  double r = std::numeric_limits<double>::infinity();
  for (const auto& f : P.facets) {
    const double c = u.dot(f.normal);
    if (c > 0.0) r = std::min(r, f.offset / c);
  }
  return r;
}

/// ρ(P, ·) for many directions: 1/ρ(u) = max_i u·u_i / h_i.
class RadialFunction {
 public:
  explicit RadialFunction(const Polytope& P) : a_(static_cast<Eigen::Index>(P.facets.size()), P.dim) {
    require(P.contains_origin_interior(), "origin_interior", "radial function needs the origin in the interior");
    for (std::size_t i = 0; i < P.facets.size(); ++i) {
      a_.row(static_cast<Eigen::Index>(i)) = P.facets[i].normal.transpose() / P.facets[i].offset;
    }
  }

  double operator()(const Vec& u) const { return 1.0 / (a_ * u.cast<double>()).maxCoeff(); }

 private:
  Eigen::MatrixXd a_;
};

/// (1/n) Σ h_i A_i.
inline double volume(const Polytope& P) {
  double s = 0.0;
  for (const auto& f : P.facets) s += f.offset * f.measure;
  const double v = s / P.dim;
  if (!(v > 0.0)) throw DegenerateError("polytope has no volume");
  return v;
}

inline double surface_area(const Polytope& P) {
  double s = 0.0;
  for (const auto& f : P.facets) s += f.measure;
  return s;
}

/// S(P, ·): mass A_i at u_i. With a grid, atoms are accumulated at the nearest grid direction.
inline DiscreteMeasure surface_area_measure(const Polytope& P, std::shared_ptr<const DirectionGrid> snap = nullptr) {
  std::vector<double> m;
  for (const auto& f : P.facets) m.push_back(f.measure);
  DiscreteMeasure out = atomic_measure(P.dim, P.normals(), std::move(m));
  return snap ? snap_to_grid(out, std::move(snap)) : out;
}

/// S_p(P, ·) = h^{1-p} S(P, ·).
inline DiscreteMeasure lp_surface_area_measure(const Polytope& P, double p,
                                               std::shared_ptr<const DirectionGrid> snap = nullptr) {
  require(p >= 1.0, "p", "L_p surface area measure needs p >= 1");
  require(P.contains_origin_interior(), "origin_interior", "S_p needs the origin in the interior");
  std::vector<double> m;
  for (const auto& f : P.facets) m.push_back(std::pow(f.offset, 1.0 - p) * f.measure);
  DiscreteMeasure out = atomic_measure(P.dim, P.normals(), std::move(m));
  return snap ? snap_to_grid(out, std::move(snap)) : out;
}

/// S_p(P, ·)/V(P).
inline DiscreteMeasure normalized_lp_measure(const Polytope& P, double p,
                                             std::shared_ptr<const DirectionGrid> snap = nullptr) {
  DiscreteMeasure m = lp_surface_area_measure(P, p, std::move(snap));
  const double v = volume(P);
  for (double& x : m.masses) x /= v;
  return m;
}

// ---------------------------------------------------------------------------
// Linear maps

struct LinearMap {
  enum class Kind { general, special, rotation };

  Mat matrix;
  double det = 1.0;
  Kind kind = Kind::general;

  int dim() const { return static_cast<int>(matrix.rows()); }

  static LinearMap from(const Mat& m, Kind kind = Kind::general) {
    require(m.rows() == m.cols() && (m.rows() == 2 || m.rows() == 3), "dim", "linear maps are 2x2 or 3x3");
    LinearMap L;
    L.matrix = m;
    L.det = m.determinant();
    L.kind = kind;
    require(std::abs(L.det) > 1e-14, "invertible", "linear map is singular");
    if (kind == Kind::special) require(std::abs(L.det - 1.0) <= 1e-12, "special", "det must be 1 for an SL(n) map");
    if (kind == Kind::rotation) {
      const Mat id = Mat::Identity(m.rows(), m.cols());
      require((m.transpose() * m - id).cwiseAbs().maxCoeff() <= 1e-12 && L.det > 0.0, "rotation",
              "matrix is not a rotation");
    }
    return L;
  }

  static LinearMap identity(int dim) { return from(Mat::Identity(dim, dim), Kind::rotation); }

  Vec apply(const Vec& x) const { return matrix * x; }
  Mat inverse() const { return matrix.inverse(); }
  Mat inverse_transpose() const { return matrix.inverse().transpose(); }

  LinearMap inverse_transpose_map() const {
    return from(inverse_transpose(), kind);
  }
};

/// φP with vertices mapped by φ, normals by φ^{-t} (renormalized), offsets and
/// facet measures recomputed.
inline Polytope apply_linear(const LinearMap& phi, const Polytope& P) {
  require(phi.dim() == P.dim, "dim", "map and body dimensions differ");
  const Mat it = phi.inverse_transpose();
  Polytope Q;
  Q.dim = P.dim;
  for (const auto& v : P.vertices) Q.vertices.push_back(phi.apply(v));
  for (const auto& f : P.facets) {
    Facet g;
    const Vec w = it * f.normal;
    const double len = w.norm();
    g.normal = w / len;
    g.offset = f.offset / len;
    g.vertices = f.vertices;
    if (phi.det < 0.0) std::reverse(g.vertices.begin(), g.vertices.end());
    g.measure = detail::facet_measure(Q.dim, Q.vertices, g.vertices, g.normal);
    Q.facets.push_back(std::move(g));
  }
  return Q;
}

inline Polytope dilate(const Polytope& P, double t) {
  require(t > 0.0, "dilation", "dilation factor must be positive");
  Polytope Q = P;
  for (auto& v : Q.vertices) v *= t;
  for (auto& f : Q.facets) {
    f.offset *= t;
    f.measure *= std::pow(t, P.dim - 1);
  }
  return Q;
}

inline Polytope translate(const Polytope& P, const Vec& x) {
  Polytope Q = P;
  for (auto& v : Q.vertices) v += x;
  for (auto& f : Q.facets) f.offset += f.normal.dot(x);
  return Q;
}

inline Polytope reflect(const Polytope& P) { return apply_linear(LinearMap::from(-Mat::Identity(P.dim, P.dim)), P); }

// ---------------------------------------------------------------------------
// Sampled bodies

inline SampledBody sample(std::shared_ptr<const DirectionGrid> grid, std::function<double(const Vec&)> h) {
  SampledBody S;
  S.support_values.reserve(grid->size());
  for (const auto& u : grid->directions) S.support_values.push_back(h(u));
  S.grid = std::move(grid);
  S.exact = std::move(h);
  return S;
}

inline std::vector<double> support_on_grid(const Body& B, const DirectionGrid& grid) {
  if (const auto* s = std::get_if<SampledBody>(&B); s && s->grid.get() == &grid) return s->support_values;
  std::vector<double> h;
  h.reserve(grid.size());
  for (const auto& u : grid.directions) h.push_back(support(B, u));
  return h;
}

/// Image φB. Polytopes stay exact; sampled bodies stay exact when they carry an evaluator.
inline Body apply_linear(const LinearMap& phi, const Body& B) {
  if (const auto* P = std::get_if<Polytope>(&B)) return apply_linear(phi, *P);
  const auto& S = std::get<SampledBody>(B);
  const Mat t = phi.matrix.transpose();
  const SampledBody src = S;
  return sample(S.grid, [src, t](const Vec& x) { return support(src, Vec(t * x)); });
}

inline Body dilate(const Body& B, double t) {
  if (const auto* P = std::get_if<Polytope>(&B)) return dilate(*P, t);
  const auto& S = std::get<SampledBody>(B);
  SampledBody out = S;
  for (double& h : out.support_values) h *= t;
  for (double& r : out.radial_values) r *= t;
  if (S.exact) {
    auto e = S.exact;
    out.exact = [e, t](const Vec& x) { return t * e(x); };
  }
  return out;
}

inline double max_support(const Body& B, const DirectionGrid& grid) {
  const auto h = support_on_grid(B, grid);
  return *std::max_element(h.begin(), h.end());
}

inline double mean_support(const Body& B, const DirectionGrid& grid) {
  const auto h = support_on_grid(B, grid);
  return std::accumulate(h.begin(), h.end(), 0.0) / static_cast<double>(h.size());
}

/// Volume of a body, exact for polytopes; for sampled bodies the volume of
/// the polytope cut out by the sampled support numbers.
inline double body_volume(const Body& B) {
  if (const auto* P = std::get_if<Polytope>(&B)) return volume(*P);
  const auto& S = std::get<SampledBody>(B);
  return volume(polytope_from_halfspaces_only(S.dim(), S.grid->directions, S.support_values));
}

// ---------------------------------------------------------------------------
// Constructions

/// Convex hull of a body's vertices (or a lower-dimensional seed point list)
/// together with ±x for each x in `points`.
inline Polytope hull_with_points(int dim, const std::vector<Vec>& seed, const std::vector<Vec>& points) {
  std::vector<Vec> all = seed;
  for (const auto& x : points) {
    all.push_back(x);
    all.push_back(-x);
  }
  return polytope_from_points(dim, all);
}

inline Polytope hull_with_points(const Polytope& body, const std::vector<Vec>& points) {
  return hull_with_points(body.dim, body.vertices, points);
}

/// P ∩ {x·u ≤ b} for every (u, b). Requires the origin in the interior of P and b > 0.
inline Polytope cut(const Polytope& P, const std::vector<std::pair<Vec, double>>& halfspaces) {
  std::vector<Vec> normals = P.normals();
  std::vector<double> offsets;
  for (const auto& f : P.facets) offsets.push_back(f.offset);
  for (const auto& [u, b] : halfspaces) {
    normals.push_back(u);
    offsets.push_back(b / u.norm());
  }
  return polytope_from_halfspaces_only(P.dim, normals, offsets);
}

struct ValuationQuadruple {
  Polytope K, L, U, I;
};

/// K = P ∩ {x·u ≤ b}, L = P ∩ {x·u ≥ a}, U = K ∪ L = P, I = K ∩ L.
inline ValuationQuadruple valuation_quadruple(const Polytope& P, const Vec& u, double a, double b) {
  require(a < 0.0 && 0.0 < b, "slab", "need a < 0 < b so that both cuts keep the origin in the interior");
  require(P.contains_origin_interior(), "origin_interior", "valuation quadruples need the origin in the interior");
  const Vec n = u.normalized();
  ValuationQuadruple q;
  q.U = P;
  q.K = cut(P, {{n, b}});
  q.L = cut(P, {{Vec(-n), -a}});
  q.I = cut(P, {{n, b}, {Vec(-n), -a}});
  return q;
}

/// Grid lower bound for d(A, B) = max_u |h_A(u) - h_B(u)|.
inline double hausdorff_distance(const Body& A, const Body& B, const DirectionGrid& grid) {
  require(body_dim(A) == body_dim(B) && body_dim(A) == grid.dim, "dim", "bodies and grid must share a dimension");
  const auto ha = support_on_grid(A, grid);
  const auto hb = support_on_grid(B, grid);
  double d = 0.0;
  for (std::size_t i = 0; i < ha.size(); ++i) d = std::max(d, std::abs(ha[i] - hb[i]));
  return d;
}

/// Equality contract for bodies: d(A, B) ≤ tol·(1 + max support).
inline bool bodies_equal(const Body& A, const Body& B, const DirectionGrid& grid, double tol = 1e-6) {
  const double s = std::max(max_support(A, grid), max_support(B, grid));
  return hausdorff_distance(A, B, grid) <= tol * (1.0 + s);
}

/// V_p(K, L) = (1/n) Σ h_L(u_i)^p h_i^{1-p} A_i over the facets of K.
inline double mixed_volume_p(const Polytope& K, const Body& L, double p) {
  require(p >= 1.0, "p", "L_p mixed volume needs p >= 1");
  require(K.contains_origin_interior(), "origin_interior", "V_p needs the origin in the interior of K");
  double s = 0.0;
  for (const auto& f : K.facets) s += std::pow(support(L, f.normal), p) * std::pow(f.offset, 1.0 - p) * f.measure;
  return s / K.dim;
}

/// A ridge shared by facets i and j with its (n-2)-measure (1 in the plane).
struct Ridge {
  int i = 0, j = 0;
  double measure = 0.0;
};

inline std::vector<Ridge> facet_ridges(const Polytope& P) {
  std::map<std::pair<int, int>, std::vector<int>> by_edge;
  for (std::size_t f = 0; f < P.facets.size(); ++f) {
    const auto& ids = P.facets[f].vertices;
    if (P.dim == 2) {
      for (int v : ids) by_edge[{v, v}].push_back(static_cast<int>(f));
    } else {
      for (std::size_t k = 0; k < ids.size(); ++k) {
        by_edge[std::minmax(ids[k], ids[(k + 1) % ids.size()])].push_back(static_cast<int>(f));
      }
    }
  }
  std::vector<Ridge> out;
  for (const auto& [e, fs] : by_edge) {
    if (fs.size() != 2) continue;
    const double m = P.dim == 2 ? 1.0 : (P.vertices[e.first] - P.vertices[e.second]).norm();
    out.push_back({fs[0], fs[1], m});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Catalog bodies

inline Polytope cube(int dim, double r = 1.0) {
  std::vector<Vec> pts;
  for (int mask = 0; mask < (1 << dim); ++mask) {
    Vec v(dim);
    for (int k = 0; k < dim; ++k) v[k] = (mask >> k) & 1 ? r : -r;
    pts.push_back(v);
  }
  return polytope_from_points(dim, pts);
}

inline Polytope cross_polytope(int dim, double r = 1.0) {
  std::vector<Vec> pts;
  for (int k = 0; k < dim; ++k) {
    pts.push_back(r * unit_vec(dim, k));
    pts.push_back(-r * unit_vec(dim, k));
  }
  return polytope_from_points(dim, pts);
}

/// conv of the grid directions scaled by r: ρ(·, u) = r exactly at every grid direction.
inline Polytope grid_ball(const DirectionGrid& grid, double r = 1.0) {
  std::vector<Vec> pts;
  for (const auto& u : grid.directions) pts.push_back(r * u);
  return polytope_from_points(grid.dim, pts);
}

inline Polytope regular_polygon(int sides, double r = 1.0, double phase = 0.0) {
  std::vector<Vec> pts;
  for (int k = 0; k < sides; ++k) {
    const double t = phase + 2.0 * std::numbers::pi * k / sides;
    pts.push_back(make_vec({r * std::cos(t), r * std::sin(t)}));
  }
  return polytope_from_points(2, pts);
}

}  // namespace lpbm
