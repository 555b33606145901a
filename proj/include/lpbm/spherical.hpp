#pragma once

/// Discrete models of the unit sphere S^{n-1} (n = 2, 3) and of finite Borel
/// measures on it.
///
/// A DirectionGrid is an antipodally closed set of unit directions with
/// quadrature weights for spherical Lebesgue measure. In dim 2 the grid is the
/// uniform circle partition; in dim 3 it is a subdivided icosahedron. Both are
/// built so that the antipode of every direction is its exact bitwise negation,
/// which lets even measures be stored over the full grid with mirrored masses.

#include "lpbm/core.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <numbers>
#include <unordered_map>
#include <string>
#include <utility>
#include <vector>

namespace lpbm {

struct DirectionGrid {
  int dim = 0;
  int level = 0;  ///< subdivision level (dim 3 only)
  std::vector<Vec> directions;
  std::vector<double> weights;
  std::vector<int> antipode;

  std::size_t size() const { return directions.size(); }
  int resolution() const { return static_cast<int>(directions.size()); }

  /// Index of the grid direction closest to x (largest inner product).
  int nearest(const Vec& x) const {
    int best = 0;
    double best_dot = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < directions.size(); ++i) {
      const double d = directions[i].dot(x);
      if (d > best_dot) {
        best_dot = d;
        best = static_cast<int>(i);
      }
    }
    return best;
  }

  /// Index of the image of direction i under the quarter turn (x, y) -> (-y, x).
  int quarter_turn(int i) const {
    require(dim == 2, "dim", "quarter turn is defined on planar grids only");
    const int n = resolution();
    return (i + n / 4) % n;
  }
};

namespace detail {

inline std::shared_ptr<DirectionGrid> circle_grid(int resolution) {
  auto g = std::make_shared<DirectionGrid>();
  g->dim = 2;
  const int n = resolution;
  const int q = n / 4;
  g->directions.assign(n, Vec::Zero(2));
  for (int k = 0; k < q; ++k) {
    const double t = 2.0 * std::numbers::pi * k / n;
    const double c = std::cos(t), s = std::sin(t);
    g->directions[k] = make_vec({c, s});
    g->directions[k + q] = make_vec({-s, c});
    g->directions[k + 2 * q] = make_vec({-c, -s});
    g->directions[k + 3 * q] = make_vec({s, -c});
  }
  g->weights.assign(n, 2.0 * std::numbers::pi / n);
  g->antipode.resize(n);
  for (int k = 0; k < n; ++k) g->antipode[k] = (k + n / 2) % n;
  return g;
}

inline int icosa_level_for(int resolution) {
  for (int level = 0; level <= 7; ++level) {
    if (10 * (1 << (2 * level)) + 2 == resolution) return level;
  }
  return -1;
}

struct IcosaMesh {
  std::vector<Eigen::Vector3d> vertices;
  std::vector<std::array<int, 3>> triangles;
};

inline IcosaMesh icosahedron() {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  IcosaMesh m;
  const double raw[12][3] = {{-1, t, 0}, {1, t, 0},  {-1, -t, 0}, {1, -t, 0},
                             {0, -1, t}, {0, 1, t},  {0, -1, -t}, {0, 1, -t},
                             {t, 0, -1}, {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
  for (const auto& r : raw) m.vertices.push_back(Eigen::Vector3d(r[0], r[1], r[2]).normalized());
  m.triangles = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                 {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                 {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                 {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  return m;
}

inline IcosaMesh subdivide(const IcosaMesh& in) {
  IcosaMesh out;
  out.vertices = in.vertices;
  std::map<std::pair<int, int>, int> midpoint;
  auto mid = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    out.vertices.push_back((out.vertices[a] + out.vertices[b]).normalized());
    const int id = static_cast<int>(out.vertices.size()) - 1;
    midpoint.emplace(key, id);
    return id;
  };
  for (const auto& t : in.triangles) {
    const int ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ca = mid(t[2], t[0]);
    out.triangles.push_back({t[0], ab, ca});
    out.triangles.push_back({t[1], bc, ab});
    out.triangles.push_back({t[2], ca, bc});
    out.triangles.push_back({ab, bc, ca});
  }
  return out;
}

/// Area of the facet with normal u of the polytope circumscribed about S^2
/// whose facet normals are the mesh vertices. Its vertices are the points x with
/// x·a = x·b = x·c = 1 over the triangles (a, b, c) incident to u.
inline std::vector<double> circumscribed_cell_areas(const IcosaMesh& mesh) {
  const std::size_t nv = mesh.vertices.size();
  std::vector<Eigen::Vector3d> apex(mesh.triangles.size());
  std::vector<std::vector<int>> incident(nv);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    Eigen::Matrix3d rows;
    for (int k = 0; k < 3; ++k) rows.row(k) = mesh.vertices[tri[k]].transpose();
    apex[t] = rows.partialPivLu().solve(Eigen::Vector3d::Ones());
    for (int k = 0; k < 3; ++k) incident[tri[k]].push_back(static_cast<int>(t));
  }
  std::vector<double> areas(nv, 0.0);
  for (std::size_t i = 0; i < nv; ++i) {
    const Eigen::Vector3d& n = mesh.vertices[i];
    const Eigen::Vector3d e1 = n.unitOrthogonal();
    const Eigen::Vector3d e2 = n.cross(e1);
    std::vector<std::pair<double, int>> order;
    for (int t : incident[i]) {
      const Eigen::Vector3d d = apex[t] - n;
      order.emplace_back(std::atan2(d.dot(e2), d.dot(e1)), t);
    }
    std::sort(order.begin(), order.end());
    double twice = 0.0;
    for (std::size_t k = 0; k < order.size(); ++k) {
      const auto& a = apex[order[k].second];
      const auto& b = apex[order[(k + 1) % order.size()].second];
      twice += a.cross(b).dot(n);
    }
    areas[i] = 0.5 * std::abs(twice);
  }
  return areas;
}

inline std::shared_ptr<DirectionGrid> icosa_grid(int level) {
  IcosaMesh mesh = icosahedron();
  for (int l = 0; l < level; ++l) mesh = subdivide(mesh);
  const std::size_t n = mesh.vertices.size();

  // Pair antipodes and make them exact negations of the lower index.
  std::vector<int> antipode(n, -1);
  auto key = [&](std::size_t i) {
    const auto& v = mesh.vertices[i];
    return std::array<long long, 3>{std::llround(v.x() * 1e9), std::llround(v.y() * 1e9),
                                    std::llround(v.z() * 1e9)};
  };
  std::map<std::array<long long, 3>, int> lookup;
  for (std::size_t i = 0; i < n; ++i) lookup.emplace(key(i), static_cast<int>(i));
  for (std::size_t i = 0; i < n; ++i) {
    if (antipode[i] >= 0) continue;
    const auto& v = mesh.vertices[i];
    const std::array<long long, 3> k{std::llround(-v.x() * 1e9), std::llround(-v.y() * 1e9),
                                     std::llround(-v.z() * 1e9)};
    auto it = lookup.find(k);
    if (it == lookup.end() || it->second == static_cast<int>(i)) {
      throw std::logic_error("icosahedral grid is not antipodally closed");
    }
    const int j = it->second;
    antipode[i] = j;
    antipode[j] = static_cast<int>(i);
    mesh.vertices[j] = -mesh.vertices[i];
  }

  std::vector<double> areas = circumscribed_cell_areas(mesh);
  const double total = std::accumulate(areas.begin(), areas.end(), 0.0);
  const double scale = 4.0 * std::numbers::pi / total;

  auto g = std::make_shared<DirectionGrid>();
  g->dim = 3;
  g->level = level;
  g->antipode = antipode;
  g->directions.reserve(n);
  g->weights.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    g->directions.push_back(make_vec({mesh.vertices[i].x(), mesh.vertices[i].y(), mesh.vertices[i].z()}));
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = static_cast<std::size_t>(antipode[i]);
    if (i < j) g->weights[i] = g->weights[j] = 0.5 * (areas[i] + areas[j]) * scale;
  }
  return g;
}

}  // namespace detail

/// Builds the direction grid. dim 2: `resolution` equally spaced angles, a
/// positive multiple of 4. dim 3: `resolution` must be a subdivided-icosahedron
/// vertex count 10·4^L + 2 (12, 42, 162, 642, 2562, ...).
inline std::shared_ptr<const DirectionGrid> build_grid(int dim, int resolution) {
  require(dim == 2 || dim == 3, "dim", "unsupported dimension " + std::to_string(dim));
  if (dim == 2) {
    require(resolution >= 4 && resolution % 4 == 0, "resolution",
            "planar resolution must be a positive multiple of 4, got " + std::to_string(resolution));
    return detail::circle_grid(resolution);
  }
  const int level = detail::icosa_level_for(resolution);
  require(level >= 0, "resolution",
          "dim-3 resolution must be 10*4^L+2 (12, 42, 162, 642, 2562, ...), got " +
              std::to_string(resolution));
  return detail::icosa_grid(level);
}

inline int default_resolution(int dim) { return dim == 2 ? 360 : 2562; }

/// Quadrature of f over S^{n-1} against spherical Lebesgue measure.
template <class F>
double integrate(const DirectionGrid& grid, F&& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) s += grid.weights[i] * f(grid.directions[i]);
  return s;
}

namespace detail {

struct CellRefinement {
  std::shared_ptr<const DirectionGrid> fine;  ///< two subdivision levels finer
  std::vector<int> cell;                      ///< nearest coarse direction per fine direction
};

/// grid.nearest for many queries: grid directions are bucketed on a cubic
/// lattice whose spacing exceeds the covering radius, so the nearest direction
/// lies in one of the 27 buckets around a query. Ties go to the lower index.
inline std::vector<int> nearest_all(const DirectionGrid& grid, const std::vector<Vec>& queries) {
  std::vector<int> out(queries.size());
  if (grid.dim != 3 || grid.size() < 64) {
    for (std::size_t k = 0; k < queries.size(); ++k) out[k] = grid.nearest(queries[k]);
    return out;
  }
  const double cell = 2.5 * std::sqrt(4.0 * std::numbers::pi / static_cast<double>(grid.size()));
  auto coord = [&](double x) { return static_cast<std::int64_t>(std::floor(x / cell)) + 64; };
  auto pack = [](std::int64_t a, std::int64_t b, std::int64_t c) { return (a << 16) | (b << 8) | c; };
  std::unordered_map<std::int64_t, std::vector<int>> buckets;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec& d = grid.directions[i];
    buckets[pack(coord(d[0]), coord(d[1]), coord(d[2]))].push_back(static_cast<int>(i));
  }
  for (std::size_t k = 0; k < queries.size(); ++k) {
    const Vec x = queries[k].normalized();
    const std::int64_t a = coord(x[0]), b = coord(x[1]), c = coord(x[2]);
    int best = -1;
    double best_dot = -std::numeric_limits<double>::infinity();
    for (std::int64_t i = a - 1; i <= a + 1; ++i) {
      for (std::int64_t j = b - 1; j <= b + 1; ++j) {
        for (std::int64_t l = c - 1; l <= c + 1; ++l) {
          auto it = buckets.find(pack(i, j, l));
          if (it == buckets.end()) continue;
          for (int g : it->second) {
            const double d = grid.directions[static_cast<std::size_t>(g)].dot(queries[k]);
            if (d > best_dot || (d == best_dot && g < best)) {
              best_dot = d;
              best = g;
            }
          }
        }
      }
    }
    out[k] = best >= 0 ? best : grid.nearest(queries[k]);
  }
  return out;
}

inline const CellRefinement& icosa_refinement(int level) {
  static std::mutex mu;
  static std::map<int, CellRefinement> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(level);
  if (it != cache.end()) return it->second;
  const auto coarse = icosa_grid(level);
  CellRefinement r;
  r.fine = icosa_grid(level + 2);
  r.cell = nearest_all(*coarse, r.fine->directions);
  return cache.emplace(level, std::move(r)).first->second;
}

}  // namespace detail

/// Mean of f over each quadrature cell, from a refined sample: `refine`
/// midpoints per arc in dim 2, the grid two subdivision levels finer in dim 3.
/// Antipodal cells get the same value when f is even.
template <class F>
std::vector<double> cell_averages(const DirectionGrid& grid, F&& f, int refine = 16) {
  const std::size_t n = grid.size();
  std::vector<double> avg(n, 0.0);
  if (grid.dim == 2) {
    const double step = 2.0 * std::numbers::pi / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double theta = std::atan2(grid.directions[i][1], grid.directions[i][0]);
      double s = 0.0;
      for (int k = 0; k < refine; ++k) {
        const double t = theta + step * ((k + 0.5) / refine - 0.5);
        s += f(make_vec({std::cos(t), std::sin(t)}));
      }
      avg[i] = s / refine;
    }
  } else {
    const auto& ref = detail::icosa_refinement(grid.level);
    const auto& cell = ref.cell;
    const auto& fine = ref.fine;
    std::vector<double> wsum(n, 0.0);
    for (std::size_t k = 0; k < fine->size(); ++k) {
      const auto c = static_cast<std::size_t>(cell[k]);
      avg[c] += fine->weights[k] * f(fine->directions[k]);
      wsum[c] += fine->weights[k];
    }
    for (std::size_t i = 0; i < n; ++i) avg[i] /= wsum[i];
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = 0.5 * (avg[i] + avg[static_cast<std::size_t>(grid.antipode[i])]);
  return out;
}

/// Nonnegative point masses on unit directions. When the masses come from a
/// grid, `grid` points to it and the directions are the grid's.
struct DiscreteMeasure {
  int dim = 0;
  std::vector<Vec> directions;
  std::vector<double> masses;
  std::vector<int> antipode;  ///< index of -u, or -1 when -u is not a support point
  bool even = false;
  std::shared_ptr<const DirectionGrid> grid;

  std::size_t size() const { return directions.size(); }
  double total() const { return std::accumulate(masses.begin(), masses.end(), 0.0); }
};

namespace detail {

inline std::vector<int> pair_antipodes(const std::vector<Vec>& dirs, double tol = 1e-9) {
  std::vector<int> anti(dirs.size(), -1);
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    if (anti[i] >= 0) continue;
    for (std::size_t j = i + 1; j < dirs.size(); ++j) {
      if (anti[j] < 0 && (dirs[i] + dirs[j]).norm() <= tol) {
        anti[i] = static_cast<int>(j);
        anti[j] = static_cast<int>(i);
        break;
      }
    }
  }
  return anti;
}

/// Antipodal masses equal up to 1e-12 relative (facet areas of a symmetric
/// hull agree only to rounding).
inline bool masses_even(const DiscreteMeasure& m) {
  for (std::size_t i = 0; i < m.size(); ++i) {
    const int j = m.antipode[i];
    if (j < 0) {
      if (m.masses[i] != 0.0) return false;
      continue;
    }
    const double a = m.masses[i], b = m.masses[static_cast<std::size_t>(j)];
    if (std::abs(a - b) > 1e-12 * std::max(a, b)) return false;
  }
  return true;
}

}  // namespace detail

inline DiscreteMeasure grid_measure(std::shared_ptr<const DirectionGrid> grid, std::vector<double> masses) {
  require(masses.size() == grid->size(), "masses", "one mass per grid direction required");
  for (double m : masses) require(m >= 0.0 && std::isfinite(m), "masses", "masses must be finite and nonnegative");
  DiscreteMeasure m;
  m.dim = grid->dim;
  m.directions = grid->directions;
  m.masses = std::move(masses);
  m.antipode = grid->antipode;
  m.grid = std::move(grid);
  m.even = detail::masses_even(m);
  return m;
}

/// Atoms at arbitrary unit directions (normalized on entry).
inline DiscreteMeasure atomic_measure(int dim, std::vector<Vec> directions, std::vector<double> masses) {
  require(dim == 2 || dim == 3, "dim", "unsupported dimension");
  require(directions.size() == masses.size(), "masses", "one mass per direction required");
  for (auto& d : directions) {
    require(d.size() == dim && d.norm() > 0.0, "directions", "directions must be nonzero vectors of the measure's dimension");
    d.normalize();
  }
  for (double m : masses) require(m >= 0.0 && std::isfinite(m), "masses", "masses must be finite and nonnegative");
  DiscreteMeasure m;
  m.dim = dim;
  m.directions = std::move(directions);
  m.masses = std::move(masses);
  m.antipode = detail::pair_antipodes(m.directions);
  m.even = detail::masses_even(m);
  return m;
}

/// Symmetrization (m + m∘(-id))/2. Directions whose antipode is missing get
/// their negation appended, so the result is always antipodally closed.
inline DiscreteMeasure even_part(const DiscreteMeasure& m) {
  DiscreteMeasure out = m;
  const std::size_t n0 = m.size();
  for (std::size_t i = 0; i < n0; ++i) {
    if (out.antipode[i] >= 0) continue;
    out.directions.push_back(-m.directions[i]);
    out.masses.push_back(0.0);
    out.antipode.push_back(static_cast<int>(i));
    out.antipode[i] = static_cast<int>(out.directions.size()) - 1;
    out.grid.reset();
  }
  std::vector<double> avg(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::size_t j = static_cast<std::size_t>(out.antipode[i]);
    // Same operand order on both sides keeps the pair bitwise equal.
    avg[i] = i < j ? 0.5 * (out.masses[i] + out.masses[j]) : 0.5 * (out.masses[j] + out.masses[i]);
  }
  out.masses = std::move(avg);
  out.even = true;
  return out;
}

inline bool is_even(const DiscreteMeasure& m) { return detail::masses_even(m); }

/// Smallest eigenvalue of the normalized second-moment matrix
/// (1/|m|) Σ m_i u_i u_iᵀ. Zero exactly when the support lies in a great subsphere.
inline double concentration_gap(const DiscreteMeasure& m) {
  const double total = m.total();
  require(total > 0.0, "total_mass", "measure has zero total mass");
  Mat M = Mat::Zero(m.dim, m.dim);
  for (std::size_t i = 0; i < m.size(); ++i) M += m.masses[i] * m.directions[i] * m.directions[i].transpose();
  M /= total;
  Eigen::SelfAdjointEigenSolver<Mat> es(M, Eigen::EigenvaluesOnly);
  return std::max(0.0, es.eigenvalues().minCoeff());
}

/// Normalized gap below which a measure is treated as concentrated on a great subsphere.
inline constexpr double kConcentrationThreshold = 1e-8;

/// Accumulates each atom at its nearest grid direction.
inline DiscreteMeasure snap_to_grid(const DiscreteMeasure& m, std::shared_ptr<const DirectionGrid> grid) {
  require(grid->dim == m.dim, "dim", "grid and measure dimensions differ");
  std::vector<double> masses(grid->size(), 0.0);
  const std::vector<int> idx = detail::nearest_all(*grid, m.directions);
  for (std::size_t i = 0; i < m.size(); ++i) masses[static_cast<std::size_t>(idx[i])] += m.masses[i];
  return grid_measure(std::move(grid), std::move(masses));
}

/// Masses divided by quadrature weights: the density of a grid measure with respect to σ.
inline std::vector<double> grid_density(const DiscreteMeasure& m) {
  require(m.grid != nullptr, "grid", "density requires a grid measure");
  std::vector<double> d(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) d[i] = m.masses[i] / m.grid->weights[i];
  return d;
}

}  // namespace lpbm
