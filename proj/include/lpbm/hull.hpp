#pragma once

/// Convex hulls of point sets in dimension 2 (monotone chain) and 3
/// (incremental quickhull with conflict lists). Coplanar hull triangles are
/// merged, so each returned face is a genuine facet of the hull.

#include "lpbm/core.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <numeric>
#include <unordered_map>
#include <vector>

namespace lpbm {

struct HullFace {
  Vec normal;                ///< outer unit normal
  double offset = 0.0;       ///< normal·x on the face
  std::vector<int> vertices; ///< input indices, counter-clockwise seen from outside
};

namespace detail {

inline double point_scale(const std::vector<Vec>& pts) {
  double s = 0.0;
  for (const auto& p : pts) s = std::max(s, p.cwiseAbs().maxCoeff());
  return s > 0.0 ? s : 1.0;
}

inline std::vector<HullFace> hull2(const std::vector<Vec>& pts) {
  const double eps = 1e-12 * point_scale(pts);
  std::vector<int> idx(pts.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    return pts[a][0] < pts[b][0] || (pts[a][0] == pts[b][0] && pts[a][1] < pts[b][1]);
  });
  auto cross = [&](int o, int a, int b) {
    return (pts[a][0] - pts[o][0]) * (pts[b][1] - pts[o][1]) - (pts[a][1] - pts[o][1]) * (pts[b][0] - pts[o][0]);
  };
  auto turn_tol = [&](int o, int a, int b) {
    return eps * ((pts[a] - pts[o]).norm() + (pts[b] - pts[o]).norm());
  };
  std::vector<int> h(2 * idx.size());
  std::size_t k = 0;
  for (int i : idx) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], i) <= turn_tol(h[k - 2], h[k - 1], i)) --k;
    h[k++] = i;
  }
  for (std::size_t j = idx.size() - 1, t = k + 1; j-- > 0;) {
    const int i = idx[j];
    while (k >= t && cross(h[k - 2], h[k - 1], i) <= turn_tol(h[k - 2], h[k - 1], i)) --k;
    h[k++] = i;
  }
  h.resize(k > 0 ? k - 1 : 0);
  if (h.size() < 3) throw DegenerateError("convex hull is not two-dimensional");

  std::vector<HullFace> faces;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const int a = h[i], b = h[(i + 1) % h.size()];
    const Vec d = pts[b] - pts[a];
    HullFace f;
    f.normal = make_vec({d[1], -d[0]}).normalized();
    f.offset = 0.5 * (f.normal.dot(pts[a]) + f.normal.dot(pts[b]));
    f.vertices = {a, b};
    faces.push_back(std::move(f));
  }
  return faces;
}

class QuickHull3 {
 public:
  explicit QuickHull3(const std::vector<Vec>& pts) {
    p_.reserve(pts.size());
    for (const auto& v : pts) p_.push_back(to3(v));
    double s = 0.0;
    for (const auto& v : p_) s = std::max(s, v.cwiseAbs().maxCoeff());
    scale_ = s > 0.0 ? s : 1.0;
    eps_ = 1e-11 * scale_;
    visible_eps_ = 1e-13 * scale_;
  }

  std::vector<HullFace> run() {
    initial_simplex();
    while (!pending_.empty()) {
      const int f = pending_.back();
      pending_.pop_back();
      if (!faces_[f].alive || faces_[f].outside.empty()) continue;
      add_point(f);
    }
    return merged_faces();
  }

 private:
  struct Face {
    std::array<int, 3> v{};
    std::array<int, 3> nbr{-1, -1, -1};
    Eigen::Vector3d n = Eigen::Vector3d::Zero();
    double d = 0.0;
    bool alive = true;
    int mark = 0;
    std::vector<int> outside;
  };

  double dist(const Face& f, int i) const { return f.n.dot(p_[i]) - f.d; }

  int make_face(int a, int b, int c) {
    Face f;
    f.v = {a, b, c};
    f.n = (p_[b] - p_[a]).cross(p_[c] - p_[a]);
    const double len = f.n.norm();
    if (len > 0.0) f.n /= len;
    f.d = f.n.dot(p_[a]);
    faces_.push_back(std::move(f));
    return static_cast<int>(faces_.size()) - 1;
  }

  void initial_simplex() {
    const int n = static_cast<int>(p_.size());
    if (n < 4) throw DegenerateError("need at least four points for a 3-dimensional hull");
    int i0 = 0, i1 = 0;
    double best = -1.0;
    for (int axis = 0; axis < 3; ++axis) {
      int lo = 0, hi = 0;
      for (int i = 1; i < n; ++i) {
        if (p_[i][axis] < p_[lo][axis]) lo = i;
        if (p_[i][axis] > p_[hi][axis]) hi = i;
      }
      const double d = (p_[hi] - p_[lo]).norm();
      if (d > best) best = d, i0 = lo, i1 = hi;
    }
    if (best <= eps_) throw DegenerateError("point set is a single point");
    const Eigen::Vector3d dir = (p_[i1] - p_[i0]).normalized();
    int i2 = -1;
    best = eps_;
    for (int i = 0; i < n; ++i) {
      const Eigen::Vector3d w = p_[i] - p_[i0];
      const double d = (w - w.dot(dir) * dir).norm();
      if (d > best) best = d, i2 = i;
    }
    if (i2 < 0) throw DegenerateError("point set is collinear");
    const Eigen::Vector3d pn = (p_[i1] - p_[i0]).cross(p_[i2] - p_[i0]).normalized();
    int i3 = -1;
    best = eps_;
    for (int i = 0; i < n; ++i) {
      const double d = std::abs(pn.dot(p_[i] - p_[i0]));
      if (d > best) best = d, i3 = i;
    }
    if (i3 < 0) throw DegenerateError("point set is coplanar");
    if (pn.dot(p_[i3] - p_[i0]) > 0.0) std::swap(i1, i2);

    // Outward orientation: i3 lies below the base (i0, i1, i2).
    const int f0 = make_face(i0, i1, i2);
    const int f1 = make_face(i0, i3, i1);
    const int f2 = make_face(i1, i3, i2);
    const int f3 = make_face(i2, i3, i0);
    link_all({f0, f1, f2, f3});

    const std::array<int, 4> simplex{i0, i1, i2, i3};
    for (int i = 0; i < n; ++i) {
      if (std::find(simplex.begin(), simplex.end(), i) != simplex.end()) continue;
      assign(i, std::array<int, 4>{f0, f1, f2, f3});
    }
    for (int f : {f0, f1, f2, f3}) {
      if (!faces_[f].outside.empty()) pending_.push_back(f);
    }
  }

  // Neighbor links among a set of faces by matching reversed edges.
  void link_all(const std::vector<int>& fs) {
    std::map<std::pair<int, int>, std::pair<int, int>> edge;
    for (int f : fs) {
      for (int k = 0; k < 3; ++k) edge[{faces_[f].v[k], faces_[f].v[(k + 1) % 3]}] = {f, k};
    }
    for (int f : fs) {
      for (int k = 0; k < 3; ++k) {
        auto it = edge.find({faces_[f].v[(k + 1) % 3], faces_[f].v[k]});
        if (it != edge.end()) faces_[f].nbr[k] = it->second.first;
      }
    }
  }

  template <class Range>
  void assign(int i, const Range& candidates) {
    for (int f : candidates) {
      if (dist(faces_[f], i) > visible_eps_) {
        faces_[f].outside.push_back(i);
        return;
      }
    }
  }

  void add_point(int start) {
    Face& sf = faces_[start];
    int apex = sf.outside.front();
    double far = dist(sf, apex);
    for (int i : sf.outside) {
      const double d = dist(sf, i);
      if (d > far) far = d, apex = i;
    }

    ++stamp_;
    std::vector<int> visible{start};
    faces_[start].mark = stamp_;
    struct HorizonEdge {
      int a, b, outer;
    };
    std::vector<HorizonEdge> horizon;
    for (std::size_t q = 0; q < visible.size(); ++q) {
      const int f = visible[q];
      for (int k = 0; k < 3; ++k) {
        const int g = faces_[f].nbr[k];
        if (faces_[g].mark == stamp_) continue;
        if (dist(faces_[g], apex) > visible_eps_) {
          faces_[g].mark = stamp_;
          visible.push_back(g);
        }
      }
    }
    for (int f : visible) {
      for (int k = 0; k < 3; ++k) {
        const int g = faces_[f].nbr[k];
        if (faces_[g].mark != stamp_) horizon.push_back({faces_[f].v[k], faces_[f].v[(k + 1) % 3], g});
      }
    }

    std::vector<int> orphans;
    for (int f : visible) {
      faces_[f].alive = false;
      for (int i : faces_[f].outside) {
        if (i != apex) orphans.push_back(i);
      }
      faces_[f].outside.clear();
      faces_[f].outside.shrink_to_fit();
    }

    std::unordered_map<int, int> by_start, by_end;
    std::vector<int> created;
    created.reserve(horizon.size());
    for (const auto& e : horizon) {
      const int nf = make_face(e.a, e.b, apex);
      created.push_back(nf);
      faces_[nf].nbr[0] = e.outer;
      Face& outer = faces_[e.outer];
      for (int k = 0; k < 3; ++k) {
        if (outer.v[k] == e.b && outer.v[(k + 1) % 3] == e.a) outer.nbr[k] = nf;
      }
      if (!by_start.emplace(e.a, nf).second || !by_end.emplace(e.b, nf).second) {
        throw DegenerateError("convex hull horizon is not a simple cycle (numerically degenerate input)");
      }
    }
    for (int nf : created) {
      Face& f = faces_[nf];
      f.nbr[1] = by_start.at(f.v[1]);
      f.nbr[2] = by_end.at(f.v[0]);
    }
    for (int i : orphans) assign(i, created);
    for (int nf : created) {
      if (!faces_[nf].outside.empty()) pending_.push_back(nf);
    }
  }

  std::vector<HullFace> merged_faces() const {
    const int nf = static_cast<int>(faces_.size());
    std::vector<int> parent(nf);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    const double merge_tol = 1e-13 * scale_;
    for (int f = 0; f < nf; ++f) {
      if (!faces_[f].alive) continue;
      for (int k = 0; k < 3; ++k) {
        const int g = faces_[f].nbr[k];
        if (g < f) continue;
        // Coplanar when the far vertex of each triangle lies on the other's plane.
        const Face& F = faces_[f];
        const Face& G = faces_[g];
        bool coplanar = F.n.dot(G.n) > 0.0;
        for (int j = 0; j < 3 && coplanar; ++j) {
          coplanar = std::abs(dist(F, G.v[j])) <= merge_tol && std::abs(dist(G, F.v[j])) <= merge_tol;
        }
        if (coplanar) parent[find(f)] = find(g);
      }
    }
    std::map<int, std::vector<int>> groups;
    for (int f = 0; f < nf; ++f) {
      if (faces_[f].alive) groups[find(f)].push_back(f);
    }
    std::vector<HullFace> out;
    out.reserve(groups.size());
    for (const auto& [root, members] : groups) {
      Eigen::Vector3d n = Eigen::Vector3d::Zero();
      std::vector<int> verts;
      for (int f : members) {
        const Face& F = faces_[f];
        n += (p_[F.v[1]] - p_[F.v[0]]).cross(p_[F.v[2]] - p_[F.v[0]]);
        verts.insert(verts.end(), F.v.begin(), F.v.end());
      }
      n.normalize();
      std::sort(verts.begin(), verts.end());
      verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
      Eigen::Vector3d c = Eigen::Vector3d::Zero();
      double off = 0.0;
      for (int v : verts) c += p_[v], off += n.dot(p_[v]);
      c /= static_cast<double>(verts.size());
      off /= static_cast<double>(verts.size());
      const Eigen::Vector3d e1 = n.unitOrthogonal();
      const Eigen::Vector3d e2 = n.cross(e1);
      std::sort(verts.begin(), verts.end(), [&](int a, int b) {
        const Eigen::Vector3d da = p_[a] - c, db = p_[b] - c;
        return std::atan2(da.dot(e2), da.dot(e1)) < std::atan2(db.dot(e2), db.dot(e1));
      });
      HullFace hf;
      hf.normal = make_vec({n.x(), n.y(), n.z()});
      hf.offset = off;
      hf.vertices = std::move(verts);
      out.push_back(std::move(hf));
    }
    return out;
  }

  std::vector<Eigen::Vector3d> p_;
  std::vector<Face> faces_;
  std::vector<int> pending_;
  double scale_ = 1.0;
  double eps_ = 0.0;          ///< degeneracy of the initial simplex
  double visible_eps_ = 0.0;  ///< a point sees a face beyond this distance
  int stamp_ = 0;
};

}  // namespace detail

/// Facets of conv(points). Throws DegenerateError when the hull is not full-dimensional.
inline std::vector<HullFace> convex_hull(const std::vector<Vec>& points, int dim) {
  require(dim == 2 || dim == 3, "dim", "hulls are implemented for dim 2 and 3");
  for (const auto& p : points) require(p.size() == dim, "dim", "point dimension mismatch");
  if (points.size() < static_cast<std::size_t>(dim + 1)) throw DegenerateError("too few points for a full-dimensional hull");
  if (dim == 2) return detail::hull2(points);
  return detail::QuickHull3(points).run();
}

}  // namespace lpbm
