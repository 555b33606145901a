#pragma once

/// JSON files for bodies, measures and grids, and CSV polygon emission.
/// Reading a file this module wrote and writing it again gives the same bytes.

#include "lpbm/convexbody.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

namespace lpbm::io {

using nlohmann::json;

inline json vec_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline Vec json_vec(const json& a, int dim) {
  require(a.is_array() && static_cast<int>(a.size()) == dim, "dim", "coordinate arrays must have " + std::to_string(dim) + " entries");
  Vec v(dim);
  for (int k = 0; k < dim; ++k) v[k] = a[static_cast<std::size_t>(k)].get<double>();
  return v;
}

inline json to_json(const Polytope& P) {
  json verts = json::array(), facets = json::array();
  for (const auto& v : P.vertices) verts.push_back(vec_json(v));
  for (const auto& f : P.facets) {
    facets.push_back({{"normal", vec_json(f.normal)}, {"offset", f.offset}, {"measure", f.measure}, {"vertices", f.vertices}});
  }
  return {{"kind", "polytope"}, {"dim", P.dim}, {"vertices", verts}, {"facets", facets}};
}

inline json to_json(const SampledBody& S) {
  json j = {{"kind", "sampled"}, {"dim", S.grid->dim}, {"resolution", S.grid->resolution()}, {"support", S.support_values}};
  if (!S.radial_values.empty()) j["radial"] = S.radial_values;
  return j;
}

inline json to_json(const Body& B) {
  return std::visit([](const auto& b) { return to_json(b); }, B);
}

inline json to_json(const DiscreteMeasure& m) {
  json j = {{"kind", "measure"}, {"dim", m.dim}, {"masses", m.masses}};
  if (m.grid) {
    j["resolution"] = m.grid->resolution();
  } else {
    json dirs = json::array();
    for (const auto& d : m.directions) dirs.push_back(vec_json(d));
    j["directions"] = dirs;
  }
  return j;
}

inline json to_json(const DirectionGrid& g) {
  json dirs = json::array();
  for (const auto& d : g.directions) dirs.push_back(vec_json(d));
  return {{"kind", "grid"}, {"dim", g.dim}, {"resolution", g.resolution()}, {"directions", dirs}, {"weights", g.weights}};
}

inline int read_dim(const json& j) {
  require(j.contains("dim"), "format", "missing \"dim\"");
  const int dim = j.at("dim").get<int>();
  require(dim == 2 || dim == 3, "dim", "dimension must be 2 or 3");
  return dim;
}

inline std::string kind_of(const json& j) {
  require(j.is_object() && j.contains("kind"), "format", "expected an object with a \"kind\" field");
  return j.at("kind").get<std::string>();
}

/// Polytopes are given by stored V/H data, by "points" (hull) or by
/// "halfspaces" ([normal, offset] pairs).
inline Polytope polytope_from_json(const json& j) {
  require(kind_of(j) == "polytope", "format", "expected a polytope");
  const int dim = read_dim(j);
  if (j.contains("facets")) {
    Polytope P;
    P.dim = dim;
    for (const auto& v : j.at("vertices")) P.vertices.push_back(json_vec(v, dim));
    for (const auto& f : j.at("facets")) {
      Facet F;
      F.normal = json_vec(f.at("normal"), dim);
      F.offset = f.at("offset").get<double>();
      F.measure = f.at("measure").get<double>();
      F.vertices = f.at("vertices").get<std::vector<int>>();
      for (int i : F.vertices) require(i >= 0 && i < static_cast<int>(P.vertices.size()), "format", "facet vertex index out of range");
      P.facets.push_back(std::move(F));
    }
    require(!P.facets.empty(), "format", "a polytope needs facets");
    return P;
  }
  if (j.contains("points")) {
    std::vector<Vec> pts;
    for (const auto& v : j.at("points")) pts.push_back(json_vec(v, dim));
    return polytope_from_points(dim, pts);
  }
  require(j.contains("halfspaces"), "format", "a polytope needs \"facets\", \"points\" or \"halfspaces\"");
  std::vector<Vec> normals;
  std::vector<double> offsets;
  for (const auto& h : j.at("halfspaces")) {
    normals.push_back(json_vec(h.at(0), dim));
    offsets.push_back(h.at(1).get<double>());
  }
  return polytope_from_halfspaces_only(dim, normals, offsets);
}

inline SampledBody sampled_from_json(const json& j) {
  require(kind_of(j) == "sampled", "format", "expected a sampled body");
  const int dim = read_dim(j);
  SampledBody S;
  S.grid = build_grid(dim, j.at("resolution").get<int>());
  S.support_values = j.at("support").get<std::vector<double>>();
  require(S.support_values.size() == S.grid->size(), "format", "support samples do not match the grid");
  if (j.contains("radial")) {
    S.radial_values = j.at("radial").get<std::vector<double>>();
    require(S.radial_values.size() == S.grid->size(), "format", "radial samples do not match the grid");
  }
  return S;
}

inline Body body_from_json(const json& j) {
  const std::string k = kind_of(j);
  if (k == "sampled") return sampled_from_json(j);
  return polytope_from_json(j);
}

inline DiscreteMeasure measure_from_json(const json& j) {
  require(kind_of(j) == "measure", "format", "expected a measure");
  const int dim = read_dim(j);
  auto masses = j.at("masses").get<std::vector<double>>();
  if (j.contains("directions")) {
    std::vector<Vec> dirs;
    for (const auto& v : j.at("directions")) dirs.push_back(json_vec(v, dim));
    require(dirs.size() == masses.size(), "format", "directions and masses differ in length");
    return atomic_measure(dim, std::move(dirs), std::move(masses));
  }
  return grid_measure(build_grid(dim, j.at("resolution").get<int>()), std::move(masses));
}

/// A JSON document with an optional "metadata" object carried along unchanged.
struct Document {
  json data;
  json metadata = json::object();
};

inline json read_json(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), "input", "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw PreconditionError("format", path + ": " + e.what());
  }
}

inline Document read_document(const std::string& path) {
  json j = read_json(path);
  Document d;
  if (j.is_object() && j.contains("metadata")) {
    d.metadata = j.at("metadata");
    j.erase("metadata");
  }
  d.data = std::move(j);
  return d;
}

inline std::string dump(const Document& d) {
  json j = d.data;
  if (!d.metadata.empty()) j["metadata"] = d.metadata;
  return j.dump(2) + "\n";
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), "output", "cannot write " + path);
  out << text;
}

inline void write_document(const std::string& path, const Document& d) { write_text(path, dump(d)); }

/// Polygon vertices in boundary order (dim 2) or support samples "x,y[,z],h".
inline std::string polygon_csv(const Body& B, const DirectionGrid& grid) {
  std::ostringstream out;
  out.precision(17);
  if (const auto* P = std::get_if<Polytope>(&B); P && P->dim == 2) {
    out << "x,y\n";
    std::vector<Vec> v = P->vertices;
    std::sort(v.begin(), v.end(), [](const Vec& a, const Vec& b) { return std::atan2(a[1], a[0]) < std::atan2(b[1], b[0]); });
    for (const auto& x : v) out << x[0] << ',' << x[1] << '\n';
    return out.str();
  }
  const int dim = body_dim(B);
  out << (dim == 2 ? "x,y,h\n" : "x,y,z,h\n");
  for (const auto& u : grid.directions) {
    for (int k = 0; k < dim; ++k) out << u[k] << ',';
    out << support(B, u) << '\n';
  }
  return out.str();
}

}  // namespace lpbm::io
