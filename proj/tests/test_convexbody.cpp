#include "lpbm/convexbody.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace lpbm;

namespace {

Polytope random_hull(int dim, std::uint64_t seed, int count = 14) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<Vec> pts;
  for (int i = 0; i < count; ++i) {
    Vec v(dim);
    for (int k = 0; k < dim; ++k) v[k] = g(rng);
    pts.push_back(v.normalized() * (0.8 + 0.1 * (i % 4)));
  }
  for (int k = 0; k < dim; ++k) {
    pts.push_back(0.3 * unit_vec(dim, k));
    pts.push_back(-0.3 * unit_vec(dim, k));
  }
  return polytope_from_points(dim, pts);
}

Mat shear(int dim, double s) {
  Mat m = Mat::Identity(dim, dim);
  m(0, dim - 1) = s;
  return m;
}

}  // namespace

TEST(Catalog, CubeAndCrossPolytope) {
  EXPECT_NEAR(volume(cube(2)), 4.0, 1e-12);
  EXPECT_NEAR(volume(cube(3)), 8.0, 1e-12);
  EXPECT_NEAR(surface_area(cube(3)), 24.0, 1e-12);
  EXPECT_NEAR(volume(cross_polytope(2)), 2.0, 1e-12);
  EXPECT_NEAR(volume(cross_polytope(3)), 4.0 / 3.0, 1e-12);
  EXPECT_EQ(cube(3).facets.size(), 6u);
  EXPECT_EQ(cross_polytope(3).facets.size(), 8u);
}

TEST(Catalog, RegularPolygonArea) {
  const int n = 7;
  EXPECT_NEAR(volume(regular_polygon(n)), 0.5 * n * std::sin(2.0 * std::numbers::pi / n), 1e-12);
}

TEST(Polytope, SupportAndRadialOfCube) {
  const Polytope c = cube(3);
  const Vec u = make_vec({1, 2, 2}) / 3.0;
  EXPECT_NEAR(support(c, u), 5.0 / 3.0, 1e-12);
  EXPECT_NEAR(radial(c, u), 1.5, 1e-12);
  const RadialFunction rho(c);
  EXPECT_NEAR(rho(u), 1.5, 1e-12);
}

TEST(Polytope, MinkowskiRelationAndClosure) {
  for (int dim : {2, 3}) {
    const Polytope P = random_hull(dim, 11 + dim);
    double hv = 0.0;
    Vec closure = Vec::Zero(dim);
    for (const auto& f : P.facets) {
      hv += f.offset * f.measure;
      closure += f.measure * f.normal;
    }
    EXPECT_NEAR(hv / dim, volume(P), 1e-12);
    EXPECT_LT(closure.norm(), 1e-12);
  }
}

TEST(Polytope, HalfspaceAndPointRepresentationsAgree) {
  const Polytope P = random_hull(3, 4);
  std::vector<double> offsets;
  for (const auto& f : P.facets) offsets.push_back(f.offset);
  const Polytope Q = polytope_from_halfspaces_only(3, P.normals(), offsets);
  EXPECT_NEAR(volume(Q), volume(P), 1e-12);
  EXPECT_LT(hausdorff_distance(P, Q, *build_grid(3, 642)), 1e-12);
}

TEST(Polytope, RedundantHalfspacesGetZeroArea) {
  const Polytope c = cube(2);
  std::vector<Vec> n = c.normals();
  std::vector<double> h(n.size(), 1.0);
  n.push_back(make_vec({1, 1}).normalized());
  h.push_back(5.0);
  const auto build = polytope_from_halfspaces(2, n, h);
  EXPECT_NEAR(volume(build.polytope), 4.0, 1e-12);
}

TEST(Polytope, DegenerateHullThrows) {
  EXPECT_THROW(polytope_from_points(2, {make_vec({0, 0}), make_vec({1, 1}), make_vec({2, 2})}), std::exception);
}

TEST(LinearMaps, VolumeScalesByDeterminant) {
  for (int dim : {2, 3}) {
    const Polytope P = random_hull(dim, 21);
    Mat m = shear(dim, 0.7);
    m(0, 0) = 1.3;
    const auto phi = LinearMap::from(m);
    const Polytope Q = apply_linear(phi, P);
    EXPECT_NEAR(volume(Q), phi.det * volume(P), 1e-12);
    const Vec x = make_vec(dim == 2 ? std::initializer_list<double>{0.3, -0.8} : std::initializer_list<double>{0.3, -0.8, 0.2});
    EXPECT_NEAR(support(Q, x), support(P, Vec(phi.matrix.transpose() * x)), 1e-12);
  }
}

TEST(LinearMaps, SpecialKindRequiresUnitDeterminant) {
  EXPECT_THROW(LinearMap::from(2.0 * Mat::Identity(2, 2), LinearMap::Kind::special), PreconditionError);
  EXPECT_NO_THROW(LinearMap::from(shear(3, 2.0), LinearMap::Kind::special));
}

TEST(Bodies, DilateAndReflect) {
  const Polytope P = random_hull(2, 8);
  const Polytope Q = dilate(P, 2.0);
  EXPECT_NEAR(volume(Q), 4.0 * volume(P), 1e-12);
  const Polytope R = reflect(P);
  const Vec u = make_vec({0.6, 0.8});
  EXPECT_NEAR(support(R, u), support(P, Vec(-u)), 1e-12);
}

TEST(Bodies, HausdorffOfConcentricBalls) {
  const auto g = build_grid(2, 360);
  const Polytope a = grid_ball(*g), b = grid_ball(*g, 1.5);
  EXPECT_NEAR(hausdorff_distance(a, b, *g), 0.5, 1e-12);
  EXPECT_TRUE(bodies_equal(a, dilate(a, 1.0 + 1e-9), *g));
}

TEST(Bodies, SampledBodyVolumeMatchesPolytope) {
  const auto g = build_grid(2, 360);
  const Polytope c = cube(2);
  const SampledBody s = sample(g, [&](const Vec& u) { return support(c, u); });
  EXPECT_NEAR(body_volume(s), 4.0, 1e-9);
}

TEST(Measures, SurfaceAreaMeasureOfSquare) {
  const auto m = surface_area_measure(cube(2));
  ASSERT_EQ(m.size(), 4u);
  for (double x : m.masses) EXPECT_NEAR(x, 2.0, 1e-12);
  const auto lp = lp_surface_area_measure(cube(2, 2.0), 3.0);
  for (double x : lp.masses) EXPECT_NEAR(x, std::pow(2.0, -2.0) * 4.0, 1e-12);
  const auto n = normalized_lp_measure(cube(2, 2.0), 3.0);
  for (double x : n.masses) EXPECT_NEAR(x, 1.0 / 16.0, 1e-12);
}

TEST(Measures, MixedVolumeOfSelfIsVolume) {
  const Polytope P = random_hull(3, 17);
  EXPECT_NEAR(mixed_volume_p(P, P, 2.5), volume(P), 1e-12);
}

TEST(Valuations, SlabQuadrupleVolumesAdd) {
  for (int dim : {2, 3}) {
    const Polytope P = random_hull(dim, 31 + dim);
    const auto q = valuation_quadruple(P, unit_vec(dim, 0), -0.2, 0.3);
    EXPECT_NEAR(volume(q.U) + volume(q.I), volume(q.K) + volume(q.L), 1e-12);
    const auto g = build_grid(dim, dim == 2 ? 360 : 642);
    for (const auto& u : g->directions) {
      const double lhs = std::max(radial(q.K, u), radial(q.L, u));
      EXPECT_NEAR(lhs, radial(q.U, u), 1e-12);
    }
  }
}

TEST(Valuations, QuadrupleNeedsOriginInsideSlab) {
  try {
    valuation_quadruple(cube(2), unit_vec(2, 0), 0.1, 0.5);
    FAIL();
  } catch (const PreconditionError& e) {
    EXPECT_EQ(e.invariant(), "slab");
  }
}

TEST(Ridges, CubeHasTwelveEdges) {
  const auto r = facet_ridges(cube(3));
  EXPECT_EQ(r.size(), 12u);
  for (const auto& e : r) EXPECT_NEAR(e.measure, 2.0, 1e-12);
  EXPECT_EQ(facet_ridges(cube(2)).size(), 4u);
}
