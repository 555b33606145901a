#include "lpbm/blaschke.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace lpbm;

namespace {

double radius_error(const Polytope& P, double r, const DirectionGrid& g) {
  double e = 0.0;
  for (const auto& u : g.directions) e = std::max(e, std::abs(support(P, u) / r - 1.0));
  return e;
}

Polytope fine_ball(int dim) { return grid_ball(*build_grid(dim, dim == 2 ? 1440 : 10242)); }

LinearMap sl2(double a, double b, double c) {
  Mat m(2, 2);
  m << a, b, c, (1.0 + b * c) / a;
  return LinearMap::from(m, LinearMap::Kind::special);
}

}  // namespace

TEST(BlaschkeSum, NormalizedDiscSelfSum) {
  const auto g = build_grid(2, 360);
  const Polytope disc = grid_ball(*g);
  const Polytope s = normalized_blaschke_sum(disc, disc, 2.0);
  EXPECT_LT(radius_error(s, std::pow(2.0, -0.5), *g), 1e-3);
}

TEST(BlaschkeSum, PlainDiscSelfSum) {
  const auto g = build_grid(2, 360);
  const Polytope disc = grid_ball(*g);
  const Polytope s = blaschke_sum(disc, disc, 3.0);
  EXPECT_LT(radius_error(s, 0.5, *g), 1e-3);
}

TEST(BlaschkeSum, Commutative) {
  const Polytope K = cube(3), L = dilate(cross_polytope(3), 1.3);
  const Polytope a = normalized_blaschke_sum(K, L, 2.5), b = normalized_blaschke_sum(L, K, 2.5);
  EXPECT_LT(hausdorff_distance(a, b, *build_grid(3, 642)), 1e-9);
}

TEST(BlaschkeSum, SelfSumDoublesMeasure) {
  const Polytope K = cube(2, 0.7);
  const Polytope s = blaschke_sum(K, K, 2.5);
  auto mu = lp_surface_area_measure(K, 2.5);
  for (double& m : mu.masses) m *= 2.0;
  EXPECT_LT(residual(s, 2.5, mu, false), 1e-8);
}

TEST(BlaschkeSum, RejectsAsymmetricAndPEqualN) {
  const Polytope tri = polytope_from_points(2, {make_vec({1, 0}), make_vec({-0.5, 0.8}), make_vec({-0.5, -0.8})});
  try {
    normalized_blaschke_sum(tri, cube(2), 2.0);
    FAIL();
  } catch (const PreconditionError& e) {
    EXPECT_EQ(e.invariant(), "origin_symmetric");
  }
  EXPECT_THROW(blaschke_sum(cube(2), cube(2), 2.0), PreconditionError);
}

TEST(CurvatureImage, BallRadius) {
  for (int dim : {2, 3}) {
    const auto g = build_grid(dim, default_resolution(dim));
    for (double p : {2.0, 2.5}) {
      const Polytope img = normalized_curvature_image(fine_ball(dim), p, g);
      EXPECT_LT(radius_error(img, std::pow(unit_ball_volume(dim), -1.0 / p), *g), 1e-3) << dim << " " << p;
    }
  }
}

TEST(CurvatureImage, DegreeOnDilatedDisc) {
  const auto g = build_grid(2, 360);
  const Polytope img = normalized_curvature_image(dilate(fine_ball(2), 2.0), 2.0, g);
  EXPECT_LT(radius_error(img, 0.25 / std::sqrt(std::numbers::pi), *g), 1e-3);
}

TEST(CurvatureImage, PlainFixesTheBall) {
  const auto g = build_grid(2, 360);
  for (double p : {1.5, 3.0}) EXPECT_LT(radius_error(curvature_image(fine_ball(2), p, g), 1.0, *g), 1e-3) << p;
  EXPECT_THROW(curvature_image(fine_ball(2), 2.0, g), PreconditionError);
}

TEST(CurvatureImage, ResultIsSymmetricAndSolvesItsData) {
  const auto g = build_grid(2, 360);
  const Polytope K = polytope_from_points(2, {make_vec({1, 0.2}), make_vec({-0.4, 0.9}), make_vec({-0.7, -0.6}), make_vec({0.5, -0.8})});
  const auto r = normalized_curvature_image_report(K, 2.5, g);
  ASSERT_TRUE(r.report.converged);
  EXPECT_TRUE(is_origin_symmetric(r.body, 1e-8));
  EXPECT_LE(r.report.final_residual, 1e-8);
}

TEST(CurvatureImage, DataIsEven) {
  const auto g = build_grid(3, 642);
  const Polytope K = polytope_from_points(3, {make_vec({1, 0, 0}), make_vec({-0.5, 1, 0}), make_vec({-0.5, -1, 0.2}),
                                              make_vec({0, 0, 1}), make_vec({0.1, 0.2, -0.8})});
  EXPECT_TRUE(is_even(curvature_data(K, 2.5, g)));
}

TEST(Conversions, DegreeBookkeeping) {
  const auto Z = normalized_curvature_operator(2, 3.0, build_grid(2, 180));
  EXPECT_DOUBLE_EQ(*Z.declared_degree, -2.0 / 3.0 - 1.0);
  const auto plain = from_normalized(Z, 3.0);
  EXPECT_NEAR(*plain.declared_degree, -5.0, 1e-12);
  EXPECT_NEAR(*to_normalized(plain, 3.0).declared_degree, *Z.declared_degree, 1e-12);
  EXPECT_EQ(plain.equivariance, Equivariance::contravariant);
  EXPECT_THROW(from_normalized(normalized_curvature_operator(2, 2.0), 2.0), PreconditionError);
}

TEST(Conversions, RoundTripAndTwoPaths) {
  const auto g = build_grid(2, 360);
  const Polytope K = polytope_from_points(2, {make_vec({1, 0}), make_vec({-0.6, 0.9}), make_vec({-0.4, -0.8})});
  const auto Z = normalized_curvature_operator(2, 3.0, g);
  const auto plain = from_normalized(Z, 3.0);
  EXPECT_LT(hausdorff_distance(to_normalized(plain, 3.0)(K), Z(K), *g), 1e-9);
  EXPECT_LT(hausdorff_distance(plain(K), curvature_image(K, 3.0, g), *g), 1e-6);
}

TEST(QuarterTurn, RectangleAndSquare) {
  const auto g = build_grid(2, 360);
  const Polytope rect = polytope_from_points(2, {make_vec({2, 1}), make_vec({-2, 1}), make_vec({-2, -1}), make_vec({2, -1})});
  const Polytope r = rotate_quarter(rect);
  EXPECT_NEAR(support(r, make_vec({1, 0})), 1.0, 1e-12);
  EXPECT_NEAR(support(r, make_vec({0, 1})), 2.0, 1e-12);
  EXPECT_LT(hausdorff_distance(rotate_quarter(cube(2)), cube(2), *g), 1e-12);
  EXPECT_THROW(rotate_quarter(cube(3)), PreconditionError);
}

TEST(QuarterTurn, SampledBodyShift) {
  const auto g = build_grid(2, 360);
  const Polytope rect = polytope_from_points(2, {make_vec({2, 1}), make_vec({-2, 1}), make_vec({-2, -1}), make_vec({2, -1})});
  const SampledBody s = sample(g, [&](const Vec& u) { return support(rect, u); });
  const Body r = rotate_quarter(Body(s));
  EXPECT_LT(hausdorff_distance(r, rotate_quarter(rect), *g), 1e-12);
}

TEST(QuarterTurn, ConjugatesInverseTransposeToIdentity) {
  const Mat psi = quarter_turn_map().matrix;
  for (const auto& phi : {sl2(1.3, 0.4, -0.2), sl2(0.7, -1.1, 0.5)}) {
    const Mat lhs = psi * phi.inverse_transpose() * psi.inverse();
    EXPECT_LT((lhs - phi.matrix).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Operators, RotateAfterSwapsEquivariance) {
  const auto Z = normalized_curvature_operator(2, 2.5);
  EXPECT_EQ(rotate_after(Z).equivariance, Equivariance::covariant);
  EXPECT_EQ(identity_operator(2).equivariance, Equivariance::covariant);
  EXPECT_THROW(Z(cube(3)), PreconditionError);
}
