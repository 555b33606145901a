#include "lpbm/verify.hpp"

#include <gtest/gtest.h>

using namespace lpbm;

TEST(CheckResult, PassedIffWithinTolerance) {
  EXPECT_TRUE(make_result("a", "", 1e-4, 1e-3).passed);
  EXPECT_TRUE(make_result("a", "", 1e-3, 1e-3).passed);
  EXPECT_FALSE(make_result("a", "", 2e-3, 1e-3).passed);
  EXPECT_FALSE(make_result("a", "", std::nan(""), 1e-3).passed);
  const auto s = skipped_result("b", "why");
  EXPECT_TRUE(s.skipped);
}

TEST(Digest, DeterministicAndSensitive) {
  EXPECT_EQ(Digest().add(1.5).add(cube(2)).hex(), Digest().add(1.5).add(cube(2)).hex());
  EXPECT_NE(Digest().add(1.5).hex(), Digest().add(1.5000000001).hex());
  EXPECT_EQ(Digest().hex().size(), 16u);
}

TEST(RandomInputs, ReproducibleAndValid) {
  std::mt19937_64 a(4), b(4);
  const Polytope P = random_body(3, a), Q = random_body(3, b);
  EXPECT_EQ(Digest().add(P).hex(), Digest().add(Q).hex());
  EXPECT_TRUE(P.contains_origin_interior());
  const LinearMap phi = random_linear_map(3, a);
  EXPECT_GE(phi.det, 0.5 - 1e-12);
  EXPECT_LE(phi.det, 2.0 + 1e-12);
  EXPECT_TRUE(is_origin_symmetric(random_symmetric_polytope(2, a)));
  EXPECT_EQ(random_pentagon(a).vertices.size(), 5u);
}

TEST(Valuation, RadialIdentityHolds) {
  std::mt19937_64 rng(2);
  for (int dim : {2, 3}) {
    const auto g = build_grid(dim, default_resolution(dim));
    const auto q = random_slab_quadruple(random_body(dim, rng), rng);
    EXPECT_TRUE(check_radial_valuation(q, dim + 2.5, *g).passed);
  }
}

TEST(Valuation, CurvatureImagePassesAndIdentityFails) {
  std::mt19937_64 rng(8);
  const auto g = build_grid(2, 360);
  const auto q = random_slab_quadruple(random_body(2, rng), rng);
  const double tol = valuation_budget(1e-8);
  const auto ok = check_valuation(normalized_curvature_operator(2, 2.0, g), q, 2.0, g, tol);
  EXPECT_TRUE(ok.passed) << ok.measured;
  const auto rot = check_valuation(rotate_after(normalized_curvature_operator(2, 2.0, g)), q, 2.0, g, tol);
  EXPECT_TRUE(rot.passed) << rot.measured;
  const auto bad = check_valuation(identity_operator(2), q, 2.0, g, tol);
  EXPECT_FALSE(bad.passed);
}

TEST(Equivariance, PlanarCurvatureImageAndControls) {
  std::mt19937_64 rng(6);
  const auto g = build_grid(2, 360);
  const auto Z = normalized_curvature_operator(2, 2.5, g);
  const Polytope K = random_body(2, rng);
  const LinearMap phi = random_linear_map(2, rng);
  EXPECT_TRUE(check_equivariance(Z, K, phi, g, 1e-3).passed);
  EXPECT_TRUE(check_equivariance(rotate_after(Z), K, phi, g, 1e-3).passed);
  EXPECT_FALSE(check_equivariance(Z, K, phi, g, 1e-3, 1.01).passed);
  EXPECT_TRUE(check_misscaled_equivariance(Z, K, phi, g, 1e-3).passed);
  BodyValuedOperator undeclared = Z;
  undeclared.declared_degree.reset();
  EXPECT_THROW(check_equivariance(undeclared, K, phi, g, 1e-3), PreconditionError);
}

TEST(Equivariance, TransformsAreExact) {
  std::mt19937_64 rng(10);
  const auto g = build_grid(3, 642);
  const Polytope K = random_body(3, rng);
  const LinearMap phi = random_linear_map(3, rng);
  EXPECT_TRUE(check_equivariance(projection_operator(3, 2.5, g), K, phi, g, 1e-6).passed);
  EXPECT_TRUE(check_equivariance(centroid_operator(3, 2.5, g), K, phi, g, 1e-6).passed);
  EXPECT_TRUE(check_equivariance(identity_operator(3), K, phi, g, 1e-12).passed);
}

TEST(Homogeneity, FittedDegrees) {
  std::mt19937_64 rng(12);
  const auto g = build_grid(2, 360);
  const Polytope K = random_body(2, rng);
  EXPECT_TRUE(check_homogeneity(identity_operator(2), K, 3.0, 1.0, g).passed);
  EXPECT_TRUE(check_homogeneity(normalized_curvature_operator(2, 2.0, g), K, 2.0, -2.0, g).passed);
  EXPECT_TRUE(check_homogeneity(curvature_operator(2, 3.0, g), K, 0.5, -5.0, g).passed);
  EXPECT_FALSE(check_homogeneity(identity_operator(2), K, 2.0, 0.0, g).passed);
}

TEST(Continuity, IdentityAndCurvatureImage) {
  std::mt19937_64 rng(14);
  const auto g = build_grid(2, 360);
  const Polytope K = random_pentagon(rng);
  EXPECT_TRUE(check_continuity(identity_operator(2), K, 8, 1, g).passed);
  const auto r = check_continuity(normalized_curvature_operator(2, 2.5, g), K, 8, 2, g);
  EXPECT_TRUE(r.passed) << r.notes;
  EXPECT_THROW(check_continuity(identity_operator(2), K, 2, 1, g), PreconditionError);
}

TEST(Identities, TransformChecks) {
  std::mt19937_64 rng(16);
  const auto g = build_grid(2, 360);
  EXPECT_TRUE(check_projection_square(*g).passed);
  EXPECT_TRUE(check_centroid_ball(2, 2.5, rng, 10).passed);
  EXPECT_TRUE(check_centroid_cosine_identity(random_body(2, rng), 2.5, *g, rng).passed);
  for (const auto& r : check_cosine_covariance(random_body(3, rng), random_linear_map(3, rng), 2.5, rng)) EXPECT_TRUE(r.passed) << r.check_name;
  for (const auto& r : check_support_point(3, 2.5, rng, 4)) EXPECT_TRUE(r.passed) << r.check_name << " " << r.measured;
}

TEST(Identities, SolverChecks) {
  const auto g = build_grid(2, 360);
  for (const auto& r : check_round_trip(cube(2), "square", 1.5, *g)) EXPECT_TRUE(r.passed) << r.check_name;
  EXPECT_TRUE(check_ball_oracle(2, 2.0, g).passed);
  std::mt19937_64 rng(18);
  EXPECT_TRUE(check_uniqueness_probe(normalized_lp_measure(random_symmetric_polytope(2, rng), 2.5), 2.5, 3, *g, "r").passed);
  for (const auto& r : check_conversions(random_body(2, rng), 3.0, g)) EXPECT_TRUE(r.passed) << r.check_name << " " << r.measured;
}

TEST(NegativeControl, InvertsInnerResult) {
  EXPECT_TRUE(expect_failure(make_result("x", "", 1.0, 0.1), "nc").passed);
  EXPECT_FALSE(expect_failure(make_result("x", "", 0.01, 0.1), "nc").passed);
  EXPECT_FALSE(expect_failure(skipped_result("x", ""), "nc").passed);
}

TEST(Suite, SmallPlanarRunPassesAndIsDeterministic) {
  SuiteConfig c;
  c.dims = {2};
  c.p_values = {2.5};
  c.equivariance_trials = 1;
  c.valuation_trials = 1;
  const auto a = run_suite(c);
  EXPECT_TRUE(all_passed(a));
  for (const auto& r : a) EXPECT_TRUE(r.passed || r.skipped) << r.check_name << " " << r.measured << " " << r.notes;
  const auto b = run_suite(c);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].check_name, b[i].check_name);
    EXPECT_EQ(a[i].inputs_digest, b[i].inputs_digest);
    EXPECT_EQ(a[i].measured, b[i].measured);
  }
  EXPECT_TRUE(std::is_sorted(a.begin(), a.end(), [](const auto& x, const auto& y) { return x.check_name < y.check_name; }));
  const auto j = suite_report(c, a);
  EXPECT_EQ(j["failed"], 0);
  EXPECT_TRUE(j["checks"][0].contains("inputs_digest"));
}

TEST(Suite, SeedChangesDigestsOnly) {
  SuiteConfig c;
  c.dims = {2};
  c.p_values = {1.5};
  c.equivariance_trials = 1;
  c.valuation_trials = 1;
  const auto a = run_suite(c);
  c.seed = 8;
  const auto b = run_suite(c);
  ASSERT_EQ(a.size(), b.size());
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].passed, b[i].passed) << a[i].check_name;
    differs = differs || a[i].inputs_digest != b[i].inputs_digest;
  }
  EXPECT_TRUE(differs);
}

TEST(Suite, RejectsBadParameters) {
  SuiteConfig c;
  c.p_values = {0.5};
  EXPECT_THROW(run_suite(c), PreconditionError);
  c.p_values = {2.5};
  c.dims = {4};
  EXPECT_THROW(run_suite(c), PreconditionError);
}

TEST(Suite, EvenIntegerPIsFlagged) {
  const auto g = build_grid(2, 360);
  std::mt19937_64 rng(1);
  const auto r = check_uniqueness_probe(normalized_lp_measure(random_symmetric_polytope(2, rng), 2.0), 2.0, 3, *g, "r");
  EXPECT_NE(r.notes.find("even-integer"), std::string::npos);
}
