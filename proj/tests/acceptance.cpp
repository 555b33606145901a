// Acceptance criteria 1-10. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include "lpbm/io.hpp"
#include "lpbm/verify.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sys/wait.h>
#include <unistd.h>

using namespace lpbm;

namespace {

struct Tally {
  double worst = 0.0;       ///< largest measured/tolerance ratio
  std::string worst_name;
  int checks = 0;
  int failed = 0;
  std::vector<std::string> failures;

  void add(const CheckResult& r) {
    ++checks;
    const double ratio = r.tolerance > 0.0 ? r.measured / r.tolerance : (r.passed ? 0.0 : 1e300);
    if (!r.passed) {
      ++failed;
      failures.push_back(r.check_name);
    }
    if (ratio >= worst || worst_name.empty()) {
      worst = ratio;
      worst_name = r.check_name + " measured " + fmt(r.measured) + " tol " + fmt(r.tolerance);
    }
  }
  void add(const std::vector<CheckResult>& rs) {
    for (const auto& r : rs) add(r);
  }

  static std::string fmt(double x) {
    std::ostringstream s;
    s << std::setprecision(3) << x;
    return s.str();
  }
};

int failures = 0;

void report(int n, const std::string& title, const Tally& t, double seconds) {
  const bool ok = t.failed == 0 && t.checks > 0;
  if (!ok) ++failures;
  std::cout << "criterion " << std::setw(2) << n << ' ' << (ok ? "PASS" : "FAIL") << "  " << title << ": " << t.checks
            << " checks, " << t.failed << " failed; worst " << t.worst_name << " (" << std::fixed << std::setprecision(1)
            << seconds << " s)" << std::defaultfloat << std::endl;
  for (const auto& f : t.failures) std::cout << "    failed: " << f << std::endl;
}

template <class F>
void criterion(int n, const std::string& title, F&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Tally t;
  try {
    body(t);
  } catch (const std::exception& e) {
    t.add(make_result("exception: " + std::string(e.what()), "", std::numeric_limits<double>::infinity(), 0.0));
  }
  report(n, title, t, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
}

std::string p_tag(double p) {
  std::ostringstream s;
  s << "/p" << p;
  return s.str();
}

CheckResult tagged(CheckResult r, const std::string& suffix) {
  r.check_name += suffix;
  return r;
}

const std::vector<double> kP{1.5, 2.5, 3.0};

std::vector<std::pair<std::string, Polytope>> symmetric_catalog(int dim, std::mt19937_64& rng) {
  if (dim == 2) {
    return {{"square", cube(2)},
            {"diamond", cross_polytope(2)},
            {"hexagon", regular_polygon(6, 1.0, 0.2)},
            {"random", random_symmetric_polytope(2, rng)}};
  }
  return {{"cube", cube(3)}, {"octahedron", cross_polytope(3)}, {"random", random_symmetric_polytope(3, rng, 10)}};
}

int run_cli_exit(const std::string& args) {
  const std::string cmd = std::string(LPBM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

int main() {
  std::mt19937_64 master(20240607);
  auto seed = [&] { return master(); };
  const auto grid2 = build_grid(2, default_resolution(2));
  const auto grid3 = build_grid(3, default_resolution(3));
  auto grid = [&](int dim) { return dim == 2 ? grid2 : grid3; };

  criterion(1, "solver round trip (1e-5 Hausdorff, 1e-8 residual)", [&](Tally& t) {
    std::mt19937_64 rng(seed());
    for (int dim : {2, 3}) {
      for (const auto& [label, K] : symmetric_catalog(dim, rng)) {
        for (double p : kP) {
          for (auto& r : check_round_trip(K, label, p, *grid(dim))) t.add(tagged(r, p_tag(p)));
        }
      }
    }
  });

  criterion(2, "ball oracle kappa_n^(-1/p) incl. p = n (1e-3)", [&](Tally& t) {
    for (int dim : {2, 3}) {
      for (double p : {1.5, 2.5, 3.0, static_cast<double>(dim)}) t.add(tagged(check_ball_oracle(dim, p, grid(dim)), p_tag(p)));
    }
  });

  criterion(3, "contravariance of the normalized curvature image, 20 maps per dimension (1e-3)", [&](Tally& t) {
    for (int dim : {2, 3}) {
      std::mt19937_64 rng(seed());
      const auto g = equivariance_grid(dim);
      const Polytope K = random_body(dim, rng);
      std::vector<BodyValuedOperator> ops;
      for (double p : kP) ops.push_back(normalized_curvature_operator(dim, p, g));
      std::vector<Body> base;
      for (const auto& Z : ops) base.push_back(Z(K));
      for (int k = 0; k < 20; ++k) {
        const auto& Z = ops[static_cast<std::size_t>(k) % ops.size()];
        const LinearMap phi = random_linear_map(dim, rng);
        const Body lhs = Z(apply_linear(phi, K));
        const Body rhs = predicted_image(Z, base[static_cast<std::size_t>(k) % ops.size()], phi);
        t.add(make_result("contravariance/dim" + std::to_string(dim) + "/map" + std::to_string(k), "",
                          relative_distance(lhs, rhs, *g), 1e-3));
      }
    }
  });

  criterion(4, "homogeneity degrees -n/p-1 and (-n/p-1)p/(p-n) (1e-3)", [&](Tally& t) {
    for (int dim : {2, 3}) {
      std::mt19937_64 rng(seed());
      const Polytope K = random_body(dim, rng);
      for (double p : {1.5, 2.5, 3.0, static_cast<double>(dim)}) {
        t.add(tagged(check_homogeneity(normalized_curvature_operator(dim, p, grid(dim)), K, 2.0, -dim / p - 1.0, grid(dim)), p_tag(p)));
        if (std::abs(p - dim) > 1e-6) {
          t.add(tagged(check_homogeneity(curvature_operator(dim, p, grid(dim)), K, 2.0, (-dim / p - 1.0) * p / (p - dim), grid(dim)),
                       p_tag(p)));
        }
      }
    }
  });

  criterion(5, "valuation identity on 20 slab quadruples per dimension", [&](Tally& t) {
    const double budget = valuation_budget(SolverConfig{}.residual_tol);
    for (int dim : {2, 3}) {
      std::mt19937_64 rng(seed());
      for (int k = 0; k < 20; ++k) {
        const double p = kP[static_cast<std::size_t>(k) % kP.size()];
        const auto q = random_slab_quadruple(random_body(dim, rng), rng);
        const std::string sfx = "/quad" + std::to_string(k);
        t.add(tagged(check_radial_valuation(q, dim + p, *grid(dim)), sfx));
        t.add(tagged(check_valuation(normalized_curvature_operator(dim, p, grid(dim)), q, p, grid(dim), budget), sfx));
      }
    }
  });

  criterion(6, "transform identities (Gamma_p B = B, centroid/cosine identity, covariances, Pi_2 square)", [&](Tally& t) {
    t.add(check_projection_square(*grid2));
    for (int dim : {2, 3}) {
      std::mt19937_64 rng(seed());
      for (double p : kP) {
        const Polytope K = random_body(dim, rng);
        const LinearMap phi = random_linear_map(dim, rng);
        t.add(tagged(check_centroid_ball(dim, p, rng), p_tag(p)));
        t.add(tagged(check_centroid_cosine_identity(K, p, *equivariance_grid(dim), rng), p_tag(p)));
        t.add(tagged(check_equivariance(projection_operator(dim, p, grid(dim)), K, phi, grid(dim), 1e-6), p_tag(p)));
        t.add(tagged(check_equivariance(centroid_operator(dim, p, grid(dim)), K, phi, grid(dim), 1e-6), p_tag(p)));
        for (auto& r : check_cosine_covariance(K, phi, p, rng)) t.add(tagged(r, p_tag(p)));
      }
    }
  });

  criterion(7, "support-set formula and derivative additivity (1e-4)", [&](Tally& t) {
    for (int dim : {2, 3}) {
      std::mt19937_64 rng(seed());
      for (auto& r : check_support_point(dim, 2.5, rng, 10)) t.add(r);
    }
  });

  criterion(8, "conversion laws (round trip 1e-6, two paths 1e-3, plain image of B 1e-3)", [&](Tally& t) {
    for (int dim : {2, 3}) {
      std::mt19937_64 rng(seed());
      for (double p : kP) {
        if (std::abs(p - dim) < 1e-6) continue;
        for (auto& r : check_conversions(random_body(dim, rng), p, grid(dim))) t.add(tagged(r, p_tag(p)));
      }
    }
  });

  criterion(9, "continuity under 2^-j vertex perturbations (1e-2, last three non-increasing)", [&](Tally& t) {
    std::mt19937_64 rng(seed());
    for (double p : kP) {
      t.add(tagged(check_continuity(normalized_curvature_operator(2, p, grid2), random_pentagon(rng), 8, seed(), grid2), p_tag(p)));
    }
    t.add(tagged(check_continuity(normalized_curvature_operator(3, 2.5, grid3), random_body(3, rng), 9, seed(), grid3), p_tag(2.5)));
  });

  criterion(10, "negative controls (identity valuation, mis-scaled equivariance, concentrated measure exit 3)", [&](Tally& t) {
    const double budget = valuation_budget(SolverConfig{}.residual_tol);
    for (int dim : {2, 3}) {
      std::mt19937_64 rng(seed());
      const std::string d = "/dim" + std::to_string(dim);
      const auto q = random_slab_quadruple(random_body(dim, rng), rng);
      t.add(expect_failure(check_valuation(identity_operator(dim), q, 2.5, grid(dim), budget), "identity_valuation" + d));
      const auto Z = normalized_curvature_operator(dim, 2.5, grid(dim));
      t.add(check_misscaled_equivariance(Z, random_body(dim, rng), random_linear_map(dim, rng), grid(dim), 1e-3));
    }
    const auto dir = std::filesystem::temp_directory_path() / ("lpbm_acceptance_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    const std::vector<std::pair<int, std::string>> measures{
        {2, R"({"kind":"measure","dim":2,"directions":[[0.6,0.8],[-0.6,-0.8]],"masses":[1,1]})"},
        {3, R"({"kind":"measure","dim":3,"directions":[[1,0,0],[-1,0,0],[0,1,0],[0,-1,0],[0.6,0.8,0],[-0.6,-0.8,0]],"masses":[1,1,2,2,1,1]})"}};
    for (const auto& [dim, text] : measures) {
      const auto file = (dir / ("great_subsphere_" + std::to_string(dim) + ".json")).string();
      io::write_text(file, text);
      const int code = run_cli_exit("solve --dim " + std::to_string(dim) + " --p 2 --in " + file);
      CheckResult r = make_result("cli_concentrated_exit/dim" + std::to_string(dim), "", std::abs(code - 3), 0.0,
                                  "exit " + std::to_string(code));
      t.add(r);
    }
    std::filesystem::remove_all(dir);
  });

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
