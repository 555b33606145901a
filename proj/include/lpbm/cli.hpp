#pragma once

/// Command-line front end. `dispatch` runs one subcommand and returns the
/// process exit code: 0 success, 1 failed checks, 2 usage, 3 violated
/// precondition, 4 solver non-convergence.

#include "lpbm/io.hpp"
#include "lpbm/verify.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace lpbm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitChecksFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitPrecondition = 3;
inline constexpr int kExitNoConvergence = 4;

inline constexpr const char* kVersion = "0.1.0";

struct CommandConfig {
  std::string subcommand;
  int dim = 2;
  double p = 2.0;
  int resolution = 0;  ///< 0: default for the dimension
  double tol = 1e-8;
  std::uint64_t seed = 7;
  int max_iterations = 5000;
  std::vector<std::string> inputs;
  std::string output;
  bool plain = false;
  double tau = 0.0;
  std::string emit_polygon;
  std::vector<int> dims{2, 3};
  std::vector<double> p_values{1.5, 2.5, 3.0};
  int threads = 0;

  int effective_resolution() const { return resolution > 0 ? resolution : default_resolution(dim); }

  SolverConfig solver() const {
    SolverConfig c;
    c.residual_tol = tol;
    c.max_iterations = max_iterations;
    return c;
  }

  void validate() const {
    require(dim == 2 || dim == 3, "dim", "--dim must be 2 or 3");
    require(std::isfinite(p) && p > 1.0 && p <= kMaxP, "p", "--p must lie in (1, 12]");
    require(std::isfinite(tol) && tol > 0.0, "tol", "--tol must be positive");
    require(tau >= -1.0 && tau <= 1.0, "tau", "--tau must lie in [-1, 1]");
    require(max_iterations > 0, "max_iterations", "--max-iterations must be positive");
    if (resolution > 0) build_grid(dim, resolution);
    const bool needs_input = subcommand == "solve" || subcommand == "projection" || subcommand == "centroid" ||
                             subcommand == "moment" || subcommand == "rotate90";
    if (needs_input) require(inputs.size() == 1, "input", subcommand + " reads exactly one --in file");
    if (subcommand == "curvature-image") require(inputs.size() <= 1, "input", "curvature-image reads at most one --in file");
    if (subcommand == "blaschke-sum") require(inputs.size() == 2, "input", "blaschke-sum reads exactly two --in files");
    if (subcommand == "rotate90") require(dim == 2, "dim", "rotate90 is planar");
    if (plain && (subcommand == "solve" || subcommand == "curvature-image" || subcommand == "blaschke-sum")) {
      require(std::abs(p - dim) > 1e-6, "p_ne_n", "--plain needs p != n; use the normalized problem");
    }
  }

  io::json metadata() const {
    return {{"command", subcommand},
            {"dim", dim},
            {"p", p},
            {"resolution", effective_resolution()},
            {"tol", tol},
            {"seed", seed},
            {"max_iterations", max_iterations},
            {"tau", tau},
            {"normalized", !plain},
            {"inputs", inputs},
            {"version", kVersion}};
  }
};

inline io::json report_json(const SolverReport& r) {
  return {{"iterations", r.iterations},
          {"final_residual", r.final_residual},
          {"converged", r.converged},
          {"concentration_gap", r.concentration_gap},
          {"objective_history", r.objective_history}};
}

namespace detail {

inline Polytope read_polytope(const std::string& path, int dim) {
  const io::Document d = io::read_document(path);
  Polytope P = io::polytope_from_json(d.data);
  require(P.dim == dim, "dim", path + " holds a body of dimension " + std::to_string(P.dim));
  return P;
}

inline Body read_body(const std::string& path, int dim) {
  const io::Document d = io::read_document(path);
  Body B = io::body_from_json(d.data);
  require(body_dim(B) == dim, "dim", path + " holds a body of dimension " + std::to_string(body_dim(B)));
  return B;
}

class Runner {
 public:
  Runner(const CommandConfig& c, std::ostream& out) : c_(c), out_(out) {}

  int run() {
    const std::string& s = c_.subcommand;
    if (s == "grid") return grid();
    if (s == "solve") return solve();
    if (s == "projection" || s == "centroid" || s == "moment") return transform();
    if (s == "curvature-image") return curvature_image_cmd();
    if (s == "blaschke-sum") return blaschke();
    if (s == "rotate90") return rotate();
    return verify();
  }

  std::string report_path() const { return (c_.output.empty() ? std::string("lpbm") : c_.output) + ".report.json"; }

 private:
  std::shared_ptr<const DirectionGrid> grid_ptr() const { return build_grid(c_.dim, c_.effective_resolution()); }

  void emit(const io::json& data, const Body* body = nullptr, io::json meta = nullptr) {
    if (meta.is_null()) meta = c_.metadata();
    if (!c_.output.empty()) io::write_document(c_.output, {data, std::move(meta)});
    if (!c_.emit_polygon.empty() && body) io::write_text(c_.emit_polygon, io::polygon_csv(*body, *grid_ptr()));
  }

  int finish_solve(const SolveResult& r, const std::string& what) {
    if (!r.report.converged) {
      io::write_document(report_path(), {report_json(r.report), c_.metadata()});
      throw ConvergenceError(r.report);
    }
    const Body b = r.body;
    io::json meta = c_.metadata();
    meta["solver"] = report_json(r.report);
    emit(io::to_json(r.body), &b, meta);
    const auto g = grid_ptr();
    out_ << what << ": volume " << volume(r.body) << ", residual " << r.report.final_residual << ", iterations "
         << r.report.iterations << ", support range [" << min_support(b, *g) << ", " << max_support(b, *g) << "]\n";
    return kExitOk;
  }

  static double min_support(const Body& b, const DirectionGrid& g) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& u : g.directions) m = std::min(m, support(b, u));
    return m;
  }

  int grid() {
    const auto g = grid_ptr();
    emit(io::to_json(*g));
    out_ << "grid: dim " << g->dim << ", " << g->size() << " directions, weight sum "
         << std::accumulate(g->weights.begin(), g->weights.end(), 0.0) << "\n";
    return kExitOk;
  }

  int solve() {
    const io::Document d = io::read_document(c_.inputs[0]);
    const DiscreteMeasure mu = io::measure_from_json(d.data);
    require(mu.dim == c_.dim, "dim", "measure dimension differs from --dim");
    require(concentration_gap(mu) >= kConcentrationThreshold, "concentration_gap",
            "measure is concentrated on a great subsphere");
    const SolveResult r = c_.plain ? solve_even(mu, c_.p, c_.solver()) : solve_normalized_even(mu, c_.p, c_.solver());
    return finish_solve(r, "solve");
  }

  int transform() {
    const Polytope K = read_polytope(c_.inputs[0], c_.dim);
    const auto g = grid_ptr();
    SampledBody b;
    if (c_.subcommand == "projection") b = projection_body(K, c_.p, c_.tau, g);
    else if (c_.subcommand == "centroid") b = centroid_body(K, c_.p, g);
    else b = moment_body(K, c_.p, c_.tau, g);
    const Body body = b;
    emit(io::to_json(b), &body);
    out_ << c_.subcommand << ": volume " << body_volume(body) << ", mean support " << mean_support(body, *g)
         << ", support range [" << min_support(body, *g) << ", " << max_support(body, *g) << "]\n";
    return kExitOk;
  }

  int curvature_image_cmd() {
    const auto g = grid_ptr();
    const Polytope K = c_.inputs.empty() ? reference_ball(*g) : read_polytope(c_.inputs[0], c_.dim);
    const SolveResult r = c_.plain ? curvature_image_report(K, c_.p, g, c_.solver())
                                   : normalized_curvature_image_report(K, c_.p, g, c_.solver());
    return finish_solve(r, "curvature-image");
  }

  int blaschke() {
    const Polytope K = read_polytope(c_.inputs[0], c_.dim);
    const Polytope L = read_polytope(c_.inputs[1], c_.dim);
    const SolveResult r = c_.plain ? blaschke_sum_report(K, L, c_.p, c_.solver())
                                   : normalized_blaschke_sum_report(K, L, c_.p, c_.solver());
    return finish_solve(r, "blaschke-sum");
  }

  int rotate() {
    const Body b = rotate_quarter(read_body(c_.inputs[0], c_.dim));
    emit(io::to_json(b), &b);
    out_ << "rotate90: volume " << body_volume(b) << "\n";
    return kExitOk;
  }

  int verify() {
    SuiteConfig s;
    s.seed = c_.seed;
    s.dims = std::set<int>(c_.dims.begin(), c_.dims.end());
    s.p_values = c_.p_values;
    s.threads = c_.threads;
    const auto results = run_suite(s);
    io::json report = suite_report(s, results);
    if (!c_.output.empty()) io::write_document(c_.output, {report, c_.metadata()});
    out_ << "verify: " << report["passed"] << " passed, " << report["failed"] << " failed, " << report["skipped"]
         << " skipped\n";
    return all_passed(results) ? kExitOk : kExitChecksFailed;
  }

  const CommandConfig& c_;
  std::ostream& out_;
};

}  // namespace detail

/// Builds the argument parser bound to `c`.
inline void configure(CLI::App& app, CommandConfig& c) {
  app.description("Lp Brunn-Minkowski toolkit: Minkowski solver, Lp transforms, curvature images and property checks");
  app.require_subcommand(1, 1);
  app.option_defaults()->always_capture_default();
  app.set_version_flag("--version", kVersion);

  auto common = [&](CLI::App* s, bool p, bool solver) {
    s->add_option("--dim", c.dim, "ambient dimension")->check(CLI::IsMember({2, 3}));
    s->add_option("--resolution", c.resolution, "grid resolution (0: 360 in dim 2, 2562 in dim 3)");
    s->add_option("--out", c.output, "output JSON path");
    if (p) s->add_option("--p", c.p, "exponent p in (1, 12]");
    if (solver) {
      s->add_option("--tol", c.tol, "solver residual tolerance");
      s->add_option("--max-iterations", c.max_iterations, "solver iteration limit");
      s->add_flag_function("--normalized,!--plain", [&c](std::int64_t k) { c.plain = k < 0; },
                           "volume-normalized problem (default) or the plain one (p != n)");
    }
  };
  auto input = [&](CLI::App* s, const std::string& help) { s->add_option("--in", c.inputs, help); };
  auto polygon = [&](CLI::App* s) {
    s->add_option("--emit-polygon", c.emit_polygon, "also write the result as CSV (polygon vertices or support samples)");
  };

  auto* g = app.add_subcommand("grid", "write a direction grid");
  common(g, false, false);

  auto* s = app.add_subcommand("solve", "solve the even Lp-Minkowski problem for a measure file");
  common(s, true, true);
  input(s, "measure JSON");
  polygon(s);

  for (const char* name : {"projection", "centroid", "moment"}) {
    auto* t = app.add_subcommand(name, std::string("sample the Lp ") + name + " body of a polytope");
    common(t, true, false);
    input(t, "polytope JSON");
    polygon(t);
    if (std::string(name) != "centroid") t->add_option("--tau", c.tau, "asymmetry parameter in [-1, 1]");
  }

  auto* ci = app.add_subcommand("curvature-image", "symmetric Lp curvature image of a polytope (default: the grid ball)");
  common(ci, true, true);
  input(ci, "polytope JSON");
  polygon(ci);

  auto* bs = app.add_subcommand("blaschke-sum", "Lp-Blaschke sum of two origin-symmetric polytopes");
  common(bs, true, true);
  input(bs, "two polytope JSON files (repeat --in)");
  polygon(bs);

  auto* r = app.add_subcommand("rotate90", "apply the planar quarter turn to a body");
  common(r, false, false);
  input(r, "body JSON");
  polygon(r);

  auto* v = app.add_subcommand("verify", "run the property suite and write a JSON report");
  v->add_option("--seed", c.seed, "random seed");
  v->add_option("--dims", c.dims, "dimensions")->delimiter(',')->check(CLI::IsMember({2, 3}));
  v->add_option("--p-values", c.p_values, "exponents in (1, 12]")->delimiter(',');
  v->add_option("--threads", c.threads, "worker threads (0: hardware concurrency)");
  v->add_option("--out", c.output, "report JSON path");
}

/// Parses argv, runs one subcommand and maps failures onto exit codes.
inline int dispatch(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CommandConfig c;
  CLI::App app{"lpbm"};
  configure(app, c);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << "run with --help for usage\n";
    return kExitUsage;
  }
  c.subcommand = app.get_subcommands().front()->get_name();

  detail::Runner runner(c, out);
  try {
    c.validate();
    return runner.run();
  } catch (const PreconditionError& e) {
    err << "precondition violated: " << e.invariant() << " (" << e.what() << ")\n";
    return kExitPrecondition;
  } catch (const ConvergenceError& e) {
    err << "solver did not converge: " << e.what() << "; report written to " << runner.report_path() << "\n";
    return kExitNoConvergence;
  } catch (const DegenerateError& e) {
    err << "precondition violated: degenerate (" << e.what() << ")\n";
    return kExitPrecondition;
  } catch (const io::json::exception& e) {
    err << "precondition violated: format (" << e.what() << ")\n";
    return kExitPrecondition;
  }
}

}  // namespace lpbm::cli
