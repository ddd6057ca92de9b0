#include "cli/commands.hpp"

#include "cli/artifacts.hpp"
#include "dofoc/errors.hpp"
#include "dofoc/fractional_operators.hpp"
#include "dofoc/pmp_engine.hpp"

#include <cmath>
#include <filesystem>
#include <functional>
#include <ostream>
#include <random>

namespace dofoc::cli {
namespace {

namespace fs = std::filesystem;
using ordered = nlohmann::ordered_json;

std::string one_line(std::string text) {
  for (char& c : text) {
    if (c == '\n' || c == '\r') c = ' ';
    if (c == '"') c = '\'';
  }
  return text;
}

void diagnose(std::ostream& err, const std::string& kind, const std::string& reason, const std::string& detail) {
  err << "dofoc: error kind=" << kind << " reason=" << reason << " detail=\"" << one_line(detail) << "\"\n";
}

const char* error_reason(const Error& e) {
  if (dynamic_cast<const SolverDivergenceError*>(&e)) return "divergence";
  if (dynamic_cast<const DynamicsEvaluationError*>(&e)) return "evaluation";
  if (dynamic_cast<const ResolutionError*>(&e)) return "resolution";
  if (dynamic_cast<const AccuracyError*>(&e)) return "accuracy";
  if (dynamic_cast<const DomainError*>(&e)) return "domain";
  if (dynamic_cast<const ValidationError*>(&e)) return "validation";
  return "solver";
}

// Maps every failure to its exit code and a one-line diagnostic.
int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const SpecError& e) {
    diagnose(err, "parse", e.reason(), e.what());
    return kExitParse;
  } catch (const ArtifactError& e) {
    diagnose(err, "io", "artifact", e.what());
    return kExitParse;
  } catch (const GridMismatchError& e) {
    diagnose(err, "grid", "mismatch", e.what());
    return kExitSolver;
  } catch (const Error& e) {
    diagnose(err, "solver", error_reason(e), e.what());
    return kExitSolver;
  } catch (const fs::filesystem_error& e) {
    diagnose(err, "io", "filesystem", e.what());
    return kExitParse;
  } catch (const std::exception& e) {
    diagnose(err, "internal", "exception", e.what());
    return kExitSolver;
  }
}

ordered number_or_null(double v) { return std::isfinite(v) ? ordered(v) : ordered(nullptr); }

ordered vector_json(const Vector& v) {
  ordered out = ordered::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(number_or_null(v[k]));
  return out;
}

ordered doubles_json(const std::vector<double>& v) {
  ordered out = ordered::array();
  for (double d : v) out.push_back(number_or_null(d));
  return out;
}

ordered common_header(const char* command, const ProblemSpec& spec) {
  ordered j;
  j["command"] = command;
  j["problem"] = spec.problem.name;
  j["config"] = ordered::parse(config_to_json(spec.config).dump());
  j["defaults_used"] = spec.defaults_used;
  j["derivatives"] = spec.problem.derivatives_approximate() ? "finite_difference" : "analytic";
  j["psi_mass"] = spec.problem.dist.mass();
  return j;
}

void emit_report(const ordered& report, const std::optional<std::string>& path, std::ostream& out) {
  const std::string text = report.dump(2) + "\n";
  if (path) write_atomic(*path, text);
  out << text;
}

double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

std::vector<NeedleSpec> draw_needle_specs(const TimeGrid& grid, const ControlBox& omega, int count,
                                          std::uint64_t seed) {
  constexpr std::size_t kFirstNode = 8;
  if (grid.size() <= kFirstNode + 1) throw ResolutionError("grid too coarse for needle draws");
  std::mt19937_64 rng(seed);
  const std::size_t choices = grid.size() - 1 - kFirstNode;
  const double h = grid.step();
  std::vector<NeedleSpec> specs;
  specs.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int s = 0; s < count; ++s) {
    const std::size_t offset = std::min(choices - 1, static_cast<std::size_t>(unit_uniform(rng) * static_cast<double>(choices)));
    const double tau = grid[kFirstNode + offset];
    Vector v(omega.dim());
    for (int k = 0; k < omega.dim(); ++k) v[k] = omega.lo[k] + unit_uniform(rng) * (omega.hi[k] - omega.lo[k]);
    const double theta_max = 0.5 * (tau - grid.start());
    const double theta = 4.0 * h + unit_uniform(rng) * (theta_max - 4.0 * h);
    specs.push_back({tau, v, theta});
  }
  return specs;
}

int cmd_solve(const SolveOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ProblemSpec spec = load_problem_spec(opts.spec_path, opts.overrides);
    const PMPSolution sol = solve_pmp(spec.problem, spec.config);

    const fs::path dir(opts.out_dir);
    fs::create_directories(dir);
    write_atomic(dir / "state.csv", trajectory_csv(sol.state, "x"));
    write_atomic(dir / "control.csv", trajectory_csv(sol.control, "u"));
    write_atomic(dir / "adjoint.csv", trajectory_csv(sol.adjoint, "l"));

    ordered report = common_header("solve", spec);
    report["converged"] = sol.converged;
    report["cost"] = number_or_null(sol.cost_value);
    report["sweep_iterations"] = sol.sweep_iterations;
    report["hamiltonian_residual"] = number_or_null(sol.hamiltonian_residual);
    report["transversality_residual"] = number_or_null(sol.transversality_residual);
    report["final_control_change"] = number_or_null(sol.final_control_change);
    report["final_gamma"] = sol.final_gamma;
    ordered switches = ordered::object();
    for (int k = 0; k < sol.control.dim(); ++k) {
      switches["u" + std::to_string(k + 1)] = doubles_json(switch_times(sol.control, spec.problem.omega, k));
    }
    report["switch_times"] = switches;
    report["spec"] = ordered::parse(spec.document.dump());
    write_atomic(dir / "report.json", report.dump(2) + "\n");

    out << "solve: " << (sol.converged ? "converged" : "NOT converged") << " after "
        << sol.sweep_iterations << " sweeps, J = " << format_double(sol.cost_value) << "\n";
    if (!sol.converged) {
      err << "dofoc: warning kind=convergence reason=max_sweeps detail=\"best iterate written\"\n";
      return static_cast<int>(kExitNotConverged);
    }
    return static_cast<int>(kExitOk);
  });
}

int cmd_validate(const ValidateOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (opts.needles < 0) throw SpecError("needles", "needle count must be non-negative");
    const ProblemSpec spec = load_problem_spec(opts.spec_path, opts.overrides);
    const ControlProblem& prob = spec.problem;
    const TimeGrid grid(prob.a, prob.b, spec.config.n_steps);
    const fs::path dir(opts.sol_dir);

    const Trajectory u = read_trajectory_csv(dir / "control.csv", grid, prob.control_dim, "u");
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (!prob.omega.contains(u.at(i), 1e-12)) throw SpecError("control", "stored control leaves omega");
    }
    const Trajectory x = solve_state(prob, u, spec.config);
    AdjointSolution adj = solve_costate(prob, x, u, spec.config);
    PMPSolution sol{x, u, adj.adjoint};
    sol.cost_value = cost_functional(prob, x, u);

    ordered report = common_header("validate", spec);
    report["seed"] = opts.seed;
    report["needle_count"] = opts.needles;
    if (fs::exists(dir / "state.csv")) {
      const Trajectory stored = read_trajectory_csv(dir / "state.csv", grid, prob.state_dim, "x");
      report["stored_state_difference"] = number_or_null(max_abs_difference(stored, x));
    }

    const std::vector<NeedleSpec> specs = draw_needle_specs(grid, prob.omega, opts.needles, opts.seed);
    const NeedleReport needles = needle_optimality_check(prob, sol, specs, spec.config);
    report["reference_cost"] = number_or_null(needles.reference_cost);
    ordered results = ordered::array();
    for (std::size_t s = 0; s < needles.results.size(); ++s) {
      const NeedleResult& r = needles.results[s];
      ordered item;
      item["tau"] = r.spec.tau;
      item["v"] = vector_json(r.spec.v);
      item["theta"] = r.spec.theta;
      item["extrapolated"] = number_or_null(r.extrapolated);
      item["passed"] = r.passed;
      item["skipped"] = r.skipped;
      if (!r.notice.empty()) item["notice"] = r.notice;
      ordered rungs = ordered::array();
      for (const NeedleRung& rung : r.rungs) {
        rungs.push_back(ordered{{"theta", rung.theta},
                                {"width", rung.width},
                                {"quotient", number_or_null(rung.quotient)},
                                {"reference_constant", rung.reference_constant}});
      }
      item["rungs"] = rungs;
      results.push_back(item);
      out << "needle " << s << " tau=" << format_double(r.spec.tau) << " theta=" << format_double(r.spec.theta)
          << " dJ/theta=" << format_double(r.extrapolated) << " "
          << (r.skipped ? "SKIP" : (r.passed ? "PASS" : "FAIL")) << "\n";
    }
    report["results"] = results;
    report["passed"] = needles.passed;
    write_atomic(dir / "validation.json", report.dump(2) + "\n");

    if (opts.needles == 0) {
      err << "dofoc: warning kind=validate reason=no_needles detail=\"needle count is 0; nothing checked\"\n";
    }
    out << "validate: " << (needles.passed ? "PASS" : "FAIL") << "\n";
    return static_cast<int>(needles.passed ? kExitOk : kExitFail);
  });
}

namespace {

struct NeedleDefaults {
  NeedleSpec spec;
  std::vector<double> ladder;
};

NeedleDefaults probe_needle(const ProbeOptions& opts, const ControlProblem& prob) {
  const double horizon = prob.b - prob.a;
  NeedleDefaults d{{opts.tau.value_or(0.5 * (prob.a + prob.b)), prob.omega.lo, 0.0}, {}};
  if (opts.v) {
    if (static_cast<int>(opts.v->size()) != prob.control_dim) throw SpecError("v", "--v needs one value per control");
    d.spec.v = Eigen::Map<const Vector>(opts.v->data(), prob.control_dim);
    if (!prob.omega.contains(d.spec.v, 1e-12)) throw SpecError("v", "--v leaves omega");
  }
  if (!(d.spec.tau > prob.a && d.spec.tau < prob.b)) throw SpecError("tau", "--tau must lie inside (a, b)");
  d.ladder = opts.ladder.value_or(std::vector<double>{0.1 * horizon, 0.05 * horizon, 0.025 * horizon, 0.0125 * horizon});
  if (d.ladder.empty()) throw SpecError("ladder", "--ladder must not be empty");
  for (double theta : d.ladder) {
    if (!(theta > 0.0) || d.spec.tau - theta < prob.a) throw SpecError("ladder", "ladder values must be positive and fit before tau");
  }
  d.spec.theta = d.ladder.front();
  return d;
}

ordered needle_json(const NeedleSpec& s) { return ordered{{"tau", s.tau}, {"v", vector_json(s.v)}}; }

int probe_continuity(const ProbeOptions& opts, const ProblemSpec& spec, std::ostream& out) {
  const ControlProblem& prob = spec.problem;
  const NeedleDefaults d = probe_needle(opts, prob);
  const PMPSolution sol = solve_pmp(prob, spec.config);
  const ContinuityProbe p = continuity_rate_probe(prob, sol, d.spec, d.ladder, spec.config, spec.bounds);
  const bool passed = p.degenerate || (p.monotone && p.exponent > 0.0 && p.bound_holds);

  ordered report = common_header("probe", spec);
  report["kind"] = "continuity";
  report["solution_converged"] = sol.converged;
  report["needle"] = needle_json(d.spec);
  report["thetas"] = doubles_json(p.thetas);
  report["deviations"] = doubles_json(p.deviations);
  report["exponent"] = p.exponent;
  report["log_constant"] = p.log_constant;
  report["monotone"] = p.monotone;
  report["degenerate"] = p.degenerate;
  report["lipschitz"] = p.bounds.lipschitz;
  report["bound"] = p.bounds.bound;
  report["bounds_source"] = spec.bounds ? "file" : "estimated";
  report["gronwall_constant"] = number_or_null(p.gronwall_constant);
  report["bound_holds"] = p.bound_holds;
  if (!p.notice.empty()) report["notice"] = p.notice;
  report["passed"] = passed;
  emit_report(report, opts.out_path, out);
  return static_cast<int>(passed ? kExitOk : kExitFail);
}

int probe_variational(const ProbeOptions& opts, const ProblemSpec& spec, std::ostream& out) {
  constexpr double kBandLo = 0.35;
  constexpr double kBandHi = 0.8;
  const ControlProblem& prob = spec.problem;
  const NeedleDefaults d = probe_needle(opts, prob);
  const double lo = opts.lo.value_or(d.spec.tau + 0.25 * (prob.b - d.spec.tau));
  const double hi = opts.hi.value_or(prob.b);
  if (!(lo > d.spec.tau && lo <= hi && hi <= prob.b)) {
    throw SpecError("interval", "comparison interval must satisfy tau < lo <= hi <= b");
  }
  const PMPSolution sol = solve_pmp(prob, spec.config);
  const VariationalLadder v = variational_gap_ladder(prob, sol, d.spec, d.ladder, lo, hi, spec.config);
  bool decreasing = true;
  bool in_band = true;
  for (double r : v.ratios) {
    decreasing = decreasing && r < 1.0;
    in_band = in_band && r >= kBandLo && r <= kBandHi;
  }
  const bool passed = v.degenerate || decreasing;

  ordered report = common_header("probe", spec);
  report["kind"] = "variational";
  report["solution_converged"] = sol.converged;
  report["needle"] = needle_json(d.spec);
  report["interval"] = ordered::array({lo, hi});
  report["thetas"] = doubles_json(v.thetas);
  report["gaps"] = doubles_json(v.gaps);
  report["ratios"] = doubles_json(v.ratios);
  report["degenerate"] = v.degenerate;
  report["decreasing"] = decreasing;
  report["ratio_band"] = ordered::array({kBandLo, kBandHi});
  report["ratios_in_band"] = in_band;
  report["passed"] = passed;
  emit_report(report, opts.out_path, out);
  return static_cast<int>(passed ? kExitOk : kExitFail);
}

double empirical_order(double coarse, double fine) {
  return coarse > 0.0 && fine > 0.0 ? std::log2(coarse / fine) : 0.0;
}

int probe_operators(const ProbeOptions& opts, const ProblemSpec& spec, std::ostream& out) {
  const ControlProblem& prob = spec.problem;
  const double a = prob.a;
  ordered rows = ordered::array();
  std::vector<double> ibp;
  std::vector<double> relation;
  double constant = 0.0;
  for (int n : {500, 1000, 2000, 4000}) {
    const TimeGrid grid(a, prob.b, n);
    const Trajectory x = Trajectory::sample(grid, 1, [a](double t) { return Vector::Constant(1, std::sin(t - a)); });
    const Trajectory y = Trajectory::sample(grid, 1, [a](double t) { return Vector::Constant(1, (t - a) * (t - a)); });
    const Trajectory ones = Trajectory::constant(grid, Vector::Constant(1, 1.0));
    ibp.push_back(integration_by_parts_residual(x, y, prob.dist));
    relation.push_back(rl_caputo_relation_residual(y, prob.dist, Side::Left));
    const double c = distributed_caputo_left(ones, prob.dist).max_abs();
    constant = std::max(constant, c);
    ordered row{{"n_steps", n}, {"integration_by_parts", ibp.back()}, {"rl_caputo_relation", relation.back()},
                {"caputo_of_constant", c}};
    if (ibp.size() > 1) {
      row["integration_by_parts_order"] = empirical_order(ibp[ibp.size() - 2], ibp.back());
      row["rl_caputo_relation_order"] = empirical_order(relation[relation.size() - 2], relation.back());
    }
    rows.push_back(row);
  }
  bool ibp_decreasing = true;
  bool relation_decreasing = true;
  for (std::size_t k = 1; k < ibp.size(); ++k) {
    ibp_decreasing = ibp_decreasing && ibp[k] < ibp[k - 1];
    relation_decreasing = relation_decreasing && relation[k] < relation[k - 1];
  }
  const bool constants_vanish = constant <= 1e-12;
  const bool passed = ibp_decreasing && relation_decreasing && constants_vanish;

  ordered report = common_header("probe", spec);
  report["kind"] = "operators";
  report["test_functions"] = {{"x", "sin(t - a)"}, {"y", "(t - a)^2"}};
  report["table"] = rows;
  report["integration_by_parts_decreasing"] = ibp_decreasing;
  report["rl_caputo_relation_decreasing"] = relation_decreasing;
  report["caputo_of_constant_max"] = constant;
  report["passed"] = passed;
  emit_report(report, opts.out_path, out);
  return static_cast<int>(passed ? kExitOk : kExitFail);
}

}  // namespace

int cmd_probe(const ProbeOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (opts.kind != "continuity" && opts.kind != "variational" && opts.kind != "operators") {
      throw SpecError("kind", "probe kind must be continuity, variational or operators");
    }
    const ProblemSpec spec = load_problem_spec(opts.spec_path, opts.overrides);
    if (opts.kind == "continuity") return probe_continuity(opts, spec, out);
    if (opts.kind == "variational") return probe_variational(opts, spec, out);
    return probe_operators(opts, spec, out);
  });
}

}  // namespace dofoc::cli
