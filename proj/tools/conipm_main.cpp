// Command-line front end: solve a conic problem from a file at a target
// duality gap, or run the numerical verification suites.

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "conipm/io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNoProgress = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitInput = 4;

int exit_code_for(conipm::SolveStatus status) {
  switch (status) {
    case conipm::SolveStatus::Converged: return kExitOk;
    case conipm::SolveStatus::NoProgress:
    case conipm::SolveStatus::IterationLimit: return kExitNoProgress;
    case conipm::SolveStatus::NumericalFailure:
    case conipm::SolveStatus::InvariantViolated: return kExitNumerical;
  }
  return kExitNumerical;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open input file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// --output is resolved against CONIPM_OUTPUT_DIR when relative.
std::string resolve_output_path(const std::string& path) {
  const char* dir = std::getenv("CONIPM_OUTPUT_DIR");
  if (dir == nullptr || path.empty() || path.front() == '/') return path;
  std::string d(dir);
  if (!d.empty() && d.back() != '/') d += '/';
  return d + path;
}

void emit(const std::string& text, const std::string& output_path) {
  if (output_path.empty()) {
    std::cout << text;
    return;
  }
  const std::string resolved = resolve_output_path(output_path);
  std::ofstream out(resolved);
  if (!out) throw std::runtime_error("cannot open output file '" + resolved + "'");
  out << text;
}

struct SolveArgs {
  std::string input;
  std::string output;
  std::string trace_path;
  double epsilon = 0.0;
  std::string method = "damped";
  double lambda_tol = 1e-12;
  int max_iters = 5000;
  bool hot_start = false;
  bool diagnostics = false;
};

int run_solve(const SolveArgs& args) {
  using namespace conipm;
  if (!(args.epsilon > 0.0)) {
    std::cerr << "error: epsilon must be positive\n";
    return kExitInput;
  }
  const ProblemInput input = parse_problem(read_file(args.input));
  const ValidatedProblem vp = validate(input.problem);

  SolverOptions opts;
  opts.method = args.method == "path" ? SolveMethod::PathFollowing : SolveMethod::DampedNewton;
  opts.epsilon = args.epsilon;
  opts.lambda_tol = args.lambda_tol;
  opts.max_iters = args.max_iters;

  std::ofstream trace_out;
  if (!args.trace_path.empty()) {
    trace_out.open(resolve_output_path(args.trace_path));
    if (!trace_out) {
      std::cerr << "error: cannot open trace file '" << args.trace_path << "'\n";
      return kExitInput;
    }
    trace_out << write_trace_header();
    opts.trace = true;
    opts.on_iteration = [&trace_out](const IterationRecord& rec) {
      trace_out << write_trace_record(rec);
    };
  }

  ReferencePoints refs;
  if (args.hot_start) {
    if (!input.hot_start) {
      std::cerr << "error: --hot-start requires hot.x/hot.s/hot.y in the problem file\n";
      return kExitInput;
    }
    refs = hot_start_refs(vp, *input.hot_start);
  } else if (input.ref_x) {
    refs = default_refs(vp, *input.ref_x);
  } else {
    refs = default_refs(vp, vp.barrier().cone().canonical_interior_point());
  }
  AuxProblem aux(vp, args.epsilon, refs);
  const SolveReport rep = opts.method == SolveMethod::DampedNewton
                              ? damped_newton_solve(aux, opts)
                              : path_follow_solve(aux, opts);

  std::optional<BoundLedger> ledger;
  if (args.diagnostics && rep.status == SolveStatus::Converged) {
    const CentralPathPoint cp1 = central_path_point(vp, 1.0, rep.recovered.x);
    const double sigma = measure_sigma(vp.barrier(), refs.x_ref, refs.s_ref, cp1.x, cp1.s);
    const double mu = measure_mu(vp.barrier(), refs.x_w, refs.x_ref);
    ledger = predicted_bounds(aux, sigma, /*sigma_placeholder=*/false, mu,
                              rep.iters_damped > 0 ? rep.iters_damped : -1,
                              rep.iters_path > 0 ? rep.iters_path : -1);
  }
  emit(write_report(rep, opts.method, args.epsilon, opts, ledger), args.output);
  return exit_code_for(rep.status);
}

struct DiagArgs {
  std::string input;
  std::string output;
  std::string suite;
  unsigned seed = 0;
  double epsilon = 1e-3;
};

int run_diagnostics(const DiagArgs& args) {
  using namespace conipm;
  const ProblemInput input = parse_problem(read_file(args.input));
  const ValidatedProblem vp = validate(input.problem);
  const BarrierOracle& barrier = vp.barrier();
  std::string out = "format_version: 1\nkind: diagnostics_report\nsuite: " + args.suite +
                    "\nseed: " + std::to_string(args.seed) + "\n";
  int checks = 0;
  int violations = 0;

  if (args.suite == "barrier-identities") {
    std::mt19937_64 rng(args.seed);
    const double nu = barrier.nu();
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
      const Vector x = random_interior_point(barrier.cone(), rng);
      const Vector g = barrier.grad(x);
      const Matrix H = barrier.hess(x);
      ++checks;
      if (std::abs(g.dot(x) + nu) > 1e-12 * nu) ++violations;
      ++checks;
      if ((H * x + g).norm() > 1e-10 * g.norm()) ++violations;
      ++checks;
      if (std::abs(x.dot(H * x) - nu) > 1e-10 * nu) ++violations;
      ++checks;
      const double tau = 3.0;
      if (std::abs(barrier.value(tau * x) - (barrier.value(x) - nu * std::log(tau))) > 1e-10)
        ++violations;
      ++checks;
      if (std::abs(barrier.value(x) + barrier.dual_value(-g) + nu) > 1e-10 * nu) ++violations;
      const Vector s = -g;
      ++checks;
      if ((barrier.dual_grad(s) + x).norm() > 1e-8 * (1.0 + x.norm())) ++violations;
      ++checks;
      Vector h(barrier.dim());
      for (int j = 0; j < barrier.dim(); ++j) h(j) = normal(rng);
      if (!barrier.scf_third_derivative_check(x, h)) ++violations;
      ++checks;
      if (!barrier.dikin_check(x, 0.9, 20, static_cast<unsigned>(args.seed + 1000 + i)))
        ++violations;
    }
  } else if (args.suite == "hessian-bounds") {
    const HessianBoundReport rep = check_hessian_bounds(barrier, 200, args.seed);
    checks = rep.pairs_checked + rep.simplex_checked;
    violations = rep.pair_violations + rep.simplex_violations;
    out += "c_cone: " + format_double(rep.c_cone) + "\n";
  } else if (args.suite == "central-path") {
    SolverOptions opts;
    opts.epsilon = args.epsilon;
    AuxProblem aux(vp, args.epsilon,
                   default_refs(vp, input.ref_x ? *input.ref_x
                                                : vp.barrier().cone().canonical_interior_point()));
    const SolveReport rep = damped_newton_solve(aux, opts);
    if (rep.status != SolveStatus::Converged) {
      out += "error: reference solve did not converge\n";
      emit(out, args.output);
      return kExitNumerical;
    }
    const Vector start = rep.recovered.x;
    for (double t : {0.1, 1.0, 10.0}) {
      const CentralPathPoint cp = central_path_point(vp, t, start);
      ++checks;
      if (central_path_violation(vp, cp) > 1e-8) ++violations;
    }
    for (auto [t1, t2] : {std::pair{0.1, 1.0}, std::pair{1.0, 10.0}}) {
      const PathOrderingReport rep2 = check_path_ordering(vp, t1, t2, start);
      checks += 4;
      violations += rep2.violations();
    }
  } else if (args.suite == "bound-ledger") {
    SolverOptions opts;
    opts.epsilon = args.epsilon;
    ReferencePoints refs = default_refs(
        vp, input.ref_x ? *input.ref_x : vp.barrier().cone().canonical_interior_point());
    AuxProblem aux(vp, args.epsilon, refs);
    const SolveReport rep_dn = damped_newton_solve(aux, opts);
    const SolveReport rep_pf = path_follow_solve(aux, opts);
    if (rep_dn.status != SolveStatus::Converged || rep_pf.status != SolveStatus::Converged) {
      out += "error: reference solves did not converge\n";
      emit(out, args.output);
      return kExitNumerical;
    }
    const CentralPathPoint cp1 = central_path_point(vp, 1.0, rep_dn.recovered.x);
    const double sigma = measure_sigma(barrier, refs.x_ref, refs.s_ref, cp1.x, cp1.s);
    const double mu = measure_mu(barrier, refs.x_w, refs.x_ref);
    const BoundLedger ledger = predicted_bounds(aux, sigma, false, mu, rep_dn.iters_damped,
                                                rep_pf.iters_path);
    checks = 2;
    if (!(ledger.actual_path <= ledger.bound_path)) ++violations;
    if (!(ledger.actual_damped <= 5.0 * ledger.bound_damped)) ++violations;
    out += "ledger.sigma: " + format_double(ledger.sigma) + "\n";
    out += "ledger.mu: " + format_double(ledger.mu) + "\n";
    out += "ledger.zeta: " + format_double(ledger.zeta) + "\n";
    out += "ledger.c_cone: " + format_double(ledger.c_cone) + "\n";
    out += "ledger.bound_damped: " + format_double(ledger.bound_damped) + "\n";
    out += "ledger.bound_path: " + format_double(ledger.bound_path) + "\n";
    out += "ledger.actual_damped: " + std::to_string(ledger.actual_damped) + "\n";
    out += "ledger.actual_path: " + std::to_string(ledger.actual_path) + "\n";
    out += "ledger.ratio_damped: " +
           format_double(ledger.actual_damped / ledger.bound_damped) + "\n";
  } else {
    std::cerr << "error: unknown suite '" << args.suite << "'\n";
    return kExitInput;
  }
  out += "checks: " + std::to_string(checks) + "\n";
  out += "violations: " + std::to_string(violations) + "\n";
  emit(out, args.output);
  return violations == 0 ? kExitOk : kExitNoProgress;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"conipm: infeasible-start primal-dual conic solver"};
  app.require_subcommand(1);

  SolveArgs solve_args;
  CLI::App* solve_cmd = app.add_subcommand("solve", "solve a problem file at target gap epsilon");
  solve_cmd->add_option("--input", solve_args.input, "problem file")->required();
  solve_cmd->add_option("--epsilon", solve_args.epsilon, "target duality gap (> 0)")->required();
  solve_cmd->add_option("--method", solve_args.method, "damped | path")
      ->check(CLI::IsMember({"damped", "path"}));
  solve_cmd->add_option("--lambda-tol", solve_args.lambda_tol, "final decrement tolerance");
  solve_cmd->add_option("--max-iters", solve_args.max_iters, "iteration cap");
  solve_cmd->add_option("--trace", solve_args.trace_path, "per-iteration trace file");
  solve_cmd->add_option("--output", solve_args.output, "report file (default: stdout)");
  solve_cmd->add_flag("--hot-start", solve_args.hot_start, "use the hot triple from the file");
  solve_cmd->add_flag("--diagnostics", solve_args.diagnostics,
                      "measure sigma/mu and append the bound ledger");

  DiagArgs diag_args;
  CLI::App* diag_cmd = app.add_subcommand("diagnostics", "run a numerical verification suite");
  diag_cmd->add_option("--suite", diag_args.suite,
                       "barrier-identities | hessian-bounds | central-path | bound-ledger")
      ->required();
  diag_cmd->add_option("--input", diag_args.input, "problem file")->required();
  diag_cmd->add_option("--seed", diag_args.seed, "random seed");
  diag_cmd->add_option("--epsilon", diag_args.epsilon, "target gap for reference solves");
  diag_cmd->add_option("--output", diag_args.output, "report file (default: stdout)");

  try {
    app.parse(argc, argv);
    if (solve_cmd->parsed()) return run_solve(solve_args);
    return run_diagnostics(diag_args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitInput;
  } catch (const conipm::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const conipm::ValidationError& e) {
    std::cerr << "error: validation failed (" << conipm::to_string(e.issue()) << "): " << e.what()
              << "\n";
    return kExitInput;
  } catch (const conipm::NotInteriorError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const conipm::NotStrictlyFeasibleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const conipm::SingularSystemError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
}
