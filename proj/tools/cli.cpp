#include "cli.hpp"

#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "CLI11.hpp"
#include "pcqp/bench.hpp"
#include "pcqp/certify.hpp"
#include "pcqp/csv.hpp"
#include "pcqp/ipm.hpp"
#include "pcqp/mpc.hpp"
#include "pcqp/problem.hpp"

namespace pcqp::cli {

namespace {

constexpr double kDefaultEps = 1e-6;

struct SolveArgs {
  std::string file;
  double eps = kDefaultEps;
  std::string trace;
  bool quiet = false;
  std::size_t max_iter = 0;
};

struct CertifyArgs {
  std::size_t n = 0;
  double eps = kDefaultEps;
};

struct BenchArgs {
  std::vector<std::size_t> dims;
  std::size_t per_dim = 5;
  double eps = kDefaultEps;
  std::uint64_t seed = 0;
  std::string out;
  unsigned jobs = 1;
  double delta = 1e-3;
  double h_scale = 1.0;
};

struct MpcArgs {
  std::string scenario;
  std::size_t steps = 0;
  double eps = kDefaultEps;
  std::string out;
  std::string trace;
};

// Writes to `path`, or to `fallback` when path is empty.
template <typename Fn>
bool with_output(const std::string& path, std::ostream& fallback, std::ostream& err, Fn&& write) {
  if (path.empty()) {
    write(fallback);
    return true;
  }
  std::ofstream file(path);
  if (!file) {
    err << fmt::format("error: cannot open '{}' for writing\n", path);
    return false;
  }
  write(file);
  return true;
}

int exit_code_for(SolveStatus status) {
  switch (status) {
    case SolveStatus::kConverged: return kOk;
    case SolveStatus::kIterationLimit: return kIterationLimit;
    case SolveStatus::kNumericalFailure: return kNumericalFailure;
  }
  return kNumericalFailure;
}

int run_solve(const SolveArgs& args, std::ostream& out, std::ostream& err) {
  BoxQP p;
  try {
    p = read_bqp_file(args.file);
  } catch (const std::exception& e) {
    err << fmt::format("error: {}: {}\n", args.file, e.what());
    return kUsage;
  }
  if (const auto report = validate(p); !report.valid()) {
    for (const Finding& f : report.findings) err << fmt::format("error: {}: {}\n", args.file, f.detail);
    return kUsage;
  }

  const SolveResult result = solve(p, args.eps, SolveOptions{args.max_iter});
  out << "status " << to_string(result.status) << '\n';
  out << "iterations " << result.iterations << '\n';
  out << "n_max " << result.n_max << '\n';
  out << "final_gap " << format_real(result.final_gap) << '\n';
  out << "z";
  for (double v : result.z) out << ' ' << format_real(v);
  out << '\n';

  if (!result.final_iterate.z.empty()) {
    const auto [sp, start] = initialize(p);
    const ResidualReport r = kkt_residuals(sp, result.final_iterate);
    out << "kkt_stationarity " << format_real(r.stationarity) << '\n';
    out << "kkt_upper_linkage " << format_real(r.upper_linkage) << '\n';
    out << "kkt_lower_linkage " << format_real(r.lower_linkage) << '\n';
    out << "kkt_min_positive " << format_real(r.min_positive) << '\n';
  }
  if (!args.quiet) {
    const CertificateReport cert = check_certificates(result.trace, p.dim());
    out << "certificates " << (cert.ok() ? "ok" : "violated") << ' ' << cert.iterations_checked << '\n';
    for (const CertificateViolation& v : cert.violations) {
      out << fmt::format("violation k={} {} value={:.17g} bound={:.17g}\n", v.k, to_string(v.which), v.value,
                         v.bound);
    }
  }
  if (!result.failure.empty()) err << "error: " << result.failure << '\n';

  if (!args.trace.empty()) {
    const bool ok =
        with_output(args.trace, out, err, [&](std::ostream& os) { write_trace_csv(os, result.trace); });
    if (!ok) return kUsage;
  }
  return exit_code_for(result.status);
}

int run_certify(const CertifyArgs& args, std::ostream& out, std::ostream& err) {
  try {
    const CertificateQuery q{args.n, args.eps};
    const std::size_t n_max = iteration_bound(q);
    const std::size_t n_ref = reference_iteration_bound(q);
    out << "n " << args.n << '\n';
    out << "eps " << format_real(args.eps) << '\n';
    out << "n_max " << n_max << '\n';
    out << "n_ref " << n_ref << '\n';
  } catch (const InvalidTolerance& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kOk;
}

int run_bench(const BenchArgs& args, std::ostream& out, std::ostream& err) {
  BenchConfig cfg;
  cfg.dims = args.dims;
  cfg.instances_per_dim = args.per_dim;
  cfg.eps = args.eps;
  cfg.base_seed = args.seed;
  cfg.jobs = args.jobs;
  cfg.generator.regularization = args.delta;
  cfg.generator.h_scale = args.h_scale;

  const std::vector<BenchRow> rows = run_suite(cfg);
  if (!with_output(args.out, out, err, [&](std::ostream& os) { write_bench_csv(os, rows); })) return kUsage;
  if (!rows.empty()) {
    err << "# per-dimension summary\n";
    write_summary_csv(err, summarize(rows));
  }
  for (const BenchRow& r : rows) {
    if (!r.converged) return kNumericalFailure;
  }
  return kOk;
}

int run_mpc(const MpcArgs& args, std::ostream& out, std::ostream& err) {
  Scenario sc;
  try {
    sc = read_scenario_file(args.scenario);
    check_dimensions(sc.plant, sc.config);
  } catch (const std::exception& e) {
    err << fmt::format("error: {}: {}\n", args.scenario, e.what());
    return kUsage;
  }
  const std::size_t steps = args.steps > 0 ? args.steps : sc.steps;
  if (steps == 0) {
    err << "error: the closed loop needs at least one step\n";
    return kUsage;
  }

  ClosedLoopReport report;
  try {
    report = closed_loop(sc.plant, sc.config, steps, args.eps);
  } catch (const ClosedLoopError& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.status());
  }

  if (!with_output(args.out, out, err, [&](std::ostream& os) { write_closed_loop_csv(os, report); })) return kUsage;
  if (!args.trace.empty()) {
    const bool ok = with_output(args.trace, out, err, [&](std::ostream& os) {
      os << "step," << trace_csv_header() << '\n';
      for (const StepRecord& s : report.steps) write_trace_csv(os, s.trace, fmt::format("{},", s.step), {}, false);
    });
    if (!ok) return kUsage;
  }
  err << fmt::format(
      "# qp_dim {} n_max {} mean_iterations {:.6g} std_iterations {:.6g} max_iterations {} "
      "constraint_violations {} budget_violations {}\n",
      report.qp_dim, report.n_max, report.mean_iterations, report.std_iterations, report.max_iterations,
      report.constraint_violations, report.budget_violations);
  return kOk;
}

}  // namespace

int run_cli(std::span<const char* const> argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Predictor-corrector interior-point solver for box-constrained QPs"};
  app.name("pcqp");
  app.require_subcommand(1);

  SolveArgs solve_args;
  auto* solve_cmd = app.add_subcommand("solve", "Solve a .bqp problem file");
  solve_cmd->add_option("file", solve_args.file, "Problem file")->required();
  solve_cmd->add_option("--eps", solve_args.eps, "Stopping tolerance on the scaled gap vᵀs")
      ->check(CLI::PositiveNumber);
  solve_cmd->add_option("--trace", solve_args.trace, "Write the per-iteration trace CSV here");
  solve_cmd->add_flag("--quiet", solve_args.quiet, "Skip the certificate report");
  solve_cmd->add_option("--max-iter", solve_args.max_iter, "Stop earlier than the certified bound (0: no cap)");

  CertifyArgs certify_args;
  auto* certify_cmd = app.add_subcommand("certify", "Print worst-case and reference iteration counts");
  certify_cmd->add_option("--n", certify_args.n, "Problem dimension")->required();
  certify_cmd->add_option("--eps", certify_args.eps, "Stopping tolerance");

  BenchArgs bench_args;
  auto* bench_cmd = app.add_subcommand("bench", "Iteration counts on random instances (CSV)");
  bench_cmd->add_option("--dims", bench_args.dims, "Comma-separated dimensions")->required()->delimiter(',');
  bench_cmd->add_option("--per-dim", bench_args.per_dim, "Instances per dimension");
  bench_cmd->add_option("--eps", bench_args.eps, "Stopping tolerance")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seed", bench_args.seed, "Base seed");
  bench_cmd->add_option("--out", bench_args.out, "CSV output path (default stdout)");
  bench_cmd->add_option("--jobs", bench_args.jobs, "Worker threads")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--delta", bench_args.delta, "Diagonal regularization of H")->check(CLI::NonNegativeNumber);
  bench_cmd->add_option("--h-scale", bench_args.h_scale, "Scale of h")->check(CLI::PositiveNumber);

  MpcArgs mpc_args;
  auto* mpc_cmd = app.add_subcommand("mpc", "Closed-loop MPC simulation from a scenario file (CSV)");
  mpc_cmd->add_option("scenario", mpc_args.scenario, "Scenario file")->required();
  mpc_cmd->add_option("--steps", mpc_args.steps, "Override the scenario's step count");
  mpc_cmd->add_option("--eps", mpc_args.eps, "Stopping tolerance")->check(CLI::PositiveNumber);
  mpc_cmd->add_option("--out", mpc_args.out, "CSV output path (default stdout)");
  mpc_cmd->add_option("--trace", mpc_args.trace, "Write per-step iteration traces here");

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*solve_cmd) return run_solve(solve_args, out, err);
    if (*certify_cmd) return run_certify(certify_args, out, err);
    if (*bench_cmd) return run_bench(bench_args, out, err);
    if (*mpc_cmd) return run_mpc(mpc_args, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace pcqp::cli
