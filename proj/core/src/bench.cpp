#include "pcqp/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ostream>
#include <thread>

#include "pcqp/certify.hpp"
#include "pcqp/csv.hpp"
#include "pcqp/ipm.hpp"
#include "pcqp/random.hpp"

namespace pcqp {

std::uint64_t instance_seed(std::uint64_t base_seed, std::size_t n, std::size_t index) noexcept {
  return splitmix64(splitmix64(base_seed ^ splitmix64(n)) + index);
}

namespace {

BenchRow run_one(const BenchConfig& cfg, std::size_t n, std::size_t index) {
  BenchRow row;
  row.n = n;
  row.seed = instance_seed(cfg.base_seed, n, index);

  GeneratorConfig gen = cfg.generator;
  gen.n = n;
  gen.seed = row.seed;

  const auto start = std::chrono::steady_clock::now();
  try {
    const BoxQP p = random_boxqp(gen);
    const SolveResult result = solve(p, cfg.eps);
    row.iterations = result.iterations;
    row.n_max = result.n_max;
    row.final_gap = result.final_gap;
    row.converged = result.status == SolveStatus::kConverged;
    row.certificate_ok = check_certificates(result.trace, n).ok();
    if (cfg.eps < 2.0 * static_cast<double>(n)) row.n_ref = reference_iteration_bound({n, cfg.eps});
  } catch (const std::exception&) {
    row.converged = false;
    row.certificate_ok = false;
  }
  row.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

}  // namespace

std::vector<BenchRow> run_suite(const BenchConfig& cfg) {
  struct Task {
    std::size_t n;
    std::size_t index;
  };
  std::vector<Task> tasks;
  for (std::size_t n : cfg.dims) {
    for (std::size_t i = 0; i < cfg.instances_per_dim; ++i) tasks.push_back({n, i});
  }
  std::stable_sort(tasks.begin(), tasks.end(), [](const Task& a, const Task& b) { return a.n < b.n; });

  std::vector<BenchRow> rows(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < tasks.size(); t = next++) rows[t] = run_one(cfg, tasks[t].n, tasks[t].index);
  };

  const unsigned jobs = std::max(1u, std::min<unsigned>(cfg.jobs, static_cast<unsigned>(tasks.size())));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  return rows;
}

std::vector<DimSummary> summarize(std::span<const BenchRow> rows) {
  if (rows.empty()) throw EmptyGroup("no benchmark rows to summarize");
  std::vector<DimSummary> out;
  for (const BenchRow& row : rows) {
    auto it = std::find_if(out.begin(), out.end(), [&](const DimSummary& s) { return s.n == row.n; });
    if (it != out.end()) continue;

    DimSummary s;
    s.n = row.n;
    s.min = row.iterations;
    double sum = 0.0;
    for (const BenchRow& r : rows) {
      if (r.n != row.n) continue;
      ++s.count;
      sum += static_cast<double>(r.iterations);
      s.min = std::min(s.min, r.iterations);
      s.max = std::max(s.max, r.iterations);
      s.n_max = std::max(s.n_max, r.n_max);
      s.n_ref = std::max(s.n_ref, r.n_ref);
      if (r.n_max > 0) {
        s.max_ratio = std::max(s.max_ratio, static_cast<double>(r.iterations) / static_cast<double>(r.n_max));
      }
    }
    s.mean = sum / static_cast<double>(s.count);
    if (s.count > 1) {
      double sq = 0.0;
      for (const BenchRow& r : rows) {
        if (r.n == row.n) sq += (static_cast<double>(r.iterations) - s.mean) * (static_cast<double>(r.iterations) - s.mean);
      }
      s.stddev = std::sqrt(sq / static_cast<double>(s.count - 1));
    } else {
      s.single_sample = true;
    }
    out.push_back(s);
  }
  return out;
}

double loglog_slope(std::span<const DimSummary> summaries) {
  if (summaries.size() < 2) throw EmptyGroup("slope needs at least two dimensions");
  double sx = 0.0, sy = 0.0;
  for (const DimSummary& s : summaries) {
    sx += std::log(static_cast<double>(s.n));
    sy += std::log(s.mean);
  }
  const double k = static_cast<double>(summaries.size());
  const double mx = sx / k, my = sy / k;
  double sxy = 0.0, sxx = 0.0;
  for (const DimSummary& s : summaries) {
    const double dx = std::log(static_cast<double>(s.n)) - mx;
    sxy += dx * (std::log(s.mean) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

void write_bench_csv(std::ostream& out, std::span<const BenchRow> rows) {
  out << "n,seed,iterations,n_max,n_ref,final_gap,converged,certificate_ok,elapsed_s\n";
  for (const BenchRow& r : rows) {
    out << r.n << ',' << r.seed << ',' << r.iterations << ',' << r.n_max << ',' << r.n_ref << ','
        << format_real(r.final_gap) << ',' << (r.converged ? 1 : 0) << ',' << (r.certificate_ok ? 1 : 0) << ','
        << format_real(r.elapsed) << '\n';
  }
}

void write_summary_csv(std::ostream& out, std::span<const DimSummary> summaries) {
  out << "n,count,mean,std,min,max,max_ratio,n_max,n_ref\n";
  for (const DimSummary& s : summaries) {
    out << s.n << ',' << s.count << ',' << format_real(s.mean) << ',' << format_real(s.stddev) << ',' << s.min
        << ',' << s.max << ',' << format_real(s.max_ratio) << ',' << s.n_max << ',' << s.n_ref << '\n';
  }
}

}  // namespace pcqp
