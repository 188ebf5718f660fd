#pragma once

// Iteration-count experiment over random instances: practical iterations
// against iteration_bound and reference_iteration_bound, per dimension.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "pcqp/problem.hpp"

namespace pcqp {

struct BenchConfig {
  std::vector<std::size_t> dims;
  std::size_t instances_per_dim = 5;
  double eps = 1e-6;
  std::uint64_t base_seed = 0;
  /// n and seed are overwritten per instance.
  GeneratorConfig generator;
  /// Worker threads; results do not depend on it.
  unsigned jobs = 1;
};

struct BenchRow {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::size_t iterations = 0;
  std::size_t n_max = 0;
  std::size_t n_ref = 0;
  double final_gap = 0.0;
  bool converged = false;
  bool certificate_ok = false;
  double elapsed = 0.0;  // seconds, informational only
};

/// splitmix64(splitmix64(base ^ splitmix64(n)) + index)
std::uint64_t instance_seed(std::uint64_t base_seed, std::size_t n, std::size_t index) noexcept;

/// Solves every (dim, instance) pair; rows are ordered by dim then instance.
/// Failures are recorded in the row rather than thrown.
std::vector<BenchRow> run_suite(const BenchConfig& cfg);

struct DimSummary {
  std::size_t n = 0;
  std::size_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample (N − 1) standard deviation; 0 if count == 1
  bool single_sample = false;
  std::size_t min = 0;
  std::size_t max = 0;
  double max_ratio = 0.0;  // max over rows of iterations / n_max
  std::size_t n_max = 0;
  std::size_t n_ref = 0;
};

class EmptyGroup : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// One summary per distinct n, in order of first appearance.
std::vector<DimSummary> summarize(std::span<const BenchRow> rows);

/// Least-squares slope of log(mean iterations) against log(n).
double loglog_slope(std::span<const DimSummary> summaries);

void write_bench_csv(std::ostream& out, std::span<const BenchRow> rows);
void write_summary_csv(std::ostream& out, std::span<const DimSummary> summaries);

}  // namespace pcqp
