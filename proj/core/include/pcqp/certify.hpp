#pragma once

// Closed-form iteration counts.
//
// iteration_bound is the worst-case number of predictor-corrector iterations
// needed to reach vᵀs <= eps from the cold start:
//
//   N_max = ⌈ log(2n/ε) / (−2·log(1 − 0.2348/√(2n))) ⌉
//
// reference_iteration_bound is the exact iteration count of the earlier
// full-Newton path-following method, kept for comparison:
//
//   N_ref = ⌈ log(2n/ε) / (−2·log(√(2n) / (√(2n) + √2 − 1))) ⌉ + 1
//
// Both are evaluated in double precision. A ceiling taken just above an
// integer could be off by one; the unit tests compare against a 50-digit
// evaluation over n <= 1e6, ε >= 1e-12 and found no disagreement.
//
// The contraction constant derivation assumes n >= 2. n = 1 is still
// evaluated.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace pcqp {

/// Per-iteration contraction constant: μ⁺ <= (1 − kContraction/√(2n))²·μ.
inline constexpr double kContraction = 0.2348;

class InvalidTolerance : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct CertificateQuery {
  std::size_t n = 1;
  double eps = 1e-6;
};

/// Throws InvalidTolerance unless n >= 1 and 0 < eps < 2n.
void check_query(const CertificateQuery& q);

std::size_t iteration_bound(const CertificateQuery& q);
std::size_t reference_iteration_bound(const CertificateQuery& q);

/// Contraction factor (1 − 0.2348/√(2n))² applied to μ each iteration.
double contraction_factor(std::size_t n);

struct BoundRow {
  std::size_t n;
  std::size_t n_max;
  std::size_t n_ref;
};

std::vector<BoundRow> bound_table(std::span<const std::size_t> n_values, double eps);

}  // namespace pcqp
