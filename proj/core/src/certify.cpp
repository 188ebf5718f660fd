#include "pcqp/certify.hpp"

#include <cmath>

#include <fmt/core.h>

namespace pcqp {

void check_query(const CertificateQuery& q) {
  if (q.n == 0) throw InvalidTolerance("dimension n must be at least 1");
  const double two_n = 2.0 * static_cast<double>(q.n);
  if (!(q.eps > 0.0) || !(q.eps < two_n)) {
    throw InvalidTolerance(fmt::format("tolerance must satisfy 0 < eps < 2n = {}, got {}", two_n, q.eps));
  }
}

std::size_t iteration_bound(const CertificateQuery& q) {
  check_query(q);
  const double two_n = 2.0 * static_cast<double>(q.n);
  const double per_iteration = -2.0 * std::log1p(-kContraction / std::sqrt(two_n));
  return static_cast<std::size_t>(std::ceil(std::log(two_n / q.eps) / per_iteration));
}

std::size_t reference_iteration_bound(const CertificateQuery& q) {
  check_query(q);
  const double two_n = 2.0 * static_cast<double>(q.n);
  const double root = std::sqrt(two_n);
  // log(√(2n) / (√(2n) + √2 − 1)) = −log1p((√2 − 1)/√(2n))
  const double per_iteration = 2.0 * std::log1p((std::sqrt(2.0) - 1.0) / root);
  return static_cast<std::size_t>(std::ceil(std::log(two_n / q.eps) / per_iteration)) + 1;
}

double contraction_factor(std::size_t n) {
  const double f = 1.0 - kContraction / std::sqrt(2.0 * static_cast<double>(n));
  return f * f;
}

std::vector<BoundRow> bound_table(std::span<const std::size_t> n_values, double eps) {
  std::vector<BoundRow> rows;
  rows.reserve(n_values.size());
  for (std::size_t n : n_values) {
    const CertificateQuery q{n, eps};
    rows.push_back({n, iteration_bound(q), reference_iteration_bound(q)});
  }
  return rows;
}

}  // namespace pcqp
