#include "pcqp/linalg.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

namespace pcqp {

namespace {

void require_same_length(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw LengthMismatch(a.size(), b.size());
}

// Four independent accumulators; the factorization spends nearly all of its
// time in here.
double dot_prefix(const double* a, const double* b, std::size_t len) noexcept {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t k = 0;
  for (; k + 4 <= len; k += 4) {
    s0 += a[k] * b[k];
    s1 += a[k + 1] * b[k + 1];
    s2 += a[k + 2] * b[k + 2];
    s3 += a[k + 3] * b[k + 3];
  }
  for (; k < len; ++k) s0 += a[k] * b[k];
  return (s0 + s1) + (s2 + s3);
}

}  // namespace

LengthMismatch::LengthMismatch(std::size_t lhs, std::size_t rhs)
    : LinalgError(fmt::format("length mismatch: {} vs {}", lhs, rhs)) {}

NotPositiveDefinite::NotPositiveDefinite(std::size_t index, double pivot)
    : LinalgError(fmt::format("matrix is not positive definite: pivot {} is {:.17g}", index, pivot)),
      index_(index),
      pivot_(pivot) {}

SymMatrix::SymMatrix(std::size_t order) : order_(order), data_(order * order, 0.0) {}

SymMatrix SymMatrix::from_lower(std::size_t order, std::span<const double> row_major) {
  if (row_major.size() != order * order) throw LengthMismatch(row_major.size(), order * order);
  SymMatrix m(order);
  for (std::size_t i = 0; i < order; ++i) {
    for (std::size_t j = 0; j <= i; ++j) m.set(i, j, row_major[i * order + j]);
  }
  return m;
}

SymMatrix SymMatrix::identity(std::size_t order) {
  SymMatrix m(order);
  for (std::size_t i = 0; i < order; ++i) m.data_[i * order + i] = 1.0;
  return m;
}

SymMatrix SymMatrix::diagonal(std::span<const double> diag) {
  SymMatrix m(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m.data_[i * diag.size() + i] = diag[i];
  return m;
}

double SymMatrix::max_abs() const noexcept {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

double SymMatrix::trace() const noexcept {
  double t = 0.0;
  for (std::size_t i = 0; i < order_; ++i) t += data_[i * order_ + i];
  return t;
}

bool SymMatrix::all_finite() const noexcept { return pcqp::all_finite(data_); }

SymMatrix SymMatrix::scaled(double factor) const {
  SymMatrix m = *this;
  for (double& v : m.data_) v *= factor;
  return m;
}

Vector SymMatrix::multiply(std::span<const double> x) const {
  if (x.size() != order_) throw LengthMismatch(x.size(), order_);
  Vector y(order_);
  for (std::size_t i = 0; i < order_; ++i) y[i] = dot_prefix(data_.data() + i * order_, x.data(), order_);
  return y;
}

double SymMatrix::quadratic_form(std::span<const double> x) const { return dot(x, multiply(x)); }

Matrix::Matrix(std::size_t rows, std::size_t cols, std::span<const double> row_major)
    : rows_(rows), cols_(cols), data_(row_major.begin(), row_major.end()) {
  if (row_major.size() != rows * cols) throw LengthMismatch(row_major.size(), rows * cols);
}

Matrix Matrix::identity(std::size_t order) {
  Matrix m(order, order);
  for (std::size_t i = 0; i < order; ++i) m(i, i) = 1.0;
  return m;
}

Vector Matrix::multiply(std::span<const double> x) const {
  if (x.size() != cols_) throw LengthMismatch(x.size(), cols_);
  Vector y(rows_);
  for (std::size_t i = 0; i < rows_; ++i) y[i] = dot_prefix(data_.data() + i * cols_, x.data(), cols_);
  return y;
}

Matrix Matrix::multiply(const Matrix& rhs) const {
  if (rhs.rows_ != cols_) throw LengthMismatch(rhs.rows_, cols_);
  Matrix out(rows_, rhs.cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = 0; k < cols_; ++k) {
      const double a = (*this)(i, k);
      for (std::size_t j = 0; j < rhs.cols_; ++j) out(i, j) += a * rhs(k, j);
    }
  }
  return out;
}

CholeskyFactor::CholeskyFactor(const SymMatrix& a) : order_(a.order()), lower_(a.data().begin(), a.data().end()) {
  const std::size_t n = order_;
  double* l = lower_.data();
  for (std::size_t i = 0; i < n; ++i) {
    double* row_i = l + i * n;
    for (std::size_t j = 0; j < i; ++j) {
      const double* row_j = l + j * n;
      row_i[j] = (row_i[j] - dot_prefix(row_i, row_j, j)) / row_j[j];
    }
    const double pivot = row_i[i] - dot_prefix(row_i, row_i, i);
    if (!(pivot > kPivotFloor)) throw NotPositiveDefinite(i, pivot);
    row_i[i] = std::sqrt(pivot);
  }
}

Vector CholeskyFactor::solve(std::span<const double> b) const {
  if (b.size() != order_) throw LengthMismatch(b.size(), order_);
  const std::size_t n = order_;
  const double* l = lower_.data();
  Vector x(b.begin(), b.end());
  // L y = b
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = (x[i] - dot_prefix(l + i * n, x.data(), i)) / l[i * n + i];
  }
  // Lᵀ x = y, column-oriented so L is still walked by rows
  for (std::size_t i = n; i-- > 0;) {
    x[i] /= l[i * n + i];
    const double xi = x[i];
    const double* row_i = l + i * n;
    for (std::size_t k = 0; k < i; ++k) x[k] -= row_i[k] * xi;
  }
  return x;
}

Vector spd_solve(const SymMatrix& a, std::span<const double> b) {
  if (a.order() != b.size()) throw LengthMismatch(a.order(), b.size());
  return CholeskyFactor(a).solve(b);
}

Vector hadamard(std::span<const double> a, std::span<const double> b) {
  require_same_length(a, b);
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  require_same_length(a, b);
  return dot_prefix(a.data(), b.data(), a.size());
}

double norm2(std::span<const double> a) { return std::sqrt(dot_prefix(a.data(), a.data(), a.size())); }

double norm_inf(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

bool all_finite(std::span<const double> a) noexcept {
  return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); });
}

Vector axpy(std::span<const double> a, double factor, std::span<const double> b) {
  require_same_length(a, b);
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + factor * b[i];
  return out;
}

}  // namespace pcqp
