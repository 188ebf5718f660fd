#pragma once

// Dense vectors, symmetric matrices and an unpivoted Cholesky solve.
//
// Everything here is sized for the problems this library targets (n up to a
// few thousand); storage is dense row-major and no routine allocates more than
// one order x order buffer.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pcqp {

using Vector = std::vector<double>;

/// Smallest Cholesky pivot accepted before the factorization is declared failed.
inline constexpr double kPivotFloor = 1e-300;

class LinalgError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LengthMismatch : public LinalgError {
 public:
  LengthMismatch(std::size_t lhs, std::size_t rhs);
};

/// Raised when a Cholesky pivot falls to or below kPivotFloor.
class NotPositiveDefinite : public LinalgError {
 public:
  NotPositiveDefinite(std::size_t index, double pivot);

  std::size_t index() const noexcept { return index_; }
  double pivot() const noexcept { return pivot_; }

 private:
  std::size_t index_;
  double pivot_;
};

/// Square symmetric matrix stored densely in row-major order. Both triangles
/// are stored and kept identical.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t order);

  /// Builds from a full row-major order x order array. Only the lower triangle
  /// (including the diagonal) is read; the upper triangle is mirrored from it.
  static SymMatrix from_lower(std::size_t order, std::span<const double> row_major);
  static SymMatrix identity(std::size_t order);
  static SymMatrix diagonal(std::span<const double> diag);

  std::size_t order() const noexcept { return order_; }
  bool empty() const noexcept { return order_ == 0; }

  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * order_ + j]; }

  /// Writes both (i, j) and (j, i).
  void set(std::size_t i, std::size_t j, double value) noexcept {
    data_[i * order_ + j] = value;
    data_[j * order_ + i] = value;
  }
  void add_to_diagonal(std::size_t i, double value) noexcept { data_[i * order_ + i] += value; }

  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * order_, order_};
  }
  std::span<const double> data() const noexcept { return data_; }

  /// max |a_ij|, 0 for an empty matrix.
  double max_abs() const noexcept;
  double trace() const noexcept;
  bool all_finite() const noexcept;

  SymMatrix scaled(double factor) const;
  Vector multiply(std::span<const double> x) const;
  /// xᵀ A x
  double quadratic_form(std::span<const double> x) const;

  friend bool operator==(const SymMatrix&, const SymMatrix&) = default;

 private:
  std::size_t order_ = 0;
  std::vector<double> data_;
};

/// General rows x cols matrix, row-major.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
  /// Throws LengthMismatch if row_major.size() != rows * cols.
  Matrix(std::size_t rows, std::size_t cols, std::span<const double> row_major);
  static Matrix identity(std::size_t order);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }
  std::span<const double> data() const noexcept { return data_; }

  Vector multiply(std::span<const double> x) const;
  Matrix multiply(const Matrix& rhs) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Lower-triangular Cholesky factor L with A = L·Lᵀ, no pivoting.
class CholeskyFactor {
 public:
  /// Throws NotPositiveDefinite if any pivot is <= kPivotFloor (or NaN).
  explicit CholeskyFactor(const SymMatrix& a);

  std::size_t order() const noexcept { return order_; }
  Vector solve(std::span<const double> b) const;

 private:
  std::size_t order_;
  std::vector<double> lower_;  // row-major, only j <= i is meaningful
};

/// Solves A·x = b for symmetric positive definite A.
Vector spd_solve(const SymMatrix& a, std::span<const double> b);

/// Elementwise product a ∘ b.
Vector hadamard(std::span<const double> a, std::span<const double> b);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double norm_inf(std::span<const double> a);
bool all_finite(std::span<const double> a) noexcept;

/// a + factor·b
Vector axpy(std::span<const double> a, double factor, std::span<const double> b);

}  // namespace pcqp
