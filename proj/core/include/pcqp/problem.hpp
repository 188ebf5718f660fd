#pragma once

// Box-constrained QP instances:
//
//   minimize   ½ zᵀHz + hᵀz
//   subject to −1 ≤ z ≤ 1 (componentwise)
//
// plus the `.bqp` text format and a seeded random-instance generator.
//
// `.bqp` layout (ASCII, '\n' line endings):
//
//   n
//   H(0,0) ... H(0,n-1)
//   ...
//   H(n-1,0) ... H(n-1,n-1)
//   h(0) ... h(n-1)
//
// Text after '#' on any line is a comment, blank lines are ignored, and H
// must be exactly symmetric.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pcqp/linalg.hpp"

namespace pcqp {

class BoxQP {
 public:
  BoxQP() = default;
  /// Throws LengthMismatch if h.size() != H.order().
  BoxQP(SymMatrix H, Vector h);

  std::size_t dim() const noexcept { return h_.size(); }
  const SymMatrix& H() const noexcept { return H_; }
  const Vector& h() const noexcept { return h_; }

  /// ½ zᵀHz + hᵀz
  double objective(std::span<const double> z) const;

  friend bool operator==(const BoxQP&, const BoxQP&) = default;

 private:
  SymMatrix H_;
  Vector h_;
};

enum class FindingKind { kEmptyDimension, kNonFiniteEntry };

struct Finding {
  FindingKind kind;
  std::string detail;
};

struct ValidationReport {
  std::vector<Finding> findings;

  bool valid() const noexcept { return findings.empty(); }
};

/// Checks n >= 1 and that every entry of H and h is finite. Positive
/// semidefiniteness is not checked here; the solver reports it when a
/// factorization breaks down.
ValidationReport validate(const BoxQP& p);

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what);

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// A row holds the wrong number of values, or rows are missing.
class DimensionError : public ParseError {
 public:
  using ParseError::ParseError;
};

BoxQP parse_bqp(std::istream& in);
BoxQP parse_bqp(std::string_view text);
BoxQP read_bqp_file(const std::string& path);

/// Canonical `.bqp` text, 17 significant digits per value.
std::string serialize_bqp(const BoxQP& p);

struct GeneratorConfig {
  std::size_t n = 10;
  std::uint64_t seed = 0;
  double regularization = 1e-3;  // δ
  double h_scale = 1.0;
};

/// H = W·Wᵀ/n + δ·I with W standard normal (n x n), h = h_scale · N(0, I).
/// W and h come from separate seed-derived streams.
BoxQP random_boxqp(const GeneratorConfig& cfg);

}  // namespace pcqp
