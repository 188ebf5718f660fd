#pragma once

// Input-constrained linear MPC condensed into box QPs.
//
// For x⁺ = A x + B u, horizon N and stage cost
//   Σ_{k=1..N} ½(x_k − r)ᵀQ(x_k − r) + Σ_{k=0..N−1} ½u_kᵀR u_k
// the predicted states are X = Φx + G U. In U the problem is
//   ½UᵀH_u U + h_uᵀU,  H_u = GᵀQ̄G + R̄,  h_u = GᵀQ̄(Φx − r̄),
// and the substitution U = D z with D = diag(u_max, …, u_max) maps the input
// bounds |u_i| <= u_max_i onto −1 <= z <= 1.
//
// Scenario files use the `.bqp` conventions ('#' comments, blank lines
// ignored) with keyword sections:
//
//   nx 2
//   nu 1
//   horizon 10
//   steps 50          # optional, default 50
//   A                 # nx rows of nx values
//   1 1
//   0 1
//   B                 # nx rows of nu values
//   0.5
//   1
//   x0                # one row of nx values
//   5 0
//   umax              # one row of nu positive values
//   1
//   Q                 # nx rows, symmetric
//   1 0
//   0 1
//   R                 # nu rows, symmetric
//   0.1
//   ref 0             # optional, repeatable: reference active from step 0
//   0 0
//
// nx and nu must appear before any matrix section.

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pcqp/ipm.hpp"
#include "pcqp/linalg.hpp"
#include "pcqp/problem.hpp"

namespace pcqp {

class MpcDimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct LinearPlant {
  Matrix A;      // nx x nx
  Matrix B;      // nx x nu
  Vector x0;     // nx
  Vector u_max;  // nu, strictly positive

  std::size_t nx() const noexcept { return A.rows(); }
  std::size_t nu() const noexcept { return B.cols(); }
};

/// Reference state active from `start_step` until the next entry.
struct ReferencePoint {
  std::size_t start_step = 0;
  Vector state;
};

struct MpcConfig {
  std::size_t horizon = 10;
  SymMatrix Q;  // nx x nx, PSD
  SymMatrix R;  // nu x nu, PD
  /// Empty means the origin. Sorted by start_step.
  std::vector<ReferencePoint> reference;
};

/// Throws MpcDimensionError on any inconsistency.
void check_dimensions(const LinearPlant& plant, const MpcConfig& cfg);

/// Reference active at closed-loop step `step` (zero if none).
Vector reference_at(const LinearPlant& plant, const MpcConfig& cfg, std::size_t step);

/// Box QP over the scaled inputs z in [−1, 1]^(nu·horizon).
BoxQP condense(const LinearPlant& plant, const MpcConfig& cfg, std::span<const double> x,
               std::span<const double> reference);
BoxQP condense(const LinearPlant& plant, const MpcConfig& cfg, std::span<const double> x);

struct StepRecord {
  std::size_t step = 0;
  Vector state;  // before the input is applied
  Vector input;
  std::size_t iterations = 0;
  std::size_t n_max = 0;
  double gap = 0.0;
  SolveStatus status = SolveStatus::kConverged;
  bool certificate_ok = true;
  std::vector<IterationRecord> trace;
};

struct ClosedLoopReport {
  std::size_t qp_dim = 0;
  std::size_t n_max = 0;
  std::vector<StepRecord> steps;
  Vector final_state;
  double mean_iterations = 0.0;
  double std_iterations = 0.0;  // sample standard deviation, 0 for one step
  std::size_t max_iterations = 0;
  std::size_t constraint_violations = 0;  // steps with some |u_i| > u_max_i
  std::size_t budget_violations = 0;      // steps with iterations > n_max
};

/// A per-step solve did not converge.
class ClosedLoopError : public std::runtime_error {
 public:
  ClosedLoopError(std::size_t step, SolveStatus status, const std::string& detail);

  std::size_t step() const noexcept { return step_; }
  SolveStatus status() const noexcept { return status_; }

 private:
  std::size_t step_;
  SolveStatus status_;
};

/// Receding-horizon simulation: condense, solve, apply the first input block,
/// x ← A x + B u. Throws std::invalid_argument if steps == 0.
ClosedLoopReport closed_loop(const LinearPlant& plant, const MpcConfig& cfg, std::size_t steps, double eps);

struct Scenario {
  LinearPlant plant;
  MpcConfig config;
  std::size_t steps = 50;
};

/// Throws ParseError (with line and column) on malformed input.
Scenario parse_scenario(std::istream& in);
Scenario parse_scenario(std::string_view text);
Scenario read_scenario_file(const std::string& path);

/// step,x_0..,u_0..,iterations,n_max,gap,status
void write_closed_loop_csv(std::ostream& out, const ClosedLoopReport& report);

}  // namespace pcqp
