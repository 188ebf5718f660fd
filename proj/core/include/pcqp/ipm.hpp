#pragma once

// Feasible predictor-corrector interior-point method for box-constrained QPs
// with a closed-form worst-case iteration count.
//
// Variables follow the KKT system of the box QP
//
//   H z + h + γ − θ = 0,   z + φ − 1 = 0,   z − ψ + 1 = 0,
//   (γ, θ, φ, ψ) >= 0,     γ∘φ = 0,         θ∘ψ = 0,
//
// with stacked views v = col(γ, θ) and s = col(φ, ψ). Each iteration takes an
// affine-scaling (predictor) step whose length keeps the iterate inside the
// proximity-1/2 neighborhood, then a full centering (corrector) step back into
// the proximity-1/4 neighborhood. The duality measure μ = vᵀs/(2n) contracts
// by at least (1 − 0.2348/√(2n))² per iteration, which yields
// iteration_bound(n, ε).
//
// The solver works on the objective scaled by 2λ with λ = 1/(4√2‖h‖₂); that
// scaling puts the cost-free start point z = 0 on the boundary of the 1/4
// neighborhood with μ = 1. The stopping test vᵀs <= ε refers to this scaled
// problem. The argmin is unchanged by the scaling.

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pcqp/linalg.hpp"
#include "pcqp/problem.hpp"

namespace pcqp {

/// Neighborhood radius of the start point and of every post-corrector iterate.
inline constexpr double kNeighborhood = 0.25;
/// Below this norm the predictor step-size rule returns 1/2.
inline constexpr double kNormFloor = 1e-300;
/// Additive tolerance (relative to μ) used by the certificate checks.
inline constexpr double kCertificateTolerance = 1e-9;

class InvalidProblem : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A dual or slack coordinate was not strictly positive.
class LostPositivity : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// μ <= 0 where a strictly feasible iterate was expected.
class DegenerateMeasure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The Newton direction has vᵀs-curvature dvᵀds = dzᵀ(2λH)dz clearly below
/// zero, i.e. H is not positive semidefinite along dz.
class NegativeCurvature : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Iterate {
  Vector z;
  Vector gamma;  // multiplier of z <= 1
  Vector theta;  // multiplier of z >= −1
  Vector phi;    // slack 1 − z
  Vector psi;    // slack z + 1

  std::size_t dim() const noexcept { return z.size(); }
  /// col(γ, θ)
  Vector v() const;
  /// col(φ, ψ)
  Vector s() const;
};

struct ScaledProblem {
  BoxQP base;
  double lambda = 0.0;
  SymMatrix scaled_H;  // 2λH
  Vector scaled_h;     // 2λh
};

/// Predictor directions target μ = 0 (σ = 0); corrector directions target the
/// current μ (σ = 1).
enum class Centering { kPredictor = 0, kCorrector = 1 };

inline double sigma(Centering c) noexcept { return c == Centering::kCorrector ? 1.0 : 0.0; }

struct Direction {
  Vector dz;
  Vector dv;  // col(Δγ, Δθ)
  Vector ds;  // col(Δφ, Δψ) = col(−Δz, Δz)
  Centering centering = Centering::kPredictor;
  double mu_used = 0.0;
};

/// Quantities behind the nonnegativity identity dvᵀds = dzᵀ(2λH)dz and the
/// bound ‖dv∘ds‖₂ <= (√2/4)‖r‖₂² with r = (σμ1 − v∘s)/√(v∘s).
struct DirectionDiagnostics {
  double dv_dot_ds = 0.0;
  double curvature = 0.0;       // dzᵀ(2λH)dz
  double product_norm = 0.0;    // ‖dv∘ds‖₂
  double product_bound = 0.0;   // (√2/4)‖r‖₂²
  double dv_norm_ds_norm = 0.0; // ‖dv‖₂·‖ds‖₂
};

/// Slack of each per-iteration inequality (bound minus value; >= 0 holds).
struct BoundSlacks {
  double predictor_gain = 0.0;     // μ/4 − Δμ_p
  double predictor_decrease = 0.0; // (1 − α/2)²μ − μ̂
  double corrector_gain = 0.0;     // (1 − α/2)²μ/(16n) − Δμ_c
  double contraction = 0.0;        // (1 − 0.2348/√(2n))²μ − μ⁺
};

struct IterationRecord {
  std::size_t k = 0;
  double mu = 0.0;       // before the predictor
  double alpha = 0.0;    // predictor step
  double dmu_p = 0.0;    // Δv_pᵀΔs_p/(2n)
  double mu_hat = 0.0;   // after the predictor
  double dmu_c = 0.0;    // Δv_cᵀΔs_c/(2n)
  double mu_next = 0.0;  // after the corrector
  double proximity_before = 0.0;
  double proximity_hat = 0.0;
  double proximity_next = 0.0;
  DirectionDiagnostics predictor;
  DirectionDiagnostics corrector;
  BoundSlacks slacks;
};

enum class SolveStatus { kConverged, kIterationLimit, kNumericalFailure };

const char* to_string(SolveStatus status) noexcept;

struct SolveResult {
  Vector z;
  SolveStatus status = SolveStatus::kNumericalFailure;
  std::size_t iterations = 0;
  std::size_t n_max = 0;
  double final_gap = 0.0;  // vᵀs of the scaled problem at exit
  double lambda = 0.0;     // 0 when h was treated as zero
  std::vector<IterationRecord> trace;
  Iterate final_iterate;   // empty when h was treated as zero
  std::string failure;     // set for kNumericalFailure
};

/// ‖h‖₂ at or below this is treated as h = 0 (solution z = 0).
double h_zero_floor(const BoxQP& p);

/// Cost-free start point in the 1/4 neighborhood with μ = 1.
/// Requires ‖h‖₂ > h_zero_floor(p); throws InvalidProblem otherwise.
std::pair<ScaledProblem, Iterate> initialize(const BoxQP& p);

/// (γᵀφ + θᵀψ)/(2n)
double duality_measure(const Iterate& it);

/// ‖v∘s − μ1‖₂ / μ. Throws DegenerateMeasure if μ <= 0.
double proximity(const Iterate& it);

/// Solves the Newton system
///   2λH·Δz + Δγ − Δθ = 0,   Δφ = −Δz,   Δψ = Δz,
///   s∘Δv + v∘Δs = σμ1 − v∘s
/// by eliminating Δγ, Δθ and factoring the n x n matrix
///   2λH + diag(γ/φ) + diag(θ/ψ).
/// Throws LostPositivity if the base iterate is not strictly positive and
/// NotPositiveDefinite if the reduced matrix cannot be factored.
Direction newton_direction(const ScaledProblem& sp, const Iterate& it, Centering centering, double mu);

DirectionDiagnostics diagnose_direction(const ScaledProblem& sp, const Iterate& base, const Direction& d);

/// α = min(1/2, √(μ / (8‖dv∘ds − Δμ_p·1‖₂))) with Δμ_p = dvᵀds/(2n).
double predictor_step_size(double mu_k, const Direction& d);

/// it + α·d. Throws LostPositivity if any γ, θ, φ, ψ entry ends up <= 0.
Iterate apply_step(const Iterate& it, const Direction& d, double alpha);

struct SolveOptions {
  /// Stop after this many iterations even if iteration_bound(n, eps) is
  /// larger (0 means no extra cap). Reaching it gives kIterationLimit.
  std::size_t max_iterations = 0;
};

/// Runs the predictor-corrector loop for at most iteration_bound(n, eps)
/// iterations. Solver-side numerical breakdowns are reported through
/// status; only an invalid problem or eps <= 0 throws.
SolveResult solve(const BoxQP& p, double eps, const SolveOptions& options = {});

struct ResidualReport {
  double stationarity = 0.0;  // ‖2λHz + 2λh + γ − θ‖∞
  double upper_linkage = 0.0; // ‖z + φ − 1‖∞
  double lower_linkage = 0.0; // ‖z − ψ + 1‖∞
  double min_positive = 0.0;  // min over γ, θ, φ, ψ
  double gap = 0.0;           // vᵀs
};

ResidualReport kkt_residuals(const ScaledProblem& sp, const Iterate& it);

enum class Inequality {
  kProximityBefore,   // ‖v∘s − μ1‖ <= μ/4 before the predictor
  kProximityHat,      // <= μ̂/2 after the predictor
  kProximityNext,     // <= μ⁺/4 after the corrector
  kPredictorGain,     // Δμ_p <= μ/4
  kPredictorDecrease, // μ̂ <= (1 − α/2)²μ
  kCorrectorGain,     // Δμ_c <= (1 − α/2)²μ/(16n)
  kContraction,       // μ⁺ <= (1 − 0.2348/√(2n))²μ
};
inline constexpr std::size_t kInequalityCount = 7;

const char* to_string(Inequality which) noexcept;

struct CertificateViolation {
  std::size_t k;
  Inequality which;
  double value;
  double bound;
};

struct CertificateReport {
  std::size_t iterations_checked = 0;
  std::vector<CertificateViolation> violations;
  /// Per iteration, per inequality (indexed by Inequality).
  std::vector<std::array<bool, kInequalityCount>> passed;

  bool ok() const noexcept { return violations.empty(); }
};

/// Re-checks the neighborhood and μ-decrease inequalities on a trace. An
/// empty trace passes.
CertificateReport check_certificates(std::span<const IterationRecord> trace, std::size_t n);

}  // namespace pcqp
