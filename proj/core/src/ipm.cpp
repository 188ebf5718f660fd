#include "pcqp/ipm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/core.h>

#include "pcqp/certify.hpp"

namespace pcqp {

namespace {

Vector concat(const Vector& a, const Vector& b) {
  Vector out;
  out.reserve(a.size() + b.size());
  out.insert(out.end(), a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

void require_positive(std::span<const double> x, const char* name) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0)) throw LostPositivity(fmt::format("{}[{}] = {:.17g} is not positive", name, i, x[i]));
  }
}

void require_strictly_positive(const Iterate& it) {
  require_positive(it.gamma, "gamma");
  require_positive(it.theta, "theta");
  require_positive(it.phi, "phi");
  require_positive(it.psi, "psi");
}

// ‖dv∘ds − mean(dv∘ds)·1‖₂
double centered_product_norm(const Direction& d) {
  const Vector prod = hadamard(d.dv, d.ds);
  const double mean = dot(d.dv, d.ds) / static_cast<double>(prod.size());
  double sum = 0.0;
  for (double p : prod) sum += (p - mean) * (p - mean);
  return std::sqrt(sum);
}

double curvature_tolerance(const DirectionDiagnostics& diag) { return 1e-10 * (1.0 + diag.dv_norm_ds_norm); }

}  // namespace

Vector Iterate::v() const { return concat(gamma, theta); }
Vector Iterate::s() const { return concat(phi, psi); }

const char* to_string(SolveStatus status) noexcept {
  switch (status) {
    case SolveStatus::kConverged: return "converged";
    case SolveStatus::kIterationLimit: return "iteration_limit";
    case SolveStatus::kNumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

const char* to_string(Inequality which) noexcept {
  switch (which) {
    case Inequality::kProximityBefore: return "proximity_before";
    case Inequality::kProximityHat: return "proximity_hat";
    case Inequality::kProximityNext: return "proximity_next";
    case Inequality::kPredictorGain: return "predictor_gain";
    case Inequality::kPredictorDecrease: return "predictor_decrease";
    case Inequality::kCorrectorGain: return "corrector_gain";
    case Inequality::kContraction: return "contraction";
  }
  return "unknown";
}

double h_zero_floor(const BoxQP& p) { return 1e-14 * std::max(1.0, p.H().max_abs()); }

std::pair<ScaledProblem, Iterate> initialize(const BoxQP& p) {
  const double h_norm = norm2(p.h());
  if (!(h_norm > h_zero_floor(p))) {
    throw InvalidProblem("initialize requires a nonzero linear term h");
  }
  const std::size_t n = p.dim();
  const double lambda = kNeighborhood / (std::sqrt(2.0) * h_norm);

  ScaledProblem sp{p, lambda, p.H().scaled(2.0 * lambda), Vector(n)};
  for (std::size_t i = 0; i < n; ++i) sp.scaled_h[i] = 2.0 * lambda * p.h()[i];

  Iterate it{Vector(n, 0.0), Vector(n), Vector(n), Vector(n, 1.0), Vector(n, 1.0)};
  for (std::size_t i = 0; i < n; ++i) {
    it.gamma[i] = 1.0 - lambda * p.h()[i];
    it.theta[i] = 1.0 + lambda * p.h()[i];
  }
  return {std::move(sp), std::move(it)};
}

double duality_measure(const Iterate& it) {
  return (dot(it.gamma, it.phi) + dot(it.theta, it.psi)) / (2.0 * static_cast<double>(it.dim()));
}

double proximity(const Iterate& it) {
  const double mu = duality_measure(it);
  if (!(mu > 0.0)) throw DegenerateMeasure(fmt::format("duality measure {:.17g} is not positive", mu));
  double sum = 0.0;
  for (std::size_t i = 0; i < it.dim(); ++i) {
    const double a = it.gamma[i] * it.phi[i] - mu;
    const double b = it.theta[i] * it.psi[i] - mu;
    sum += a * a + b * b;
  }
  return std::sqrt(sum) / mu;
}

Direction newton_direction(const ScaledProblem& sp, const Iterate& it, Centering centering, double mu) {
  const std::size_t n = it.dim();
  require_strictly_positive(it);
  const double target = sigma(centering) * mu;

  SymMatrix reduced = sp.scaled_H;
  Vector rhs(n);
  Vector upper_ratio(n);  // γ/φ
  Vector lower_ratio(n);  // θ/ψ
  for (std::size_t i = 0; i < n; ++i) {
    upper_ratio[i] = it.gamma[i] / it.phi[i];
    lower_ratio[i] = it.theta[i] / it.psi[i];
    reduced.add_to_diagonal(i, upper_ratio[i] + lower_ratio[i]);
    rhs[i] = target * (1.0 / it.psi[i] - 1.0 / it.phi[i]) + it.gamma[i] - it.theta[i];
  }

  Direction d;
  d.centering = centering;
  d.mu_used = mu;
  d.dz = spd_solve(reduced, rhs);
  d.dv.resize(2 * n);
  d.ds.resize(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    d.dv[i] = target / it.phi[i] - it.gamma[i] + upper_ratio[i] * d.dz[i];
    d.dv[n + i] = target / it.psi[i] - it.theta[i] - lower_ratio[i] * d.dz[i];
    d.ds[i] = -d.dz[i];
    d.ds[n + i] = d.dz[i];
  }
  return d;
}

DirectionDiagnostics diagnose_direction(const ScaledProblem& sp, const Iterate& base, const Direction& d) {
  DirectionDiagnostics diag;
  diag.dv_dot_ds = dot(d.dv, d.ds);
  diag.curvature = sp.scaled_H.quadratic_form(d.dz);
  diag.product_norm = norm2(hadamard(d.dv, d.ds));
  diag.dv_norm_ds_norm = norm2(d.dv) * norm2(d.ds);

  const double target = sigma(d.centering) * d.mu_used;
  const Vector v = base.v();
  const Vector s = base.s();
  double r_sq = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double w = v[i] * s[i];
    r_sq += (target - w) * (target - w) / w;
  }
  diag.product_bound = std::sqrt(2.0) / 4.0 * r_sq;
  return diag;
}

double predictor_step_size(double mu_k, const Direction& d) {
  const double norm = centered_product_norm(d);
  if (norm < kNormFloor) return 0.5;
  return std::min(0.5, std::sqrt(mu_k / (8.0 * norm)));
}

Iterate apply_step(const Iterate& it, const Direction& d, double alpha) {
  const std::size_t n = it.dim();
  Iterate out = it;
  for (std::size_t i = 0; i < n; ++i) {
    out.z[i] += alpha * d.dz[i];
    out.gamma[i] += alpha * d.dv[i];
    out.theta[i] += alpha * d.dv[n + i];
    out.phi[i] += alpha * d.ds[i];
    out.psi[i] += alpha * d.ds[n + i];
  }
  require_strictly_positive(out);
  return out;
}

SolveResult solve(const BoxQP& p, double eps, const SolveOptions& options) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (const auto report = validate(p); !report.valid()) {
    throw InvalidProblem(report.findings.front().detail);
  }
  const std::size_t n = p.dim();
  const double two_n = 2.0 * static_cast<double>(n);

  SolveResult result;
  if (!(norm2(p.h()) > h_zero_floor(p))) {
    result.z.assign(n, 0.0);
    result.status = SolveStatus::kConverged;
    return result;
  }

  // The start point already has vᵀs = 2n; larger tolerances need no iteration.
  result.n_max = eps < two_n ? iteration_bound({n, eps}) : 0;

  auto [sp, it] = initialize(p);
  result.lambda = sp.lambda;
  const double contraction = contraction_factor(n);

  std::size_t limit = result.n_max;
  if (options.max_iterations > 0) limit = std::min(limit, options.max_iterations);

  bool converged = false;
  try {
    for (std::size_t k = 0; k < limit; ++k) {
      const double gap = dot(it.gamma, it.phi) + dot(it.theta, it.psi);
      if (gap <= eps) {
        converged = true;
        break;
      }

      IterationRecord rec;
      rec.k = k;
      rec.mu = gap / two_n;
      rec.proximity_before = proximity(it);

      const Direction predictor = newton_direction(sp, it, Centering::kPredictor, rec.mu);
      rec.predictor = diagnose_direction(sp, it, predictor);
      if (rec.predictor.dv_dot_ds < -curvature_tolerance(rec.predictor)) {
        throw NegativeCurvature(fmt::format("predictor curvature {:.17g} < 0 at iteration {}",
                                            rec.predictor.dv_dot_ds, k));
      }
      rec.dmu_p = rec.predictor.dv_dot_ds / two_n;
      rec.alpha = predictor_step_size(rec.mu, predictor);
      const Iterate hat = apply_step(it, predictor, rec.alpha);
      rec.mu_hat = duality_measure(hat);
      rec.proximity_hat = proximity(hat);

      const Direction corrector = newton_direction(sp, hat, Centering::kCorrector, rec.mu_hat);
      rec.corrector = diagnose_direction(sp, hat, corrector);
      if (rec.corrector.dv_dot_ds < -curvature_tolerance(rec.corrector)) {
        throw NegativeCurvature(fmt::format("corrector curvature {:.17g} < 0 at iteration {}",
                                            rec.corrector.dv_dot_ds, k));
      }
      rec.dmu_c = rec.corrector.dv_dot_ds / two_n;
      Iterate next = apply_step(hat, corrector, 1.0);
      rec.mu_next = duality_measure(next);
      rec.proximity_next = proximity(next);

      const double shrink = (1.0 - rec.alpha / 2.0) * (1.0 - rec.alpha / 2.0);
      rec.slacks.predictor_gain = rec.mu / 4.0 - rec.dmu_p;
      rec.slacks.predictor_decrease = shrink * rec.mu - rec.mu_hat;
      rec.slacks.corrector_gain = shrink * rec.mu / (16.0 * static_cast<double>(n)) - rec.dmu_c;
      rec.slacks.contraction = contraction * rec.mu - rec.mu_next;

      result.trace.push_back(rec);
      it = std::move(next);
    }
    if (!converged) converged = dot(it.gamma, it.phi) + dot(it.theta, it.psi) <= eps;
    result.status = converged ? SolveStatus::kConverged : SolveStatus::kIterationLimit;
  } catch (const LinalgError& e) {
    result.status = SolveStatus::kNumericalFailure;
    result.failure = e.what();
  } catch (const LostPositivity& e) {
    result.status = SolveStatus::kNumericalFailure;
    result.failure = e.what();
  } catch (const NegativeCurvature& e) {
    result.status = SolveStatus::kNumericalFailure;
    result.failure = e.what();
  } catch (const DegenerateMeasure& e) {
    result.status = SolveStatus::kNumericalFailure;
    result.failure = e.what();
  }

  result.iterations = result.trace.size();
  result.final_gap = dot(it.gamma, it.phi) + dot(it.theta, it.psi);
  result.z = it.z;
  result.final_iterate = std::move(it);
  return result;
}

ResidualReport kkt_residuals(const ScaledProblem& sp, const Iterate& it) {
  const std::size_t n = it.dim();
  ResidualReport r;
  const Vector hz = sp.scaled_H.multiply(it.z);
  r.min_positive = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    r.stationarity = std::max(r.stationarity, std::abs(hz[i] + sp.scaled_h[i] + it.gamma[i] - it.theta[i]));
    r.upper_linkage = std::max(r.upper_linkage, std::abs(it.z[i] + it.phi[i] - 1.0));
    r.lower_linkage = std::max(r.lower_linkage, std::abs(it.z[i] - it.psi[i] + 1.0));
    r.min_positive = std::min({r.min_positive, it.gamma[i], it.theta[i], it.phi[i], it.psi[i]});
  }
  r.gap = dot(it.gamma, it.phi) + dot(it.theta, it.psi);
  return r;
}

CertificateReport check_certificates(std::span<const IterationRecord> trace, std::size_t n) {
  CertificateReport report;
  report.iterations_checked = trace.size();
  const double contraction = contraction_factor(n);
  const double dn = static_cast<double>(n);
  for (const IterationRecord& rec : trace) {
    const double tol = kCertificateTolerance * rec.mu;
    const double shrink = (1.0 - rec.alpha / 2.0) * (1.0 - rec.alpha / 2.0);
    // Proximities are already divided by μ, so their tolerance is relative.
    const std::array<std::pair<double, double>, kInequalityCount> checks{{
        {rec.proximity_before, kNeighborhood + kCertificateTolerance},
        {rec.proximity_hat, 0.5 + kCertificateTolerance},
        {rec.proximity_next, kNeighborhood + kCertificateTolerance},
        {rec.dmu_p, rec.mu / 4.0 + tol},
        {rec.mu_hat, shrink * rec.mu + tol},
        {rec.dmu_c, shrink * rec.mu / (16.0 * dn) + tol},
        {rec.mu_next, contraction * rec.mu + tol},
    }};
    std::array<bool, kInequalityCount> passed{};
    for (std::size_t i = 0; i < kInequalityCount; ++i) {
      const auto [value, bound] = checks[i];
      passed[i] = value <= bound;
      if (!passed[i]) report.violations.push_back({rec.k, static_cast<Inequality>(i), value, bound});
    }
    report.passed.push_back(passed);
  }
  return report;
}

}  // namespace pcqp
