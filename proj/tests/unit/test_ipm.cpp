#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "pcqp/certify.hpp"
#include "pcqp/ipm.hpp"
#include "test_support.hpp"

using namespace pcqp;

namespace {

BoxQP make(std::size_t n, std::vector<double> h_lower, Vector h) {
  return BoxQP(SymMatrix::from_lower(n, h_lower), std::move(h));
}

Iterate symmetric_point(std::size_t n) {
  return Iterate{Vector(n, 0.0), Vector(n, 1.0), Vector(n, 1.0), Vector(n, 1.0), Vector(n, 1.0)};
}

// Strictly feasible iterate away from the center, so φ != ψ.
Iterate random_interior(std::mt19937_64& rng, std::size_t n) {
  Iterate it;
  it.z = testing::uniform_vector(rng, n, -0.9, 0.9);
  it.gamma = testing::uniform_vector(rng, n, 0.1, 3.0);
  it.theta = testing::uniform_vector(rng, n, 0.1, 3.0);
  it.phi.resize(n);
  it.psi.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    it.phi[i] = 1.0 - it.z[i];
    it.psi[i] = 1.0 + it.z[i];
  }
  return it;
}

double max_abs(const Vector& v) { return norm_inf(v); }

}  // namespace

TEST_CASE("initialize: worked example with h = (3, 4)") {
  const auto [sp, it] = initialize(BoxQP(SymMatrix::identity(2), Vector{3, 4}));
  CHECK(sp.lambda == doctest::Approx(1.0 / (20.0 * std::sqrt(2.0))).epsilon(1e-15));
  CHECK(it.gamma[0] == doctest::Approx(0.89393398).epsilon(1e-8));
  CHECK(it.gamma[1] == doctest::Approx(0.85857864).epsilon(1e-8));
  CHECK(it.theta[0] == doctest::Approx(1.10606602).epsilon(1e-8));
  CHECK(it.theta[1] == doctest::Approx(1.14142136).epsilon(1e-8));
  CHECK(it.phi == Vector{1, 1});
  CHECK(it.psi == Vector{1, 1});
  CHECK(it.z == Vector{0, 0});
}

TEST_CASE("initialize: start point is on the 1/4 neighborhood boundary with mu = 1") {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 1 + rep % 30;
    const double mag = std::pow(10.0, -6.0 + 12.0 * (rep % 13) / 12.0);
    Vector h = testing::uniform_vector(rng, n, -mag, mag);
    const auto [sp, it] = initialize(BoxQP(SymMatrix::identity(n), h));
    CHECK(std::abs(duality_measure(it) - 1.0) <= 1e-12);
    CHECK(std::abs(proximity(it) - 0.25) <= 1e-10);
    const ResidualReport r = kkt_residuals(sp, it);
    CHECK(r.stationarity <= 1e-15);
    CHECK(r.upper_linkage == 0.0);
    CHECK(r.lower_linkage == 0.0);
  }
  CHECK_THROWS_AS(initialize(BoxQP(SymMatrix::identity(2), Vector{0, 0})), InvalidProblem);
}

TEST_CASE("duality_measure and proximity") {
  CHECK(duality_measure(symmetric_point(3)) == 1.0);
  Iterate two = symmetric_point(2);
  two.gamma = {2, 2};
  two.theta = {2, 2};
  CHECK(duality_measure(two) == 2.0);
  CHECK(proximity(two) == 0.0);

  // v = (1, 2), s = (1, 1) for n = 1.
  const Iterate it{Vector{0}, Vector{1}, Vector{2}, Vector{1}, Vector{1}};
  CHECK(duality_measure(it) == 1.5);
  CHECK(proximity(it) == doctest::Approx(std::sqrt(0.5) / 1.5).epsilon(1e-15));

  Iterate dead = symmetric_point(1);
  dead.gamma = {0};
  dead.theta = {0};
  CHECK_THROWS_AS(proximity(dead), DegenerateMeasure);
}

TEST_CASE("newton_direction at the symmetric point") {
  const ScaledProblem sp{BoxQP(SymMatrix::identity(2), Vector{1, 1}), 0.1, SymMatrix::identity(2).scaled(0.2),
                         Vector{0.2, 0.2}};
  const Iterate it = symmetric_point(2);

  const Direction centering = newton_direction(sp, it, Centering::kCorrector, 1.0);
  CHECK(max_abs(centering.dz) == 0.0);
  CHECK(max_abs(centering.dv) == 0.0);
  CHECK(max_abs(centering.ds) == 0.0);

  const Direction affine = newton_direction(sp, it, Centering::kPredictor, 1.0);
  CHECK(max_abs(affine.dz) == 0.0);
  CHECK(affine.dv == Vector{-1, -1, -1, -1});
  CHECK(max_abs(affine.ds) == 0.0);
}

TEST_CASE("newton_direction solves the full Newton system off-center") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t n = 1 + rep % 12;
    const BoxQP p(testing::random_spd(rng, n, 0.1), testing::uniform_vector(rng, n, -2.0, 2.0));
    const auto [sp, start] = initialize(p);
    const Iterate it = random_interior(rng, n);
    for (Centering c : {Centering::kPredictor, Centering::kCorrector}) {
      const double mu = duality_measure(it);
      const Direction d = newton_direction(sp, it, c, mu);
      const Vector hdz = sp.scaled_H.multiply(d.dz);
      const Vector v = it.v(), s = it.s();
      double res = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        res = std::max(res, std::abs(hdz[i] + d.dv[i] - d.dv[n + i]));
        res = std::max(res, std::abs(d.ds[i] + d.dz[i]));
        res = std::max(res, std::abs(d.ds[n + i] - d.dz[i]));
      }
      for (std::size_t i = 0; i < 2 * n; ++i) {
        const double lhs = s[i] * d.dv[i] + v[i] * d.ds[i];
        res = std::max(res, std::abs(lhs - (sigma(c) * mu - v[i] * s[i])));
      }
      CHECK(res <= 1e-9);

      const DirectionDiagnostics diag = diagnose_direction(sp, it, d);
      CHECK(std::abs(diag.dv_dot_ds - diag.curvature) <= 1e-9 * (1.0 + std::abs(diag.curvature)));
      CHECK(diag.curvature >= 0.0);
      CHECK(diag.product_norm <= diag.product_bound + 1e-9);
    }
  }
}

TEST_CASE("newton_direction refuses a non-interior base point") {
  const auto [sp, it] = initialize(BoxQP(SymMatrix::identity(1), Vector{1}));
  Iterate bad = it;
  bad.phi = {0.0};
  CHECK_THROWS_AS(newton_direction(sp, bad, Centering::kPredictor, 1.0), LostPositivity);
}

TEST_CASE("predictor_step_size") {
  Direction zero;
  zero.dv = Vector(2, 0.0);
  zero.ds = Vector(2, 0.0);
  CHECK(predictor_step_size(1.0, zero) == 0.5);

  // n = 1, dv = (a, 0), ds = (1, 0): the centered product norm is a/√2.
  Direction d;
  d.ds = {1.0, 0.0};
  d.dv = {std::sqrt(2.0) / 2.0, 0.0};
  CHECK(predictor_step_size(1.0, d) == doctest::Approx(0.5).epsilon(1e-15));
  d.dv = {8.0 * std::sqrt(2.0), 0.0};
  CHECK(predictor_step_size(1.0, d) == doctest::Approx(0.125).epsilon(1e-15));
}

TEST_CASE("apply_step") {
  const auto [sp, start] = initialize(BoxQP(SymMatrix::identity(3), Vector{1, -2, 0.5}));
  const Direction zero{Vector(3, 0.0), Vector(6, 0.0), Vector(6, 0.0), Centering::kPredictor, 1.0};
  const Iterate same = apply_step(start, zero, 0.5);
  CHECK(same.z == start.z);
  CHECK(same.gamma == start.gamma);
  CHECK(same.theta == start.theta);

  SUBCASE("affine half step at the symmetric point") {
    const ScaledProblem sym{BoxQP(SymMatrix::identity(2), Vector{1, 1}), 0.1, SymMatrix::identity(2).scaled(0.2),
                            Vector{0.2, 0.2}};
    const Iterate it = symmetric_point(2);
    const Direction d = newton_direction(sym, it, Centering::kPredictor, 1.0);
    const Iterate next = apply_step(it, d, 0.5);
    CHECK(next.gamma == Vector{0.5, 0.5});
    CHECK(next.theta == Vector{0.5, 0.5});
    CHECK(next.phi == Vector{1, 1});
    CHECK(duality_measure(next) == 0.5);
  }

  SUBCASE("linkage is preserved") {
    std::mt19937_64 rng(9);
    const Iterate it = random_interior(rng, 3);
    const Direction d = newton_direction(sp, it, Centering::kCorrector, duality_measure(it));
    const double alpha = 0.3;
    const Iterate next = apply_step(it, d, alpha);
    const ResidualReport r = kkt_residuals(sp, next);
    CHECK(r.upper_linkage <= 1e-15);
    CHECK(r.lower_linkage <= 1e-15);
  }

  SUBCASE("losing positivity throws") {
    Direction d = zero;
    d.dv[0] = -10.0;
    CHECK_THROWS_AS(apply_step(start, d, 1.0), LostPositivity);
  }
}

TEST_CASE("solve: small examples") {
  SUBCASE("h = 0") {
    const SolveResult r = solve(BoxQP(SymMatrix::identity(3), Vector(3, 0.0)), 1e-6);
    CHECK(r.status == SolveStatus::kConverged);
    CHECK(r.iterations == 0);
    CHECK(r.z == Vector(3, 0.0));
    CHECK(check_certificates(r.trace, 3).ok());
  }
  SUBCASE("identity Hessian clamps -h") {
    const SolveResult r = solve(BoxQP(SymMatrix::identity(2), Vector{-3, 0.5}), 1e-8);
    REQUIRE(r.status == SolveStatus::kConverged);
    CHECK(std::abs(r.z[0] - 1.0) <= 1e-5);
    CHECK(std::abs(r.z[1] + 0.5) <= 1e-5);
    CHECK(r.iterations <= r.n_max);
    CHECK(r.final_gap <= 1e-8);
  }
  SUBCASE("scalar boundary optimum") {
    const SolveResult r = solve(make(1, {2.0}, Vector{-10}), 1e-8);
    REQUIRE(r.status == SolveStatus::kConverged);
    CHECK(std::abs(r.z[0] - 1.0) <= 1e-5);
  }
  SUBCASE("degenerate curvature") {
    const SolveResult r = solve(make(1, {0.0}, Vector{1}), 1e-8);
    REQUIRE(r.status == SolveStatus::kConverged);
    CHECK(std::abs(r.z[0] + 1.0) <= 1e-5);
  }
  SUBCASE("tolerance at or above 2n needs no iterations") {
    const SolveResult r = solve(BoxQP(SymMatrix::identity(2), Vector{1, 1}), 4.0);
    CHECK(r.status == SolveStatus::kConverged);
    CHECK(r.iterations == 0);
    CHECK(r.n_max == 0);
  }
  CHECK_THROWS_AS(solve(BoxQP(SymMatrix::identity(1), Vector{1}), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(solve(BoxQP(SymMatrix::identity(1), Vector{std::nan("")}), 1e-6), InvalidProblem);
}

TEST_CASE("solve: iteration cap reports the limit") {
  const BoxQP p = testing::strictly_convex_instance(1, 8);
  const SolveResult r = solve(p, 1e-8, SolveOptions{3});
  CHECK(r.status == SolveStatus::kIterationLimit);
  CHECK(r.iterations == 3);
  CHECK(r.n_max == iteration_bound({8, 1e-8}));
  CHECK(r.final_gap > 1e-8);
}

TEST_CASE("solve: indefinite Hessian is a numerical failure without NaN output") {
  for (const BoxQP& p : {make(1, {-100.0}, Vector{0.01}), make(2, {1.0, 3.0, 3.0, 1.0}, Vector{0.1, -0.2}),
                         make(3, {-1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, -1.0}, Vector{1, 1, 1})}) {
    const SolveResult r = solve(p, 1e-6);
    CHECK(r.status == SolveStatus::kNumericalFailure);
    CHECK_FALSE(r.failure.empty());
    CHECK(all_finite(r.z));
  }
}

TEST_CASE("solve: trace identities and certificates on random instances") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t n = 2 + seed % 15;
    const BoxQP p = testing::strictly_convex_instance(seed, n);
    const SolveResult r = solve(p, 1e-8);
    REQUIRE(r.status == SolveStatus::kConverged);
    CHECK(r.iterations <= r.n_max);
    CHECK(check_certificates(r.trace, n).ok());
    for (const IterationRecord& rec : r.trace) {
      // μ(α) = (1 − α)μ + α²Δμ_p after the predictor, μ̂ + Δμ_c after the full corrector.
      const double mu_alpha = (1.0 - rec.alpha) * rec.mu + rec.alpha * rec.alpha * rec.dmu_p;
      CHECK(std::abs(rec.mu_hat - mu_alpha) <= 1e-12 * rec.mu);
      CHECK(std::abs(rec.mu_next - (rec.mu_hat + rec.dmu_c)) <= 1e-12 * rec.mu);
    }
    const auto [sp, start] = initialize(p);
    const ResidualReport res = kkt_residuals(sp, r.final_iterate);
    CHECK(res.stationarity <= 1e-6);
    CHECK(res.upper_linkage <= 1e-6);
    CHECK(res.lower_linkage <= 1e-6);
    CHECK(res.min_positive > 0.0);
    CHECK(res.gap <= 1e-8);
  }
}

TEST_CASE("solve: certificates also hold for n = 1") {
  std::size_t violations = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const SolveResult r = solve(testing::strictly_convex_instance(seed, 1), 1e-10);
    REQUIRE(r.status == SolveStatus::kConverged);
    violations += check_certificates(r.trace, 1).violations.size();
  }
  CHECK(violations == 0);
}

TEST_CASE("solve: invariant under positive scaling of the objective") {
  const BoxQP p = testing::strictly_convex_instance(77, 9);
  const SolveResult base = solve(p, 1e-8);
  SUBCASE("power of two: bitwise identical") {
    const BoxQP q(p.H().scaled(4.0), [&] {
      Vector h = p.h();
      for (double& x : h) x *= 4.0;
      return h;
    }());
    const SolveResult r = solve(q, 1e-8);
    CHECK(r.iterations == base.iterations);
    CHECK(r.z == base.z);
  }
  SUBCASE("general factor: same path up to rounding") {
    const BoxQP q(p.H().scaled(3.7), [&] {
      Vector h = p.h();
      for (double& x : h) x *= 3.7;
      return h;
    }());
    const SolveResult r = solve(q, 1e-8);
    CHECK(r.iterations == base.iterations);
    for (std::size_t i = 0; i < r.z.size(); ++i) CHECK(std::abs(r.z[i] - base.z[i]) <= 1e-9);
  }
}

TEST_CASE("kkt_residuals of a perturbed iterate") {
  const auto [sp, it] = initialize(BoxQP(SymMatrix::identity(2), Vector{1, -1}));
  Iterate moved = it;
  moved.z[1] += 0.1;
  const ResidualReport r = kkt_residuals(sp, moved);
  CHECK(r.upper_linkage == doctest::Approx(0.1));
  CHECK(r.lower_linkage == doctest::Approx(0.1));
}

TEST_CASE("check_certificates") {
  CHECK(check_certificates({}, 4).ok());

  IterationRecord rec;
  rec.k = 0;
  rec.mu = 1.0;
  rec.alpha = 0.5;
  rec.dmu_p = 0.0;
  rec.mu_hat = 0.5;
  rec.dmu_c = 0.0;
  rec.mu_next = 1.0;  // no decrease at all
  const std::vector<IterationRecord> trace{rec};
  const CertificateReport report = check_certificates(trace, 2);
  REQUIRE(report.violations.size() == 1);
  CHECK(report.violations[0].which == Inequality::kContraction);
  CHECK(report.iterations_checked == 1);
  CHECK_FALSE(report.passed[0][static_cast<std::size_t>(Inequality::kContraction)]);
  CHECK(report.passed[0][static_cast<std::size_t>(Inequality::kProximityBefore)]);

  IterationRecord wide = rec;
  wide.mu_next = 0.5;
  wide.proximity_hat = 0.6;
  const std::vector<IterationRecord> trace2{wide};
  const CertificateReport r2 = check_certificates(trace2, 2);
  REQUIRE(r2.violations.size() == 1);
  CHECK(r2.violations[0].which == Inequality::kProximityHat);
}
