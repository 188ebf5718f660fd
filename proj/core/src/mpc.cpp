#include "pcqp/mpc.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <fmt/core.h>

#include "pcqp/certify.hpp"
#include "pcqp/csv.hpp"
#include "text.hpp"

namespace pcqp {

void check_dimensions(const LinearPlant& plant, const MpcConfig& cfg) {
  const std::size_t nx = plant.nx();
  const std::size_t nu = plant.nu();
  if (nx == 0 || nu == 0) throw MpcDimensionError("plant needs at least one state and one input");
  if (plant.A.cols() != nx) throw MpcDimensionError("A must be square");
  if (plant.B.rows() != nx) throw MpcDimensionError("B must have nx rows");
  if (plant.x0.size() != nx) throw MpcDimensionError("x0 must have nx entries");
  if (plant.u_max.size() != nu) throw MpcDimensionError("u_max must have nu entries");
  for (double u : plant.u_max) {
    if (!(u > 0.0) || !std::isfinite(u)) throw MpcDimensionError("u_max entries must be positive and finite");
  }
  if (cfg.horizon == 0) throw MpcDimensionError("horizon must be at least 1");
  if (cfg.Q.order() != nx) throw MpcDimensionError("Q must be nx x nx");
  if (cfg.R.order() != nu) throw MpcDimensionError("R must be nu x nu");
  for (const ReferencePoint& r : cfg.reference) {
    if (r.state.size() != nx) throw MpcDimensionError("reference states must have nx entries");
  }
}

Vector reference_at(const LinearPlant& plant, const MpcConfig& cfg, std::size_t step) {
  Vector r(plant.nx(), 0.0);
  for (const ReferencePoint& point : cfg.reference) {
    if (point.start_step <= step) r = point.state;
  }
  return r;
}

BoxQP condense(const LinearPlant& plant, const MpcConfig& cfg, std::span<const double> x,
               std::span<const double> reference) {
  check_dimensions(plant, cfg);
  const std::size_t nx = plant.nx();
  const std::size_t nu = plant.nu();
  const std::size_t horizon = cfg.horizon;
  if (x.size() != nx || reference.size() != nx) throw MpcDimensionError("state and reference must have nx entries");

  // powers[k] = A^k
  std::vector<Matrix> powers{Matrix::identity(nx)};
  for (std::size_t k = 1; k <= horizon; ++k) powers.push_back(plant.A.multiply(powers.back()));

  // G block (i, j) = A^(i−j) B for j <= i; row block i predicts x_(i+1).
  const std::size_t rows = horizon * nx;
  const std::size_t n = horizon * nu;
  Matrix G(rows, n);
  std::vector<Matrix> powers_b;
  for (std::size_t k = 0; k < horizon; ++k) powers_b.push_back(powers[k].multiply(plant.B));
  for (std::size_t i = 0; i < horizon; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const Matrix& blk = powers_b[i - j];
      for (std::size_t r = 0; r < nx; ++r) {
        for (std::size_t c = 0; c < nu; ++c) G(i * nx + r, j * nu + c) = blk(r, c);
      }
    }
  }

  // Q̄G and Q̄(Φx − r̄), blockwise.
  Matrix QG(rows, n);
  Vector q_err(rows);
  for (std::size_t i = 0; i < horizon; ++i) {
    const Vector predicted = powers[i + 1].multiply(x);
    for (std::size_t r = 0; r < nx; ++r) {
      double e = 0.0;
      for (std::size_t c = 0; c < nx; ++c) e += cfg.Q(r, c) * (predicted[c] - reference[c]);
      q_err[i * nx + r] = e;
      for (std::size_t col = 0; col < n; ++col) {
        double acc = 0.0;
        for (std::size_t c = 0; c < nx; ++c) acc += cfg.Q(r, c) * G(i * nx + c, col);
        QG(i * nx + r, col) = acc;
      }
    }
  }

  std::vector<double> scale(n);
  for (std::size_t a = 0; a < n; ++a) scale[a] = plant.u_max[a % nu];

  std::vector<double> hess(n * n, 0.0);
  Vector lin(n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b <= a; ++b) {
      double acc = 0.0;
      for (std::size_t r = 0; r < rows; ++r) acc += G(r, a) * QG(r, b);
      if (a / nu == b / nu) acc += cfg.R(a % nu, b % nu);
      hess[a * n + b] = scale[a] * acc * scale[b];
    }
    double acc = 0.0;
    for (std::size_t r = 0; r < rows; ++r) acc += G(r, a) * q_err[r];
    lin[a] = scale[a] * acc;
  }
  return BoxQP(SymMatrix::from_lower(n, hess), std::move(lin));
}

BoxQP condense(const LinearPlant& plant, const MpcConfig& cfg, std::span<const double> x) {
  const Vector zero(plant.nx(), 0.0);
  return condense(plant, cfg, x, cfg.reference.empty() ? zero : cfg.reference.front().state);
}

ClosedLoopError::ClosedLoopError(std::size_t step, SolveStatus status, const std::string& detail)
    : std::runtime_error(fmt::format("closed-loop step {}: solver returned {}{}{}", step, to_string(status),
                                     detail.empty() ? "" : ": ", detail)),
      step_(step),
      status_(status) {}

ClosedLoopReport closed_loop(const LinearPlant& plant, const MpcConfig& cfg, std::size_t steps, double eps) {
  if (steps == 0) throw std::invalid_argument("closed loop needs at least one step");
  check_dimensions(plant, cfg);
  const std::size_t nu = plant.nu();

  ClosedLoopReport report;
  report.qp_dim = cfg.horizon * nu;
  report.n_max = eps < 2.0 * static_cast<double>(report.qp_dim) ? iteration_bound({report.qp_dim, eps}) : 0;

  Vector x = plant.x0;
  for (std::size_t t = 0; t < steps; ++t) {
    const BoxQP qp = condense(plant, cfg, x, reference_at(plant, cfg, t));
    SolveResult result = solve(qp, eps);
    if (result.status != SolveStatus::kConverged) throw ClosedLoopError(t, result.status, result.failure);

    StepRecord rec;
    rec.step = t;
    rec.state = x;
    rec.iterations = result.iterations;
    rec.n_max = report.n_max;
    rec.gap = result.final_gap;
    rec.status = result.status;
    rec.certificate_ok = check_certificates(result.trace, report.qp_dim).ok();
    rec.trace = std::move(result.trace);
    rec.input.resize(nu);
    bool violated = false;
    for (std::size_t i = 0; i < nu; ++i) {
      rec.input[i] = plant.u_max[i] * result.z[i];
      if (std::abs(rec.input[i]) > plant.u_max[i]) violated = true;
    }
    if (violated) ++report.constraint_violations;
    if (rec.iterations > report.n_max) ++report.budget_violations;

    Vector next = plant.A.multiply(x);
    const Vector bu = plant.B.multiply(rec.input);
    for (std::size_t i = 0; i < next.size(); ++i) next[i] += bu[i];
    x = std::move(next);
    report.steps.push_back(std::move(rec));
  }
  report.final_state = x;

  double sum = 0.0;
  for (const StepRecord& s : report.steps) {
    sum += static_cast<double>(s.iterations);
    report.max_iterations = std::max(report.max_iterations, s.iterations);
  }
  report.mean_iterations = sum / static_cast<double>(steps);
  if (steps > 1) {
    double sq = 0.0;
    for (const StepRecord& s : report.steps) {
      const double d = static_cast<double>(s.iterations) - report.mean_iterations;
      sq += d * d;
    }
    report.std_iterations = std::sqrt(sq / static_cast<double>(steps - 1));
  }
  return report;
}

namespace {

using text::ContentLine;

class ScenarioReader {
 public:
  explicit ScenarioReader(const text::Document& doc) : doc_(doc) {}

  Scenario read() {
    std::optional<std::size_t> nx, nu, horizon;
    std::optional<Matrix> A, B, Q, R;
    std::optional<Vector> x0, umax;
    Scenario sc;

    while (pos_ < doc_.lines.size()) {
      const ContentLine& line = doc_.lines[pos_++];
      const std::string_view key = line.tokens.front().text;
      auto scalar = [&]() -> std::size_t {
        expect_tokens(line, 2);
        return text::parse_count(line.tokens[1], line.number);
      };
      auto need_dims = [&] {
        if (!nx || !nu) throw ParseError(line.number, 1, fmt::format("'{}' must come after nx and nu", key));
      };
      auto once = [&](bool seen) {
        if (seen) throw ParseError(line.number, 1, fmt::format("duplicate section '{}'", key));
      };

      if (key == "nx") {
        once(nx.has_value());
        nx = scalar();
      } else if (key == "nu") {
        once(nu.has_value());
        nu = scalar();
      } else if (key == "horizon") {
        once(horizon.has_value());
        horizon = scalar();
      } else if (key == "steps") {
        expect_tokens(line, 2);
        sc.steps = text::parse_count(line.tokens[1], line.number, true);
      } else if (key == "A") {
        need_dims();
        once(A.has_value());
        expect_tokens(line, 1);
        A = matrix(*nx, *nx, "A");
      } else if (key == "B") {
        need_dims();
        once(B.has_value());
        expect_tokens(line, 1);
        B = matrix(*nx, *nu, "B");
      } else if (key == "Q") {
        need_dims();
        once(Q.has_value());
        expect_tokens(line, 1);
        Q = symmetric(*nx, "Q");
      } else if (key == "R") {
        need_dims();
        once(R.has_value());
        expect_tokens(line, 1);
        R = symmetric(*nu, "R");
      } else if (key == "x0") {
        need_dims();
        once(x0.has_value());
        expect_tokens(line, 1);
        x0 = row(*nx, "x0");
      } else if (key == "umax") {
        need_dims();
        once(umax.has_value());
        expect_tokens(line, 1);
        umax = row(*nu, "umax");
        const ContentLine& values = doc_.lines[pos_ - 1];
        for (std::size_t i = 0; i < umax->size(); ++i) {
          if (!((*umax)[i] > 0.0) || !std::isfinite((*umax)[i])) {
            throw ParseError(values.number, values.tokens[i].column, "umax entries must be positive and finite");
          }
        }
      } else if (key == "ref") {
        need_dims();
        expect_tokens(line, 2);
        const std::size_t start = text::parse_count(line.tokens[1], line.number, true);
        if (!sc.config.reference.empty() && start <= sc.config.reference.back().start_step) {
          throw ParseError(line.number, line.tokens[1].column, "ref start steps must be strictly increasing");
        }
        sc.config.reference.push_back({start, row(*nx, "ref")});
      } else {
        throw ParseError(line.number, line.tokens.front().column, fmt::format("unknown section '{}'", key));
      }
    }

    const std::size_t end_line = doc_.total_lines + 1;
    auto require = [&](bool present, const char* name) {
      if (!present) throw ParseError(end_line, 1, fmt::format("missing required section '{}'", name));
    };
    require(nx.has_value(), "nx");
    require(nu.has_value(), "nu");
    require(horizon.has_value(), "horizon");
    require(A.has_value(), "A");
    require(B.has_value(), "B");
    require(x0.has_value(), "x0");
    require(umax.has_value(), "umax");
    require(Q.has_value(), "Q");
    require(R.has_value(), "R");

    sc.plant = LinearPlant{std::move(*A), std::move(*B), std::move(*x0), std::move(*umax)};
    sc.config.horizon = *horizon;
    sc.config.Q = SymMatrix::from_lower(*nx, Q->data());
    sc.config.R = SymMatrix::from_lower(*nu, R->data());
    return sc;
  }

 private:
  static void expect_tokens(const ContentLine& line, std::size_t count) {
    if (line.tokens.size() != count) {
      const std::size_t column = line.tokens.size() > count ? line.tokens[count].column : 1;
      throw ParseError(line.number, column,
                       fmt::format("'{}' expects {} value(s) on its line", line.tokens.front().text, count - 1));
    }
  }

  Vector row(std::size_t cols, std::string_view name) {
    if (pos_ >= doc_.lines.size()) {
      throw DimensionError(doc_.total_lines + 1, 1, fmt::format("section '{}' is missing rows", name));
    }
    const ContentLine& line = doc_.lines[pos_++];
    if (line.tokens.size() != cols) {
      throw DimensionError(line.number, 1,
                           fmt::format("row of '{}' has {} values, expected {}", name, line.tokens.size(), cols));
    }
    Vector out;
    for (const text::Token& tok : line.tokens) out.push_back(text::parse_real(tok, line.number));
    return out;
  }

  Matrix matrix(std::size_t rows, std::size_t cols, std::string_view name) {
    std::vector<double> data;
    for (std::size_t r = 0; r < rows; ++r) {
      Vector v = row(cols, name);
      data.insert(data.end(), v.begin(), v.end());
    }
    return Matrix(rows, cols, data);
  }

  Matrix symmetric(std::size_t order, std::string_view name) {
    const std::size_t first = pos_;
    Matrix m = matrix(order, order, name);
    for (std::size_t i = 0; i < order; ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        if (m(i, j) != m(j, i)) {
          const ContentLine& line = doc_.lines[first + i];
          throw ParseError(line.number, line.tokens[j].column, fmt::format("'{}' is not symmetric", name));
        }
      }
    }
    return m;
  }

  const text::Document& doc_;
  std::size_t pos_ = 0;
};

}  // namespace

Scenario parse_scenario(std::istream& in) {
  const text::Document doc = text::read_document(in);
  return ScenarioReader(doc).read();
}

Scenario parse_scenario(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_scenario(in);
}

Scenario read_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", path));
  return parse_scenario(in);
}

void write_closed_loop_csv(std::ostream& out, const ClosedLoopReport& report) {
  const std::size_t nx = report.final_state.size();
  const std::size_t nu = report.steps.empty() ? 0 : report.steps.front().input.size();
  out << "step";
  for (std::size_t i = 0; i < nx; ++i) out << ",x" << i;
  for (std::size_t i = 0; i < nu; ++i) out << ",u" << i;
  out << ",iterations,n_max,gap,status\n";
  for (const StepRecord& s : report.steps) {
    out << s.step;
    for (double v : s.state) out << ',' << format_real(v);
    for (double v : s.input) out << ',' << format_real(v);
    out << ',' << s.iterations << ',' << s.n_max << ',' << format_real(s.gap) << ',' << to_string(s.status) << '\n';
  }
}

}  // namespace pcqp
