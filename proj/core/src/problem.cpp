#include "pcqp/problem.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include <fmt/core.h>

#include "pcqp/random.hpp"
#include "text.hpp"

namespace pcqp {

BoxQP::BoxQP(SymMatrix H, Vector h) : H_(std::move(H)), h_(std::move(h)) {
  if (H_.order() != h_.size()) throw LengthMismatch(H_.order(), h_.size());
}

double BoxQP::objective(std::span<const double> z) const { return 0.5 * H_.quadratic_form(z) + dot(h_, z); }

ValidationReport validate(const BoxQP& p) {
  ValidationReport report;
  if (p.dim() == 0) report.findings.push_back({FindingKind::kEmptyDimension, "dimension n must be at least 1"});
  const std::size_t n = p.dim();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      if (!std::isfinite(p.H()(i, j))) {
        report.findings.push_back(
            {FindingKind::kNonFiniteEntry, fmt::format("H({},{}) is not finite", i, j)});
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(p.h()[i])) {
      report.findings.push_back({FindingKind::kNonFiniteEntry, fmt::format("h({}) is not finite", i)});
    }
  }
  return report;
}

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& what)
    : std::runtime_error(fmt::format("line {}, column {}: {}", line, column, what)),
      line_(line),
      column_(column) {}

namespace {

using text::ContentLine;
using text::Token;

Vector parse_row(const ContentLine& line, std::size_t n, std::string_view what) {
  if (line.tokens.size() != n) {
    const std::size_t column = line.tokens.size() > n ? line.tokens[n].column : 1;
    throw DimensionError(line.number, column,
                         fmt::format("{} has {} values, expected {}", what, line.tokens.size(), n));
  }
  Vector row;
  row.reserve(n);
  for (const Token& tok : line.tokens) row.push_back(text::parse_real(tok, line.number));
  return row;
}

}  // namespace

BoxQP parse_bqp(std::istream& in) {
  const text::Document doc = text::read_document(in);
  const std::vector<ContentLine>& lines = doc.lines;
  const std::size_t number = doc.total_lines;
  if (lines.empty()) throw ParseError(number + 1, 1, "missing dimension line");

  const ContentLine& header = lines.front();
  if (header.tokens.size() != 1) {
    throw ParseError(header.number, header.tokens[1].column, "dimension line must hold a single integer");
  }
  const std::size_t n = text::parse_count(header.tokens.front(), header.number);
  if (lines.size() < n + 2) {
    throw DimensionError(number + 1, 1,
                         fmt::format("expected {} rows of H and one row of h, found {} rows in total", n,
                                     lines.size() - 1));
  }

  std::vector<double> entries;
  entries.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    Vector row = parse_row(lines[1 + i], n, fmt::format("row {} of H", i + 1));
    entries.insert(entries.end(), row.begin(), row.end());
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const double lower = entries[i * n + j];
      const double upper = entries[j * n + i];
      if (!(lower == upper) && !(std::isnan(lower) && std::isnan(upper))) {
        const ContentLine& line = lines[1 + j];
        throw ParseError(line.number, line.tokens[i].column,
                         fmt::format("H is not symmetric: H({},{}) = {} but H({},{}) = {}", j + 1, i + 1,
                                     line.tokens[i].text, i + 1, j + 1, lines[1 + i].tokens[j].text));
      }
    }
  }
  Vector h = parse_row(lines[1 + n], n, "h");
  if (lines.size() > n + 2) {
    const ContentLine& extra = lines[n + 2];
    throw ParseError(extra.number, extra.tokens.front().column, "unexpected content after h");
  }
  return BoxQP(SymMatrix::from_lower(n, entries), std::move(h));
}

BoxQP parse_bqp(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_bqp(in);
}

BoxQP read_bqp_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", path));
  return parse_bqp(in);
}

std::string serialize_bqp(const BoxQP& p) {
  const std::size_t n = p.dim();
  std::string out = fmt::format("{}\n", n);
  auto append_row = [&out](auto&& at, std::size_t len) {
    for (std::size_t j = 0; j < len; ++j) {
      if (j > 0) out += ' ';
      out += fmt::format("{:.17g}", at(j));
    }
    out += '\n';
  };
  for (std::size_t i = 0; i < n; ++i) append_row([&](std::size_t j) { return p.H()(i, j); }, n);
  append_row([&](std::size_t j) { return p.h()[j]; }, n);
  return out;
}

BoxQP random_boxqp(const GeneratorConfig& cfg) {
  const std::size_t n = cfg.n;
  if (n == 0) throw std::invalid_argument("generator dimension must be at least 1");
  if (!(cfg.regularization >= 0.0)) throw std::invalid_argument("regularization must be nonnegative");
  if (!(cfg.h_scale > 0.0)) throw std::invalid_argument("h_scale must be positive");

  constexpr std::uint64_t kMatrixStream = 0x57;  // 'W'
  constexpr std::uint64_t kLinearStream = 0x68;  // 'h'

  NormalStream w_draws(derive_seed(cfg.seed, kMatrixStream));
  std::vector<double> w(n * n);
  for (double& x : w) x = w_draws.next();

  SymMatrix H(n);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::span<const double> wi(w.data() + i * n, n);
    for (std::size_t j = 0; j <= i; ++j) {
      std::span<const double> wj(w.data() + j * n, n);
      double value = dot(wi, wj) * inv_n;
      if (i == j) value += cfg.regularization;
      H.set(i, j, value);
    }
  }

  NormalStream h_draws(derive_seed(cfg.seed, kLinearStream));
  Vector h(n);
  for (double& x : h) x = cfg.h_scale * h_draws.next();
  return BoxQP(std::move(H), std::move(h));
}

}  // namespace pcqp
