#include "text.hpp"

#include <charconv>
#include <istream>

#include <fmt/core.h>

#include "pcqp/problem.hpp"

namespace pcqp::text {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

std::vector<Token> tokenize(std::string_view line) {
  if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    const std::size_t start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    if (i > start) tokens.push_back({line.substr(start, i - start), start + 1});
  }
  return tokens;
}

}  // namespace

Document read_document(std::istream& in) {
  Document doc;
  std::string raw;
  while (std::getline(in, raw)) {
    ++doc.total_lines;
    const std::string& stored = doc.storage.emplace_back(std::move(raw));
    auto tokens = tokenize(stored);
    if (!tokens.empty()) doc.lines.push_back({doc.total_lines, stored, std::move(tokens)});
  }
  return doc;
}

double parse_real(const Token& tok, std::size_t line) {
  std::string_view s = tok.text;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec == std::errc::result_out_of_range) {
    throw ParseError(line, tok.column, fmt::format("value '{}' is out of range", tok.text));
  }
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(line, tok.column, fmt::format("expected a real number, found '{}'", tok.text));
  }
  return value;
}

std::size_t parse_count(const Token& tok, std::size_t line, bool allow_zero) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), value);
  if (ec != std::errc() || ptr != tok.text.data() + tok.text.size()) {
    throw ParseError(line, tok.column, fmt::format("expected a nonnegative integer, found '{}'", tok.text));
  }
  if (value == 0 && !allow_zero) throw ParseError(line, tok.column, "value must be at least 1");
  return value;
}

}  // namespace pcqp::text
