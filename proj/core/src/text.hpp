#pragma once

// Line/token helpers shared by the `.bqp` and scenario readers.

#include <cstddef>
#include <deque>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace pcqp::text {

struct Token {
  std::string_view text;
  std::size_t column;  // 1-based
};

/// A non-blank line after comment stripping. Tokens view into `raw`.
struct ContentLine {
  std::size_t number;  // 1-based
  std::string_view raw;
  std::vector<Token> tokens;
};

struct Document {
  std::deque<std::string> storage;  // stable addresses for the token views
  std::vector<ContentLine> lines;
  std::size_t total_lines = 0;
};

Document read_document(std::istream& in);

double parse_real(const Token& tok, std::size_t line);
std::size_t parse_count(const Token& tok, std::size_t line, bool allow_zero = false);

}  // namespace pcqp::text
