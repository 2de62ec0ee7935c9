#pragma once

#include <charconv>
#include <cstdlib>
#include <string>
#include <string_view>

#include "aois/error.hpp"

namespace aois::detail {

// Whitespace-separated token reader; formats here allow arbitrary line
// breaking, so tokens are the only structure that matters.
class TokenReader {
 public:
  explicit TokenReader(std::string_view text, std::string_view what)
      : text_(text), what_(what) {}

  bool at_end() {
    skip_ws();
    return pos_ >= text_.size();
  }

  std::string_view next(const char* expected) {
    skip_ws();
    if (pos_ >= text_.size())
      throw ParseError(std::string(what_) + ": unexpected end of input, expected " +
                       expected);
    std::size_t start = pos_;
    while (pos_ < text_.size() && !is_ws(text_[pos_])) ++pos_;
    return text_.substr(start, pos_ - start);
  }

  long long next_int(const char* expected) {
    std::string_view tok = next(expected);
    long long value = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
      throw ParseError(std::string(what_) + ": expected " + expected + ", got '" +
                       std::string(tok) + "'");
    return value;
  }

  double next_real(const char* expected) {
    std::string_view tok = next(expected);
    std::string buf(tok);
    char* end = nullptr;
    double value = std::strtod(buf.c_str(), &end);
    if (end != buf.c_str() + buf.size())
      throw ParseError(std::string(what_) + ": expected " + expected + ", got '" + buf +
                       "'");
    return value;
  }

  // Skips horizontal whitespace only; true when the next character ends the
  // current line (newline or end of input). Lets line-structured headers be
  // told apart from the free-form token stream that follows them.
  bool at_line_end() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\r'))
      ++pos_;
    return pos_ >= text_.size() || text_[pos_] == '\n';
  }

 private:
  static bool is_ws(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
  }
  void skip_ws() {
    while (pos_ < text_.size() && is_ws(text_[pos_])) ++pos_;
  }

  std::string_view text_;
  std::string_view what_;
  std::size_t pos_ = 0;
};

std::string read_file(const std::string& path, const char* what);

}  // namespace aois::detail
