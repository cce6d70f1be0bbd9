#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "reldiag/errors.hpp"
#include "reldiag/model.hpp"

namespace reldiag::detail {

enum class TokKind { IDENT, INT, STRING, SYM, END };

struct Token {
  TokKind kind = TokKind::END;
  std::string text;
  std::int64_t number = 0;
  std::size_t line = 1;
  std::size_t col = 1;
};

std::vector<Token> tokenize(const std::string& text);

/// Cursor over a token vector with the usual expect/accept helpers.
class TokenStream {
 public:
  explicit TokenStream(std::vector<Token> toks) : toks_(std::move(toks)) {}

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = pos_ + ahead;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  const Token& next() {
    const Token& t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  bool at_end() const { return peek().kind == TokKind::END; }
  std::size_t mark() const { return pos_; }
  void reset(std::size_t pos) { pos_ = pos; }

  bool is_sym(const std::string& s, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == TokKind::SYM && t.text == s;
  }
  /// Case-insensitive keyword match on identifiers.
  bool is_kw(const std::string& kw, std::size_t ahead = 0) const;
  bool accept_sym(const std::string& s) {
    if (!is_sym(s)) return false;
    next();
    return true;
  }
  bool accept_kw(const std::string& kw) {
    if (!is_kw(kw)) return false;
    next();
    return true;
  }
  void expect_sym(const std::string& s);
  void expect_kw(const std::string& kw);
  std::string expect_ident(const std::string& what = "identifier");
  /// Integer (with optional leading minus) or quoted string.
  Value expect_value();
  bool at_value() const;

  [[noreturn]] void fail(const std::string& message) const { fail_at(peek(), message); }
  [[noreturn]] static void fail_at(const Token& t, const std::string& message);

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

std::string to_lower(std::string s);
std::string to_upper(std::string s);
bool is_identifier(const std::string& s);

}  // namespace reldiag::detail
