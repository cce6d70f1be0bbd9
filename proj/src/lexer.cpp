#include "lexer.hpp"

#include <cctype>

namespace reldiag::detail {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

const char* const kTwoCharSyms[] = {"<=", ">=", "<>", "!=", ":-", "->"};
const std::string kOneCharSyms = "()[]{},.|*=<>-;:";

}  // namespace

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> out;
  std::size_t i = 0, line = 1, col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < text.size(); ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#' || c == '%' || (c == '-' && i + 1 < text.size() && text[i + 1] == '-')) {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < text.size() && ident_char(text[j])) ++j;
      t.kind = TokKind::IDENT;
      t.text = text.substr(i, j - i);
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      t.kind = TokKind::INT;
      t.text = text.substr(i, j - i);
      try {
        t.number = std::stoll(t.text);
      } catch (const std::exception&) {
        throw SourceError(line, col, "integer literal out of range", t.text);
      }
      advance(j - i);
    } else if (c == '\'' || c == '"') {
      std::string value;
      std::size_t j = i + 1;
      bool closed = false;
      while (j < text.size()) {
        if (text[j] == c) {
          if (j + 1 < text.size() && text[j + 1] == c) {
            value += c;
            j += 2;
            continue;
          }
          closed = true;
          break;
        }
        value += text[j++];
      }
      if (!closed) throw SourceError(line, col, "unterminated string literal", text.substr(i, 1));
      t.kind = TokKind::STRING;
      t.text = value;
      advance(j + 1 - i);
    } else {
      std::string two = text.substr(i, 2);
      bool matched = false;
      for (const char* s : kTwoCharSyms) {
        if (two == s) {
          t.kind = TokKind::SYM;
          t.text = two;
          advance(2);
          matched = true;
          break;
        }
      }
      if (!matched) {
        // Unicode spellings used in hand-written queries.
        static const std::pair<const char*, const char*> kUnicode[] = {
            {"≤", "<="}, {"≥", ">="}, {"≠", "!="}, {"←", ":-"}};
        for (const auto& [u, ascii] : kUnicode) {
          std::string us(u);
          if (text.compare(i, us.size(), us) == 0) {
            t.kind = TokKind::SYM;
            t.text = ascii;
            i += us.size();
            col += 1;
            matched = true;
            break;
          }
        }
      }
      if (!matched) {
        if (kOneCharSyms.find(c) == std::string::npos)
          throw SourceError(line, col, "unexpected character", std::string(1, c));
        t.kind = TokKind::SYM;
        t.text = std::string(1, c);
        advance(1);
      }
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.kind = TokKind::END;
  end.line = line;
  end.col = col;
  out.push_back(end);
  return out;
}

std::string to_lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string to_upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

bool is_identifier(const std::string& s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  for (char c : s)
    if (!ident_char(c)) return false;
  return true;
}

bool TokenStream::is_kw(const std::string& kw, std::size_t ahead) const {
  const Token& t = peek(ahead);
  return t.kind == TokKind::IDENT && to_lower(t.text) == kw;
}

void TokenStream::expect_sym(const std::string& s) {
  if (!accept_sym(s)) fail("expected '" + s + "'");
}

void TokenStream::expect_kw(const std::string& kw) {
  if (!accept_kw(kw)) fail("expected keyword '" + kw + "'");
}

std::string TokenStream::expect_ident(const std::string& what) {
  const Token& t = peek();
  if (t.kind != TokKind::IDENT || !is_identifier(t.text)) fail("expected " + what);
  return next().text;
}

bool TokenStream::at_value() const {
  const Token& t = peek();
  if (t.kind == TokKind::INT || t.kind == TokKind::STRING) return true;
  return is_sym("-") && peek(1).kind == TokKind::INT;
}

Value TokenStream::expect_value() {
  bool negative = accept_sym("-");
  const Token& t = peek();
  if (t.kind == TokKind::INT) {
    next();
    return Value{negative ? -t.number : t.number};
  }
  if (t.kind == TokKind::STRING && !negative) {
    next();
    return Value{t.text};
  }
  fail("expected a number or string literal");
}

void TokenStream::fail_at(const Token& t, const std::string& message) {
  std::string shown = t.kind == TokKind::END ? "end of input" : t.text;
  if (t.kind == TokKind::STRING) shown = "'" + t.text + "'";
  throw SourceError(t.line, t.col, message, shown);
}

}  // namespace reldiag::detail
