#include "lexer.hpp"
#include "reldiag/errors.hpp"
#include "reldiag/parsers.hpp"

namespace reldiag {

namespace {

using detail::Token;
using detail::TokenStream;
using detail::TokKind;

class RaParser {
 public:
  RaParser(const std::string& text, bool full) : ts_(detail::tokenize(text)), full_(full) {}

  RaExpr parse() {
    RaExpr e = expr();
    if (!ts_.at_end()) ts_.fail("unexpected text after the expression");
    return e;
  }

 private:
  bool op_ahead(const std::string& kw) const {
    return ts_.is_kw(kw) && (ts_.is_sym("(", 1) || ts_.is_sym("[", 1));
  }

  RaExpr expr() {
    const Token& start = ts_.peek();
    if (op_ahead("project")) {
      ts_.next();
      ts_.expect_sym("[");
      std::vector<RaRef> refs;
      if (!ts_.is_sym("]")) {
        do {
          refs.push_back(ref());
        } while (ts_.accept_sym(","));
      }
      ts_.expect_sym("]");
      return RaExpr::project(std::move(refs), unary_arg());
    }
    if (op_ahead("select")) {
      ts_.next();
      ts_.expect_sym("[");
      auto cs = conds();
      ts_.expect_sym("]");
      return RaExpr::select(std::move(cs), unary_arg());
    }
    if (op_ahead("join")) {
      ts_.next();
      std::vector<RaCond> cs;
      if (ts_.accept_sym("[")) {
        cs = conds();
        ts_.expect_sym("]");
      }
      auto [a, b] = binary_args();
      return RaExpr::join(std::move(cs), std::move(a), std::move(b));
    }
    if (op_ahead("product")) {
      ts_.next();
      ts_.expect_sym("(");
      RaExpr acc = expr();
      ts_.expect_sym(",");
      acc = RaExpr::product(std::move(acc), expr());
      while (ts_.accept_sym(",")) acc = RaExpr::product(std::move(acc), expr());
      ts_.expect_sym(")");
      return acc;
    }
    if (op_ahead("minus")) {
      ts_.next();
      auto [a, b] = binary_args();
      return RaExpr::minus(std::move(a), std::move(b));
    }
    if (op_ahead("union")) {
      if (!full_) TokenStream::fail_at(start, "Union is outside the fragment; use full mode");
      ts_.next();
      auto [a, b] = binary_args();
      return RaExpr::unite(std::move(a), std::move(b));
    }
    if (op_ahead("rename")) {
      ts_.next();
      ts_.expect_sym("[");
      std::string first = dotted();
      if (!ts_.is_sym("->")) {
        if (first.find('.') != std::string::npos) ts_.fail("expected '->'");
        ts_.expect_sym("]");
        return RaExpr::rename_qual(first, unary_arg());
      }
      std::vector<std::pair<std::string, std::string>> map;
      while (true) {
        ts_.expect_sym("->");
        map.emplace_back(first, ts_.expect_ident("new attribute name"));
        if (!ts_.accept_sym(",")) break;
        first = dotted();
      }
      ts_.expect_sym("]");
      return RaExpr::rename_attrs(std::move(map), unary_arg());
    }
    if (ts_.accept_sym("(")) {
      RaExpr e = expr();
      ts_.expect_sym(")");
      return e;
    }
    return RaExpr::rel(ts_.expect_ident("relation name or operator"));
  }

  RaExpr unary_arg() {
    ts_.expect_sym("(");
    RaExpr e = expr();
    ts_.expect_sym(")");
    return e;
  }

  std::pair<RaExpr, RaExpr> binary_args() {
    ts_.expect_sym("(");
    RaExpr a = expr();
    ts_.expect_sym(",");
    RaExpr b = expr();
    ts_.expect_sym(")");
    return {std::move(a), std::move(b)};
  }

  std::string dotted() {
    std::string s = ts_.expect_ident("attribute name");
    if (ts_.accept_sym(".")) s += "." + ts_.expect_ident("attribute name");
    return s;
  }

  RaRef ref() {
    std::string a = ts_.expect_ident("attribute name");
    if (ts_.accept_sym(".")) return RaRef{a, ts_.expect_ident("attribute name")};
    return RaRef{"", a};
  }

  std::vector<RaCond> conds() {
    std::vector<RaCond> out;
    do {
      const Token& start = ts_.peek();
      std::variant<RaRef, Value> lhs;
      if (ts_.at_value()) {
        lhs = ts_.expect_value();
      } else {
        lhs = ref();
      }
      const Token& op_tok = ts_.peek();
      auto op = op_tok.kind == TokKind::SYM ? parse_op(op_tok.text) : std::nullopt;
      if (!op) ts_.fail("expected a comparison operator");
      ts_.next();
      std::variant<RaRef, Value> rhs;
      if (ts_.at_value()) {
        rhs = ts_.expect_value();
      } else {
        rhs = ref();
      }
      RaCond c;
      if (std::holds_alternative<Value>(lhs)) {
        if (std::holds_alternative<Value>(rhs))
          TokenStream::fail_at(start, "a condition needs at least one attribute");
        c.lhs = std::get<RaRef>(rhs);
        c.op = flip(*op);
        c.rhs = lhs;
      } else {
        c.lhs = std::get<RaRef>(lhs);
        c.op = *op;
        c.rhs = rhs;
      }
      out.push_back(std::move(c));
    } while (ts_.accept_kw("and"));
    if (ts_.is_kw("or")) ts_.fail("selection conditions are conjunctions of simple predicates");
    return out;
  }

  TokenStream ts_;
  bool full_;
};

}  // namespace

RaExpr parse_ra(const std::string& text, const Schema* schema, ParseOptions opts) {
  RaExpr e = RaParser(text, opts.full).parse();
  if (schema) ra_attributes(e, *schema);
  return e;
}

}  // namespace reldiag
