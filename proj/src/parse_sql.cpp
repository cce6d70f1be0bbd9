#include <set>

#include "lexer.hpp"
#include "reldiag/errors.hpp"
#include "reldiag/parsers.hpp"

namespace reldiag {

namespace {

using detail::Token;
using detail::TokenStream;
using detail::TokKind;

const std::set<std::string> kSqlKeywords = {"select", "distinct", "from", "where", "and",
                                            "or",     "not",      "exists", "in",  "all",
                                            "any",    "some",     "as"};

class SqlParser {
 public:
  SqlParser(const std::string& text, bool full) : ts_(detail::tokenize(text)), full_(full) {}

  SqlQuery parse() {
    SqlQuery q;
    ts_.expect_kw("select");
    if (ts_.accept_kw("distinct")) {
      q.head = SqlQuery::Head::DISTINCT;
      if (ts_.is_sym("*")) ts_.fail("'*' is only allowed in subqueries");
      q.select.cols = columns();
      ts_.expect_kw("from");
      q.select.from = from_list();
      if (ts_.accept_kw("where")) q.select.where.push_back(cond());
    } else if (ts_.is_kw("not") && ts_.is_kw("exists", 1)) {
      ts_.next();
      ts_.next();
      q.head = SqlQuery::Head::NOT_EXISTS;
      q.select = paren_subquery();
    } else if (ts_.accept_kw("exists")) {
      q.head = SqlQuery::Head::EXISTS;
      q.select = paren_subquery();
    } else if (ts_.accept_kw("not")) {
      q.head = SqlQuery::Head::NOT;
      ts_.expect_sym("(");
      q.pred.push_back(cond());
      ts_.expect_sym(")");
    } else {
      ts_.fail("expected DISTINCT, NOT or EXISTS after SELECT");
    }
    ts_.accept_sym(";");
    if (!ts_.at_end()) ts_.fail("unexpected text after the query");
    return q;
  }

 private:
  bool is_keyword(const Token& t) const {
    return t.kind == TokKind::IDENT && kSqlKeywords.count(detail::to_lower(t.text));
  }

  std::string name(const std::string& what) {
    if (is_keyword(ts_.peek())) ts_.fail("expected " + what + ", found keyword");
    return ts_.expect_ident(what);
  }

  SqlCol column() {
    SqlCol c;
    std::string first = name("column");
    if (ts_.accept_sym(".")) {
      c.table = first;
      c.attr = name("attribute name");
    } else {
      c.attr = first;
    }
    return c;
  }

  std::vector<SqlCol> columns() {
    std::vector<SqlCol> out;
    do {
      out.push_back(column());
    } while (ts_.accept_sym(","));
    return out;
  }

  std::vector<SqlFrom> from_list() {
    std::vector<SqlFrom> out;
    do {
      SqlFrom f;
      f.relation = name("table name");
      f.alias = f.relation;
      if (ts_.accept_kw("as")) {
        f.alias = name("alias");
      } else if (ts_.peek().kind == TokKind::IDENT && !is_keyword(ts_.peek())) {
        f.alias = name("alias");
      }
      out.push_back(std::move(f));
    } while (ts_.accept_sym(","));
    return out;
  }

  SqlSelect subquery() {
    SqlSelect s;
    ts_.expect_kw("select");
    ts_.accept_kw("distinct");
    if (ts_.accept_sym("*")) {
      s.star = true;
    } else {
      s.cols = columns();
    }
    ts_.expect_kw("from");
    s.from = from_list();
    if (ts_.accept_kw("where")) s.where.push_back(cond());
    return s;
  }

  SqlSelect paren_subquery() {
    ts_.expect_sym("(");
    SqlSelect s = subquery();
    ts_.expect_sym(")");
    return s;
  }

  SqlCond cond() {
    std::vector<SqlCond> parts{conj()};
    while (ts_.is_kw("or")) {
      if (!full_) ts_.fail("disjunction is outside the fragment; use full mode");
      ts_.next();
      parts.push_back(conj());
    }
    if (parts.size() == 1) return std::move(parts[0]);
    SqlCond c;
    c.kind = SqlCond::Kind::OR;
    c.kids = std::move(parts);
    return c;
  }

  SqlCond conj() {
    std::vector<SqlCond> parts{unary()};
    while (ts_.accept_kw("and")) parts.push_back(unary());
    if (parts.size() == 1) return std::move(parts[0]);
    SqlCond c;
    c.kind = SqlCond::Kind::AND;
    c.kids = std::move(parts);
    return c;
  }

  SqlCond unary() {
    SqlCond c;
    if (ts_.is_kw("not") && ts_.is_kw("exists", 1)) {
      ts_.next();
      ts_.next();
      c.kind = SqlCond::Kind::NOT_EXISTS;
      c.sub.push_back(paren_subquery());
      return c;
    }
    if (ts_.accept_kw("exists")) {
      c.kind = SqlCond::Kind::EXISTS;
      c.sub.push_back(paren_subquery());
      return c;
    }
    if (ts_.accept_kw("not")) {
      c.kind = SqlCond::Kind::NOT;
      ts_.expect_sym("(");
      c.kids.push_back(cond());
      ts_.expect_sym(")");
      return c;
    }
    if (ts_.is_sym("(")) {
      // Either a row constructor for IN or a parenthesized condition.
      std::size_t mark = ts_.mark();
      ts_.next();
      try {
        std::vector<SqlCol> cols = columns();
        ts_.expect_sym(")");
        if (ts_.is_kw("in") || (ts_.is_kw("not") && ts_.is_kw("in", 1))) return in_pred(cols);
      } catch (const SourceError&) {
      }
      ts_.reset(mark);
      ts_.next();
      SqlCond inner = cond();
      ts_.expect_sym(")");
      return inner;
    }
    return comparison();
  }

  SqlCond in_pred(std::vector<SqlCol> lhs) {
    SqlCond c;
    c.kind = ts_.accept_kw("not") ? SqlCond::Kind::NOT_IN : SqlCond::Kind::IN;
    ts_.expect_kw("in");
    const Token& at = ts_.peek();
    c.lhs = std::move(lhs);
    c.sub.push_back(paren_subquery());
    if (c.sub[0].star || c.sub[0].cols.size() != c.lhs.size())
      TokenStream::fail_at(at, "IN subquery must select as many columns as the left side");
    return c;
  }

  SqlCond comparison() {
    const Token& start = ts_.peek();
    if (ts_.at_value()) {
      Value v = ts_.expect_value();
      auto op = op_token();
      SqlCond c;
      c.kind = SqlCond::Kind::CMP;
      c.lhs.push_back(column());
      c.op = flip(op);
      c.rhs = v;
      return c;
    }
    SqlCol lhs = column();
    if (ts_.is_kw("in") || (ts_.is_kw("not") && ts_.is_kw("in", 1))) return in_pred({lhs});
    CompOp op = op_token();
    SqlCond c;
    c.lhs.push_back(lhs);
    c.op = op;
    if (ts_.is_kw("all") || ts_.is_kw("any") || ts_.is_kw("some")) {
      c.kind = ts_.is_kw("all") ? SqlCond::Kind::ALL : SqlCond::Kind::ANY;
      ts_.next();
      const Token& at = ts_.peek();
      c.sub.push_back(paren_subquery());
      if (c.sub[0].star || c.sub[0].cols.size() != 1)
        TokenStream::fail_at(at, "quantified comparison needs a one-column subquery");
      return c;
    }
    c.kind = SqlCond::Kind::CMP;
    if (ts_.at_value()) {
      c.rhs = ts_.expect_value();
    } else {
      c.rhs = column();
    }
    (void)start;
    return c;
  }

  CompOp op_token() {
    const Token& t = ts_.peek();
    auto op = t.kind == TokKind::SYM ? parse_op(t.text) : std::nullopt;
    if (!op) ts_.fail("expected a comparison operator");
    ts_.next();
    return *op;
  }

  TokenStream ts_;
  bool full_;
};

}  // namespace

SqlQuery parse_sql(const std::string& text, ParseOptions opts) {
  return SqlParser(text, opts.full).parse();
}

}  // namespace reldiag
