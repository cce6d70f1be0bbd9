#include <algorithm>
#include <set>

#include "lexer.hpp"
#include "reldiag/canonicalizer.hpp"
#include "reldiag/errors.hpp"
#include "reldiag/parsers.hpp"

namespace reldiag {

namespace {

using detail::Token;
using detail::TokenStream;
using detail::TokKind;

const std::set<std::string> kTrcKeywords = {"exists", "not", "and", "or", "in"};

class TrcParser {
 public:
  TrcParser(const std::string& text, bool full) : ts_(detail::tokenize(text)), full_(full) {}

  TrcFormulaQuery parse() {
    TrcFormulaQuery q;
    if (ts_.accept_sym("{")) {
      q.kind = QueryKind::QUERY;
      q.out_name = ident("output name");
      out_name_ = q.out_name;
      ts_.expect_sym("(");
      if (!ts_.is_sym(")")) {
        do {
          const Token& at = ts_.peek();
          std::string a = ident("output attribute");
          if (std::find(q.out_attrs.begin(), q.out_attrs.end(), a) != q.out_attrs.end())
            TokenStream::fail_at(at, "output attribute listed twice");
          q.out_attrs.push_back(a);
        } while (ts_.accept_sym(","));
      }
      ts_.expect_sym(")");
      ts_.expect_sym("|");
      q.body = formula();
      ts_.expect_sym("}");
    } else {
      q.kind = QueryKind::SENTENCE;
      q.body = formula();
    }
    if (!ts_.at_end()) ts_.fail("unexpected text after the query");
    return q;
  }

 private:
  std::string ident(const std::string& what) {
    const Token& t = ts_.peek();
    if (t.kind == TokKind::IDENT && kTrcKeywords.count(detail::to_lower(t.text)))
      ts_.fail("expected " + what + ", found keyword");
    return ts_.expect_ident(what);
  }

  TrcFormula formula() {
    std::vector<TrcFormula> parts{conj()};
    while (ts_.is_kw("or")) {
      if (!full_) ts_.fail("disjunction is outside the fragment; use full mode");
      ts_.next();
      parts.push_back(conj());
    }
    if (parts.size() == 1) return std::move(parts[0]);
    return TrcFormula::make_or(std::move(parts));
  }

  TrcFormula conj() {
    std::vector<TrcFormula> parts{unary()};
    while (ts_.accept_kw("and")) parts.push_back(unary());
    if (parts.size() == 1) return std::move(parts[0]);
    return TrcFormula::make_and(std::move(parts));
  }

  TrcFormula unary() {
    if (ts_.accept_kw("not")) return TrcFormula::make_not(unary());
    if (ts_.accept_kw("exists")) {
      std::vector<TrcVar> vars;
      do {
        ts_.accept_kw("exists");
        TrcVar v;
        v.name = ident("tuple variable");
        ts_.expect_kw("in");
        v.relation = ident("relation name");
        vars.push_back(std::move(v));
      } while (ts_.accept_sym(","));
      ts_.expect_sym("[");
      TrcFormula body = ts_.is_sym("]") ? TrcFormula::make_and({}) : formula();
      ts_.expect_sym("]");
      return TrcFormula::make_exists(std::move(vars), std::move(body));
    }
    if (ts_.accept_sym("(")) {
      TrcFormula body = ts_.is_sym(")") ? TrcFormula::make_and({}) : formula();
      ts_.expect_sym(")");
      return body;
    }
    return TrcFormula::make_atom(atom());
  }

  Operand operand() {
    if (ts_.at_value()) return ts_.expect_value();
    AttrRef r;
    r.var = ident("tuple variable");
    ts_.expect_sym(".");
    r.attr = ts_.expect_ident("attribute name");
    return r;
  }

  TrcPred atom() {
    const Token& start = ts_.peek();
    Operand lhs = operand();
    const Token& op_tok = ts_.peek();
    auto op = op_tok.kind == TokKind::SYM ? parse_op(op_tok.text) : std::nullopt;
    if (!op) ts_.fail("expected a comparison operator");
    ts_.next();
    Operand rhs = operand();
    TrcPred p;
    p.op = *op;
    if (std::holds_alternative<Value>(lhs)) {
      if (std::holds_alternative<Value>(rhs))
        TokenStream::fail_at(start, "a predicate needs at least one attribute");
      p.lhs = std::get<AttrRef>(rhs);
      p.op = flip(p.op);
      p.rhs = std::get<Value>(lhs);
    } else {
      p.lhs = std::get<AttrRef>(lhs);
      p.rhs = rhs;
    }
    // Output bindings are kept as Q.A = r.B.
    if (!out_name_.empty() && p.is_join() && p.rhs_ref().var == out_name_ &&
        p.lhs.var != out_name_) {
      AttrRef l = p.lhs;
      p.lhs = p.rhs_ref();
      p.rhs = l;
      p.op = flip(p.op);
    }
    return p;
  }

  TokenStream ts_;
  bool full_;
  std::string out_name_;
};

void scope_check(const TrcFormula& f, std::vector<std::string>& env, const TrcFormulaQuery& q) {
  using K = TrcFormula::Kind;
  auto check_ref = [&](const AttrRef& r) {
    if (q.kind == QueryKind::QUERY && r.var == q.out_name) {
      if (std::find(q.out_attrs.begin(), q.out_attrs.end(), r.attr) == q.out_attrs.end())
        throw SafetyFault("output attribute " + ref_text(r) + " is not declared");
      return;
    }
    if (std::find(env.begin(), env.end(), r.var) == env.end()) throw ScopeError(r.var);
  };
  switch (f.kind) {
    case K::ATOM:
      check_ref(f.atom.lhs);
      if (f.atom.is_join()) check_ref(f.atom.rhs_ref());
      return;
    case K::EXISTS: {
      std::size_t before = env.size();
      for (const auto& v : f.vars) {
        if (q.kind == QueryKind::QUERY && v.name == q.out_name)
          throw SafetyFault("tuple variable " + v.name + " clashes with the output name");
        env.push_back(v.name);
      }
      scope_check(f.kids[0], env, q);
      env.resize(before);
      return;
    }
    default:
      for (const auto& k : f.kids) scope_check(k, env, q);
  }
}

bool mentions_output(const TrcPred& p, const std::string& out) {
  return p.lhs.var == out || (p.is_join() && p.rhs_ref().var == out);
}

void output_outside_root(const TrcScope& s, const std::string& out) {
  for (const auto& p : s.preds)
    if (mentions_output(p, out))
      throw SafetyFault("output reference in " + pred_text(p) + " is not in the root scope");
  for (const auto& c : s.negations) output_outside_root(c, out);
}

}  // namespace

void check_trc(const TrcFormulaQuery& q) {
  std::vector<std::string> env;
  scope_check(q.body, env, q);
}

void check_trc(const TrcQuery& q) {
  check_trc(to_formula(q));
  if (q.kind == QueryKind::SENTENCE) return;
  for (const auto& c : q.root.negations) output_outside_root(c, q.out_name);
  std::vector<std::string> root_vars;
  for (const auto& v : q.root.vars) root_vars.push_back(v.name);
  for (const auto& a : q.out_attrs) {
    int bindings = 0;
    for (const auto& p : q.root.preds) {
      if (!mentions_output(p, q.out_name)) continue;
      if (p.lhs.var != q.out_name || !p.is_join() || p.rhs_ref().var == q.out_name ||
          p.op != CompOp::EQ)
        throw SafetyFault("output predicate " + pred_text(p) +
                          " must equate an output attribute with a table attribute");
      if (p.lhs.attr == a) ++bindings;
    }
    if (bindings != 1)
      throw SafetyFault("output attribute " + q.out_name + "." + a + " needs exactly one binding, has " +
                        std::to_string(bindings));
  }
}

TrcFormulaQuery parse_trc_formula(const std::string& text, ParseOptions opts) {
  TrcFormulaQuery q = TrcParser(text, opts.full).parse();
  check_trc(q);
  return q;
}

TrcQuery parse_trc(const std::string& text) {
  TrcFormulaQuery f = TrcParser(text, false).parse();
  check_trc(f);
  TrcQuery q = trc_pullup(f);
  check_trc(q);
  return q;
}

}  // namespace reldiag
