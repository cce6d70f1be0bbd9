#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "lexer.hpp"
#include "reldiag/errors.hpp"
#include "reldiag/parsers.hpp"

namespace reldiag {

namespace {

using detail::Token;
using detail::TokenStream;
using detail::TokKind;

class DatalogParser {
 public:
  explicit DatalogParser(const std::string& text) : ts_(detail::tokenize(text)) {}

  DatalogProgram parse() {
    DatalogProgram p;
    while (!ts_.at_end()) p.rules.push_back(rule());
    if (p.rules.empty()) ts_.fail("a program needs at least one rule");
    p.answer = p.rules.back().head.pred;
    return p;
  }

 private:
  DlRule rule() {
    DlRule r;
    const Token& head_tok = ts_.peek();
    r.head = atom();
    std::set<std::string> seen;
    for (const auto& a : r.head.args) {
      if (is_anonymous(a)) TokenStream::fail_at(head_tok, "rule heads cannot use '_'");
      if (!seen.insert(a).second)
        TokenStream::fail_at(head_tok, "head variable " + a + " repeated; use an equality");
    }
    ts_.expect_sym(":-");
    do {
      r.body.push_back(literal());
    } while (ts_.accept_sym(","));
    ts_.expect_sym(".");
    return r;
  }

  std::string var() {
    const Token& t = ts_.peek();
    if (t.kind == TokKind::IDENT && t.text == "_") {
      ts_.next();
      return "_" + std::to_string(++anon_);
    }
    if (t.kind == TokKind::INT || t.kind == TokKind::STRING || ts_.is_sym("-"))
      ts_.fail("constants in atoms are written as built-ins, e.g. x = 1");
    if (t.kind == TokKind::IDENT && detail::to_lower(t.text) == "not")
      ts_.fail("expected a variable, found keyword");
    return ts_.expect_ident("variable");
  }

  DlAtom atom() {
    DlAtom a;
    a.pred = ts_.expect_ident("predicate name");
    if (ts_.accept_sym("(")) {
      if (!ts_.is_sym(")")) {
        do {
          a.args.push_back(var());
        } while (ts_.accept_sym(","));
      }
      ts_.expect_sym(")");
    }
    return a;
  }

  DlLiteral literal() {
    DlLiteral l;
    if (ts_.accept_kw("not")) {
      l.kind = DlLiteral::Kind::NEG;
      l.atom = atom();
      return l;
    }
    // Built-in when the first operand is followed by a comparison operator.
    bool lhs_value = ts_.at_value();
    std::size_t ahead = lhs_value ? (ts_.is_sym("-") ? 2 : 1) : 1;
    const Token& after = ts_.peek(ahead);
    bool builtin = after.kind == TokKind::SYM && parse_op(after.text).has_value();
    if (!builtin) {
      if (lhs_value) ts_.fail("expected an atom or a comparison");
      l.kind = DlLiteral::Kind::POS;
      l.atom = atom();
      return l;
    }
    l.kind = DlLiteral::Kind::BUILTIN;
    const Token& start = ts_.peek();
    std::variant<std::string, Value> lhs;
    if (lhs_value) {
      lhs = ts_.expect_value();
    } else {
      lhs = var();
    }
    CompOp op = *parse_op(ts_.next().text);
    std::variant<std::string, Value> rhs;
    if (ts_.at_value()) {
      rhs = ts_.expect_value();
    } else {
      rhs = var();
    }
    if (std::holds_alternative<Value>(lhs)) {
      if (std::holds_alternative<Value>(rhs))
        TokenStream::fail_at(start, "a built-in needs at least one variable");
      l.builtin.lhs = std::get<std::string>(rhs);
      l.builtin.op = flip(op);
      l.builtin.rhs = lhs;
    } else {
      l.builtin.lhs = std::get<std::string>(lhs);
      l.builtin.op = op;
      l.builtin.rhs = rhs;
    }
    return l;
  }

  TokenStream ts_;
  int anon_ = 0;
};

std::set<std::string> bound_vars(const DlRule& r) {
  std::set<std::string> bound;
  for (const auto& l : r.body)
    if (l.kind == DlLiteral::Kind::POS)
      for (const auto& a : l.atom.args) bound.insert(a);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& l : r.body) {
      if (l.kind != DlLiteral::Kind::BUILTIN || l.builtin.op != CompOp::EQ) continue;
      const auto& b = l.builtin;
      if (!b.rhs_is_var()) {
        changed |= bound.insert(b.lhs).second;
        continue;
      }
      const auto& rv = std::get<std::string>(b.rhs);
      if (bound.count(b.lhs) && !bound.count(rv)) changed |= bound.insert(rv).second;
      if (bound.count(rv) && !bound.count(b.lhs)) changed |= bound.insert(b.lhs).second;
    }
  }
  return bound;
}

}  // namespace

void validate_datalog(const DatalogProgram& p) {
  std::map<std::string, std::size_t> arity;
  auto note_arity = [&](const DlAtom& a) {
    auto [it, fresh] = arity.emplace(a.pred, a.args.size());
    if (!fresh && it->second != a.args.size())
      throw SchemaError("predicate " + a.pred + " used with arities " +
                        std::to_string(it->second) + " and " + std::to_string(a.args.size()));
  };
  std::set<std::string> heads;
  for (const auto& r : p.rules) {
    if (!heads.insert(r.head.pred).second)
      throw DuplicateHeadFault("predicate " + r.head.pred + " heads more than one rule");
    note_arity(r.head);
    for (const auto& l : r.body)
      if (l.kind != DlLiteral::Kind::BUILTIN) note_arity(l.atom);
  }
  if (!heads.count(p.answer)) throw SchemaError("answer predicate " + p.answer + " has no rule");

  // Dependency graph over IDBs; any cycle is recursion.
  std::map<std::string, std::vector<std::string>> deps;
  for (const auto& r : p.rules)
    for (const auto& l : r.body)
      if (l.kind != DlLiteral::Kind::BUILTIN && heads.count(l.atom.pred))
        deps[r.head.pred].push_back(l.atom.pred);
  std::map<std::string, int> state;  // 1 = on stack, 2 = done
  std::function<void(const std::string&)> visit = [&](const std::string& n) {
    if (state[n] == 2) return;
    if (state[n] == 1) throw RecursionFault("predicate " + n + " depends on itself");
    state[n] = 1;
    for (const auto& d : deps[n]) visit(d);
    state[n] = 2;
  };
  for (const auto& h : heads) visit(h);

  for (const auto& r : p.rules) {
    auto bound = bound_vars(r);
    auto need = [&](const std::string& v) {
      if (!bound.count(v))
        throw SafetyFault("variable " + (is_anonymous(v) ? std::string("_") : v) +
                          " is unsafe in the rule for " + r.head.pred);
    };
    for (const auto& a : r.head.args) need(a);
    for (const auto& l : r.body) {
      // anonymous variables under negation are quantified inside it
      if (l.kind == DlLiteral::Kind::NEG)
        for (const auto& a : l.atom.args)
          if (!is_anonymous(a)) need(a);
      if (l.kind == DlLiteral::Kind::BUILTIN) {
        need(l.builtin.lhs);
        if (l.builtin.rhs_is_var()) need(std::get<std::string>(l.builtin.rhs));
      }
    }
  }
}

DatalogProgram parse_datalog(const std::string& text) {
  DatalogProgram p = DatalogParser(text).parse();
  validate_datalog(p);
  return p;
}

}  // namespace reldiag
