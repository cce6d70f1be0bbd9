#include <algorithm>

#include "internal.hpp"
#include "reldiag/canonicalizer.hpp"
#include "reldiag/errors.hpp"
#include "reldiag/translators.hpp"

namespace reldiag {

namespace detail {

namespace {

std::vector<TrcVar> from_vars(const SqlSelect& s) {
  std::vector<TrcVar> out;
  for (const auto& f : s.from) out.push_back(TrcVar{f.alias, f.relation});
  return out;
}

AttrRef as_ref(const SqlCol& c) { return AttrRef{c.table, c.attr}; }

TrcFormula cond_formula(const SqlCond& c);

TrcFormula select_formula(const SqlSelect& s) {
  TrcFormula body = s.where.empty() ? TrcFormula::make_and({}) : cond_formula(s.where[0]);
  return TrcFormula::make_exists(from_vars(s), std::move(body));
}

TrcFormula cond_formula(const SqlCond& c) {
  using K = SqlCond::Kind;
  switch (c.kind) {
    case K::AND:
    case K::OR: {
      std::vector<TrcFormula> kids;
      for (const auto& k : c.kids) kids.push_back(cond_formula(k));
      return c.kind == K::AND ? TrcFormula::make_and(std::move(kids))
                              : TrcFormula::make_or(std::move(kids));
    }
    case K::CMP: {
      TrcPred p;
      p.lhs = as_ref(c.lhs[0]);
      p.op = c.op;
      if (auto* col = std::get_if<SqlCol>(&c.rhs)) {
        p.rhs = as_ref(*col);
      } else {
        p.rhs = std::get<Value>(c.rhs);
      }
      return TrcFormula::make_atom(std::move(p));
    }
    case K::NOT: return TrcFormula::make_not(cond_formula(c.kids[0]));
    case K::EXISTS: return select_formula(c.sub[0]);
    case K::NOT_EXISTS: return TrcFormula::make_not(select_formula(c.sub[0]));
    default:
      throw TranslationError("IN / ALL / ANY must be rewritten before translation");
  }
}

}  // namespace

TrcFormulaQuery sql_formula(const SqlQuery& q) {
  TrcFormulaQuery out;
  switch (q.head) {
    case SqlQuery::Head::DISTINCT: {
      out.kind = QueryKind::QUERY;
      std::vector<std::string> aliases;
      for (const auto& f : q.select.from) aliases.push_back(f.alias);
      out.out_name = fresh_name("Q", aliases);
      std::vector<TrcFormula> items;
      for (const auto& c : q.select.cols) {
        std::string name = fresh_name(c.attr, out.out_attrs);
        out.out_attrs.push_back(name);
        TrcPred p;
        p.lhs = AttrRef{out.out_name, name};
        p.op = CompOp::EQ;
        p.rhs = as_ref(c);
        items.push_back(TrcFormula::make_atom(std::move(p)));
      }
      if (!q.select.where.empty()) items.push_back(cond_formula(q.select.where[0]));
      out.body = TrcFormula::make_exists(from_vars(q.select), TrcFormula::make_and(std::move(items)));
      return out;
    }
    case SqlQuery::Head::EXISTS:
      out.kind = QueryKind::SENTENCE;
      out.body = select_formula(q.select);
      return out;
    case SqlQuery::Head::NOT_EXISTS:
      out.kind = QueryKind::SENTENCE;
      out.body = TrcFormula::make_not(select_formula(q.select));
      return out;
    case SqlQuery::Head::NOT:
      out.kind = QueryKind::SENTENCE;
      out.body = TrcFormula::make_not(cond_formula(q.pred[0]));
      return out;
  }
  return out;
}

}  // namespace detail

TrcFormulaQuery sql_to_trc_formula(const SqlQuery& q, const Schema* schema) {
  return detail::sql_formula(sql_normalize_subqueries(q, schema));
}

TrcQuery sql_to_trc(const SqlQuery& q, const Schema* schema) {
  SqlQuery canon = sql_canonicalize(q, schema);
  return trc_pullup(detail::sql_formula(canon));
}

namespace {

SqlCol as_col(const AttrRef& r) { return SqlCol{r.var, r.attr}; }

SqlCond pred_cond(const TrcPred& p) {
  SqlCond c;
  c.kind = SqlCond::Kind::CMP;
  c.lhs.push_back(as_col(p.lhs));
  c.op = p.op;
  if (p.is_join()) {
    c.rhs = as_col(p.rhs_ref());
  } else {
    c.rhs = p.rhs_value();
  }
  return c;
}

std::vector<SqlFrom> from_of(const TrcScope& s) {
  std::vector<SqlFrom> out;
  for (const auto& v : s.vars) out.push_back(SqlFrom{v.relation, v.name});
  return out;
}

SqlCond child_cond(const TrcScope& c);

std::vector<SqlCond> items_of(const TrcScope& s, const std::string& skip_var) {
  std::vector<SqlCond> out;
  for (const auto& p : s.preds)
    if (skip_var.empty() || p.lhs.var != skip_var) out.push_back(pred_cond(p));
  for (const auto& c : s.negations) out.push_back(child_cond(c));
  return out;
}

std::vector<SqlCond> as_where(std::vector<SqlCond> items) {
  if (items.empty()) return {};
  if (items.size() == 1) return items;
  SqlCond all;
  all.kind = SqlCond::Kind::AND;
  all.kids = std::move(items);
  return {std::move(all)};
}

SqlSelect star_select(const TrcScope& s) {
  SqlSelect sel;
  sel.star = true;
  sel.from = from_of(s);
  sel.where = as_where(items_of(s, ""));
  return sel;
}

SqlCond child_cond(const TrcScope& c) {
  SqlCond out;
  if (!c.vars.empty()) {
    out.kind = SqlCond::Kind::NOT_EXISTS;
    out.sub.push_back(star_select(c));
    return out;
  }
  auto w = as_where(items_of(c, ""));
  if (w.empty()) throw TranslationError("an empty negation scope has no SQL form");
  out.kind = SqlCond::Kind::NOT;
  out.kids.push_back(std::move(w[0]));
  return out;
}

}  // namespace

SqlQuery trc_to_sql(const TrcQuery& q) {
  SqlQuery out;
  if (q.kind == QueryKind::QUERY) {
    out.head = SqlQuery::Head::DISTINCT;
    for (const auto& a : q.out_attrs) {
      for (const auto& p : q.root.preds)
        if (p.lhs.var == q.out_name && p.lhs.attr == a && p.is_join())
          out.select.cols.push_back(as_col(p.rhs_ref()));
    }
    out.select.from = from_of(q.root);
    out.select.where = as_where(items_of(q.root, q.out_name));
    return out;
  }
  if (!q.root.vars.empty()) {
    out.head = SqlQuery::Head::EXISTS;
    out.select = star_select(q.root);
    return out;
  }
  if (q.root.preds.empty() && q.root.negations.size() == 1) {
    const TrcScope& c = q.root.negations[0];
    if (!c.vars.empty()) {
      out.head = SqlQuery::Head::NOT_EXISTS;
      out.select = star_select(c);
      return out;
    }
    auto w = as_where(items_of(c, ""));
    if (!w.empty()) {
      out.head = SqlQuery::Head::NOT;
      out.pred = std::move(w);
      return out;
    }
  }
  throw TranslationError(
      "a sentence whose top level is not a single quantifier block has no SQL form");
}

std::vector<SqlQuery> union_to_sql(const UnionQuery& q) {
  std::vector<SqlQuery> out;
  for (const auto& c : q.cells) out.push_back(trc_to_sql(c));
  return out;
}

}  // namespace reldiag
