#include "reldiag/canonicalizer.hpp"

#include <algorithm>
#include <map>

#include "internal.hpp"
#include "reldiag/errors.hpp"
#include "reldiag/parsers.hpp"
#include "reldiag/translators.hpp"

namespace reldiag {

namespace detail {

std::string strip_digits(const std::string& name) {
  std::size_t end = name.size();
  while (end > 0 && std::isdigit(static_cast<unsigned char>(name[end - 1]))) --end;
  return end == 0 ? name : name.substr(0, end);
}

void collect_var_names(const TrcFormula& f, std::vector<std::string>& out) {
  for (const auto& v : f.vars) out.push_back(v.name);
  for (const auto& k : f.kids) collect_var_names(k, out);
}

void collect_var_names(const TrcScope& s, std::vector<std::string>& out) {
  for (const auto& v : s.vars) out.push_back(v.name);
  for (const auto& c : s.negations) collect_var_names(c, out);
}

}  // namespace detail

// ------------------------------------------------------------ pull-up

namespace {

class Puller {
 public:
  explicit Puller(const TrcFormulaQuery& q) : out_name_(q.kind == QueryKind::QUERY ? q.out_name : "") {
    detail::collect_var_names(q.body, used_);
  }

  void absorb(const TrcFormula& f, TrcScope& s) {
    using K = TrcFormula::Kind;
    switch (f.kind) {
      case K::ATOM: {
        TrcPred p = f.atom;
        p.lhs.var = lookup(p.lhs.var);
        if (p.is_join()) {
          AttrRef r = p.rhs_ref();
          r.var = lookup(r.var);
          p.rhs = r;
        }
        s.preds.push_back(std::move(p));
        return;
      }
      case K::AND:
        for (const auto& k : f.kids) absorb(k, s);
        return;
      case K::EXISTS: {
        std::size_t env_before = env_.size();
        for (const auto& v : f.vars) {
          std::string name = v.name;
          if (std::find(path_.begin(), path_.end(), name) != path_.end()) {
            name = fresh_name(detail::strip_digits(v.name), used_);
            used_.push_back(name);
          }
          path_.push_back(name);
          env_.emplace_back(v.name, name);
          s.vars.push_back(TrcVar{name, v.relation});
        }
        absorb(f.kids[0], s);
        env_.resize(env_before);
        return;
      }
      case K::NOT: {
        TrcScope child;
        std::size_t path_before = path_.size();
        absorb(f.kids[0], child);
        path_.resize(path_before);
        s.negations.push_back(std::move(child));
        return;
      }
      case K::OR:
        throw FragmentFault("disjunction must be eliminated before quantifier pull-up");
    }
  }

 private:
  std::string lookup(const std::string& var) const {
    if (var == out_name_) return var;
    for (auto it = env_.rbegin(); it != env_.rend(); ++it)
      if (it->first == var) return it->second;
    return var;
  }

  std::string out_name_;
  std::vector<std::string> used_;
  std::vector<std::string> path_;
  std::vector<std::pair<std::string, std::string>> env_;
};

void anchored_walk(const TrcScope& s, std::vector<std::size_t>& path, const std::string& out,
                   std::vector<AnchorViolation>& found) {
  auto local = [&](const std::string& var) {
    return std::any_of(s.vars.begin(), s.vars.end(), [&](const TrcVar& v) { return v.name == var; });
  };
  for (const auto& p : s.preds) {
    bool ok = local(p.lhs.var) || (p.is_join() && local(p.rhs_ref().var));
    if (ok) continue;
    std::string where = "root scope";
    if (!path.empty()) {
      where = "scope";
      for (auto i : path) where += "/" + std::to_string(i);
    }
    found.push_back({path, p,
                     "predicate " + pred_text(p) + " in " + where +
                         " references no table quantified in that scope"});
  }
  (void)out;
  for (std::size_t i = 0; i < s.negations.size(); ++i) {
    path.push_back(i);
    anchored_walk(s.negations[i], path, out, found);
    path.pop_back();
  }
}

}  // namespace

TrcQuery trc_pullup(const TrcFormulaQuery& q) {
  TrcQuery out;
  out.kind = q.kind;
  out.out_name = q.out_name;
  out.out_attrs = q.out_attrs;
  Puller(q).absorb(q.body, out.root);
  return out;
}

TrcQuery trc_pullup(const TrcQuery& q) { return trc_pullup(to_formula(q)); }

std::vector<AnchorViolation> check_anchored(const TrcQuery& q) {
  std::vector<AnchorViolation> found;
  std::vector<std::size_t> path;
  anchored_walk(q.root, path, q.out_name, found);
  return found;
}

// --------------------------------------------------------------- SQL

namespace {

struct Scope {
  std::vector<std::pair<std::string, SqlFrom>> tables;  // original alias -> renamed entry
};

class SqlNormalizer {
 public:
  explicit SqlNormalizer(const Schema* schema) : schema_(schema) {}

  SqlQuery run(const SqlQuery& in) {
    SqlQuery q = in;
    if (q.head == SqlQuery::Head::NOT) {
      cond(q.pred[0]);
    } else {
      select(q.select);
    }
    return q;
  }

 private:
  void select(SqlSelect& s) {
    Scope scope;
    for (auto& f : s.from) {
      if (schema_) schema_->at(f.relation);
      std::string original = f.alias;
      for (const auto& [orig, entry] : scope.tables)
        if (orig == original) throw AttributeFault("alias " + original + " used twice in one FROM");
      if (std::find(used_.begin(), used_.end(), f.alias) != used_.end())
        f.alias = fresh_name(detail::strip_digits(f.alias), used_);
      used_.push_back(f.alias);
      scope.tables.emplace_back(original, f);
    }
    stack_.push_back(std::move(scope));
    for (auto& c : s.cols) column(c);
    for (auto& w : s.where) cond(w);
    stack_.pop_back();
  }

  void cond(SqlCond& c) {
    for (auto& k : c.kids) cond(k);
    for (auto& col : c.lhs) column(col);
    if (c.kind == SqlCond::Kind::CMP)
      if (auto* col = std::get_if<SqlCol>(&c.rhs)) column(*col);
    for (auto& s : c.sub) select(s);
  }

  bool has_attr(const SqlFrom& f, const std::string& attr) const {
    return schema_->at(f.relation).index_of(attr) >= 0;
  }

  void column(SqlCol& c) {
    if (!c.table.empty()) {
      for (auto it = stack_.rbegin(); it != stack_.rend(); ++it) {
        for (const auto& [orig, entry] : it->tables) {
          if (orig != c.table) continue;
          if (schema_ && !has_attr(entry, c.attr))
            throw AttributeFault("relation " + entry.relation + " has no attribute " + c.attr);
          c.table = entry.alias;
          return;
        }
      }
      throw AttributeFault("unknown table or alias " + c.table);
    }
    for (auto it = stack_.rbegin(); it != stack_.rend(); ++it) {
      if (!schema_) {
        if (it->tables.size() == 1) {
          c.table = it->tables[0].second.alias;
          return;
        }
        throw AttributeFault("column " + c.attr +
                             " needs a table qualifier or a schema to resolve it");
      }
      const SqlFrom* hit = nullptr;
      for (const auto& [orig, entry] : it->tables) {
        if (!has_attr(entry, c.attr)) continue;
        if (hit) throw AttributeFault("ambiguous column " + c.attr);
        hit = &entry;
      }
      if (hit) {
        c.table = hit->alias;
        return;
      }
    }
    throw AttributeFault("unknown column " + c.attr);
  }

  const Schema* schema_;
  std::vector<std::string> used_;
  std::vector<Scope> stack_;
};

SqlCond cmp(const SqlCol& l, CompOp op, const SqlCol& r) {
  SqlCond c;
  c.kind = SqlCond::Kind::CMP;
  c.lhs.push_back(l);
  c.op = op;
  c.rhs = r;
  return c;
}

void append_conj(SqlSelect& s, std::vector<SqlCond> extra) {
  SqlCond all;
  all.kind = SqlCond::Kind::AND;
  if (!s.where.empty()) {
    if (s.where[0].kind == SqlCond::Kind::AND) {
      all.kids = std::move(s.where[0].kids);
    } else {
      all.kids.push_back(std::move(s.where[0]));
    }
  }
  for (auto& e : extra) all.kids.push_back(std::move(e));
  s.where.clear();
  if (all.kids.size() == 1) {
    s.where.push_back(std::move(all.kids[0]));
  } else if (!all.kids.empty()) {
    s.where.push_back(std::move(all));
  }
}

void rewrite(SqlSelect& s);

void rewrite(SqlCond& c) {
  using K = SqlCond::Kind;
  for (auto& k : c.kids) rewrite(k);
  for (auto& s : c.sub) rewrite(s);
  switch (c.kind) {
    case K::IN:
    case K::NOT_IN: {
      SqlSelect sub = std::move(c.sub[0]);
      std::vector<SqlCond> eqs;
      for (std::size_t i = 0; i < c.lhs.size(); ++i) eqs.push_back(cmp(c.lhs[i], CompOp::EQ, sub.cols[i]));
      append_conj(sub, std::move(eqs));
      sub.star = true;
      sub.cols.clear();
      SqlCond out;
      out.kind = c.kind == K::IN ? K::EXISTS : K::NOT_EXISTS;
      out.sub.push_back(std::move(sub));
      c = std::move(out);
      return;
    }
    case K::ALL:
    case K::ANY: {
      SqlSelect sub = std::move(c.sub[0]);
      CompOp op = c.kind == K::ALL ? complement(c.op) : c.op;
      append_conj(sub, {cmp(c.lhs[0], op, sub.cols[0])});
      sub.star = true;
      sub.cols.clear();
      SqlCond out;
      out.kind = c.kind == K::ALL ? K::NOT_EXISTS : K::EXISTS;
      out.sub.push_back(std::move(sub));
      c = std::move(out);
      return;
    }
    default: return;
  }
}

void rewrite(SqlSelect& s) {
  for (auto& w : s.where) rewrite(w);
}

}  // namespace

SqlQuery sql_normalize_subqueries(const SqlQuery& q, const Schema* schema) {
  SqlQuery out = SqlNormalizer(schema).run(q);
  if (out.head == SqlQuery::Head::NOT) {
    rewrite(out.pred[0]);
  } else {
    rewrite(out.select);
  }
  if (out.head != SqlQuery::Head::DISTINCT && !out.select.from.empty()) {
    out.select.star = true;
    out.select.cols.clear();
  }
  return out;
}

SqlQuery sql_canonicalize(const SqlQuery& q, const Schema* schema) {
  SqlQuery norm = sql_normalize_subqueries(q, schema);
  TrcFormulaQuery f = detail::sql_formula(norm);
  if (has_disjunction(f.body))
    throw FragmentFault("disjunctive SQL needs eliminate_disjunction before canonicalization");
  TrcQuery t = trc_pullup(f);
  auto violations = check_anchored(t);
  if (!violations.empty()) throw AnchoringFault(violations.front().message);
  return trc_to_sql(t);
}

}  // namespace reldiag
