#include "reldiag/ast.hpp"

#include <algorithm>

#include "reldiag/errors.hpp"

namespace reldiag {

std::string ref_text(const AttrRef& r) { return r.var + "." + r.attr; }

TrcFormula TrcFormula::make_atom(TrcPred p) {
  TrcFormula f;
  f.kind = Kind::ATOM;
  f.atom = std::move(p);
  return f;
}

TrcFormula TrcFormula::make_and(std::vector<TrcFormula> kids) {
  TrcFormula f;
  f.kind = Kind::AND;
  f.kids = std::move(kids);
  return f;
}

TrcFormula TrcFormula::make_or(std::vector<TrcFormula> kids) {
  TrcFormula f;
  f.kind = Kind::OR;
  f.kids = std::move(kids);
  return f;
}

TrcFormula TrcFormula::make_not(TrcFormula body) {
  TrcFormula f;
  f.kind = Kind::NOT;
  f.kids.push_back(std::move(body));
  return f;
}

TrcFormula TrcFormula::make_exists(std::vector<TrcVar> vars, TrcFormula body) {
  TrcFormula f;
  f.kind = Kind::EXISTS;
  f.vars = std::move(vars);
  f.kids.push_back(std::move(body));
  return f;
}

bool has_disjunction(const TrcFormula& f) {
  if (f.kind == TrcFormula::Kind::OR) return true;
  return std::any_of(f.kids.begin(), f.kids.end(), has_disjunction);
}

TrcFormula to_formula(const TrcScope& scope) {
  std::vector<TrcFormula> items;
  for (const auto& p : scope.preds) items.push_back(TrcFormula::make_atom(p));
  for (const auto& c : scope.negations) items.push_back(TrcFormula::make_not(to_formula(c)));
  TrcFormula body = TrcFormula::make_and(std::move(items));
  if (scope.vars.empty()) return body;
  return TrcFormula::make_exists(scope.vars, std::move(body));
}

TrcFormulaQuery to_formula(const TrcQuery& q) {
  return TrcFormulaQuery{q.kind, q.out_name, q.out_attrs, to_formula(q.root)};
}

bool is_anonymous(const std::string& var) { return !var.empty() && var[0] == '_'; }

std::vector<std::string> idb_names(const DatalogProgram& p) {
  std::vector<std::string> out;
  for (const auto& r : p.rules) out.push_back(r.head.pred);
  return out;
}

const DlRule* rule_for(const DatalogProgram& p, const std::string& idb) {
  for (const auto& r : p.rules)
    if (r.head.pred == idb) return &r;
  return nullptr;
}

std::string ra_ref_text(const RaRef& r) { return r.qual.empty() ? r.name : r.qual + "." + r.name; }

RaExpr RaExpr::rel(std::string name) {
  RaExpr e;
  e.kind = Kind::REL;
  e.relation = std::move(name);
  return e;
}

RaExpr RaExpr::project(std::vector<RaRef> attrs, RaExpr e) {
  RaExpr out;
  out.kind = Kind::PROJECT;
  out.attrs = std::move(attrs);
  out.kids.push_back(std::move(e));
  return out;
}

RaExpr RaExpr::select(std::vector<RaCond> conds, RaExpr e) {
  RaExpr out;
  out.kind = Kind::SELECT;
  out.conds = std::move(conds);
  out.kids.push_back(std::move(e));
  return out;
}

RaExpr RaExpr::product(RaExpr a, RaExpr b) {
  RaExpr out;
  out.kind = Kind::PRODUCT;
  out.kids.push_back(std::move(a));
  out.kids.push_back(std::move(b));
  return out;
}

RaExpr RaExpr::join(std::vector<RaCond> conds, RaExpr a, RaExpr b) {
  RaExpr out;
  out.kind = Kind::JOIN;
  out.conds = std::move(conds);
  out.kids.push_back(std::move(a));
  out.kids.push_back(std::move(b));
  return out;
}

RaExpr RaExpr::minus(RaExpr a, RaExpr b) {
  RaExpr out;
  out.kind = Kind::MINUS;
  out.kids.push_back(std::move(a));
  out.kids.push_back(std::move(b));
  return out;
}

RaExpr RaExpr::rename_attrs(std::vector<std::pair<std::string, std::string>> map, RaExpr e) {
  RaExpr out;
  out.kind = Kind::RENAME;
  out.renames = std::move(map);
  out.kids.push_back(std::move(e));
  return out;
}

RaExpr RaExpr::rename_qual(std::string alias, RaExpr e) {
  RaExpr out;
  out.kind = Kind::RENAME;
  out.alias = std::move(alias);
  out.kids.push_back(std::move(e));
  return out;
}

RaExpr RaExpr::unite(RaExpr a, RaExpr b) {
  RaExpr out;
  out.kind = Kind::UNION;
  out.kids.push_back(std::move(a));
  out.kids.push_back(std::move(b));
  return out;
}

namespace {

std::string attrs_text(const std::vector<RaAttr>& attrs) {
  std::string out = "(";
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    if (i) out += ", ";
    out += attrs[i].qual + "." + attrs[i].name;
  }
  return out + ")";
}

RaRef split_ref(const std::string& text) {
  auto dot = text.find('.');
  if (dot == std::string::npos) return RaRef{"", text};
  return RaRef{text.substr(0, dot), text.substr(dot + 1)};
}

void resolve_conds(const std::vector<RaCond>& conds, const std::vector<RaAttr>& attrs) {
  for (const auto& c : conds) {
    resolve_ra_ref(attrs, c.lhs);
    if (auto* r = std::get_if<RaRef>(&c.rhs)) resolve_ra_ref(attrs, *r);
  }
}

std::vector<RaAttr> concat_disjoint(std::vector<RaAttr> a, const std::vector<RaAttr>& b) {
  for (const auto& x : b) {
    for (const auto& y : a)
      if (x == y)
        throw AttributeFault("product operands share attribute " + x.qual + "." + x.name +
                             "; rename one side");
    a.push_back(x);
  }
  return a;
}

}  // namespace

std::size_t resolve_ra_ref(const std::vector<RaAttr>& attrs, const RaRef& ref) {
  std::size_t found = attrs.size();
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    if (attrs[i].name != ref.name) continue;
    if (!ref.qual.empty() && attrs[i].qual != ref.qual) continue;
    if (found != attrs.size())
      throw AttributeFault("ambiguous attribute " + ra_ref_text(ref) + " in " + attrs_text(attrs));
    found = i;
  }
  if (found == attrs.size())
    throw AttributeFault("unknown attribute " + ra_ref_text(ref) + " in " + attrs_text(attrs));
  return found;
}

std::vector<RaAttr> ra_attributes(const RaExpr& e, const Schema& schema) {
  using K = RaExpr::Kind;
  switch (e.kind) {
    case K::REL: {
      std::vector<RaAttr> out;
      for (const auto& a : schema.at(e.relation).attrs) out.push_back({e.relation, a});
      return out;
    }
    case K::PROJECT: {
      auto in = ra_attributes(e.kids[0], schema);
      std::vector<RaAttr> out;
      std::vector<std::size_t> seen;
      for (const auto& r : e.attrs) {
        std::size_t i = resolve_ra_ref(in, r);
        if (std::find(seen.begin(), seen.end(), i) != seen.end())
          throw AttributeFault("attribute " + ra_ref_text(r) + " projected twice");
        seen.push_back(i);
        out.push_back(in[i]);
      }
      return out;
    }
    case K::SELECT: {
      auto in = ra_attributes(e.kids[0], schema);
      resolve_conds(e.conds, in);
      return in;
    }
    case K::PRODUCT:
      return concat_disjoint(ra_attributes(e.kids[0], schema), ra_attributes(e.kids[1], schema));
    case K::JOIN: {
      auto a = ra_attributes(e.kids[0], schema);
      auto b = ra_attributes(e.kids[1], schema);
      if (!e.conds.empty()) {
        auto all = concat_disjoint(a, b);
        resolve_conds(e.conds, all);
        return all;
      }
      for (const auto& x : b) {
        int hits = 0;
        for (const auto& y : a) hits += y.name == x.name;
        if (hits > 1) throw AttributeFault("natural join on ambiguous attribute " + x.name);
        if (hits == 1) {
          int own = 0;
          for (const auto& z : b) own += z.name == x.name;
          if (own > 1) throw AttributeFault("natural join on ambiguous attribute " + x.name);
        } else {
          a.push_back(x);
        }
      }
      return a;
    }
    case K::MINUS:
    case K::UNION: {
      auto a = ra_attributes(e.kids[0], schema);
      auto b = ra_attributes(e.kids[1], schema);
      std::string what = e.kind == K::MINUS ? "difference" : "union";
      if (a.size() != b.size())
        throw AttributeFault(what + " operands differ in arity: " + attrs_text(a) + " vs " +
                             attrs_text(b));
      for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].name != b[i].name)
          throw AttributeFault(what + " operands differ in attribute names: " + attrs_text(a) +
                               " vs " + attrs_text(b));
      return a;
    }
    case K::RENAME: {
      auto in = ra_attributes(e.kids[0], schema);
      if (!e.alias.empty()) {
        for (auto& a : in) a.qual = e.alias;
        return in;
      }
      auto out = in;
      for (const auto& [from, to] : e.renames) {
        RaRef ref = split_ref(from);
        bool names_attr = std::any_of(in.begin(), in.end(), [&](const RaAttr& a) {
          return a.name == ref.name && (ref.qual.empty() || a.qual == ref.qual);
        });
        if (names_attr) {
          out[resolve_ra_ref(in, ref)].name = to;
          continue;
        }
        bool names_qual = ref.qual.empty() && std::any_of(in.begin(), in.end(), [&](const RaAttr& a) {
                            return a.qual == ref.name;
                          });
        if (!names_qual) resolve_ra_ref(in, ref);  // throws unknown attribute
        for (std::size_t i = 0; i < in.size(); ++i)
          if (in[i].qual == ref.name) out[i].qual = to;
      }
      return out;
    }
  }
  return {};
}

bool SqlSelect::operator==(const SqlSelect& o) const {
  return star == o.star && cols == o.cols && from == o.from && where == o.where;
}

bool is_sentence(const SqlQuery& q) { return q.head != SqlQuery::Head::DISTINCT; }

namespace {

void collect(const TrcScope& s, std::vector<Occurrence>& out) {
  for (const auto& v : s.vars) out.push_back({out.size() + 1, v.relation});
  for (const auto& c : s.negations) collect(c, out);
}

void collect(const TrcFormula& f, std::vector<Occurrence>& out) {
  if (f.kind == TrcFormula::Kind::EXISTS)
    for (const auto& v : f.vars) out.push_back({out.size() + 1, v.relation});
  for (const auto& k : f.kids) collect(k, out);
}

void collect(const RaExpr& e, std::vector<Occurrence>& out) {
  if (e.kind == RaExpr::Kind::REL) out.push_back({out.size() + 1, e.relation});
  for (const auto& k : e.kids) collect(k, out);
}

void collect(const SqlSelect& s, std::vector<Occurrence>& out);

void collect(const SqlCond& c, std::vector<Occurrence>& out) {
  for (const auto& k : c.kids) collect(k, out);
  for (const auto& s : c.sub) collect(s, out);
}

void collect(const SqlSelect& s, std::vector<Occurrence>& out) {
  for (const auto& f : s.from) out.push_back({out.size() + 1, f.relation});
  for (const auto& w : s.where) collect(w, out);
}

}  // namespace

std::vector<Occurrence> extensional_tables(const TrcQuery& q) {
  std::vector<Occurrence> out;
  collect(q.root, out);
  return out;
}

std::vector<Occurrence> extensional_tables(const TrcFormulaQuery& q) {
  std::vector<Occurrence> out;
  collect(q.body, out);
  return out;
}

std::vector<Occurrence> extensional_tables(const UnionQuery& q) {
  std::vector<Occurrence> out;
  for (const auto& c : q.cells) collect(c.root, out);
  return out;
}

std::vector<Occurrence> extensional_tables(const DatalogProgram& p) {
  std::vector<Occurrence> out;
  auto idbs = idb_names(p);
  auto is_idb = [&](const std::string& n) {
    return std::find(idbs.begin(), idbs.end(), n) != idbs.end();
  };
  for (const auto& r : p.rules)
    for (const auto& l : r.body)
      if (l.kind != DlLiteral::Kind::BUILTIN && !is_idb(l.atom.pred))
        out.push_back({out.size() + 1, l.atom.pred});
  return out;
}

std::vector<Occurrence> extensional_tables(const RaExpr& e) {
  std::vector<Occurrence> out;
  collect(e, out);
  return out;
}

std::vector<Occurrence> extensional_tables(const SqlQuery& q) {
  std::vector<Occurrence> out;
  if (q.head == SqlQuery::Head::NOT) {
    for (const auto& c : q.pred) collect(c, out);
  } else {
    collect(q.select, out);
  }
  return out;
}

std::string fresh_name(const std::string& base, const std::vector<std::string>& used) {
  auto taken = [&](const std::string& n) {
    return std::find(used.begin(), used.end(), n) != used.end();
  };
  if (!taken(base)) return base;
  for (int k = 2;; ++k) {
    std::string cand = base + std::to_string(k);
    if (!taken(cand)) return cand;
  }
}

}  // namespace reldiag
