#include <algorithm>
#include <map>

#include "reldiag/errors.hpp"
#include "reldiag/translators.hpp"

namespace reldiag {

// ------------------------------------------------------ algebra -> rules

namespace {

class RaToDatalog {
 public:
  explicit RaToDatalog(const Schema& schema) : schema_(schema) {
    for (const auto& r : schema.relations()) taken_.push_back(r.name);
    answer_ = fresh_name("Q", taken_);
    taken_.push_back(answer_);
  }

  DatalogProgram run(const RaExpr& e) {
    DlAtom root = node(e, true);
    if (root.pred != answer_) {
      // A bare relation: copy rule.
      DlRule r;
      r.head.pred = answer_;
      r.head.args = vars("x", root.args.size());
      r.body.push_back(pos(DlAtom{root.pred, r.head.args}));
      prog_.rules.push_back(std::move(r));
    }
    prog_.answer = answer_;
    return prog_;
  }

 private:
  static std::vector<std::string> vars(const std::string& base, std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 1; i <= n; ++i) out.push_back(base + std::to_string(i));
    return out;
  }

  static DlLiteral pos(DlAtom a) {
    DlLiteral l;
    l.kind = DlLiteral::Kind::POS;
    l.atom = std::move(a);
    return l;
  }

  static DlLiteral neg(DlAtom a) {
    DlLiteral l = pos(std::move(a));
    l.kind = DlLiteral::Kind::NEG;
    return l;
  }

  static DlLiteral builtin(std::string lhs, CompOp op, std::variant<std::string, Value> rhs) {
    DlLiteral l;
    l.kind = DlLiteral::Kind::BUILTIN;
    l.builtin = DlBuiltin{std::move(lhs), op, std::move(rhs)};
    return l;
  }

  std::vector<DlLiteral> conds(const std::vector<RaCond>& cs, const std::vector<RaAttr>& attrs,
                               const std::vector<std::string>& names) {
    std::vector<DlLiteral> out;
    for (const auto& c : cs) {
      std::string l = names[resolve_ra_ref(attrs, c.lhs)];
      if (auto* r = std::get_if<RaRef>(&c.rhs)) {
        out.push_back(builtin(l, c.op, names[resolve_ra_ref(attrs, *r)]));
      } else {
        out.push_back(builtin(l, c.op, std::get<Value>(c.rhs)));
      }
    }
    return out;
  }

  /// The atom standing for `e`, emitting its rule first.
  DlAtom node(const RaExpr& e, bool root) {
    using K = RaExpr::Kind;
    if (e.kind == K::REL) {
      return DlAtom{e.relation, std::vector<std::string>(schema_.at(e.relation).arity())};
    }
    if (e.kind == K::RENAME) return node(e.kids[0], root);
    if (e.kind == K::UNION) throw TranslationError("union has no single-rule Datalog form");
    std::vector<DlAtom> kids;
    for (const auto& k : e.kids) kids.push_back(node(k, false));
    DlRule r;
    std::vector<std::string> x = vars("x", kids[0].args.size());
    std::vector<std::string> y = kids.size() > 1 ? vars("y", kids[1].args.size()) : std::vector<std::string>{};
    switch (e.kind) {
      case K::PROJECT: {
        auto in = ra_attributes(e.kids[0], schema_);
        std::vector<std::string> body = x;
        std::vector<bool> used(x.size(), false);
        for (const auto& ref : e.attrs) {
          std::size_t i = resolve_ra_ref(in, ref);
          used[i] = true;
          r.head.args.push_back(x[i]);
        }
        int anon = 0;
        for (std::size_t i = 0; i < body.size(); ++i)
          if (!used[i]) body[i] = "_" + std::to_string(++anon);
        r.body.push_back(pos(DlAtom{kids[0].pred, body}));
        break;
      }
      case K::SELECT: {
        r.head.args = x;
        r.body.push_back(pos(DlAtom{kids[0].pred, x}));
        auto more = conds(e.conds, ra_attributes(e.kids[0], schema_), x);
        r.body.insert(r.body.end(), more.begin(), more.end());
        break;
      }
      case K::PRODUCT:
      case K::JOIN: {
        auto a = ra_attributes(e.kids[0], schema_);
        auto b = ra_attributes(e.kids[1], schema_);
        r.head.args = x;
        if (e.kind == K::JOIN && e.conds.empty()) {
          for (std::size_t j = 0; j < b.size(); ++j) {
            auto hit = std::find_if(a.begin(), a.end(), [&](const RaAttr& at) { return at.name == b[j].name; });
            if (hit != a.end()) {
              y[j] = x[hit - a.begin()];
            } else {
              r.head.args.push_back(y[j]);
            }
          }
        } else {
          r.head.args.insert(r.head.args.end(), y.begin(), y.end());
        }
        r.body.push_back(pos(DlAtom{kids[0].pred, x}));
        r.body.push_back(pos(DlAtom{kids[1].pred, y}));
        if (e.kind == K::JOIN && !e.conds.empty()) {
          auto all = a;
          all.insert(all.end(), b.begin(), b.end());
          auto names = x;
          names.insert(names.end(), y.begin(), y.end());
          auto more = conds(e.conds, all, names);
          r.body.insert(r.body.end(), more.begin(), more.end());
        }
        break;
      }
      case K::MINUS:
        r.head.args = x;
        r.body.push_back(pos(DlAtom{kids[0].pred, x}));
        r.body.push_back(neg(DlAtom{kids[1].pred, x}));
        break;
      default: break;
    }
    if (root) {
      r.head.pred = answer_;
    } else {
      r.head.pred = fresh_name("I" + std::to_string(++counter_), taken_);
      taken_.push_back(r.head.pred);
    }
    DlAtom out{r.head.pred, r.head.args};
    prog_.rules.push_back(std::move(r));
    return out;
  }

  const Schema& schema_;
  std::vector<std::string> taken_;
  std::string answer_;
  int counter_ = 0;
  DatalogProgram prog_;
};

}  // namespace

DatalogProgram ra_to_datalog(const RaExpr& e, const Schema& schema) {
  ra_attributes(e, schema);
  return RaToDatalog(schema).run(e);
}

// ------------------------------------------------------ rules -> algebra

namespace {

std::vector<RaRef> refs(const std::vector<std::string>& names) {
  std::vector<RaRef> out;
  for (const auto& n : names) out.push_back(RaRef{"", n});
  return out;
}

std::vector<std::string> names_of(const RaExpr& e, const Schema& schema) {
  std::vector<std::string> out;
  for (const auto& a : ra_attributes(e, schema)) out.push_back(a.name);
  return out;
}

class DatalogToRa {
 public:
  DatalogToRa(const DatalogProgram& p, const Schema& schema) : prog_(p), schema_(schema) {}

  RaExpr rule(const std::string& pred) {
    const DlRule* r = rule_for(prog_, pred);
    for (std::size_t i = 0; i < r->head.args.size(); ++i)
      for (std::size_t j = 0; j < i; ++j)
        if (r->head.args[i] == r->head.args[j])
          throw TranslationError("head " + pred + " repeats variable " + r->head.args[i]);

    std::optional<RaExpr> p;
    std::vector<std::string> pnames;
    for (const auto& l : r->body) {
      if (l.kind != DlLiteral::Kind::POS) continue;
      RaExpr a = atom(l.atom);
      auto an = names_of(a, schema_);
      if (!p) {
        p = std::move(a);
        pnames = an;
        continue;
      }
      bool shared = std::any_of(an.begin(), an.end(), [&](const std::string& n) {
        return std::find(pnames.begin(), pnames.end(), n) != pnames.end();
      });
      p = shared ? RaExpr::join({}, std::move(*p), std::move(a)) : RaExpr::product(std::move(*p), std::move(a));
      pnames = names_of(*p, schema_);
    }
    if (!p) throw TranslationError("rule " + pred + " has no positive atom");
    auto bound = [&](const std::string& v) {
      return std::find(pnames.begin(), pnames.end(), v) != pnames.end();
    };
    // x = y with only x bound: add y as a renamed copy of x
    for (bool grew = true; grew;) {
      grew = false;
      for (const auto& l : r->body) {
        const DlBuiltin& b = l.builtin;
        if (l.kind != DlLiteral::Kind::BUILTIN || b.op != CompOp::EQ || !b.rhs_is_var()) continue;
        const auto& v = std::get<std::string>(b.rhs);
        if (bound(b.lhs) == bound(v)) continue;
        const std::string& from = bound(b.lhs) ? b.lhs : v;
        const std::string& to = bound(b.lhs) ? v : b.lhs;
        RaExpr copy = RaExpr::rename_attrs({{from, to}}, RaExpr::project(refs({from}), *p));
        p = RaExpr::select({RaCond{RaRef{"", from}, CompOp::EQ, RaRef{"", to}}},
                           RaExpr::product(std::move(*p), std::move(copy)));
        pnames = names_of(*p, schema_);
        grew = true;
      }
    }
    std::vector<RaCond> conds;
    for (const auto& l : r->body) {
      if (l.kind != DlLiteral::Kind::BUILTIN) continue;
      const DlBuiltin& b = l.builtin;
      if (!bound(b.lhs)) throw TranslationError("variable " + b.lhs + " is bound only by a comparison");
      RaCond c;
      c.lhs = RaRef{"", b.lhs};
      c.op = b.op;
      if (b.rhs_is_var()) {
        const auto& v = std::get<std::string>(b.rhs);
        if (!bound(v)) throw TranslationError("variable " + v + " is bound only by a comparison");
        c.rhs = RaRef{"", v};
      } else {
        c.rhs = std::get<Value>(b.rhs);
      }
      conds.push_back(std::move(c));
    }
    if (!conds.empty()) p = RaExpr::select(std::move(conds), std::move(*p));
    for (const auto& v : r->head.args)
      if (!bound(v)) throw TranslationError("head variable " + v + " is not bound by a positive atom");

    // Keep the head and the variables the negations need, in P's order.
    std::vector<std::string> keep;
    for (const auto& n : pnames) {
      bool need = std::find(r->head.args.begin(), r->head.args.end(), n) != r->head.args.end();
      for (const auto& l : r->body)
        if (l.kind == DlLiteral::Kind::NEG &&
            std::find(l.atom.args.begin(), l.atom.args.end(), n) != l.atom.args.end())
          need = true;
      if (need) keep.push_back(n);
    }
    RaExpr base = keep.size() == pnames.size() ? std::move(*p) : RaExpr::project(refs(keep), std::move(*p));
    RaExpr out = base;
    for (const auto& l : r->body) {
      if (l.kind != DlLiteral::Kind::NEG) continue;
      RaExpr n = atom(l.atom);
      auto w = names_of(n, schema_);
      for (const auto& v : w)
        if (std::find(keep.begin(), keep.end(), v) == keep.end())
          throw TranslationError("variable " + v + " occurs only under negation");
      std::vector<std::string> z;
      for (const auto& v : keep)
        if (std::find(w.begin(), w.end(), v) == w.end()) z.push_back(v);
      RaExpr sub = z.empty() ? std::move(n)
                             : RaExpr::product(std::move(n), RaExpr::project(refs(z), base));
      if (names_of(sub, schema_) != keep) sub = RaExpr::project(refs(keep), std::move(sub));
      out = RaExpr::minus(std::move(out), std::move(sub));
    }
    if (keep != r->head.args) out = RaExpr::project(refs(r->head.args), std::move(out));
    return out;
  }

 private:
  /// The atom as an expression whose attributes are its variable names.
  RaExpr atom(const DlAtom& a) {
    RaExpr e;
    std::vector<std::string> cols;
    if (rule_for(prog_, a.pred)) {
      e = rule(a.pred);
      cols = names_of(e, schema_);
    } else {
      e = RaExpr::rel(a.pred);
      cols = schema_.at(a.pred).attrs;
    }
    if (cols.size() != a.args.size())
      throw SchemaError("atom " + a.pred + " has arity " + std::to_string(a.args.size()) +
                        ", expected " + std::to_string(cols.size()));
    std::vector<RaCond> same;
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < a.args.size(); ++i) {
      if (is_anonymous(a.args[i])) continue;
      bool repeated = false;
      for (std::size_t j : keep) {
        if (a.args[j] == a.args[i]) {
          same.push_back(RaCond{RaRef{"", cols[j]}, CompOp::EQ, RaRef{"", cols[i]}});
          repeated = true;
          break;
        }
      }
      if (!repeated) keep.push_back(i);
    }
    if (!same.empty()) e = RaExpr::select(std::move(same), std::move(e));
    if (keep.size() != cols.size()) {
      std::vector<RaRef> pr;
      for (auto i : keep) pr.push_back(RaRef{"", cols[i]});
      e = RaExpr::project(std::move(pr), std::move(e));
    }
    std::vector<std::pair<std::string, std::string>> ren;
    for (auto i : keep)
      if (cols[i] != a.args[i]) ren.emplace_back(cols[i], a.args[i]);
    if (!ren.empty()) e = RaExpr::rename_attrs(std::move(ren), std::move(e));
    return e;
  }

  const DatalogProgram& prog_;
  const Schema& schema_;
};

}  // namespace

RaExpr datalog_to_ra(const DatalogProgram& p, const Schema& schema) {
  if (!rule_for(p, p.answer)) throw TranslationError("answer predicate " + p.answer + " has no rule");
  if (rule_for(p, p.answer)->head.args.empty()) throw TranslationError("a sentence has no relational algebra form");
  RaExpr e = DatalogToRa(p, schema).rule(p.answer);
  ra_attributes(e, schema);
  return e;
}

}  // namespace reldiag
