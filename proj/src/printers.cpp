#include <map>

#include "reldiag/parsers.hpp"

namespace reldiag {

namespace {

std::string pad(std::size_t n) { return std::string(n, ' '); }

std::string operand_text(const Operand& o) {
  if (auto* r = std::get_if<AttrRef>(&o)) return ref_text(*r);
  return value_text(std::get<Value>(o));
}

// ---------------------------------------------------------------- TRC

std::string vars_text(const std::vector<TrcVar>& vars) {
  std::string out;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (i) out += ", ";
    out += vars[i].name + " in " + vars[i].relation;
  }
  return out;
}

std::string formula_text(const TrcFormula& f, std::size_t ind);

std::string block_text(const TrcFormula& body, std::size_t ind) {
  std::vector<const TrcFormula*> items;
  if (body.kind == TrcFormula::Kind::AND) {
    for (const auto& k : body.kids) items.push_back(&k);
  } else {
    items.push_back(&body);
  }
  if (items.empty()) return " ";
  std::string out = "\n";
  for (std::size_t i = 0; i < items.size(); ++i) {
    out += pad(ind + 2) + formula_text(*items[i], ind + 2);
    if (i + 1 < items.size()) out += " and";
    out += "\n";
  }
  return out + pad(ind);
}

std::string formula_text(const TrcFormula& f, std::size_t ind) {
  using K = TrcFormula::Kind;
  switch (f.kind) {
    case K::ATOM: return pred_text(f.atom);
    case K::EXISTS: return "exists " + vars_text(f.vars) + " [" + block_text(f.kids[0], ind) + "]";
    case K::NOT: {
      const TrcFormula& k = f.kids[0];
      if (k.kind == K::EXISTS) return "not " + formula_text(k, ind);
      if (k.kind == K::AND) return "not (" + block_text(k, ind) + ")";
      return "not (" + formula_text(k, ind) + ")";
    }
    case K::OR: {
      std::string out = "(";
      for (std::size_t i = 0; i < f.kids.size(); ++i) {
        if (i) out += " or ";
        out += formula_text(f.kids[i], ind);
      }
      return out + ")";
    }
    case K::AND: {
      if (f.kids.empty()) return "( )";
      std::string out = "(";
      for (std::size_t i = 0; i < f.kids.size(); ++i) {
        if (i) out += " and ";
        out += formula_text(f.kids[i], ind);
      }
      return out + ")";
    }
  }
  return "";
}

std::string top_text(const TrcFormula& body) {
  if (body.kind == TrcFormula::Kind::AND) {
    if (body.kids.empty()) return "( )";
    std::string out;
    for (std::size_t i = 0; i < body.kids.size(); ++i) {
      if (i) out += " and\n";
      out += formula_text(body.kids[i], 0);
    }
    return out;
  }
  return formula_text(body, 0);
}

// ------------------------------------------------------------ Datalog

std::string atom_text(const DlAtom& a, const std::map<std::string, int>& uses) {
  if (a.args.empty()) return a.pred;
  std::string out = a.pred + "(";
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (i) out += ",";
    const auto& v = a.args[i];
    auto it = uses.find(v);
    out += is_anonymous(v) && it != uses.end() && it->second == 1 ? "_" : v;
  }
  return out + ")";
}

// ----------------------------------------------------------------- RA

std::string cond_text(const RaCond& c) {
  std::string rhs = std::holds_alternative<RaRef>(c.rhs) ? ra_ref_text(std::get<RaRef>(c.rhs))
                                                         : value_text(std::get<Value>(c.rhs));
  return ra_ref_text(c.lhs) + " " + op_text(c.op) + " " + rhs;
}

std::string conds_text(const std::vector<RaCond>& cs) {
  std::string out;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    if (i) out += " and ";
    out += cond_text(cs[i]);
  }
  return out;
}

std::string ra_head(const RaExpr& e) {
  using K = RaExpr::Kind;
  switch (e.kind) {
    case K::REL: return e.relation;
    case K::PROJECT: {
      std::string out = "Project[";
      for (std::size_t i = 0; i < e.attrs.size(); ++i) {
        if (i) out += ", ";
        out += ra_ref_text(e.attrs[i]);
      }
      return out + "]";
    }
    case K::SELECT: return "Select[" + conds_text(e.conds) + "]";
    case K::PRODUCT: return "Product";
    case K::JOIN: return e.conds.empty() ? "Join" : "Join[" + conds_text(e.conds) + "]";
    case K::MINUS: return "Minus";
    case K::UNION: return "Union";
    case K::RENAME: {
      if (!e.alias.empty()) return "Rename[" + e.alias + "]";
      std::string out = "Rename[";
      for (std::size_t i = 0; i < e.renames.size(); ++i) {
        if (i) out += ", ";
        out += e.renames[i].first + "->" + e.renames[i].second;
      }
      return out + "]";
    }
  }
  return "";
}

std::string ra_inline(const RaExpr& e) {
  if (e.kind == RaExpr::Kind::REL) return e.relation;
  std::string out = ra_head(e) + "(";
  for (std::size_t i = 0; i < e.kids.size(); ++i) {
    if (i) out += ", ";
    out += ra_inline(e.kids[i]);
  }
  return out + ")";
}

constexpr std::size_t kRaWidth = 80;

std::string ra_text(const RaExpr& e, std::size_t ind) {
  std::string flat = ra_inline(e);
  if (e.kind == RaExpr::Kind::REL || ind + flat.size() <= kRaWidth) return flat;
  std::string out = ra_head(e) + "(\n";
  for (std::size_t i = 0; i < e.kids.size(); ++i) {
    out += pad(ind + 2) + ra_text(e.kids[i], ind + 2);
    if (i + 1 < e.kids.size()) out += ",";
    out += "\n";
  }
  return out + pad(ind) + ")";
}

// ---------------------------------------------------------------- SQL

std::string col_text(const SqlCol& c) { return c.table.empty() ? c.attr : c.table + "." + c.attr; }

std::string cols_text(const std::vector<SqlCol>& cs) {
  std::string out;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    if (i) out += ", ";
    out += col_text(cs[i]);
  }
  return out;
}

std::string select_text(const SqlSelect& s, std::size_t ind, bool distinct);

std::string sql_cond_text(const SqlCond& c, std::size_t ind) {
  using K = SqlCond::Kind;
  auto sub = [&](const std::string& prefix) {
    return prefix + "(\n" + select_text(c.sub[0], ind + 2, false) + "\n" + pad(ind) + ")";
  };
  auto lhs = [&]() {
    return c.lhs.size() == 1 ? col_text(c.lhs[0]) : "(" + cols_text(c.lhs) + ")";
  };
  switch (c.kind) {
    case K::AND: {
      std::string out;
      for (std::size_t i = 0; i < c.kids.size(); ++i) {
        if (i) out += "\n" + pad(ind) + "AND ";
        out += sql_cond_text(c.kids[i], ind);
      }
      return out;
    }
    case K::OR: {
      std::string out = "(";
      for (std::size_t i = 0; i < c.kids.size(); ++i) {
        if (i) out += " OR ";
        out += sql_cond_text(c.kids[i], ind);
      }
      return out + ")";
    }
    case K::CMP: {
      std::string rhs = std::holds_alternative<SqlCol>(c.rhs) ? col_text(std::get<SqlCol>(c.rhs))
                                                              : value_text(std::get<Value>(c.rhs));
      std::string op = c.op == CompOp::NEQ ? "<>" : op_text(c.op);
      return col_text(c.lhs[0]) + " " + op + " " + rhs;
    }
    case K::NOT: return "NOT (" + sql_cond_text(c.kids[0], ind) + ")";
    case K::EXISTS: return sub("EXISTS ");
    case K::NOT_EXISTS: return sub("NOT EXISTS ");
    case K::IN: return sub(lhs() + " IN ");
    case K::NOT_IN: return sub(lhs() + " NOT IN ");
    case K::ALL:
    case K::ANY: {
      std::string op = c.op == CompOp::NEQ ? "<>" : op_text(c.op);
      return sub(lhs() + " " + op + (c.kind == K::ALL ? " ALL " : " ANY "));
    }
  }
  return "";
}

std::string select_text(const SqlSelect& s, std::size_t ind, bool distinct) {
  std::string out = pad(ind) + "SELECT " + (distinct ? "DISTINCT " : "");
  out += s.star ? "*" : cols_text(s.cols);
  out += "\n" + pad(ind) + "FROM ";
  for (std::size_t i = 0; i < s.from.size(); ++i) {
    if (i) out += ", ";
    out += s.from[i].relation;
    if (s.from[i].alias != s.from[i].relation) out += " AS " + s.from[i].alias;
  }
  if (!s.where.empty()) out += "\n" + pad(ind) + "WHERE " + sql_cond_text(s.where[0], ind);
  return out;
}

}  // namespace

std::string pred_text(const TrcPred& p) {
  return ref_text(p.lhs) + " " + op_text(p.op) + " " + operand_text(p.rhs);
}

std::string print_trc(const TrcFormulaQuery& q) {
  if (q.kind == QueryKind::SENTENCE) return top_text(q.body) + "\n";
  std::string head = "{ " + q.out_name + "(";
  for (std::size_t i = 0; i < q.out_attrs.size(); ++i) {
    if (i) head += ", ";
    head += q.out_attrs[i];
  }
  return head + ") | " + formula_text(q.body, 0) + " }\n";
}

std::string print_trc(const TrcQuery& q) { return print_trc(to_formula(q)); }

std::string print_trc(const UnionQuery& q) {
  std::string out;
  for (std::size_t i = 0; i < q.cells.size(); ++i) {
    if (i) out += "union\n";
    out += print_trc(q.cells[i]);
  }
  return out;
}

std::string print_datalog(const DatalogProgram& p) {
  std::string out;
  for (const auto& r : p.rules) {
    std::map<std::string, int> uses;
    for (const auto& a : r.head.args) ++uses[a];
    for (const auto& l : r.body) {
      if (l.kind == DlLiteral::Kind::BUILTIN) {
        ++uses[l.builtin.lhs];
        if (l.builtin.rhs_is_var()) ++uses[std::get<std::string>(l.builtin.rhs)];
      } else {
        for (const auto& a : l.atom.args) ++uses[a];
      }
    }
    out += atom_text(r.head, uses) + " :- ";
    for (std::size_t i = 0; i < r.body.size(); ++i) {
      if (i) out += ", ";
      const auto& l = r.body[i];
      switch (l.kind) {
        case DlLiteral::Kind::POS: out += atom_text(l.atom, uses); break;
        case DlLiteral::Kind::NEG: out += "not " + atom_text(l.atom, uses); break;
        case DlLiteral::Kind::BUILTIN: {
          const auto& b = l.builtin;
          out += b.lhs + " " + op_text(b.op) + " " +
                 (b.rhs_is_var() ? std::get<std::string>(b.rhs) : value_text(std::get<Value>(b.rhs)));
          break;
        }
      }
    }
    out += ".\n";
  }
  return out;
}

std::string print_ra(const RaExpr& e) { return ra_text(e, 0) + "\n"; }

std::string print_sql(const SqlQuery& q) {
  switch (q.head) {
    case SqlQuery::Head::DISTINCT: return select_text(q.select, 0, true) + "\n";
    case SqlQuery::Head::EXISTS:
      return "SELECT EXISTS (\n" + select_text(q.select, 2, false) + "\n)\n";
    case SqlQuery::Head::NOT_EXISTS:
      return "SELECT NOT EXISTS (\n" + select_text(q.select, 2, false) + "\n)\n";
    case SqlQuery::Head::NOT: return "SELECT NOT (" + sql_cond_text(q.pred[0], 0) + ")\n";
  }
  return "";
}

}  // namespace reldiag
