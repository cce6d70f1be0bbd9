#include <algorithm>

#include "internal.hpp"
#include "reldiag/canonicalizer.hpp"
#include "reldiag/errors.hpp"
#include "reldiag/translators.hpp"

namespace reldiag {

namespace {

using Conj = std::vector<TrcFormula>;
using Dnf = std::vector<Conj>;

/// Disjunctive normal form whose items are atoms, EXISTS blocks and
/// negated EXISTS blocks, all free of disjunction.
class Dnfer {
 public:
  explicit Dnfer(std::size_t max) : max_(max) {}

  Dnf dnf(const TrcFormula& f) {
    using K = TrcFormula::Kind;
    switch (f.kind) {
      case K::ATOM: return {{f}};
      case K::AND: {
        Dnf acc{{}};
        for (const auto& k : f.kids) acc = product(acc, dnf(k));
        return acc;
      }
      case K::OR: {
        Dnf acc;
        for (const auto& k : f.kids) {
          Dnf d = dnf(k);
          acc.insert(acc.end(), d.begin(), d.end());
          check(acc.size());
        }
        return acc;
      }
      case K::EXISTS: {
        Dnf out;
        for (auto& c : dnf(f.kids[0])) out.push_back({TrcFormula::make_exists(f.vars, TrcFormula::make_and(std::move(c)))});
        return out;
      }
      case K::NOT: {
        Dnf acc{{}};
        for (const auto& c : dnf(f.kids[0])) {
          Dnf neg;
          for (const auto& item : c) {
            Dnf d = negate(item);
            neg.insert(neg.end(), d.begin(), d.end());
            check(neg.size());
          }
          acc = product(acc, neg);
        }
        return acc;
      }
    }
    return {};
  }

 private:
  Dnf negate(const TrcFormula& item) {
    using K = TrcFormula::Kind;
    if (item.kind == K::ATOM) {
      TrcPred p = item.atom;
      p.op = complement(p.op);
      return {{TrcFormula::make_atom(std::move(p))}};
    }
    if (item.kind == K::NOT) return {{item.kids[0]}};
    return {{TrcFormula::make_not(item)}};
  }

  Dnf product(const Dnf& a, const Dnf& b) {
    check(a.size() * b.size());
    Dnf out;
    for (const auto& x : a) {
      for (const auto& y : b) {
        Conj c = x;
        c.insert(c.end(), y.begin(), y.end());
        out.push_back(std::move(c));
      }
    }
    return out;
  }

  void check(std::size_t n) const {
    if (n > max_)
      throw CapacityFault("disjunctive normal form exceeds " + std::to_string(max_) + " disjuncts");
  }

  std::size_t max_;
};

/// Gives every quantified variable of the cell a distinct name; the first
/// binding of a name keeps it.
class RenameApart {
 public:
  explicit RenameApart(const std::string& out_name) : out_(out_name) {}

  void run(TrcFormula& f) {
    using K = TrcFormula::Kind;
    if (f.kind == K::ATOM) {
      fix(f.atom.lhs);
      if (f.atom.is_join()) {
        AttrRef r = f.atom.rhs_ref();
        fix(r);
        f.atom.rhs = r;
      }
      return;
    }
    std::size_t before = env_.size();
    if (f.kind == K::EXISTS) {
      for (auto& v : f.vars) {
        std::string name = v.name;
        if (std::find(used_.begin(), used_.end(), name) != used_.end())
          name = fresh_name(detail::strip_digits(v.name), used_);
        used_.push_back(name);
        env_.emplace_back(v.name, name);
        v.name = name;
      }
    }
    for (auto& k : f.kids) run(k);
    env_.resize(before);
  }

 private:
  void fix(AttrRef& r) const {
    if (r.var == out_) return;
    for (auto it = env_.rbegin(); it != env_.rend(); ++it) {
      if (it->first == r.var) {
        r.var = it->second;
        return;
      }
    }
  }

  std::string out_;
  std::vector<std::string> used_;
  std::vector<std::pair<std::string, std::string>> env_;
};

}  // namespace

UnionQuery eliminate_disjunction(const TrcFormulaQuery& q, std::size_t max_disjuncts) {
  UnionQuery out;
  if (!has_disjunction(q.body)) {
    out.cells.push_back(trc_pullup(q));
    return out;
  }
  Dnf d = Dnfer(max_disjuncts).dnf(q.body);
  if (d.empty()) throw TranslationError("the formula is unsatisfiable and has no union cell");
  for (auto& c : d) {
    TrcFormulaQuery cell{q.kind, q.out_name, q.out_attrs,
                         c.size() == 1 ? std::move(c[0]) : TrcFormula::make_and(std::move(c))};
    RenameApart(q.kind == QueryKind::QUERY ? q.out_name : "").run(cell.body);
    TrcQuery t = trc_pullup(cell);
    auto violations = check_anchored(t);
    if (!violations.empty()) throw AnchoringFault(violations.front().message);
    out.cells.push_back(std::move(t));
  }
  return out;
}

}  // namespace reldiag
