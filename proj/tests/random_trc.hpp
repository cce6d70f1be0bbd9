#pragma once

#include <random>
#include <string>
#include <vector>

#include "reldiag/ast.hpp"
#include "reldiag/canonicalizer.hpp"
#include "reldiag/model.hpp"

/// Seeded generator of anchored calculus queries over R(A, B), S(B, C), T(A)
/// with constants 0 and 1.
namespace random_trc {

inline const std::string kSchema = "R(A, B)\nS(B, C)\nT(A)\n";

struct Limits {
  int max_depth = 3;   // nesting depth of negation scopes below the root
  int max_tables = 5;  // tuple variables in the whole query
  int max_preds = 6;   // predicates, output equalities included
};

class Generator {
 public:
  explicit Generator(std::uint64_t seed, Limits limits = {}) : rng_(seed), limits_(limits) {}

  reldiag::TrcQuery next() {
    for (;;) {
      reldiag::TrcQuery q = attempt();
      if (reldiag::check_anchored(q).empty()) return q;
    }
  }

 private:
  struct Rel {
    const char* name;
    std::vector<std::string> attrs;
  };

  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin(double p) { return std::bernoulli_distribution(p)(rng_); }

  const Rel& rel(int i) const {
    static const std::vector<Rel> rels{{"R", {"A", "B"}}, {"S", {"B", "C"}}, {"T", {"A"}}};
    return rels[i];
  }

  reldiag::TrcVar add_var(reldiag::TrcScope& scope, std::vector<std::pair<reldiag::TrcVar, int>>& visible) {
    int r = pick(0, 2);
    reldiag::TrcVar v{"t" + std::to_string(++vars_), rel(r).name};
    scope.vars.push_back(v);
    visible.emplace_back(v, r);
    ++tables_;
    return v;
  }

  reldiag::AttrRef attr_of(const reldiag::TrcVar& v, int r) {
    const auto& attrs = rel(r).attrs;
    return {v.name, attrs[pick(0, static_cast<int>(attrs.size()) - 1)]};
  }

  reldiag::CompOp random_op() {
    static const reldiag::CompOp ops[] = {reldiag::CompOp::EQ, reldiag::CompOp::EQ, reldiag::CompOp::NEQ,
                                          reldiag::CompOp::LT, reldiag::CompOp::LEQ, reldiag::CompOp::GT,
                                          reldiag::CompOp::GEQ};
    return ops[pick(0, 6)];
  }

  /// Every predicate mentions a variable of its own scope, so the result is
  /// anchored by construction.
  void fill(reldiag::TrcScope& scope, std::vector<std::pair<reldiag::TrcVar, int>> visible, std::size_t local_from,
            int depth) {
    int want = pick(0, 2);
    for (int i = 0; i < want && preds_ < limits_.max_preds; ++i) {
      int li = pick(static_cast<int>(local_from), static_cast<int>(visible.size()) - 1);
      reldiag::TrcPred p;
      p.lhs = attr_of(visible[li].first, visible[li].second);
      p.op = random_op();
      if (visible.size() > 1 && coin(0.7)) {
        int ri = pick(0, static_cast<int>(visible.size()) - 1);
        if (ri == li) ri = (ri + 1) % static_cast<int>(visible.size());
        p.rhs = attr_of(visible[ri].first, visible[ri].second);
      } else {
        p.rhs = reldiag::Value(std::int64_t{pick(0, 1)});
      }
      scope.preds.push_back(p);
      ++preds_;
    }
    if (depth >= limits_.max_depth) return;
    int kids = pick(0, 2);
    for (int i = 0; i < kids && tables_ < limits_.max_tables; ++i) {
      reldiag::TrcScope child;
      auto inner = visible;
      std::size_t from = inner.size();
      int n = pick(1, 2);
      for (int j = 0; j < n && tables_ < limits_.max_tables; ++j) add_var(child, inner);
      fill(child, inner, from, depth + 1);
      scope.negations.push_back(std::move(child));
    }
  }

  reldiag::TrcQuery attempt() {
    vars_ = tables_ = preds_ = 0;
    reldiag::TrcQuery q;
    std::vector<std::pair<reldiag::TrcVar, int>> visible;
    int n = pick(1, 2);
    for (int j = 0; j < n; ++j) add_var(q.root, visible);
    if (coin(0.1)) {
      q.kind = reldiag::QueryKind::SENTENCE;
      q.out_attrs.clear();
      // a sentence is the negation of its body, so wrap the body
      reldiag::TrcScope body = std::move(q.root);
      fill(body, visible, 0, 1);
      q.root = reldiag::TrcScope{};
      q.root.negations.push_back(std::move(body));
      return q;
    }
    int outs = pick(1, 2);
    for (int i = 0; i < outs; ++i) {
      int vi = pick(0, static_cast<int>(visible.size()) - 1);
      reldiag::AttrRef src = attr_of(visible[vi].first, visible[vi].second);
      std::string name = src.attr;
      bool taken = false;
      for (const auto& a : q.out_attrs) taken |= a == name;
      if (taken) continue;
      q.out_attrs.push_back(name);
      q.root.preds.push_back(reldiag::TrcPred{{q.out_name, name}, reldiag::CompOp::EQ, src});
      ++preds_;
    }
    fill(q.root, visible, 0, 0);
    return q;
  }

  std::mt19937_64 rng_;
  Limits limits_;
  int vars_ = 0;
  int tables_ = 0;
  int preds_ = 0;
};

/// A random database over the generator's schema with values in {0, 1, 2}.
inline reldiag::Database random_database(const reldiag::Schema& schema, std::mt19937_64& rng, std::size_t max_rows = 4) {
  reldiag::Database db{schema, {}};
  for (const auto& rel : schema.relations()) {
    std::size_t rows = std::uniform_int_distribution<std::size_t>(0, max_rows)(rng);
    for (std::size_t i = 0; i < rows; ++i) {
      reldiag::Tuple t;
      for (std::size_t a = 0; a < rel.arity(); ++a)
        t.push_back(reldiag::Value(std::int64_t{std::uniform_int_distribution<int>(0, 2)(rng)}));
      db.insert(rel.name, t);
    }
  }
  return db;
}

}  // namespace random_trc
