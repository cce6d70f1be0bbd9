#pragma once

#include <string>

/// Worked examples shared by the unit, property and acceptance tests.
namespace fixtures {

// ---- three patterns for "R rows whose B has no match in S"

inline const std::string kRS = "R(A, B)\nS(B)\n";

inline const std::string kGuardProgram =
    "I(x,y) :- R(x,_), S(y).\n"
    "Q(x,y) :- R(x,y), not I(x,y).\n";
inline const std::string kGuardAlgebra = "Minus(R, Product(Project[A](R), S))";
inline const std::string kGuardDiagram = R"({
  "format": "reldiag-diagram", "version": 1, "mode": "query",
  "cells": [{
    "root": 0,
    "partitions": [{"id": 0, "tables": [0], "children": [1]},
                   {"id": 1, "tables": [1, 2], "children": []}],
    "tables": [{"id": 0, "relation": "R", "rows": [{"attr": "A"}, {"attr": "B"}]},
               {"id": 1, "relation": "R", "rows": [{"attr": "A"}]},
               {"id": 2, "relation": "S", "rows": [{"attr": "B"}]}],
    "edges": [{"from": {"table": 0, "row": 0}, "to": {"table": 1, "row": 0}, "op": "=", "directed": false},
              {"from": {"table": 0, "row": 1}, "to": {"table": 2, "row": 0}, "op": "=", "directed": false}],
    "output": {"name": "Q", "attrs": [{"name": "A", "links": [{"table": 0, "row": 0}]},
                                      {"name": "B", "links": [{"table": 0, "row": 1}]}]}
  }]
})";

inline const std::string kRejoinProgram =
    "I(y) :- R(_,y), not S(y).\n"
    "Q(x,y) :- R(x,y), I(y).\n";
inline const std::string kRejoinAlgebra = "Join(R, Minus(Project[B](R), S))";
inline const std::string kRejoinDiagram = R"({
  "format": "reldiag-diagram", "version": 1, "mode": "query",
  "cells": [{
    "root": 0,
    "partitions": [{"id": 0, "tables": [0, 1], "children": [1]},
                   {"id": 1, "tables": [2], "children": []}],
    "tables": [{"id": 0, "relation": "R", "rows": [{"attr": "A"}, {"attr": "B"}]},
               {"id": 1, "relation": "R", "rows": [{"attr": "B"}]},
               {"id": 2, "relation": "S", "rows": [{"attr": "B"}]}],
    "edges": [{"from": {"table": 0, "row": 1}, "to": {"table": 1, "row": 0}, "op": "=", "directed": false},
              {"from": {"table": 1, "row": 0}, "to": {"table": 2, "row": 0}, "op": "=", "directed": false}],
    "output": {"name": "Q", "attrs": [{"name": "A", "links": [{"table": 0, "row": 0}]},
                                      {"name": "B", "links": [{"table": 0, "row": 1}]}]}
  }]
})";

inline const std::string kDirectProgram = "Q(x,y) :- R(x,y), not S(y).\n";
inline const std::string kDirectDiagram = R"({
  "format": "reldiag-diagram", "version": 1, "mode": "query",
  "cells": [{
    "root": 0,
    "partitions": [{"id": 0, "tables": [0], "children": [1]},
                   {"id": 1, "tables": [1], "children": []}],
    "tables": [{"id": 0, "relation": "R", "rows": [{"attr": "A"}, {"attr": "B"}]},
               {"id": 1, "relation": "S", "rows": [{"attr": "B"}]}],
    "edges": [{"from": {"table": 0, "row": 1}, "to": {"table": 1, "row": 0}, "op": "=", "directed": false}],
    "output": {"name": "Q", "attrs": [{"name": "A", "links": [{"table": 0, "row": 0}]},
                                      {"name": "B", "links": [{"table": 0, "row": 1}]}]}
  }]
})";

// ---- relational division over R(A, B), S(B)

inline const std::string kDivisionTrc1 =
    "{q(A) | exists r in R [q.A = r.A and not exists s in S [not exists r2 in R "
    "[r2.B = s.B and r2.A = r.A]]]}";
inline const std::string kDivisionTrc2 =
    "{q(A) | exists r in R [q.A = r.A and not exists s in S, r3 in R [r3.A = r.A and "
    "not exists r2 in R [r2.B = s.B and r2.A = r3.A]]]}";
inline const std::string kDivisionSql1 =
    "SELECT DISTINCT R.A FROM R WHERE not exists (SELECT * FROM S WHERE not exists "
    "(SELECT * FROM R AS R2 WHERE R2.B = S.B AND R2.A = R.A))";
inline const std::string kDivisionSql2 =
    "SELECT DISTINCT R.A FROM R WHERE not exists (SELECT * FROM S, R AS R3 WHERE R3.A = R.A "
    "AND not exists (SELECT * FROM R AS R2 WHERE R2.B = S.B AND R2.A = R3.A))";
inline const std::string kDivisionSql3 =
    "SELECT DISTINCT R.A FROM R WHERE R.A not in (SELECT R3.A FROM S, R AS R3 "
    "WHERE (R3.A, S.B) not in (SELECT R2.A, R2.B FROM R AS R2))";
inline const std::string kDivisionAlgebra =
    "Minus(Project[A](R), Project[A](Minus(Product(Project[A](R), S), R)))";
inline const std::string kDivisionProgram =
    "I(x) :- R(x,_), S(y), not R(x,y).\n"
    "Q(x) :- R(x,_), not I(x).\n";

// ---- equivalent spellings of three simple R(A, B), S(B) queries

inline const std::string kSemijoinTrc = "{q(A) | exists r in R, s in S [q.A = r.A and r.B = s.B]}";
inline const std::string kSemijoinSql[] = {
    "SELECT DISTINCT R.A FROM R, S WHERE R.B = S.B",
    "SELECT DISTINCT R.A FROM R WHERE exists (SELECT * FROM S WHERE R.B = S.B)",
    "SELECT DISTINCT R.A FROM R WHERE R.B in (SELECT S.B FROM S)",
    "SELECT DISTINCT R.A FROM R WHERE R.B = any (SELECT S.B FROM S)",
};
inline const std::string kAntijoinTrc =
    "{q(A) | exists r in R [q.A = r.A and not exists s in S [r.B = s.B]]}";
inline const std::string kAntijoinSql[] = {
    "SELECT DISTINCT R.A FROM R WHERE not exists (SELECT * FROM S WHERE R.B = S.B)",
    "SELECT DISTINCT R.A FROM R WHERE R.B not in (SELECT S.B FROM S)",
    "SELECT DISTINCT R.A FROM R WHERE R.B <> all (SELECT S.B FROM S)",
};
inline const std::string kMaxTrc = "{q(A) | exists r in R [q.A = r.A and not exists s in S [r.B < s.B]]}";
inline const std::string kMaxSql[] = {
    "SELECT DISTINCT R.A FROM R WHERE not exists (SELECT * FROM S WHERE R.B < S.B)",
    "SELECT DISTINCT R.A FROM R WHERE R.B >= all (SELECT S.B FROM S)",
};

// ---- disjunction

inline const std::string kRS2 = "R(A, B, C)\nS(B, C)\n";
inline const std::string kDisjunctionSql =
    "SELECT DISTINCT R.A FROM R WHERE not exists (SELECT * FROM S WHERE not exists "
    "(SELECT * FROM R AS R2 WHERE (R2.B = S.B OR R2.C = S.C) AND R2.A = R.A))";
inline const std::string kDisjunctionSql2 =
    "SELECT DISTINCT R.A FROM R WHERE not exists (SELECT * FROM S WHERE "
    "not exists (SELECT * FROM R AS R2 WHERE R2.B = S.B AND R2.A = R.A) AND "
    "not exists (SELECT * FROM R AS R3 WHERE R3.C = S.C AND R3.A = R.A))";
inline const std::string kRST = "R(A)\nS(A)\nT(A)\n";
inline const std::string kDisjunctionOrSql = "SELECT DISTINCT R.A FROM R, S, T WHERE R.A = S.A OR R.A = T.A";

// ---- sentences

inline const std::string kSailorSchema = "Sailor(sid)\nBoat(bid, bname: string, color: string)\nReserves(sid, bid)\n";
inline const std::string kSailorTrc =
    "not exists s in Sailor [not exists b in Boat, r in Reserves "
    "[b.color = 'red' and r.bid = b.bid and r.sid = s.sid]]";
inline const std::string kSailorSql =
    "SELECT not exists (SELECT * FROM Sailor s WHERE not exists (SELECT b.bid FROM Boat b, "
    "Reserves r WHERE b.color = 'red' AND r.bid = b.bid AND r.sid = s.sid))";

// ---- comparison joins that a single Datalog rule cannot hold

inline const std::string kUnarySchema = "R(A)\nS(A)\n";
inline const std::string kLimitsTrc = "{q(A) | exists r in R [r.A = q.A and not exists s in S [s.A < r.A]]}";
inline const std::string kLimitsProgram =
    "I(x) :- R(x), S(y), x > y.\n"
    "Q(x) :- R(x), not I(x).\n";

}  // namespace fixtures
