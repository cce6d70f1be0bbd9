#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "reldiag/ast.hpp"
#include "reldiag/diagram.hpp"
#include "reldiag/parsers.hpp"

namespace reldiag {

enum class Language { SQL, TRC, DATALOG, RA, DIAGRAM };

std::string language_name(Language lang);
/// Accepts sql, trc, datalog (dlg), ra, diagram (rd, rdjson).
std::optional<Language> parse_language(const std::string& name);
/// By extension: .sql .trc .dlg/.dl .ra .rdjson
std::optional<Language> language_for_path(const std::string& path);

/// Any query artifact the toolkit can evaluate.
using AnyQuery =
    std::variant<SqlQuery, TrcQuery, TrcFormulaQuery, UnionQuery, DatalogProgram, RaExpr, Diagram>;

/// TRC in full mode keeps the raw formula only when it contains disjunction.
AnyQuery parse_query(const std::string& text, Language lang, const Schema* schema = nullptr,
                     ParseOptions opts = {});
std::string print_query(const AnyQuery& q);
Language language_of(const AnyQuery& q);

std::vector<Occurrence> extensional_tables(const AnyQuery& q);
/// Constants in first-occurrence order, without duplicates.
std::vector<Value> query_constants(const AnyQuery& q);

}  // namespace reldiag
