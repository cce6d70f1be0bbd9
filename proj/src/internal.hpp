#pragma once

#include <string>
#include <vector>

#include "reldiag/ast.hpp"

namespace reldiag::detail {

/// Calculus formula of a SQL query whose columns are qualified and whose
/// aliases are unique. Aliases become tuple variable names.
TrcFormulaQuery sql_formula(const SqlQuery& q);

/// `r2` -> `r`, `R12` -> `R`; names made only of digits stay unchanged.
std::string strip_digits(const std::string& name);

/// All tuple-variable names bound anywhere in the formula.
void collect_var_names(const TrcFormula& f, std::vector<std::string>& out);
void collect_var_names(const TrcScope& s, std::vector<std::string>& out);

}  // namespace reldiag::detail
