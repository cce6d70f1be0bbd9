#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace reldiag {

/// Base of every fault raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Comparing values of different tags (integer vs. string).
class TypeFault : public Error {
 public:
  using Error::Error;
};

/// An enumeration or expansion would exceed its configured ceiling.
class CapacityFault : public Error {
 public:
  using Error::Error;
};

/// Unknown relation, attribute, or arity mismatch against a schema.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Text that does not belong to the language being parsed.
class SourceError : public Error {
 public:
  SourceError(std::size_t line, std::size_t column, std::string message, std::string token)
      : Error(format(line, column, message, token)),
        line_(line),
        column_(column),
        message_(std::move(message)),
        token_(std::move(token)) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& message() const { return message_; }
  const std::string& token() const { return token_; }

 private:
  static std::string format(std::size_t line, std::size_t column, const std::string& message,
                            const std::string& token) {
    std::string out = std::to_string(line) + ":" + std::to_string(column) + ": " + message;
    if (!token.empty()) out += " (at '" + token + "')";
    return out;
  }

  std::size_t line_;
  std::size_t column_;
  std::string message_;
  std::string token_;
};

/// A variable referenced outside of any quantifier that binds it.
class ScopeError : public Error {
 public:
  explicit ScopeError(std::string variable)
      : Error("variable '" + variable + "' is not quantified in an enclosing scope"),
        variable_(std::move(variable)) {}
  const std::string& variable() const { return variable_; }

 private:
  std::string variable_;
};

/// Unsafe Datalog rule or unbound TRC output attribute.
class SafetyFault : public Error {
 public:
  using Error::Error;
};

/// Recursive Datalog program.
class RecursionFault : public Error {
 public:
  using Error::Error;
};

/// An IDB defined by more than one rule.
class DuplicateHeadFault : public Error {
 public:
  using Error::Error;
};

/// Union used where only the non-disjunctive fragment is allowed.
class FragmentFault : public Error {
 public:
  using Error::Error;
};

/// A predicate without a locally quantified attribute.
class AnchoringFault : public Error {
 public:
  using Error::Error;
};

/// An attribute reference that cannot be resolved (unknown or ambiguous).
class AttributeFault : public Error {
 public:
  using Error::Error;
};

/// A translation that the target language cannot express.
class TranslationError : public Error {
 public:
  using Error::Error;
};

/// A diagram that fails one or more validity conditions.
class ValidityFault : public Error {
 public:
  ValidityFault(std::string message, std::vector<int> conditions)
      : Error(std::move(message)), conditions_(std::move(conditions)) {}
  const std::vector<int>& conditions() const { return conditions_; }

 private:
  std::vector<int> conditions_;
};

/// Malformed diagram JSON, with the JSON path of the offending element.
class SchemaViolation : public Error {
 public:
  SchemaViolation(std::string path, const std::string& message)
      : Error(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace reldiag
