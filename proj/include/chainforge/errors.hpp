#pragma once

#include <stdexcept>
#include <string>

namespace chainforge {

// Base for everything thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file: bad JSON, wrong field type, missing key.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// Structurally valid input that violates a model invariant
// (negative capacity, duplicate id, dangling reference, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Lexical or grammatical error in a chain expression. Caries the
// 1-based position of the offending character or token.
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& msg, int line, int col)
      : Error(msg + " at line " + std::to_string(line) + ", column " +
              std::to_string(col)),
        line_(line),
        col_(col) {}
  int line() const { return line_; }
  int col() const { return col_; }

 private:
  int line_;
  int col_;
};

// Well-formed chain that refers to unknown symbols or misuses known ones.
class SemanticError : public Error {
 public:
  using Error::Error;
};

// Failure while expanding a chain into graphs (ratio arity mismatch,
// enumeration blow-up, cyclic result, ...).
class ExpansionError : public Error {
 public:
  using Error::Error;
};

// Failure while reading back a solver solution file.
class SolutionImportError : public Error {
 public:
  using Error::Error;
};

// A required solve proved the instance has no feasible placement.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// A required solve ran out of its time budget before finishing.
class TimeLimitError : public Error {
 public:
  using Error::Error;
};

// Filesystem-level trouble: unreadable path, unwritable directory.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace chainforge
