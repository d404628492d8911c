#pragma once

#include <stdexcept>
#include <string>

namespace termnet {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text (term-set DSL, JSON files). Carries a 1-based position
// when one is known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line = 0, int column = 0)
      : Error(line > 0 ? std::to_string(line) + ":" + std::to_string(column) +
                             ": " + what
                       : what),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

// Inputs that parse but violate an operation's precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Enumeration would exceed the configured work budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace termnet
