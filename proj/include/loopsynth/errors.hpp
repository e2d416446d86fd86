#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace loopsynth {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands live in different variable contexts.
class ContextMismatch : public Error {
 public:
  ContextMismatch() : Error("polynomials belong to different variable contexts") {}
  explicit ContextMismatch(const std::string& what) : Error(what) {}
};

class ArityMismatch : public Error {
 public:
  using Error::Error;
};

class UnknownVariable : public Error {
 public:
  explicit UnknownVariable(const std::string& name)
      : Error("unknown variable '" + name + "'"), name_(name) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

class MissingBinding : public Error {
 public:
  explicit MissingBinding(const std::string& name)
      : Error("no value bound for variable '" + name + "'") {}
};

/// A Groebner computation or fixed-point iteration ran out of its step,
/// round, or wall-clock budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t line, std::size_t column)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) +
              ": " + msg),
        line_(line),
        column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class EnumerationCapExceeded : public Error {
 public:
  using Error::Error;
};

/// The external solver answered with something we could not interpret.
class SolverProtocolError : public Error {
 public:
  using Error::Error;
};

}  // namespace loopsynth
