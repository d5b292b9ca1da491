#pragma once

#include <stdexcept>
#include <string>

namespace hvcg {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Partial operations (division by zero, ln of a non-positive value,
/// unbound identifiers) raise EvalError instead of producing NaN.
class EvalError : public Error {
public:
  enum class Kind { DivisionByZero, LnDomain, Unbound, Overflow, Unsupported };

  EvalError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

private:
  Kind kind_;
};

class ParseError : public Error {
public:
  ParseError(const std::string& msg, int line, int column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
        line_(line), column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

private:
  int line_;
  int column_;
};

} // namespace hvcg

namespace hvcg {

/// A program handed to vcgen or refine lacks a required annotation
/// (loop invariant, flow or differential invariant).
class AnnotationError : public Error {
public:
  using Error::Error;
};

} // namespace hvcg
