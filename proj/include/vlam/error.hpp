#pragma once

#include <stdexcept>
#include <string>

namespace vlam {

/// Base of every error raised by the library. The CLI maps these to exit 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two quantale values (or V-categories) from different quantales were mixed.
class SpecMismatch : public Error {
 public:
  using Error::Error;
};

/// A value outside the carrier of its quantale, or not in the chosen basis.
class CarrierError : public Error {
 public:
  using Error::Error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& message, int line, int column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// An operation symbol that the active signature does not declare.
class UnknownSymbolError : public SyntaxError {
 public:
  UnknownSymbolError(const std::string& symbol, int line, int column)
      : SyntaxError("unknown operation symbol '" + symbol + "'", line, column), symbol_(symbol) {}
  const std::string& symbol() const { return symbol_; }

 private:
  std::string symbol_;
};

enum class TypeErrorKind {
  UnboundVariable,
  DuplicateUse,
  UnusedVariable,
  TypeMismatch,
  ArityMismatch,
  UnknownSymbol,
  BadContext,
};

class TypeError : public Error {
 public:
  TypeError(TypeErrorKind kind, const std::string& message) : Error(message), kind_(kind) {}
  TypeErrorKind kind() const { return kind_; }

 private:
  TypeErrorKind kind_;
};

/// Derivation transformations whose side conditions fail.
class DerivationError : public Error {
 public:
  using Error::Error;
};

enum class TheoryErrorKind { Parse, Sort, NonBasisLabel, DuplicateOperation, Linearity, UnknownSymbol };

class TheoryError : public Error {
 public:
  TheoryError(TheoryErrorKind kind, int line, const std::string& message)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
        kind_(kind),
        line_(line) {}
  TheoryErrorKind kind() const { return kind_; }
  int line() const { return line_; }

 private:
  TheoryErrorKind kind_;
  int line_;
};

enum class ReplayErrorKind { LabelMismatch, RuleMisapplication };

class ReplayError : public Error {
 public:
  ReplayError(ReplayErrorKind kind, const std::string& message) : Error(message), kind_(kind) {}
  ReplayErrorKind kind() const { return kind_; }

 private:
  ReplayErrorKind kind_;
};

/// Raised by model construction and evaluation.
class ModelError : public Error {
 public:
  using Error::Error;
};

/// An enumeration (shuffles, hom-objects, ...) would exceed its configured limit.
class LimitExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace vlam
