// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the eulervisc authors

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace eulervisc {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

/// Configuration / validation failure. Carries all violations, not just the first.
class ValidationError : public Error {
 public:
  ValidationError(const std::string& what, std::vector<std::string> violations)
      : Error(what), violations_(std::move(violations)) {}
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int column)
      : Error(what), line_(line), column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

/// Nonlinear step failure after all fallbacks; carries per-equation diagnostics.
class StepFailure : public SolverError {
 public:
  StepFailure(const std::string& what, std::string diagnostics)
      : SolverError(what), diagnostics_(std::move(diagnostics)) {}
  const std::string& diagnostics() const { return diagnostics_; }

 private:
  std::string diagnostics_;
};

}  // namespace eulervisc
