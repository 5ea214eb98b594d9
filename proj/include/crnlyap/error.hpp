#pragma once

#include <stdexcept>
#include <string>

namespace crnlyap {

enum class ErrorCode {
  DuplicateSpecies,
  SelfLoopReaction,
  NonpositiveRate,
  NegativeCoefficient,
  LengthMismatch,
  SyntaxError,
  NonpositiveEntry,
  NegativeConcentration,
  StepSizeUnderflow,
  NonPositiveInitial,
  NotAnEquilibriumReference,
  NewtonDivergence,
  NegativeProductCoefficient,
  NonIntegerProduct,
  SelfLoopProduced,
  InvalidRegion,
  PathNotInClass,
  DegenerateBasis,
  SourceNotComplexBalanced,
  StructuralMismatch,
  IoFailure,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

/// Parse failure with a 1-based source location.
class SyntaxError : public Error {
public:
  SyntaxError(const std::string& message, int line, int column)
      : Error(ErrorCode::SyntaxError, "line " + std::to_string(line) + ", column " +
                                          std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

private:
  int line_;
  int column_;
};

}  // namespace crnlyap
