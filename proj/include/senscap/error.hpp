#pragma once

#include <stdexcept>
#include <string>

namespace senscap {

enum class ErrorCode {
  InvalidArgument,
  InvalidGrid,
  InvalidModel,
  EnumerationTooLarge,
  CoverageOverlap,
  PatternSize,
  DimensionMismatch,
  InvalidChannel,
  InvalidSensing,
  UndefinedConditional,
  InconsistentTypes,
  WrongDirection,
  Infeasible,
  Config,
  Io,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace senscap
