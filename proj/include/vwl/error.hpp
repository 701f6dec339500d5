#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vwl {

enum class ErrorCode {
  OutOfDomain,
  NoCriticalPoint,
  InvalidVorticity,
  NoRoot,
  DegenerateGrid,
  UnsupportedTestFn,
  AllNodesExcluded,
  StagnationInterior,
  Unbounded,
  SeedFailure,
  NewtonDivergence,
  NonMonotoneSurface,
  WindowOutsideDomain,
  InsufficientResolution,
  ConeNotContained,
  NonPositiveAbscissa,
  QuaViolated,
  MaxIterExceeded,
  SchemaError,
  ValidationError,
  InvalidArgument,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library; `code()` identifies the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace vwl
