#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace commonlines {

enum class ErrorCode {
  DegenerateInput,
  NotIsometric,
  TriangleInequalityViolated,
  ZeroVector,
  NormMismatch,
  CoincidentPlanes,
  NotGeneric,
  DegenerateAngle,
  DegenerateConfiguration,
  InvalidData,
  IncompatibleTriples,
  RankDeficient,
  UndefinedProjection,
  InitializationFailed,
  IndexOutOfRange,
  ParseError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so that
/// callers (the CLI in particular) can map them onto exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace commonlines
