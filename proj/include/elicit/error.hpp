#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace elicit {

enum class ErrorCode {
  DomainError,         // parameter or argument outside its admissible range
  DomainViolation,     // a point outside the action domain of a score / functional
  NonFiniteIntegrand,
  DenominatorError,
  NotSymmetric,
  Unsupported,
  ConvexityError,
  PathOutsideDomain,
  Diverged,
  Precondition,
  ParseError,
  UsageError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what) {}

  ErrorCode code() const noexcept { return code_; }
  // Message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace elicit
