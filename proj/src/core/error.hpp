#pragma once

#include <stdexcept>
#include <string>

namespace hypertoric {

enum class ErrorCode {
  kInvalidArgument,
  kZeroVector,
  kArity,
  kSchema,
  kDomain,
  kSingularity,
  kOrdering,
  kNoUnimodularSubset,
  kNonCoercive,
  kConvergence,
  kPrecondition,
  kNoCertifiedTail,
  kDegeneratePotential,
};

const char* to_string(ErrorCode code);

/// Single exception type for the core; the C layer maps `code()` onto status values.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hypertoric
