#pragma once

#include <stdexcept>
#include <string>

namespace kuramoto {

enum class ErrorCode {
  invalid_argument = 1,
  out_of_domain,
  parse_error,
  io_error,
  divergence,
  no_equilibrium,
  singular_jacobian,
  unsupported,
  sampling_infeasible,
};

const char* to_string(ErrorCode code) noexcept;

/// Exception carried across the C++ core; the C layer maps `code()` onto a
/// status value.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace kuramoto
