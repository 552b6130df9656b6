#include "kuramoto/error.hpp"

namespace kuramoto {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid argument";
    case ErrorCode::out_of_domain: return "out of domain";
    case ErrorCode::parse_error: return "parse error";
    case ErrorCode::io_error: return "i/o error";
    case ErrorCode::divergence: return "divergence";
    case ErrorCode::no_equilibrium: return "no equilibrium found";
    case ErrorCode::singular_jacobian: return "singular Jacobian";
    case ErrorCode::unsupported: return "unsupported";
    case ErrorCode::sampling_infeasible: return "sampling infeasible";
  }
  return "unknown error";
}

}  // namespace kuramoto
