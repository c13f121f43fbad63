#include "hogt/error.hpp"

namespace hogt {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParameter: return "invalid-parameter";
    case ErrorKind::GenerationFailure: return "generation-failure";
    case ErrorKind::ResourceGuard: return "resource-guard";
    case ErrorKind::SizeMismatch: return "size-mismatch";
    case ErrorKind::DimensionError: return "dimension-error";
    case ErrorKind::ConvergenceFailure: return "convergence-failure";
    case ErrorKind::ParseError: return "parse-error";
    case ErrorKind::SubcomplexError: return "subcomplex-error";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

}  // namespace hogt
