#pragma once

#include <stdexcept>
#include <string>

namespace hogt {

enum class ErrorKind {
  InvalidParameter,
  GenerationFailure,
  ResourceGuard,
  SizeMismatch,
  DimensionError,
  ConvergenceFailure,
  ParseError,
  SubcomplexError,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace hogt
