#include "common/error.hpp"

namespace seam {

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Validate: return "validate";
    case ErrorKind::Config: return "config";
    case ErrorKind::Io: return "io";
    case ErrorKind::Numeric: return "numeric";
    case ErrorKind::Model: return "model";
    case ErrorKind::Corpus: return "corpus";
  }
  return "unknown";
}

SeamError::SeamError(ErrorKind kind, std::string message)
    : std::runtime_error(std::string(error_kind_name(kind)) + ": " + std::move(message)),
      kind_(kind) {}

void raise(ErrorKind kind, const std::string& message) {
  throw SeamError(kind, message);
}

}  // namespace seam
