#pragma once

#include <stdexcept>
#include <string>

namespace seam {

// Error taxonomy shared by the whole pipeline. The C API maps these onto
// status codes; internally we throw.
enum class ErrorKind {
  Parse,      // malformed input text (C source, assembly, SeamCode)
  Validate,   // structurally well-formed but violates a contract
  Config,     // bad configuration / CLI usage
  Io,         // filesystem and external-process failures
  Numeric,    // non-finite values, shape mismatches, bad tensor ops
  Model,      // checkpoint/vocab/decode problems
  Corpus,     // corpus construction failures (alignment, shortfall, dedup)
};

const char* error_kind_name(ErrorKind kind);

class SeamError : public std::runtime_error {
 public:
  SeamError(ErrorKind kind, std::string message);
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void raise(ErrorKind kind, const std::string& message);

}  // namespace seam
