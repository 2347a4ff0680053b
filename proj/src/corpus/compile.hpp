#pragma once

#include <string>

namespace seam {

// External C compiler used for the second corpus backend. Resolution order:
// $SEAM_CC if set, otherwise `gcc` from PATH. Compilation always targets
// unoptimized Intel-syntax assembly with line markers and without CET/PIE
// decoration, so the output parses with the same front end as the reference
// backend's.
std::string external_compiler();

// True when the resolved compiler runs at all. Callers degrade gracefully
// (skip the external backend, say so) instead of failing the build.
bool compiler_available();

struct CompileResult {
  bool ok = false;
  std::string asm_text;
  std::string diagnostics;  // compiler stderr on failure
};

CompileResult compile_to_asm(const std::string& c_source);

}  // namespace seam
