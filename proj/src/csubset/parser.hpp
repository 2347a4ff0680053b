#pragma once

#include <string>

#include "csubset/ast.hpp"

namespace seam {

// Parses a translation unit of the subset: one or more function definitions
// of the form `<type> name() { ... }`. Reports errors with line:col positions
// and runs full subset validation on the result.
Program parse_c(const std::string& source);

// Convenience for the common single-function case.
Function parse_single_function(const std::string& source);

}  // namespace seam
