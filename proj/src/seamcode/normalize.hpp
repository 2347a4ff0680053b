#pragma once

#include <optional>
#include <string>
#include <vector>

#include "csubset/ast.hpp"

namespace seam {

// Identifier regularization: variables become v<k> where k is the
// first-occurrence index (a single global counter, so the map stays
// injective and the printed program stays valid). Each entry also records the
// variable's ordinal within its own type group — the "per type" view.
// Called functions and the defined function's own name become the FUNC
// placeholder name; the originals are kept so they can be restored.
struct RenameEntry {
  std::string original;
  TypeTag type = TypeTag::Int;
  int global_index = 0;      // k in v<k>
  int index_within_type = 0; // ordinal among same-typed variables
};

struct RenamingMap {
  std::vector<RenameEntry> vars;        // ordered by global index
  std::vector<std::string> call_names;  // callee per call site, emission order
  std::string function_name;            // original defined name
};

struct NormalizedFunction {
  Function ast;
  RenamingMap renaming;
};

NormalizedFunction normalize_identifiers(const Function& fn);

// Looks up an entry by original name or by normalized index.
const RenameEntry* find_by_original(const RenamingMap& map, const std::string& original);
const RenameEntry* find_by_index(const RenamingMap& map, int global_index);

}  // namespace seam
