#include "seamcode/normalize.hpp"

#include <array>
#include <map>

#include "common/error.hpp"
#include "seamcode/tokens.hpp"

namespace seam {

namespace {

class Normalizer {
 public:
  NormalizedFunction run(const Function& fn) {
    NormalizedFunction out;
    out.ast = fn;
    map_.function_name = fn.name;
    out.ast.name = "FUNC";
    walk(out.ast.body);
    out.renaming = std::move(map_);
    return out;
  }

 private:
  RenamingMap map_;
  std::map<std::string, int> assigned_;  // original -> global index
  std::array<int, 3> per_type_counts_ = {0, 0, 0};

  std::string normalized_for(const std::string& original, TypeTag type) {
    auto it = assigned_.find(original);
    if (it == assigned_.end()) {
      RenameEntry entry;
      entry.original = original;
      entry.type = type;
      entry.global_index = static_cast<int>(map_.vars.size());
      entry.index_within_type = per_type_counts_[static_cast<int>(type)]++;
      it = assigned_.emplace(original, entry.global_index).first;
      map_.vars.push_back(std::move(entry));
    }
    return var_token(it->second);
  }

  void walk(AstNode& node) {
    switch (node.kind) {
      case NodeKind::Decl:
      case NodeKind::VarRef:
        node.name = normalized_for(node.name, node.type);
        break;
      case NodeKind::Call:
        map_.call_names.push_back(node.name);
        node.name = "FUNC";
        break;
      default:
        break;
    }
    for (AstNode& child : node.children) walk(child);
  }
};

}  // namespace

NormalizedFunction normalize_identifiers(const Function& fn) {
  Normalizer normalizer;
  return normalizer.run(fn);
}

const RenameEntry* find_by_original(const RenamingMap& map, const std::string& original) {
  for (const RenameEntry& entry : map.vars) {
    if (entry.original == original) return &entry;
  }
  return nullptr;
}

const RenameEntry* find_by_index(const RenamingMap& map, int global_index) {
  for (const RenameEntry& entry : map.vars) {
    if (entry.global_index == global_index) return &entry;
  }
  return nullptr;
}

}  // namespace seam
