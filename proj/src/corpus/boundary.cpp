#include "corpus/boundary.hpp"

#include "common/error.hpp"

namespace seam {

std::vector<InsnGroup> group_by_line(const std::vector<AsmInstruction>& insns) {
  std::vector<InsnGroup> groups;
  for (std::size_t i = 0; i < insns.size(); ++i) {
    if (insns[i].line <= 0) {
      raise(ErrorKind::Validate, "instruction without line info: " + insns[i].raw);
    }
    if (groups.empty() || groups.back().line != insns[i].line) {
      groups.push_back({insns[i].line, i, i + 1});
    } else {
      groups.back().end = i + 1;
    }
  }
  return groups;
}

CoreBody strip_frame(const std::vector<AsmInstruction>& insns) {
  std::vector<InsnGroup> groups = group_by_line(insns);
  if (groups.size() < 2) {
    raise(ErrorKind::Validate, "function has no statement groups");
  }
  CoreBody core;
  for (std::size_t g = 1; g + 1 < groups.size(); ++g) {
    InsnGroup rebased = groups[g];
    rebased.begin = core.insns.size();
    for (std::size_t i = groups[g].begin; i < groups[g].end; ++i) {
      core.insns.push_back(insns[i]);
      core.boundary.push_back(i + 1 == groups[g].end ? 1 : 0);
    }
    rebased.end = core.insns.size();
    core.groups.push_back(rebased);
  }
  return core;
}

std::vector<int> label_boundaries(const std::vector<AsmInstruction>& insns) {
  return strip_frame(insns).boundary;
}

}  // namespace seam
