#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "csubset/ast.hpp"
#include "semrec/positions26.hpp"

namespace seam {

// Aggregated identifier placement statistics: for every variable name seen in
// the input functions, how often it occupied each syntactic position. This
// table is the identifier-recovery model's entire training state.
struct PositionTable {
  std::map<std::string, PositionVector> counts;
  std::int64_t functions = 0;
};

void accumulate_positions(PositionTable& table, const Function& fn);
PositionTable collect_position_stats(const std::vector<Function>& functions);

// Rebuilds functions from printed sources (corpus rows store the text).
PositionTable collect_position_stats_from_sources(const std::vector<std::string>& sources);

void save_position_table(const std::filesystem::path& path, const PositionTable& table);
PositionTable load_position_table(const std::filesystem::path& path);

}  // namespace seam
