#include "corpus/positions.hpp"

#include "common/error.hpp"
#include "common/jsonio.hpp"
#include "csubset/parser.hpp"

namespace seam {

void accumulate_positions(PositionTable& table, const Function& fn) {
  for (const auto& [name, vec] : count_positions(fn)) {
    PositionVector& row = table.counts.try_emplace(name, PositionVector{}).first->second;
    for (int p = 0; p < kPositionCount; ++p) row[p] += vec[p];
  }
  ++table.functions;
}

PositionTable collect_position_stats(const std::vector<Function>& functions) {
  PositionTable table;
  for (const Function& fn : functions) accumulate_positions(table, fn);
  return table;
}

PositionTable collect_position_stats_from_sources(const std::vector<std::string>& sources) {
  PositionTable table;
  for (const std::string& source : sources) {
    for (const Function& fn : parse_c(source).functions) accumulate_positions(table, fn);
  }
  return table;
}

void save_position_table(const std::filesystem::path& path, const PositionTable& table) {
  Json names = Json::array();
  for (int p = 0; p < kPositionCount; ++p) names.push_back(position_name(p));
  Json rows;
  for (const auto& [name, vec] : table.counts) {
    rows[name] = std::vector<std::int64_t>(vec.begin(), vec.end());
  }
  save_json_file(path, Json{{"functions", table.functions},
                            {"positions", std::move(names)},
                            {"identifiers", std::move(rows)}});
}

PositionTable load_position_table(const std::filesystem::path& path) {
  const Json data = load_json_file(path);
  PositionTable table;
  table.functions = data.at("functions").get<std::int64_t>();
  for (const auto& [name, row] : data.at("identifiers").items()) {
    if (row.size() != static_cast<std::size_t>(kPositionCount)) {
      raise(ErrorKind::Model, "position row for '" + name + "' has wrong width");
    }
    PositionVector vec{};
    for (int p = 0; p < kPositionCount; ++p) vec[p] = row.at(p).get<std::int64_t>();
    table.counts.emplace(name, vec);
  }
  return table;
}

}  // namespace seam
