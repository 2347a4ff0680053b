#include "common/jsonio.hpp"

#include <fstream>
#include <sstream>

#include "common/error.hpp"

namespace seam {

Json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorKind::Io, "cannot open " + path.string());
  Json value;
  try {
    in >> value;
  } catch (const Json::parse_error& e) {
    raise(ErrorKind::Parse, path.string() + ": " + e.what());
  }
  return value;
}

void save_json_file(const std::filesystem::path& path, const Json& value) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorKind::Io, "cannot write " + path.string());
  out << value.dump(2) << '\n';
}

void save_jsonl_file(const std::filesystem::path& path, const std::vector<Json>& rows) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorKind::Io, "cannot write " + path.string());
  for (const Json& row : rows) out << row.dump() << '\n';
}

void for_each_jsonl_row(const std::filesystem::path& path,
                        const std::function<void(const Json&, std::size_t)>& fn) {
  std::ifstream in(path);
  if (!in) raise(ErrorKind::Io, "cannot open " + path.string());
  std::string line;
  std::size_t index = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Json row;
    try {
      row = Json::parse(line);
    } catch (const Json::parse_error& e) {
      raise(ErrorKind::Parse, path.string() + ":" + std::to_string(index + 1) + ": " + e.what());
    }
    fn(row, index++);
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorKind::Io, "cannot write " + path.string());
  out << text;
}

}  // namespace seam
