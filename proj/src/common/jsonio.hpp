#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace seam {

using Json = nlohmann::json;

Json load_json_file(const std::filesystem::path& path);
void save_json_file(const std::filesystem::path& path, const Json& value);

// JSON-lines helpers. Writing is append-free and deterministic: one compact
// object per line, '\n' separators, trailing newline.
void save_jsonl_file(const std::filesystem::path& path, const std::vector<Json>& rows);
void for_each_jsonl_row(const std::filesystem::path& path,
                        const std::function<void(const Json&, std::size_t)>& fn);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace seam
