#include "seamcode/tokens.hpp"

#include <sstream>

#include "common/error.hpp"

namespace seam {

namespace {

const std::vector<std::string> kStructural = {"ASSIGN", "DECL", "IF", "ELSE",
                                              "WHILE", "CALL", "RET", "END"};
const std::vector<std::string> kTypes = {"T_INT", "T_LONG", "T_UNS"};
const std::vector<std::string> kPlaceholders = {"IMM", "STR", "FUNC", "UP", "DOWN"};

bool contains(const std::vector<std::string>& pool, const std::string& tok) {
  for (const std::string& item : pool) {
    if (item == tok) return true;
  }
  return false;
}

}  // namespace

bool is_structural_token(const std::string& tok) { return contains(kStructural, tok); }
bool is_type_token(const std::string& tok) { return contains(kTypes, tok); }
bool is_placeholder_token(const std::string& tok) { return contains(kPlaceholders, tok); }

bool is_operator_token(const std::string& tok) {
  if (tok == "!" || tok == "=") return true;
  return find_binary_op(tok) != nullptr;
}

int var_token_index(const std::string& tok) {
  if (tok.size() < 2 || tok[0] != 'v') return -1;
  for (std::size_t i = 1; i < tok.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(tok[i]))) return -1;
  }
  int index = std::stoi(tok.substr(1));
  return index < kMaxSeamVars ? index : -1;
}

std::string var_token(int index) {
  if (index < 0 || index >= kMaxSeamVars) {
    raise(ErrorKind::Validate,
          "variable index " + std::to_string(index) + " outside the fixed inventory");
  }
  return "v" + std::to_string(index);
}

std::string type_token_for(TypeTag tag) {
  switch (tag) {
    case TypeTag::Int: return "T_INT";
    case TypeTag::Long: return "T_LONG";
    case TypeTag::Unsigned: return "T_UNS";
  }
  return "T_INT";
}

TypeTag type_tag_from_token(const std::string& tok) {
  if (tok == "T_INT") return TypeTag::Int;
  if (tok == "T_LONG") return TypeTag::Long;
  if (tok == "T_UNS") return TypeTag::Unsigned;
  raise(ErrorKind::Parse, "not a type token: '" + tok + "'");
}

std::vector<std::string> seam_token_inventory() {
  std::vector<std::string> all;
  all.insert(all.end(), kStructural.begin(), kStructural.end());
  all.insert(all.end(), kTypes.begin(), kTypes.end());
  all.insert(all.end(), kPlaceholders.begin(), kPlaceholders.end());
  for (const OpInfo& op : binary_ops()) all.push_back(op.symbol);
  all.push_back("!");
  all.push_back("=");
  for (int i = 0; i < kMaxSeamVars; ++i) all.push_back(var_token(i));
  return all;
}

bool is_seam_token(const std::string& tok) {
  return is_structural_token(tok) || is_type_token(tok) || is_placeholder_token(tok) ||
         is_operator_token(tok) || var_token_index(tok) >= 0;
}

std::string seam_line_text(const SeamLine& line) {
  std::string out = line.kind;
  for (const std::string& tok : line.tokens) {
    out.push_back(' ');
    out += tok;
  }
  return out;
}

std::string seam_lines_text(const std::vector<SeamLine>& lines) {
  std::string out;
  for (const SeamLine& line : lines) {
    out += seam_line_text(line);
    out.push_back('\n');
  }
  return out;
}

std::vector<SeamLine> parse_seam_lines(const std::string& text) {
  std::vector<SeamLine> lines;
  std::istringstream stream(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(stream, raw)) {
    ++lineno;
    std::istringstream words(raw);
    std::string tok;
    SeamLine line;
    bool first = true;
    while (words >> tok) {
      if (first) {
        if (!is_structural_token(tok)) {
          raise(ErrorKind::Parse,
                "line " + std::to_string(lineno) + ": '" + tok + "' is not a structural token");
        }
        line.kind = tok;
        first = false;
      } else {
        if (!is_seam_token(tok)) {
          raise(ErrorKind::Parse,
                "line " + std::to_string(lineno) + ": '" + tok + "' is outside the inventory");
        }
        line.tokens.push_back(tok);
      }
    }
    if (!first) lines.push_back(std::move(line));
  }
  return lines;
}

std::vector<std::string> seam_line_flat(const SeamLine& line) {
  std::vector<std::string> flat;
  flat.reserve(line.tokens.size() + 1);
  flat.push_back(line.kind);
  flat.insert(flat.end(), line.tokens.begin(), line.tokens.end());
  return flat;
}

}  // namespace seam
