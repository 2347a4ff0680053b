#pragma once

#include <string>
#include <vector>

#include "csubset/ast.hpp"

namespace seam {

// SeamCode is a line-oriented IL: one SeamLine per statement, tokens in
// post-order, literals abstracted to placeholders. The vocabulary is closed —
// every token comes from the fixed inventory below.
//
//   structural   ASSIGN DECL IF ELSE WHILE CALL RET END
//   types        T_INT T_LONG T_UNS
//   placeholders IMM STR FUNC UP DOWN
//   operators    the binary set, "!" and "="
//   variables    v0 .. v{kMaxSeamVars-1}

inline constexpr int kMaxSeamVars = 16;

struct SeamLine {
  std::string kind;                 // structural token
  std::vector<std::string> tokens;  // payload tokens (kind excluded)
};

bool is_structural_token(const std::string& tok);
bool is_type_token(const std::string& tok);
bool is_placeholder_token(const std::string& tok);
bool is_operator_token(const std::string& tok);  // binary ops, "!", "="
// Variable tokens look like v<k>; returns the index or -1.
int var_token_index(const std::string& tok);
std::string var_token(int index);

std::string type_token_for(TypeTag tag);
TypeTag type_tag_from_token(const std::string& tok);

// Every token the IL may contain (used for closed-vocabulary checks and for
// the translator's target alphabet).
std::vector<std::string> seam_token_inventory();

bool is_seam_token(const std::string& tok);

// Text form: one line per SeamLine, space-separated, kind first.
std::string seam_line_text(const SeamLine& line);
std::string seam_lines_text(const std::vector<SeamLine>& lines);
std::vector<SeamLine> parse_seam_lines(const std::string& text);

// Flat token view (kind token followed by payload tokens, per line).
std::vector<std::string> seam_line_flat(const SeamLine& line);

}  // namespace seam
