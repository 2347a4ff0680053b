#include "asmtext/canonicalize.hpp"

#include <cctype>
#include <set>

#include "common/error.hpp"

namespace seam {

namespace {

bool is_shift_mnemonic(const std::string& m) {
  return m == "shl" || m == "shr" || m == "sal" || m == "sar" || m == "rol" || m == "ror";
}

bool is_string_label(const std::string& token) {
  std::size_t at = token.find(".LC");
  if (at == std::string::npos) return false;
  std::size_t digit = at + 3;
  if (digit >= token.size()) return false;
  for (std::size_t i = digit; i < token.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(token[i]))) return false;
  }
  // Bare ".LC0" or an "OFFSET FLAT:.LC0"-style composite.
  return at == 0 || token.compare(0, at, "FLAT:") == 0;
}

std::string string_label_name(const std::string& token) {
  return token.substr(token.find(".LC"));
}

}  // namespace

bool looks_numeric(const std::string& token) {
  if (token.empty()) return false;
  std::size_t i = token[0] == '-' ? 1 : 0;
  if (i == token.size()) return false;
  if (token.compare(i, 2, "0x") == 0 || token.compare(i, 2, "0X") == 0) {
    if (i + 2 == token.size()) return false;
    for (std::size_t k = i + 2; k < token.size(); ++k) {
      if (!std::isxdigit(static_cast<unsigned char>(token[k]))) return false;
    }
    return true;
  }
  for (std::size_t k = i; k < token.size(); ++k) {
    if (!std::isdigit(static_cast<unsigned char>(token[k]))) return false;
  }
  return true;
}

CanonicalFunction canonicalize(const std::vector<AsmInstruction>& insns,
                               const AsmStringTable& strings) {
  CanonicalFunction out;
  for (const AsmInstruction& insn : insns) {
    CanonicalInstruction canon;
    canon.mnemonic = insn.mnemonic;
    canon.address = insn.address;
    canon.jump_target = insn.jump_target;
    canon.is_conditional = insn.is_conditional;
    canon.is_call = insn.is_call;
    canon.line = insn.line;

    if (insn.is_jump) {
      const std::string& target = insn.operands.at(0);
      if (target == "UP" || target == "DOWN") {
        canon.jump_up = target == "UP";
      } else {
        if (!insn.jump_target.has_value()) {
          raise(ErrorKind::Parse, "branch with unresolved target: " + insn.raw);
        }
        canon.jump_up = insn.address < *insn.jump_target;
      }
      canon.tokens.push_back(*canon.jump_up ? "UP" : "DOWN");
      out.insns.push_back(std::move(canon));
      continue;
    }
    if (insn.is_call) {
      const std::string& target = insn.operands.at(0);
      if (target == "FUNC") {
        canon.tokens.push_back("FUNC");
      } else {
        canon.tokens.push_back("FUNC");
        out.literals.push_back({LiteralKind::Func, target});
      }
      out.insns.push_back(std::move(canon));
      continue;
    }

    int bracket_depth = 0;
    bool pending_offset = false;  // saw "OFFSET", waiting for its FLAT:.LC token
    std::size_t at = 0;
    for (std::size_t g = 0; g < insn.group_lens.size(); ++g) {
      if (g > 0) canon.tokens.push_back(",");
      std::size_t group_end = at + static_cast<std::size_t>(insn.group_lens[g]);
      for (; at < group_end; ++at) {
        const std::string& tok = insn.operands[at];
        if (tok == "[") ++bracket_depth;
        if (tok == "]") --bracket_depth;

        if (tok == "OFFSET") {
          pending_offset = true;
          continue;  // folded into the STR that follows
        }
        if (is_string_label(tok)) {
          const std::string* text = strings.find(string_label_name(tok));
          out.literals.push_back({LiteralKind::Str, text != nullptr ? *text : "\"\""});
          canon.tokens.push_back("STR");
          pending_offset = false;
          continue;
        }
        if (pending_offset) {
          canon.tokens.push_back("OFFSET");
          pending_offset = false;
        }
        if (looks_numeric(tok) && bracket_depth == 0) {
          bool shift_count = is_shift_mnemonic(insn.mnemonic) && g + 1 == insn.group_lens.size();
          if (shift_count) {
            canon.tokens.push_back(tok);
          } else {
            canon.tokens.push_back("IMM");
            out.literals.push_back({LiteralKind::Imm, tok});
          }
          continue;
        }
        canon.tokens.push_back(tok);
      }
    }
    out.insns.push_back(std::move(canon));
  }
  return out;
}

std::string canonical_line(const CanonicalInstruction& insn) {
  std::string out = insn.mnemonic;
  for (const std::string& tok : insn.tokens) {
    out += ' ';
    out += tok;
  }
  return out;
}

std::string canonical_text(const std::vector<CanonicalInstruction>& insns) {
  std::string out;
  for (const CanonicalInstruction& insn : insns) {
    out += canonical_line(insn);
    out += '\n';
  }
  return out;
}

std::string canonical_flat(const std::vector<CanonicalInstruction>& insns) {
  std::string out;
  for (std::size_t i = 0; i < insns.size(); ++i) {
    if (i > 0) out += " ; ";
    out += canonical_line(insns[i]);
  }
  return out;
}

std::vector<AsmInstruction> parse_canonical_lines(const std::string& text) {
  std::vector<AsmInstruction> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string line = text.substr(pos, eol - pos);
    if (!line.empty()) {
      AsmInstruction insn;
      insn.raw = line;
      insn.address = static_cast<std::int64_t>(out.size());
      std::size_t sp = line.find(' ');
      insn.mnemonic = sp == std::string::npos ? line : line.substr(0, sp);
      if (sp != std::string::npos) {
        split_operand_groups(tokenize_operands(line.substr(sp + 1)), insn.operands,
                             insn.group_lens);
      }
      static const std::set<std::string> jumps = {
          "jmp", "je",  "jne", "jg",  "jge", "jl",  "jle", "ja",  "jae", "jb", "jbe",
          "js",  "jns", "jo",  "jno", "jp",  "jnp", "jc",  "jnc", "jz",  "jnz"};
      if (jumps.count(insn.mnemonic) > 0) {
        insn.is_jump = true;
        insn.is_conditional = insn.mnemonic != "jmp";
      } else if (insn.mnemonic == "call") {
        insn.is_call = true;
      }
      out.push_back(std::move(insn));
    }
    if (eol == text.size()) break;
    pos = eol + 1;
  }
  return out;
}

std::vector<std::string> leaked_literals(const std::vector<CanonicalInstruction>& insns) {
  std::vector<std::string> leaks;
  for (const CanonicalInstruction& insn : insns) {
    int bracket_depth = 0;
    for (std::size_t i = 0; i < insn.tokens.size(); ++i) {
      const std::string& tok = insn.tokens[i];
      if (tok == "[") ++bracket_depth;
      if (tok == "]") --bracket_depth;
      if (tok.find(".L") != std::string::npos || tok.find('"') != std::string::npos) {
        leaks.push_back(tok);
        continue;
      }
      if (!looks_numeric(tok)) continue;
      if (bracket_depth > 0) continue;  // slot displacement
      bool shift_count = is_shift_mnemonic(insn.mnemonic) && i + 1 == insn.tokens.size();
      if (shift_count) continue;
      leaks.push_back(tok);
    }
  }
  return leaks;
}

std::vector<std::string> backfill(const std::vector<std::string>& tokens,
                                  const std::vector<SeamLiteral>& literals,
                                  std::vector<std::string>& diagnostics) {
  std::vector<std::string> imms;
  std::vector<std::string> strs;
  std::vector<std::string> funcs;
  for (const SeamLiteral& lit : literals) {
    switch (lit.kind) {
      case LiteralKind::Imm: imms.push_back(lit.text); break;
      case LiteralKind::Str: strs.push_back(lit.text); break;
      case LiteralKind::Func: funcs.push_back(lit.text); break;
    }
  }
  std::size_t imm_at = 0;
  std::size_t str_at = 0;
  std::size_t func_at = 0;
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const std::string& tok : tokens) {
    if (tok == "IMM") {
      if (imm_at < imms.size()) {
        out.push_back(imms[imm_at++]);
      } else {
        diagnostics.push_back("IMM placeholder without a harvested literal");
        out.push_back(tok);
      }
      continue;
    }
    if (tok == "STR") {
      if (str_at < strs.size()) {
        out.push_back(strs[str_at++]);
      } else {
        diagnostics.push_back("STR placeholder without a harvested literal");
        out.push_back(tok);
      }
      continue;
    }
    if (tok == "FUNC") {
      if (func_at < funcs.size()) {
        out.push_back(funcs[func_at++]);
      } else {
        out.push_back(tok);  // FUNC may legitimately stay unresolved
      }
      continue;
    }
    out.push_back(tok);
  }
  return out;
}

}  // namespace seam
