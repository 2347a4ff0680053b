#include "asmtext/asm_parser.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "common/error.hpp"

namespace seam {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

const std::set<std::string>& jump_mnemonics() {
  static const std::set<std::string> table = {
      "jmp", "je",  "jne", "jg",  "jge", "jl",  "jle", "ja",  "jae", "jb", "jbe",
      "js",  "jns", "jo",  "jno", "jp",  "jnp", "jc",  "jnc", "jz",  "jnz"};
  return table;
}

// Directives that carry no instruction content and are silently skipped when
// they appear in a code section.
const std::set<std::string>& ignored_directives() {
  static const std::set<std::string> table = {
      "file",   "text",   "data",     "bss",     "globl",        "global", "type",
      "size",   "ident",  "align",    "p2align", "intel_syntax", "weak",   "hidden",
      "local",  "comm",   "value",    "long",    "byte",         "quad",   "zero",
      "uleb128", "sleb128", "string", "ascii",   "asciz",        "balign", "section"};
  return table;
}

struct PendingJump {
  std::size_t func;
  std::size_t insn;
  std::string label;
};

class AsmParser {
 public:
  ParsedAsm run(const std::string& text) {
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t eol = text.find('\n', pos);
      if (eol == std::string::npos) eol = text.size();
      handle_line(text.substr(pos, eol - pos));
      if (eol == text.size()) break;
      pos = eol + 1;
    }
    resolve_jumps();
    return std::move(out_);
  }

 private:
  ParsedAsm out_;
  bool in_code_ = true;
  bool in_rodata_ = false;
  int current_line_ = 0;
  std::string last_data_label_;
  std::vector<PendingJump> pending_;
  std::vector<std::map<std::string, std::int64_t>> label_maps_;  // one per function

  void handle_line(const std::string& raw_line) {
    std::string line = raw_line;
    // Comments: '#' to end of line, except inside quoted strings.
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line = line.substr(0, i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) return;

    if (line[0] == '.' && line.back() == ':' && line.find(' ') == std::string::npos) {
      local_label(line.substr(0, line.size() - 1));
      return;
    }
    if (line.back() == ':' && line.find(' ') == std::string::npos && line[0] != '.') {
      begin_function(line.substr(0, line.size() - 1));
      return;
    }
    if (line[0] == '.') {
      directive(line);
      return;
    }
    if (in_code_) instruction(line);
  }

  void local_label(const std::string& name) {
    if (in_code_) {
      if (!out_.functions.empty()) {
        label_maps_.back()[name] = static_cast<std::int64_t>(out_.functions.back().insns.size());
      }
    } else if (in_rodata_) {
      last_data_label_ = name;
    }
  }

  void begin_function(const std::string& name) {
    if (!in_code_) return;
    out_.functions.push_back({name, {}});
    label_maps_.emplace_back();
    current_line_ = 0;
  }

  void directive(const std::string& line) {
    std::size_t sp = line.find_first_of(" \t");
    std::string name = line.substr(1, sp == std::string::npos ? std::string::npos : sp - 1);
    std::string rest = sp == std::string::npos ? "" : trim(line.substr(sp + 1));

    if (name == "loc") {
      // ".loc <file> <line> <col> ...": only the line number matters here.
      std::size_t a = rest.find(' ');
      if (a == std::string::npos) raise(ErrorKind::Parse, "malformed .loc directive: " + line);
      std::string line_field = rest.substr(a + 1);
      current_line_ = std::atoi(line_field.c_str());
      return;
    }
    if (name == "section") {
      in_code_ = rest.rfind(".text", 0) == 0;
      in_rodata_ = rest.find("rodata") != std::string::npos;
      return;
    }
    if (name == "text") {
      in_code_ = true;
      in_rodata_ = false;
      return;
    }
    if (name == "data" || name == "bss") {
      in_code_ = false;
      in_rodata_ = false;
      return;
    }
    if ((name == "string" || name == "ascii" || name == "asciz") && in_rodata_) {
      if (!last_data_label_.empty()) {
        out_.strings.entries.emplace_back(last_data_label_, rest);
        last_data_label_.clear();
      }
      return;
    }
    if (name.rfind("cfi_", 0) == 0 || ignored_directives().count(name) > 0) return;
    if (!in_code_) return;  // debug sections carry arbitrary payload directives
    raise(ErrorKind::Parse, "unknown assembler directive '." + name + "'");
  }

  void instruction(const std::string& line) {
    if (out_.functions.empty()) {
      raise(ErrorKind::Parse, "instruction outside any function: " + line);
    }
    AsmFunction& fn = out_.functions.back();
    AsmInstruction insn;
    insn.raw = line;
    insn.line = current_line_;
    insn.address = static_cast<std::int64_t>(fn.insns.size());

    std::size_t sp = line.find_first_of(" \t");
    insn.mnemonic = sp == std::string::npos ? line : line.substr(0, sp);
    std::string rest = sp == std::string::npos ? "" : trim(line.substr(sp + 1));
    split_operand_groups(tokenize_operands(rest), insn.operands, insn.group_lens);

    if (jump_mnemonics().count(insn.mnemonic) > 0) {
      insn.is_jump = true;
      insn.is_conditional = insn.mnemonic != "jmp";
      if (insn.operands.size() != 1) {
        raise(ErrorKind::Parse, "branch needs exactly one target: " + line);
      }
      pending_.push_back({out_.functions.size() - 1, fn.insns.size(), insn.operands[0]});
    } else if (insn.mnemonic == "call") {
      insn.is_call = true;
      if (insn.operands.size() != 1) {
        raise(ErrorKind::Parse, "call needs exactly one target: " + line);
      }
    }
    fn.insns.push_back(std::move(insn));
  }

  void resolve_jumps() {
    for (const PendingJump& jump : pending_) {
      const std::map<std::string, std::int64_t>& labels = label_maps_.at(jump.func);
      auto it = labels.find(jump.label);
      if (it == labels.end()) {
        raise(ErrorKind::Parse,
              "unresolvable branch target '" + jump.label + "' in function '" +
                  out_.functions[jump.func].name + "'");
      }
      out_.functions[jump.func].insns[jump.insn].jump_target = it->second;
    }
  }
};

}  // namespace

const std::string* AsmStringTable::find(const std::string& label) const {
  for (const auto& [key, value] : entries) {
    if (key == label) return &value;
  }
  return nullptr;
}

ParsedAsm parse_asm(const std::string& text) {
  AsmParser parser;
  return parser.run(text);
}

std::vector<std::string> tokenize_operands(const std::string& text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  int bracket_depth = 0;
  while (i < text.size()) {
    char c = text[i];
    if (c == ' ' || c == '\t') {
      ++i;
      continue;
    }
    if (c == ',') {
      tokens.push_back(",");
      ++i;
      continue;
    }
    if (c == '[' || c == ']') {
      bracket_depth += c == '[' ? 1 : -1;
      tokens.push_back(std::string(1, c));
      ++i;
      continue;
    }
    if ((c == '+' || c == '-' || c == '*') && bracket_depth > 0) {
      tokens.push_back(std::string(1, c));
      ++i;
      continue;
    }
    std::string word;
    while (i < text.size()) {
      char d = text[i];
      if (d == ' ' || d == '\t' || d == ',' || d == '[' || d == ']') break;
      if ((d == '+' || d == '-' || d == '*') && bracket_depth > 0) break;
      word.push_back(d);
      ++i;
    }
    tokens.push_back(std::move(word));
  }
  return tokens;
}

void split_operand_groups(const std::vector<std::string>& with_commas,
                          std::vector<std::string>& operands, std::vector<int>& group_lens) {
  operands.clear();
  group_lens.clear();
  int current = 0;
  for (const std::string& tok : with_commas) {
    if (tok == ",") {
      group_lens.push_back(current);
      current = 0;
      continue;
    }
    operands.push_back(tok);
    ++current;
  }
  if (current > 0 || !with_commas.empty()) group_lens.push_back(current);
}

namespace {

// Alias -> family for the registers the subset's codegen can touch.
const std::map<std::string, std::string>& register_table() {
  static const std::map<std::string, std::string> table = [] {
    std::map<std::string, std::string> t;
    auto add = [&t](const std::string& family, std::initializer_list<std::string> aliases) {
      t[family] = family;
      for (const std::string& a : aliases) t[a] = family;
    };
    add("rax", {"eax", "ax", "al", "ah"});
    add("rbx", {"ebx", "bx", "bl", "bh"});
    add("rcx", {"ecx", "cx", "cl", "ch"});
    add("rdx", {"edx", "dx", "dl", "dh"});
    add("rsi", {"esi", "si", "sil"});
    add("rdi", {"edi", "di", "dil"});
    add("rbp", {"ebp", "bp", "bpl"});
    add("rsp", {"esp", "sp", "spl"});
    add("rip", {"eip"});
    for (int i = 8; i <= 15; ++i) {
      std::string base = "r" + std::to_string(i);
      add(base, {base + "d", base + "w", base + "b"});
    }
    return t;
  }();
  return table;
}

}  // namespace

bool is_register_token(const std::string& token) {
  return register_table().count(token) > 0;
}

std::string register_family(const std::string& token) {
  auto it = register_table().find(token);
  return it == register_table().end() ? token : it->second;
}

}  // namespace seam
