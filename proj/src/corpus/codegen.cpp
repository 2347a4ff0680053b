#include "corpus/codegen.hpp"

#include <map>
#include <optional>
#include <vector>

#include "common/error.hpp"
#include "csubset/printer.hpp"

namespace seam {

namespace {

int type_width(TypeTag t) { return t == TypeTag::Long ? 8 : 4; }
bool is_unsigned_type(TypeTag t) { return t == TypeTag::Unsigned; }

const char* reg_a(int w) { return w == 8 ? "rax" : "eax"; }
const char* reg_d(int w) { return w == 8 ? "rdx" : "edx"; }
const char* reg_c(int w) { return w == 8 ? "rcx" : "ecx"; }

// Condition-code suffix for "lhs <op> rhs" at the given signedness.
std::string cc_suffix(const std::string& op, bool unsigned_cmp) {
  if (op == "==") return "e";
  if (op == "!=") return "ne";
  if (op == "<") return unsigned_cmp ? "b" : "l";
  if (op == ">") return unsigned_cmp ? "a" : "g";
  if (op == "<=") return unsigned_cmp ? "be" : "le";
  if (op == ">=") return unsigned_cmp ? "ae" : "ge";
  raise(ErrorKind::Validate, "not a comparison operator: " + op);
}

std::string inverse_op(const std::string& op) {
  if (op == "==") return "!=";
  if (op == "!=") return "==";
  if (op == "<") return ">=";
  if (op == ">") return "<=";
  if (op == "<=") return ">";
  if (op == ">=") return "<";
  raise(ErrorKind::Validate, "not a comparison operator: " + op);
}

// Static expression type, mirroring validation: variables pin the type,
// constants adapt, comparisons and logical operators yield int.
std::optional<TypeTag> static_type(const AstNode& node) {
  switch (node.kind) {
    case NodeKind::VarRef:
      return node.type;
    case NodeKind::ConstInt:
    case NodeKind::ConstStr:
      return std::nullopt;
    case NodeKind::UnOp:
      return TypeTag::Int;
    case NodeKind::BinOp: {
      const OpInfo* op = find_binary_op(node.name);
      if (op != nullptr && (op->category == OpCategory::Relational ||
                            op->category == OpCategory::Equality ||
                            op->category == OpCategory::Logical)) {
        return TypeTag::Int;
      }
      std::optional<TypeTag> lhs = static_type(node.children[0]);
      return lhs ? lhs : static_type(node.children[1]);
    }
    default:
      raise(ErrorKind::Validate, "statement node in expression position");
  }
}

TypeTag value_type(const AstNode& node) { return static_type(node).value_or(TypeTag::Int); }

std::string const_text(const AstNode& node) {
  return node.str_value.empty() ? std::to_string(node.int_value) : node.str_value;
}

struct Slot {
  int offset = 0;  // emitted as [rbp-offset]
  int width = 4;
};

struct RodataPool {
  std::vector<std::pair<std::string, std::string>> entries;  // label -> quoted text
  std::map<std::string, std::string> interned;               // raw -> label
  int next = 0;

  const std::string& intern(const std::string& raw) {
    auto it = interned.find(raw);
    if (it != interned.end()) return it->second;
    std::string label = ".LC" + std::to_string(next++);
    entries.emplace_back(label, escape_c_string(raw));
    return interned.emplace(raw, std::move(label)).first->second;
  }
};

class FunctionCodegen {
 public:
  FunctionCodegen(std::string& out, int& label_counter, RodataPool& rodata)
      : out_(out), label_counter_(label_counter), rodata_(rodata) {}

  void run(const Function& fn, const LineLayout& layout) {
    layout_ = &layout;
    collect_slots(fn.body);
    frame_ = (frame_ + 15) / 16 * 16;

    loc(layout.header_line);
    ins("push\trbp");
    ins("mov\trbp, rsp");
    if (frame_ > 0) ins("sub\trsp, " + std::to_string(frame_));

    const auto& stmts = fn.body.children;
    for (std::size_t i = 0; i < stmts.size(); ++i) {
      gen_statement(stmts[i], /*function_tail=*/i + 1 == stmts.size());
    }

    if (epilogue_used_) label(epilogue_label_);
    loc(layout.footer_line);
    ins("leave");
    ins("ret");
  }

 private:
  std::string& out_;
  int& label_counter_;
  RodataPool& rodata_;
  const LineLayout* layout_ = nullptr;
  std::map<std::string, Slot> slots_;
  int frame_ = 0;
  int next_stmt_ = 0;
  int cur_line_ = -1;
  bool epilogue_used_ = false;
  std::string epilogue_label_;

  void ins(const std::string& text) {
    out_ += '\t';
    out_ += text;
    out_ += '\n';
  }

  void label(const std::string& name) {
    out_ += name;
    out_ += ":\n";
  }

  // One marker per statement; an instruction emitted without a fresh marker
  // inherits the previous statement's line and joins its group.
  void loc(int line) {
    if (line == cur_line_) return;
    out_ += "\t.loc 1 " + std::to_string(line) + " 1\n";
    cur_line_ = line;
  }

  std::string fresh_label() { return ".L" + std::to_string(label_counter_++); }

  void collect_slots(const AstNode& block) {
    for (const AstNode& stmt : block.children) {
      switch (stmt.kind) {
        case NodeKind::Decl: {
          if (slots_.count(stmt.name) > 0) {
            raise(ErrorKind::Validate, "shadowed declaration of '" + stmt.name + "'");
          }
          const int w = type_width(stmt.type);
          frame_ = (frame_ + w + w - 1) / w * w;
          slots_[stmt.name] = {frame_, w};
          break;
        }
        case NodeKind::If:
          collect_slots(stmt.children[1]);
          if (stmt.children.size() == 3) collect_slots(stmt.children[2]);
          break;
        case NodeKind::While:
          collect_slots(stmt.children[1]);
          break;
        default:
          break;
      }
    }
  }

  std::string mem(const std::string& name) const {
    auto it = slots_.find(name);
    if (it == slots_.end()) raise(ErrorKind::Validate, "use of unallocated '" + name + "'");
    const Slot& slot = it->second;
    return std::string(slot.width == 8 ? "QWORD" : "DWORD") + " PTR [rbp-" +
           std::to_string(slot.offset) + "]";
  }

  // ---- expression evaluation: result in eax/rax ----

  void booleanize(const AstNode& node) {
    const TypeTag t = value_type(node);
    const int w = type_width(t);
    eval(node, t);
    ins(std::string("test\t") + reg_a(w) + ", " + reg_a(w));
    ins("setne\tal");
    ins("movzx\teax, al");
  }

  // lhs into A, rhs into D; leaf right operands load directly, everything
  // else spills the left value around the recursive evaluation.
  void eval_pair(const AstNode& lhs, const AstNode& rhs, TypeTag t) {
    const int w = type_width(t);
    eval(lhs, t);
    if (rhs.kind == NodeKind::VarRef) {
      ins(std::string("mov\t") + reg_d(w) + ", " + mem(rhs.name));
      return;
    }
    if (rhs.kind == NodeKind::ConstInt) {
      ins(std::string("mov\t") + reg_d(w) + ", " + const_text(rhs));
      return;
    }
    ins("push\trax");
    eval(rhs, t);
    ins("mov\trdx, rax");
    ins("pop\trax");
  }

  void eval_comparison(const AstNode& node) {
    std::optional<TypeTag> side = static_type(node.children[0]);
    if (!side) side = static_type(node.children[1]);
    const TypeTag t = side.value_or(TypeTag::Int);
    const int w = type_width(t);
    eval_pair(node.children[0], node.children[1], t);
    ins(std::string("cmp\t") + reg_a(w) + ", " + reg_d(w));
    ins("set" + cc_suffix(node.name, is_unsigned_type(t)) + "\tal");
    ins("movzx\teax, al");
  }

  void eval_binop(const AstNode& node, TypeTag t) {
    const OpInfo* op = find_binary_op(node.name);
    if (op == nullptr) raise(ErrorKind::Validate, "unknown operator '" + node.name + "'");
    if (op->category == OpCategory::Relational || op->category == OpCategory::Equality) {
      eval_comparison(node);
      return;
    }
    if (op->category == OpCategory::Logical) {
      booleanize(node.children[0]);
      ins("push\trax");
      booleanize(node.children[1]);
      ins("mov\tedx, eax");
      ins("pop\trax");
      ins(std::string(node.name == "&&" ? "and" : "or") + "\teax, edx");
      return;
    }

    const int w = type_width(t);
    const bool uns = is_unsigned_type(t);
    eval_pair(node.children[0], node.children[1], t);
    const std::string a = reg_a(w);
    const std::string d = reg_d(w);
    const std::string c = reg_c(w);
    if (node.name == "+") {
      ins("add\t" + a + ", " + d);
    } else if (node.name == "-") {
      ins("sub\t" + a + ", " + d);
    } else if (node.name == "*") {
      ins("imul\t" + a + ", " + d);
    } else if (node.name == "&") {
      ins("and\t" + a + ", " + d);
    } else if (node.name == "|") {
      ins("or\t" + a + ", " + d);
    } else if (node.name == "^") {
      ins("xor\t" + a + ", " + d);
    } else if (node.name == "/" || node.name == "%") {
      ins("mov\t" + c + ", " + d);
      if (uns) {
        ins("xor\tedx, edx");
        ins("div\t" + c);
      } else {
        ins(w == 8 ? "cqo" : "cdq");
        ins("idiv\t" + c);
      }
      if (node.name == "%") ins("mov\t" + a + ", " + d);
    } else if (node.name == "<<" || node.name == ">>") {
      ins("mov\tecx, edx");
      const char* op_name = node.name == "<<" ? "sal" : (uns ? "shr" : "sar");
      ins(std::string(op_name) + "\t" + a + ", cl");
    } else {
      raise(ErrorKind::Validate, "unsupported operator '" + node.name + "'");
    }
  }

  void eval(const AstNode& node, TypeTag t) {
    const int w = type_width(t);
    switch (node.kind) {
      case NodeKind::VarRef:
        ins(std::string("mov\t") + reg_a(type_width(node.type)) + ", " + mem(node.name));
        return;
      case NodeKind::ConstInt:
        ins(std::string("mov\t") + reg_a(w) + ", " + const_text(node));
        return;
      case NodeKind::UnOp: {
        const TypeTag ct = value_type(node.children[0]);
        const int cw = type_width(ct);
        eval(node.children[0], ct);
        ins(std::string("test\t") + reg_a(cw) + ", " + reg_a(cw));
        ins("sete\tal");
        ins("movzx\teax, al");
        return;
      }
      case NodeKind::BinOp:
        eval_binop(node, t);
        return;
      case NodeKind::ConstStr:
        raise(ErrorKind::Validate, "string literal outside a call argument");
      default:
        raise(ErrorKind::Validate, "statement node in expression position");
    }
  }

  // ---- statements ----

  void branch_if_false(const AstNode& cond, const std::string& target) {
    if (cond.kind == NodeKind::BinOp && is_comparison(cond.name)) {
      std::optional<TypeTag> side = static_type(cond.children[0]);
      if (!side) side = static_type(cond.children[1]);
      const TypeTag t = side.value_or(TypeTag::Int);
      const int w = type_width(t);
      eval_pair(cond.children[0], cond.children[1], t);
      ins(std::string("cmp\t") + reg_a(w) + ", " + reg_d(w));
      ins("j" + cc_suffix(inverse_op(cond.name), is_unsigned_type(t)) + "\t" + target);
      return;
    }
    const TypeTag t = value_type(cond);
    const int w = type_width(t);
    eval(cond, t);
    ins(std::string("test\t") + reg_a(w) + ", " + reg_a(w));
    ins("je\t" + target);
  }

  void gen_call(const AstNode& call) {
    static const char* kArgRegs[4] = {"rdi", "rsi", "rdx", "rcx"};
    const int argc = static_cast<int>(call.children.size());
    for (const AstNode& arg : call.children) {
      if (arg.kind == NodeKind::ConstStr) {
        ins("push\tOFFSET FLAT:" + rodata_.intern(arg.str_value));
        continue;
      }
      eval(arg, value_type(arg));
      ins("push\trax");
    }
    for (int i = argc - 1; i >= 0; --i) ins(std::string("pop\t") + kArgRegs[i]);
    ins("xor\teax, eax");  // variadic ABI: no vector arguments
    ins("call\t" + call.name);
  }

  void gen_block(const AstNode& block) {
    for (const AstNode& stmt : block.children) gen_statement(stmt, /*function_tail=*/false);
  }

  void gen_statement(const AstNode& stmt, bool function_tail) {
    const int id = next_stmt_++;
    const int line = layout_->stmt_line.at(static_cast<std::size_t>(id));
    switch (stmt.kind) {
      case NodeKind::Decl:
        return;  // slots are preallocated; declarations own no instructions
      case NodeKind::Assign: {
        loc(line);
        const AstNode& target = stmt.children[0];
        eval(stmt.children[1], target.type);
        ins("mov\t" + mem(target.name) + ", " + reg_a(type_width(target.type)));
        return;
      }
      case NodeKind::Call:
        loc(line);
        gen_call(stmt);
        return;
      case NodeKind::Return:
        loc(line);
        if (!stmt.children.empty()) {
          eval(stmt.children[0], value_type(stmt.children[0]));
        } else if (function_tail) {
          ins("nop");  // keep the statement's group non-empty
        }
        if (!function_tail) {
          if (!epilogue_used_) {
            epilogue_used_ = true;
            epilogue_label_ = fresh_label();
          }
          ins("jmp\t" + epilogue_label_);
        }
        return;
      case NodeKind::If: {
        loc(line);
        const bool has_else = stmt.children.size() == 3;
        const std::string skip = fresh_label();
        const std::string end = has_else ? fresh_label() : skip;
        branch_if_false(stmt.children[0], skip);
        gen_block(stmt.children[1]);
        if (has_else) {
          ins("jmp\t" + end);  // no marker: rides the taken arm's last group
          label(skip);
          gen_block(stmt.children[2]);
        }
        label(end);
        return;
      }
      case NodeKind::While: {
        loc(line);
        const std::string top = fresh_label();
        const std::string exit = fresh_label();
        label(top);
        branch_if_false(stmt.children[0], exit);
        gen_block(stmt.children[1]);
        loc(layout_->close_line.at(id));
        ins("jmp\t" + top);
        label(exit);
        return;
      }
      default:
        raise(ErrorKind::Validate, "expression node in statement position");
    }
  }
};

}  // namespace

std::string reference_codegen(const Program& program) {
  validate_program(program);
  RodataPool rodata;
  std::string code;
  int label_counter = 2;
  int line = 1;
  for (const Function& fn : program.functions) {
    PrintedFunction printed = print_function_with_layout(fn, line);
    code += "\t.globl\t" + fn.name + "\n";
    code += fn.name + ":\n";
    FunctionCodegen gen(code, label_counter, rodata);
    gen.run(fn, printed.layout);
    line = printed.layout.footer_line + 2;  // printed source separates functions by one blank line
  }

  std::string out = "\t.file\t\"prog.c\"\n\t.intel_syntax\tnoprefix\n";
  if (!rodata.entries.empty()) {
    out += "\t.section\t.rodata\n";
    for (const auto& [lc_label, quoted] : rodata.entries) {
      out += lc_label + ":\n\t.string\t" + quoted + "\n";
    }
  }
  out += "\t.text\n";
  out += code;
  return out;
}

}  // namespace seam
