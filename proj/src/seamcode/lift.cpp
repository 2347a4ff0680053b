#include "seamcode/lift.hpp"

#include <map>

#include "common/error.hpp"

namespace seam {

namespace {

std::string unescape_literal(const std::string& quoted, std::vector<std::string>& diagnostics) {
  if (quoted.size() < 2 || quoted.front() != '"' || quoted.back() != '"') {
    diagnostics.push_back("string literal '" + quoted + "' is not quoted; kept verbatim");
    return quoted;
  }
  std::string out;
  for (std::size_t i = 1; i + 1 < quoted.size(); ++i) {
    char c = quoted[i];
    if (c == '\\' && i + 2 < quoted.size()) {
      char e = quoted[++i];
      switch (e) {
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case '\\': out.push_back('\\'); break;
        case '"': out.push_back('"'); break;
        case '0': out.push_back('\0'); break;
        default:
          out.push_back('\\');
          out.push_back(e);
      }
    } else {
      out.push_back(c);
    }
  }
  return out;
}

class Lifter {
 public:
  Lifter(const std::vector<SeamLiteral>& literals, const LiftOptions& options)
      : options_(options) {
    for (const SeamLiteral& lit : literals) {
      switch (lit.kind) {
        case LiteralKind::Imm: imms_.push_back(lit.text); break;
        case LiteralKind::Str: strs_.push_back(lit.text); break;
        case LiteralKind::Func: funcs_.push_back(lit.text); break;
      }
    }
  }

  LiftResult run(const std::vector<SeamLine>& lines) {
    blocks_.push_back({});
    for (const SeamLine& line : lines) lift_line(line);
    if (!pending_.empty()) raise(ErrorKind::Parse, "unclosed block at end of SeamCode");
    note_surplus("IMM", imm_cursor_, imms_.size());
    note_surplus("STR", str_cursor_, strs_.size());

    LiftResult result;
    result.fn.name = options_.renaming != nullptr && !options_.renaming->function_name.empty()
                         ? options_.renaming->function_name
                         : options_.function_name;
    result.fn.return_type = TypeTag::Int;
    result.fn.body = make_block(std::move(blocks_.front()));
    result.diagnostics = std::move(diagnostics_);
    return result;
  }

 private:
  struct Pending {
    bool is_while = false;
    bool in_else = false;
    AstNode cond;
    std::optional<AstNode> then_block;
  };

  LiftOptions options_;
  std::vector<std::string> imms_, strs_, funcs_;
  std::size_t imm_cursor_ = 0, str_cursor_ = 0, func_cursor_ = 0, call_cursor_ = 0;
  std::vector<std::vector<AstNode>> blocks_;
  std::vector<Pending> pending_;
  std::map<int, TypeTag> decl_types_;
  std::vector<std::string> diagnostics_;

  void note_surplus(const char* kind, std::size_t used, std::size_t have) {
    if (have > used) {
      diagnostics_.push_back(std::to_string(have - used) + " unconsumed " + kind + " literal(s)");
    }
  }

  std::string var_name(int index) {
    if (options_.renaming != nullptr) {
      const RenameEntry* entry = find_by_index(*options_.renaming, index);
      if (entry != nullptr) return entry->original;
      diagnostics_.push_back("no renaming entry for v" + std::to_string(index));
    }
    return var_token(index);
  }

  TypeTag var_type(int index) {
    auto it = decl_types_.find(index);
    return it != decl_types_.end() ? it->second : TypeTag::Int;
  }

  AstNode next_imm() {
    if (imm_cursor_ < imms_.size()) {
      const std::string& text = imms_[imm_cursor_++];
      AstNode node = make_const_int(std::stoll(text, nullptr, 0));
      node.str_value = text;  // restore the harvested spelling
      return node;
    }
    diagnostics_.push_back("missing IMM literal; substituted 0");
    return make_const_int(0);
  }

  AstNode next_str() {
    if (str_cursor_ < strs_.size()) {
      return make_const_str(unescape_literal(strs_[str_cursor_++], diagnostics_));
    }
    diagnostics_.push_back("missing STR literal; substituted empty string");
    return make_const_str("");
  }

  std::string next_callee() {
    // Call names come from the renaming map when lifting our own lowering,
    // or from assembly-side FUNC harvests in the decompile pipeline.
    if (options_.renaming != nullptr && call_cursor_ < options_.renaming->call_names.size()) {
      return options_.renaming->call_names[call_cursor_++];
    }
    if (func_cursor_ < funcs_.size()) return funcs_[func_cursor_++];
    return "FUNC";
  }

  // Runs the post-order stack machine over payload tokens.
  std::vector<AstNode> eval_payload(const SeamLine& line, std::size_t start) {
    std::vector<AstNode> stack;
    auto pop = [&](const char* what) {
      if (stack.empty()) {
        raise(ErrorKind::Parse,
              "malformed " + line.kind + " line: stack underflow at '" + std::string(what) + "'");
      }
      AstNode node = std::move(stack.back());
      stack.pop_back();
      return node;
    };
    for (std::size_t i = start; i < line.tokens.size(); ++i) {
      const std::string& tok = line.tokens[i];
      int var_index = var_token_index(tok);
      if (var_index >= 0) {
        stack.push_back(make_var(var_name(var_index), var_type(var_index)));
        continue;
      }
      if (tok == "IMM") {
        stack.push_back(next_imm());
        continue;
      }
      if (tok == "STR") {
        stack.push_back(next_str());
        continue;
      }
      if (tok == "=") {
        AstNode value = pop("=");
        AstNode target = pop("=");
        if (target.kind != NodeKind::VarRef) {
          raise(ErrorKind::Parse, "malformed ASSIGN line: target is not a variable");
        }
        stack.push_back(make_assign(std::move(target), std::move(value)));
        continue;
      }
      if (tok == "!") {
        AstNode operand = pop("!");
        stack.push_back(make_unop("!", std::move(operand)));
        continue;
      }
      if (find_binary_op(tok) != nullptr) {
        AstNode rhs = pop(tok.c_str());
        AstNode lhs = pop(tok.c_str());
        stack.push_back(make_binop(tok, std::move(lhs), std::move(rhs)));
        continue;
      }
      raise(ErrorKind::Parse, "malformed " + line.kind + " line: unexpected token '" + tok + "'");
    }
    return stack;
  }

  AstNode single_expr(const SeamLine& line, std::size_t start = 0) {
    std::vector<AstNode> stack = eval_payload(line, start);
    if (stack.size() != 1) {
      raise(ErrorKind::Parse, "malformed " + line.kind + " line: expected one expression, got " +
                                  std::to_string(stack.size()));
    }
    return std::move(stack.front());
  }

  void append_statement(AstNode stmt) { blocks_.back().push_back(std::move(stmt)); }

  void lift_line(const SeamLine& line) {
    if (line.kind == "DECL") {
      if (line.tokens.size() != 2 || !is_type_token(line.tokens[0]) ||
          var_token_index(line.tokens[1]) < 0) {
        raise(ErrorKind::Parse, "malformed DECL line");
      }
      int index = var_token_index(line.tokens[1]);
      TypeTag type = type_tag_from_token(line.tokens[0]);
      decl_types_[index] = type;
      append_statement(make_decl(var_name(index), type));
      return;
    }
    if (line.kind == "ASSIGN") {
      AstNode node = single_expr(line);
      if (node.kind != NodeKind::Assign) {
        raise(ErrorKind::Parse, "malformed ASSIGN line: missing '='");
      }
      append_statement(std::move(node));
      return;
    }
    if (line.kind == "CALL") {
      if (line.tokens.empty() || line.tokens[0] != "FUNC") {
        raise(ErrorKind::Parse, "malformed CALL line: expected FUNC placeholder");
      }
      std::vector<AstNode> args = eval_payload(line, 1);
      append_statement(make_call(next_callee(), std::move(args)));
      return;
    }
    if (line.kind == "RET") {
      if (line.tokens.empty()) {
        append_statement(make_return(std::nullopt));
      } else {
        append_statement(make_return(single_expr(line)));
      }
      return;
    }
    if (line.kind == "IF") {
      pending_.push_back({false, false, single_expr(line), std::nullopt});
      blocks_.push_back({});
      return;
    }
    if (line.kind == "WHILE") {
      pending_.push_back({true, false, single_expr(line), std::nullopt});
      blocks_.push_back({});
      return;
    }
    if (line.kind == "ELSE") {
      if (pending_.empty() || pending_.back().is_while || pending_.back().in_else) {
        raise(ErrorKind::Parse, "ELSE without a matching IF");
      }
      pending_.back().then_block = make_block(std::move(blocks_.back()));
      blocks_.pop_back();
      pending_.back().in_else = true;
      blocks_.push_back({});
      return;
    }
    if (line.kind == "END") {
      if (pending_.empty()) raise(ErrorKind::Parse, "END without an open block");
      Pending open = std::move(pending_.back());
      pending_.pop_back();
      AstNode closing = make_block(std::move(blocks_.back()));
      blocks_.pop_back();
      if (open.is_while) {
        append_statement(make_while(std::move(open.cond), std::move(closing)));
      } else if (open.in_else) {
        append_statement(make_if_else(std::move(open.cond), std::move(*open.then_block),
                                      std::move(closing)));
      } else {
        append_statement(make_if(std::move(open.cond), std::move(closing)));
      }
      return;
    }
    raise(ErrorKind::Parse, "unknown SeamCode line kind '" + line.kind + "'");
  }
};

}  // namespace

LiftResult lift(const std::vector<SeamLine>& lines, const std::vector<SeamLiteral>& literals,
                const LiftOptions& options) {
  Lifter lifter(literals, options);
  return lifter.run(lines);
}

}  // namespace seam
