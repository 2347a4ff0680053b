#include "csubset/printer.hpp"

#include <sstream>

#include "common/error.hpp"

namespace seam {

namespace {

void render_expr(const AstNode& node, std::string& out) {
  switch (node.kind) {
    case NodeKind::VarRef:
      out += node.name;
      return;
    case NodeKind::ConstInt:
      out += node.str_value.empty() ? std::to_string(node.int_value) : node.str_value;
      return;
    case NodeKind::ConstStr:
      out += escape_c_string(node.str_value);
      return;
    case NodeKind::UnOp: {
      out += node.name;
      const AstNode& operand = node.children[0];
      if (operand.kind == NodeKind::BinOp) {
        out.push_back('(');
        render_expr(operand, out);
        out.push_back(')');
      } else {
        render_expr(operand, out);
      }
      return;
    }
    case NodeKind::BinOp: {
      const OpInfo* op = find_binary_op(node.name);
      if (op == nullptr) raise(ErrorKind::Validate, "unknown operator '" + node.name + "'");
      // Left-associative grammar: equal precedence on the right needs parens
      // for the text to reparse to this exact tree.
      auto wrap = [&](const AstNode& child, bool right) {
        bool parens = false;
        if (child.kind == NodeKind::BinOp) {
          const OpInfo* child_op = find_binary_op(child.name);
          parens = right ? child_op->precedence <= op->precedence
                         : child_op->precedence < op->precedence;
        }
        if (parens) out.push_back('(');
        render_expr(child, out);
        if (parens) out.push_back(')');
      };
      wrap(node.children[0], false);
      out.push_back(' ');
      out += node.name;
      out.push_back(' ');
      wrap(node.children[1], true);
      return;
    }
    default:
      raise(ErrorKind::Validate, "statement node in expression position");
  }
}

std::string expr_text(const AstNode& node) {
  std::string out;
  render_expr(node, out);
  return out;
}

class FunctionPrinter {
 public:
  explicit FunctionPrinter(int first_line) : line_(first_line) {}

  PrintedFunction run(const Function& fn) {
    PrintedFunction result;
    layout_.header_line = line_;
    emit(std::string(type_tag_keyword(fn.return_type)) + " " + fn.name + "() {");
    indent_ = 1;
    emit_block_contents(fn.body);
    indent_ = 0;
    layout_.footer_line = line_;
    emit("}");
    result.text = std::move(text_);
    result.layout = std::move(layout_);
    return result;
  }

 private:
  std::string text_;
  LineLayout layout_;
  int line_;
  int indent_ = 0;

  void emit(const std::string& content) {
    for (int i = 0; i < indent_; ++i) text_ += "    ";
    text_ += content;
    text_.push_back('\n');
    ++line_;
  }

  int note_statement() {
    layout_.stmt_line.push_back(line_);
    return static_cast<int>(layout_.stmt_line.size()) - 1;
  }

  void emit_block_contents(const AstNode& block) {
    for (const AstNode& stmt : block.children) emit_statement(stmt);
  }

  void emit_statement(const AstNode& stmt) {
    const int id = note_statement();
    switch (stmt.kind) {
      case NodeKind::Decl:
        emit(std::string(type_tag_keyword(stmt.type)) + " " + stmt.name + ";");
        return;
      case NodeKind::Assign:
        emit(stmt.children[0].name + " = " + expr_text(stmt.children[1]) + ";");
        return;
      case NodeKind::Call: {
        std::string args;
        for (std::size_t i = 0; i < stmt.children.size(); ++i) {
          if (i > 0) args += ", ";
          args += expr_text(stmt.children[i]);
        }
        emit(stmt.name + "(" + args + ");");
        return;
      }
      case NodeKind::Return:
        if (stmt.children.empty()) {
          emit("return;");
        } else {
          emit("return " + expr_text(stmt.children[0]) + ";");
        }
        return;
      case NodeKind::If: {
        emit("if (" + expr_text(stmt.children[0]) + ") {");
        ++indent_;
        emit_block_contents(stmt.children[1]);
        --indent_;
        if (stmt.children.size() == 3) {
          layout_.else_line[id] = line_;
          emit("} else {");
          ++indent_;
          emit_block_contents(stmt.children[2]);
          --indent_;
        }
        layout_.close_line[id] = line_;
        emit("}");
        return;
      }
      case NodeKind::While: {
        emit("while (" + expr_text(stmt.children[0]) + ") {");
        ++indent_;
        emit_block_contents(stmt.children[1]);
        --indent_;
        layout_.close_line[id] = line_;
        emit("}");
        return;
      }
      default:
        raise(ErrorKind::Validate, "expression node in statement position");
    }
  }
};

}  // namespace

PrintedFunction print_function_with_layout(const Function& fn, int first_line) {
  FunctionPrinter printer(first_line);
  return printer.run(fn);
}

std::string print_function(const Function& fn) {
  return print_function_with_layout(fn).text;
}

std::string print_c(const Program& program) {
  std::string out;
  int line = 1;
  for (std::size_t i = 0; i < program.functions.size(); ++i) {
    if (i > 0) {
      out.push_back('\n');
      ++line;
    }
    PrintedFunction printed = print_function_with_layout(program.functions[i], line);
    out += printed.text;
    line = printed.layout.footer_line + 1;
  }
  return out;
}

std::string print_expression(const AstNode& expr) { return expr_text(expr); }

}  // namespace seam
