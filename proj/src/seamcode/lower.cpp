#include "seamcode/lower.hpp"

#include "common/error.hpp"

namespace seam {

const char* literal_kind_name(LiteralKind kind) {
  switch (kind) {
    case LiteralKind::Imm: return "IMM";
    case LiteralKind::Str: return "STR";
    case LiteralKind::Func: return "FUNC";
  }
  return "IMM";
}

namespace {

class Lowerer {
 public:
  LoweredFunction run(const Function& fn) {
    NormalizedFunction normalized = normalize_identifiers(fn);
    out_.renaming = std::move(normalized.renaming);
    lower_block(normalized.ast.body);
    return std::move(out_);
  }

 private:
  LoweredFunction out_;

  void emit(std::string kind, std::vector<std::string> tokens = {}) {
    out_.lines.push_back({std::move(kind), std::move(tokens)});
  }

  // Post-order serialization; literals are recorded as their placeholders go out.
  void serialize_expr(const AstNode& node, std::vector<std::string>& tokens) {
    switch (node.kind) {
      case NodeKind::VarRef:
        tokens.push_back(node.name);  // already v<k> after normalization
        return;
      case NodeKind::ConstInt:
        tokens.push_back("IMM");
        out_.literals.push_back(
            {LiteralKind::Imm,
             node.str_value.empty() ? std::to_string(node.int_value) : node.str_value});
        return;
      case NodeKind::ConstStr:
        tokens.push_back("STR");
        out_.literals.push_back({LiteralKind::Str, escape_c_string(node.str_value)});
        return;
      case NodeKind::BinOp:
        serialize_expr(node.children[0], tokens);
        serialize_expr(node.children[1], tokens);
        tokens.push_back(node.name);
        return;
      case NodeKind::UnOp:
        serialize_expr(node.children[0], tokens);
        tokens.push_back(node.name);
        return;
      default:
        raise(ErrorKind::Validate, "statement node inside an expression");
    }
  }

  void lower_statement(const AstNode& stmt) {
    switch (stmt.kind) {
      case NodeKind::Decl:
        emit("DECL", {type_token_for(stmt.type), stmt.name});
        return;
      case NodeKind::Assign: {
        std::vector<std::string> tokens;
        serialize_expr(stmt.children[0], tokens);
        serialize_expr(stmt.children[1], tokens);
        tokens.push_back("=");
        emit("ASSIGN", std::move(tokens));
        return;
      }
      case NodeKind::Call: {
        std::vector<std::string> tokens = {"FUNC"};
        for (const AstNode& arg : stmt.children) serialize_expr(arg, tokens);
        emit("CALL", std::move(tokens));
        return;
      }
      case NodeKind::Return: {
        std::vector<std::string> tokens;
        if (!stmt.children.empty()) serialize_expr(stmt.children[0], tokens);
        emit("RET", std::move(tokens));
        return;
      }
      case NodeKind::If: {
        std::vector<std::string> cond;
        serialize_expr(stmt.children[0], cond);
        emit("IF", std::move(cond));
        lower_block(stmt.children[1]);
        if (stmt.children.size() == 3) {
          emit("ELSE");
          lower_block(stmt.children[2]);
        }
        emit("END");
        return;
      }
      case NodeKind::While: {
        std::vector<std::string> cond;
        serialize_expr(stmt.children[0], cond);
        emit("WHILE", std::move(cond));
        lower_block(stmt.children[1]);
        emit("END");
        return;
      }
      default:
        raise(ErrorKind::Validate, "unsupported statement in lowering");
    }
  }

  void lower_block(const AstNode& block) {
    for (const AstNode& stmt : block.children) lower_statement(stmt);
  }
};

}  // namespace

LoweredFunction lower_ast(const Function& fn) {
  Lowerer lowerer;
  return lowerer.run(fn);
}

std::vector<SeamLine> translation_view(const std::vector<SeamLine>& lines) {
  std::vector<SeamLine> view;
  std::vector<char> blocks;  // 'i' = if/else arm, 'w' = while body
  for (const SeamLine& line : lines) {
    if (line.kind == "DECL") continue;
    if (line.kind == "IF") {
      blocks.push_back('i');
      view.push_back(line);
      continue;
    }
    if (line.kind == "WHILE") {
      blocks.push_back('w');
      view.push_back(line);
      continue;
    }
    if (line.kind == "ELSE") continue;  // the then-arm exit jump rides the last then statement
    if (line.kind == "END") {
      if (blocks.empty()) raise(ErrorKind::Validate, "END without an open block");
      char opened = blocks.back();
      blocks.pop_back();
      if (opened == 'w') view.push_back(line);  // owns the loop-back jump
      continue;
    }
    view.push_back(line);
  }
  if (!blocks.empty()) raise(ErrorKind::Validate, "unclosed block in SeamCode");
  return view;
}

}  // namespace seam
