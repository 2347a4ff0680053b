#include "semrec/positions26.hpp"

namespace seam {

const std::vector<std::string>& position_operators() {
  static const std::vector<std::string> ops = {"+",  "-",  "*",  "/",  "%", ">",
                                               "<",  ">=", "<=", "==", "!="};
  return ops;
}

int operator_before_position(const std::string& op) {
  const std::vector<std::string>& ops = position_operators();
  for (std::size_t k = 0; k < ops.size(); ++k) {
    if (ops[k] == op) return 3 + 2 * static_cast<int>(k);
  }
  return -1;
}

int operator_after_position(const std::string& op) {
  int before = operator_before_position(op);
  return before < 0 ? -1 : before + 1;
}

std::string position_name(int index) {
  if (index == kLoopCounterPos) return "loop-counter";
  if (index == kLoopCondPos) return "loop-condition";
  if (index == kIfCondPos) return "if-condition";
  if (index == kReturnPos) return "return";
  const std::vector<std::string>& ops = position_operators();
  int k = (index - 3) / 2;
  if (k < 0 || k >= static_cast<int>(ops.size())) return "invalid";
  return ((index - 3) % 2 == 0 ? "before-" : "after-") + ops[k];
}

namespace {

class PositionCounter {
 public:
  std::map<std::string, PositionVector> run(const Function& fn) {
    walk_block(fn.body);
    return std::move(counts_);
  }

 private:
  std::map<std::string, PositionVector> counts_;

  void bump(const std::string& name, int pos) {
    touch(name);
    counts_[name][pos] += 1;
  }

  void touch(const std::string& name) {
    counts_.try_emplace(name, PositionVector{});
  }

  // Every VarRef occurrence in `expr` adds one count at `pos`; operator
  // adjacency is counted independently of the enclosing context.
  void count_occurrences(const AstNode& expr, int pos) {
    if (expr.kind == NodeKind::VarRef) bump(expr.name, pos);
    for (const AstNode& child : expr.children) count_occurrences(child, pos);
  }

  void count_operator_adjacency(const AstNode& expr) {
    if (expr.kind == NodeKind::BinOp) {
      int before = operator_before_position(expr.name);
      if (before >= 0) {
        if (expr.children[0].kind == NodeKind::VarRef) bump(expr.children[0].name, before);
        if (expr.children[1].kind == NodeKind::VarRef) {
          bump(expr.children[1].name, operator_after_position(expr.name));
        }
      }
    }
    for (const AstNode& child : expr.children) count_operator_adjacency(child);
  }

  void visit_expr(const AstNode& expr) { count_operator_adjacency(expr); }

  void walk_statement(const AstNode& stmt) {
    switch (stmt.kind) {
      case NodeKind::Decl:
        touch(stmt.name);
        return;
      case NodeKind::Assign:
        touch(stmt.children[0].name);
        visit_expr(stmt.children[1]);
        return;
      case NodeKind::Call:
        for (const AstNode& arg : stmt.children) visit_expr(arg);
        return;
      case NodeKind::Return:
        if (!stmt.children.empty()) {
          count_occurrences(stmt.children[0], kReturnPos);
          visit_expr(stmt.children[0]);
        }
        return;
      case NodeKind::If: {
        count_occurrences(stmt.children[0], kIfCondPos);
        visit_expr(stmt.children[0]);
        walk_block(stmt.children[1]);
        if (stmt.children.size() == 3) walk_block(stmt.children[2]);
        return;
      }
      case NodeKind::While: {
        count_occurrences(stmt.children[0], kLoopCondPos);
        visit_expr(stmt.children[0]);
        const AstNode& body = stmt.children[1];
        walk_block(body);
        if (!body.children.empty()) {
          const AstNode& last = body.children.back();
          if (last.kind == NodeKind::Assign) {
            const std::string& stepped = last.children[0].name;
            if (reads_var(stmt.children[0], stepped)) bump(stepped, kLoopCounterPos);
          }
        }
        return;
      }
      default:
        return;
    }
  }

  static bool reads_var(const AstNode& expr, const std::string& name) {
    if (expr.kind == NodeKind::VarRef && expr.name == name) return true;
    for (const AstNode& child : expr.children) {
      if (reads_var(child, name)) return true;
    }
    return false;
  }

  void walk_block(const AstNode& block) {
    for (const AstNode& stmt : block.children) walk_statement(stmt);
  }
};

}  // namespace

std::map<std::string, PositionVector> count_positions(const Function& fn) {
  PositionCounter counter;
  return counter.run(fn);
}

}  // namespace seam
