#include "csubset/ast.hpp"

#include <map>
#include <set>

#include "common/error.hpp"

namespace seam {

const char* type_tag_keyword(TypeTag tag) {
  switch (tag) {
    case TypeTag::Int: return "int";
    case TypeTag::Long: return "long";
    case TypeTag::Unsigned: return "unsigned";
  }
  return "int";
}

AstNode make_decl(std::string name, TypeTag type) {
  AstNode n;
  n.kind = NodeKind::Decl;
  n.name = std::move(name);
  n.type = type;
  return n;
}

AstNode make_var(std::string name, TypeTag type) {
  AstNode n;
  n.kind = NodeKind::VarRef;
  n.name = std::move(name);
  n.type = type;
  return n;
}

AstNode make_const_int(std::int64_t value) {
  AstNode n;
  n.kind = NodeKind::ConstInt;
  n.int_value = value;
  return n;
}

AstNode make_const_str(std::string value) {
  AstNode n;
  n.kind = NodeKind::ConstStr;
  n.str_value = std::move(value);
  return n;
}

AstNode make_assign(AstNode target, AstNode value) {
  AstNode n;
  n.kind = NodeKind::Assign;
  n.children.push_back(std::move(target));
  n.children.push_back(std::move(value));
  return n;
}

AstNode make_binop(std::string op, AstNode lhs, AstNode rhs) {
  AstNode n;
  n.kind = NodeKind::BinOp;
  n.name = std::move(op);
  n.children.push_back(std::move(lhs));
  n.children.push_back(std::move(rhs));
  return n;
}

AstNode make_unop(std::string op, AstNode operand) {
  AstNode n;
  n.kind = NodeKind::UnOp;
  n.name = std::move(op);
  n.children.push_back(std::move(operand));
  return n;
}

AstNode make_block(std::vector<AstNode> stmts) {
  AstNode n;
  n.kind = NodeKind::Block;
  n.children = std::move(stmts);
  return n;
}

AstNode make_if(AstNode cond, AstNode then_block) {
  AstNode n;
  n.kind = NodeKind::If;
  n.children.push_back(std::move(cond));
  n.children.push_back(std::move(then_block));
  return n;
}

AstNode make_if_else(AstNode cond, AstNode then_block, AstNode else_block) {
  AstNode n = make_if(std::move(cond), std::move(then_block));
  n.children.push_back(std::move(else_block));
  return n;
}

AstNode make_while(AstNode cond, AstNode body) {
  AstNode n;
  n.kind = NodeKind::While;
  n.children.push_back(std::move(cond));
  n.children.push_back(std::move(body));
  return n;
}

AstNode make_call(std::string callee, std::vector<AstNode> args) {
  AstNode n;
  n.kind = NodeKind::Call;
  n.name = std::move(callee);
  n.children = std::move(args);
  return n;
}

AstNode make_return(std::optional<AstNode> value) {
  AstNode n;
  n.kind = NodeKind::Return;
  if (value) n.children.push_back(std::move(*value));
  return n;
}

std::string escape_c_string(const std::string& raw) {
  std::string out = "\"";
  for (char c : raw) {
    switch (c) {
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\0': out += "\\0"; break;
      default: out.push_back(c);
    }
  }
  out.push_back('"');
  return out;
}

const std::vector<OpInfo>& binary_ops() {
  static const std::vector<OpInfo> ops = {
      {"*", 10, OpCategory::Arith},
      {"/", 10, OpCategory::Arith},
      {"%", 10, OpCategory::Arith},
      {"+", 9, OpCategory::Arith},
      {"-", 9, OpCategory::Arith},
      {"<<", 8, OpCategory::Shift},
      {">>", 8, OpCategory::Shift},
      {"<", 7, OpCategory::Relational},
      {">", 7, OpCategory::Relational},
      {"<=", 7, OpCategory::Relational},
      {">=", 7, OpCategory::Relational},
      {"==", 6, OpCategory::Equality},
      {"!=", 6, OpCategory::Equality},
      {"&", 5, OpCategory::Bitwise},
      {"^", 4, OpCategory::Bitwise},
      {"|", 3, OpCategory::Bitwise},
      {"&&", 2, OpCategory::Logical},
      {"||", 1, OpCategory::Logical},
  };
  return ops;
}

const OpInfo* find_binary_op(const std::string& symbol) {
  for (const OpInfo& op : binary_ops()) {
    if (symbol == op.symbol) return &op;
  }
  return nullptr;
}

bool is_comparison(const std::string& symbol) {
  const OpInfo* op = find_binary_op(symbol);
  return op != nullptr &&
         (op->category == OpCategory::Relational || op->category == OpCategory::Equality);
}

bool is_expression_kind(NodeKind kind) {
  switch (kind) {
    case NodeKind::BinOp:
    case NodeKind::UnOp:
    case NodeKind::VarRef:
    case NodeKind::ConstInt:
    case NodeKind::ConstStr:
      return true;
    default:
      return false;
  }
}

bool is_statement_kind(NodeKind kind) {
  switch (kind) {
    case NodeKind::Decl:
    case NodeKind::Assign:
    case NodeKind::If:
    case NodeKind::While:
    case NodeKind::Call:
    case NodeKind::Return:
    case NodeKind::Block:
      return true;
    default:
      return false;
  }
}

int expression_depth(const AstNode& expr) {
  int deepest = 0;
  for (const AstNode& child : expr.children) deepest = std::max(deepest, expression_depth(child));
  return deepest + 1;
}

bool ast_equal(const AstNode& a, const AstNode& b) {
  if (a.kind != b.kind || a.name != b.name || a.children.size() != b.children.size()) return false;
  if ((a.kind == NodeKind::Decl || a.kind == NodeKind::VarRef) && a.type != b.type) return false;
  if (a.kind == NodeKind::ConstInt && a.int_value != b.int_value) return false;
  if (a.kind == NodeKind::ConstStr && a.str_value != b.str_value) return false;
  for (std::size_t i = 0; i < a.children.size(); ++i) {
    if (!ast_equal(a.children[i], b.children[i])) return false;
  }
  return true;
}

bool function_equal(const Function& a, const Function& b) {
  return a.name == b.name && a.return_type == b.return_type && ast_equal(a.body, b.body);
}

bool program_equal(const Program& a, const Program& b) {
  if (a.functions.size() != b.functions.size()) return false;
  for (std::size_t i = 0; i < a.functions.size(); ++i) {
    if (!function_equal(a.functions[i], b.functions[i])) return false;
  }
  return true;
}

namespace {

// Rewrites every identifier to "#<first-occurrence index>" in place.
void index_identifiers(AstNode& node, std::map<std::string, int>& seen) {
  const bool named = node.kind == NodeKind::Decl || node.kind == NodeKind::VarRef ||
                     node.kind == NodeKind::Call;
  if (named) {
    auto [it, inserted] = seen.emplace(node.name, static_cast<int>(seen.size()));
    node.name = "#" + std::to_string(it->second);
  }
  for (AstNode& child : node.children) index_identifiers(child, seen);
}

}  // namespace

bool alpha_equal(const Function& a, const Function& b) {
  if (a.return_type != b.return_type) return false;
  Function ca = a;
  Function cb = b;
  std::map<std::string, int> seen_a;
  std::map<std::string, int> seen_b;
  seen_a.emplace(ca.name, 0);
  seen_b.emplace(cb.name, 0);
  ca.name = "#0";
  cb.name = "#0";
  index_identifiers(ca.body, seen_a);
  index_identifiers(cb.body, seen_b);
  return function_equal(ca, cb);
}

namespace {

constexpr std::int64_t kConstLimit = 1LL << 31;  // constants live in [0, 2^31)
constexpr int kMaxExpressionDepth = 5;

struct Scope {
  std::map<std::string, TypeTag> vars;
};

class Validator {
 public:
  void run(const Function& fn) {
    scopes_.clear();
    scopes_.push_back({});
    check_block(fn.body);
  }

 private:
  std::vector<Scope> scopes_;

  const TypeTag* lookup(const std::string& name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto found = it->vars.find(name);
      if (found != it->vars.end()) return &found->second;
    }
    return nullptr;
  }

  void declare(const AstNode& decl) {
    if (lookup(decl.name) != nullptr) {
      raise(ErrorKind::Validate, "redeclaration of '" + decl.name + "'");
    }
    scopes_.back().vars.emplace(decl.name, decl.type);
  }

  // Expression type, where constants unify with anything (nullopt = "any").
  std::optional<TypeTag> check_expr(const AstNode& node, bool call_arg = false) {
    switch (node.kind) {
      case NodeKind::VarRef: {
        const TypeTag* tag = lookup(node.name);
        if (tag == nullptr) raise(ErrorKind::Validate, "use of undeclared '" + node.name + "'");
        if (node.type != *tag) {
          raise(ErrorKind::Validate, "variable '" + node.name + "' used with mismatched type");
        }
        return *tag;
      }
      case NodeKind::ConstInt:
        if (node.int_value < 0 || node.int_value >= kConstLimit) {
          raise(ErrorKind::Validate, "integer constant out of range [0, 2^31)");
        }
        return std::nullopt;
      case NodeKind::ConstStr:
        if (!call_arg) {
          raise(ErrorKind::Validate, "string literal outside a call argument position");
        }
        return std::nullopt;
      case NodeKind::UnOp: {
        if (node.name != "!" || node.children.size() != 1) {
          raise(ErrorKind::Validate, "malformed unary operator '" + node.name + "'");
        }
        check_expr(node.children[0]);
        return TypeTag::Int;
      }
      case NodeKind::BinOp: {
        const OpInfo* op = find_binary_op(node.name);
        if (op == nullptr) raise(ErrorKind::Validate, "unknown operator '" + node.name + "'");
        if (node.children.size() != 2) {
          raise(ErrorKind::Validate, "operator '" + node.name + "' expects two operands");
        }
        auto lhs = check_expr(node.children[0]);
        auto rhs = check_expr(node.children[1]);
        std::optional<TypeTag> merged = unify(lhs, rhs, node.name);
        if (op->category == OpCategory::Relational || op->category == OpCategory::Equality ||
            op->category == OpCategory::Logical) {
          return TypeTag::Int;
        }
        return merged;
      }
      default:
        raise(ErrorKind::Validate, "statement node in expression position");
    }
  }

  std::optional<TypeTag> unify(std::optional<TypeTag> a, std::optional<TypeTag> b,
                               const std::string& op) {
    if (!a) return b;
    if (!b) return a;
    if (*a != *b) {
      raise(ErrorKind::Validate, std::string("mixed operand types for '") + op + "'");
    }
    return a;
  }

  void check_depth(const AstNode& expr) {
    if (expression_depth(expr) > kMaxExpressionDepth) {
      raise(ErrorKind::Validate, "expression deeper than the subset limit of 5");
    }
  }

  void check_stmt(const AstNode& node) {
    switch (node.kind) {
      case NodeKind::Decl:
        declare(node);
        return;
      case NodeKind::Assign: {
        if (node.children.size() != 2 || node.children[0].kind != NodeKind::VarRef) {
          raise(ErrorKind::Validate, "assignment target must be a variable");
        }
        check_depth(node.children[1]);
        auto target = check_expr(node.children[0]);
        auto value = check_expr(node.children[1]);
        unify(target, value, "=");
        return;
      }
      case NodeKind::If: {
        if (node.children.size() != 2 && node.children.size() != 3) {
          raise(ErrorKind::Validate, "malformed if statement");
        }
        check_depth(node.children[0]);
        check_expr(node.children[0]);
        check_block(node.children[1]);
        if (node.children.size() == 3) check_block(node.children[2]);
        return;
      }
      case NodeKind::While: {
        if (node.children.size() != 2) raise(ErrorKind::Validate, "malformed while statement");
        check_depth(node.children[0]);
        check_expr(node.children[0]);
        check_block(node.children[1]);
        return;
      }
      case NodeKind::Call: {
        if (node.children.size() > 4) {
          raise(ErrorKind::Validate, "call with more than 4 arguments");
        }
        for (const AstNode& arg : node.children) {
          check_depth(arg);
          check_expr(arg, /*call_arg=*/true);
        }
        return;
      }
      case NodeKind::Return: {
        if (node.children.size() > 1) raise(ErrorKind::Validate, "malformed return statement");
        if (!node.children.empty()) {
          check_depth(node.children[0]);
          check_expr(node.children[0]);
        }
        return;
      }
      case NodeKind::Block:
        check_block(node);
        return;
      default:
        raise(ErrorKind::Validate, "expression node in statement position");
    }
  }

  void check_block(const AstNode& block) {
    if (block.kind != NodeKind::Block) raise(ErrorKind::Validate, "expected a block node");
    scopes_.push_back({});
    for (const AstNode& stmt : block.children) check_stmt(stmt);
    scopes_.pop_back();
  }
};

}  // namespace

void validate_function(const Function& fn) {
  Validator v;
  v.run(fn);
}

void validate_program(const Program& program) {
  if (program.functions.empty()) raise(ErrorKind::Validate, "program has no functions");
  std::set<std::string> names;
  for (const Function& fn : program.functions) {
    if (!names.insert(fn.name).second) {
      raise(ErrorKind::Validate, "duplicate function name '" + fn.name + "'");
    }
    validate_function(fn);
  }
}

}  // namespace seam
