#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace seam {

// The supported C subset: int/long/unsigned scalars, assignment, the fixed
// operator set, if/else, while, call statements, return. Everything downstream
// (SeamCode, codegen, corpus) consumes this AST.

enum class TypeTag { Int, Long, Unsigned };

const char* type_tag_keyword(TypeTag tag);  // "int" / "long" / "unsigned"

enum class NodeKind {
  Decl,      // name + type, no children
  Assign,    // children: [VarRef target, value expr]
  BinOp,     // name = operator symbol, children: [lhs, rhs]
  UnOp,      // name = "!", children: [operand]
  VarRef,    // name = identifier
  ConstInt,  // int_value in [0, 2^31)
  ConstStr,  // str_value = unescaped contents; only valid as a call argument
  If,        // children: [cond, Block then] or [cond, Block then, Block else]
  While,     // children: [cond, Block body]
  Call,      // name = callee, children: argument exprs
  Return,    // children: [] or [expr]
  Block,     // children: statements
};

struct AstNode {
  NodeKind kind = NodeKind::Block;
  TypeTag type = TypeTag::Int;     // Decl/VarRef only
  std::string name;                // Decl/VarRef/Call identifier or operator symbol
  std::int64_t int_value = 0;      // ConstInt only
  std::string str_value;           // ConstStr only
  std::vector<AstNode> children;
};

struct Function {
  std::string name;
  TypeTag return_type = TypeTag::Int;
  AstNode body;  // Block
};

struct Program {
  std::vector<Function> functions;
};

// ---- construction helpers ----

AstNode make_decl(std::string name, TypeTag type);
AstNode make_var(std::string name, TypeTag type);
AstNode make_const_int(std::int64_t value);
AstNode make_const_str(std::string value);
AstNode make_assign(AstNode target, AstNode value);
AstNode make_binop(std::string op, AstNode lhs, AstNode rhs);
AstNode make_unop(std::string op, AstNode operand);
AstNode make_block(std::vector<AstNode> stmts);
AstNode make_if(AstNode cond, AstNode then_block);
AstNode make_if_else(AstNode cond, AstNode then_block, AstNode else_block);
AstNode make_while(AstNode cond, AstNode body);
AstNode make_call(std::string callee, std::vector<AstNode> args);
AstNode make_return(std::optional<AstNode> value);

// Quoted, escaped rendering of a string literal. Shared by the printer, the
// IL lowering, and the code generator so that a literal compares equal across
// all three no matter which side produced it.
std::string escape_c_string(const std::string& raw);

// ---- operator metadata ----

enum class OpCategory { Arith, Shift, Relational, Equality, Bitwise, Logical };

struct OpInfo {
  const char* symbol;
  int precedence;  // higher binds tighter
  OpCategory category;
};

// All binary operators of the subset, in a fixed canonical order.
const std::vector<OpInfo>& binary_ops();
const OpInfo* find_binary_op(const std::string& symbol);
bool is_comparison(const std::string& symbol);  // relational or equality

// ---- structural queries ----

bool is_expression_kind(NodeKind kind);
bool is_statement_kind(NodeKind kind);

// Depth of an expression tree (leaves count 1). Statements are not counted.
int expression_depth(const AstNode& expr);

// Exact structural equality: kinds, names, types, values, and shape.
bool ast_equal(const AstNode& a, const AstNode& b);
bool function_equal(const Function& a, const Function& b);
bool program_equal(const Program& a, const Program& b);

// Equality modulo identifier names: every identifier (variables, callees, the
// function's own name) is replaced by its first-occurrence index on each side
// before comparison, so consistent renamings compare equal while any
// occurrence-pattern difference does not. Types and constants stay strict.
bool alpha_equal(const Function& a, const Function& b);

// Subset contract checks: declare-before-use, no redeclaration, operator
// arity/shape, type homogeneity of operands, string literals only as call
// arguments, expression depth <= 5. Throws SeamError(Validate) on violation.
void validate_function(const Function& fn);
void validate_program(const Program& program);

}  // namespace seam
