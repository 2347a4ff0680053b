#include <doctest.h>

#include <set>
#include <sstream>

#include "common/error.hpp"
#include "csubset/ast.hpp"
#include "csubset/generator.hpp"
#include "csubset/parser.hpp"
#include "csubset/printer.hpp"

using namespace seam;

namespace {

Function roundtrip(const Function& fn) {
  return parse_single_function(print_function(fn));
}

// Walks statements, collecting every referenced / declared variable name.
void collect_names(const AstNode& node, std::set<std::string>& declared,
                   std::set<std::string>& referenced) {
  if (node.kind == NodeKind::Decl) declared.insert(node.name);
  if (node.kind == NodeKind::VarRef) referenced.insert(node.name);
  for (const AstNode& child : node.children) collect_names(child, declared, referenced);
}

int max_expr_depth(const AstNode& node) {
  int deepest = 0;
  if (node.kind == NodeKind::Assign) deepest = expression_depth(node.children[1]);
  if (node.kind == NodeKind::If || node.kind == NodeKind::While) {
    deepest = expression_depth(node.children[0]);
  }
  if (node.kind == NodeKind::Call) {
    for (const AstNode& arg : node.children) deepest = std::max(deepest, expression_depth(arg));
  }
  if (node.kind == NodeKind::Return && !node.children.empty()) {
    deepest = expression_depth(node.children[0]);
  }
  for (const AstNode& child : node.children) deepest = std::max(deepest, max_expr_depth(child));
  return deepest;
}

void check_divisors(const AstNode& node) {
  if (node.kind == NodeKind::BinOp && (node.name == "/" || node.name == "%")) {
    const AstNode& rhs = node.children[1];
    if (rhs.kind == NodeKind::ConstInt) CHECK(rhs.int_value != 0);
  }
  for (const AstNode& child : node.children) check_divisors(child);
}

}  // namespace

TEST_CASE("sum-check fixture parses to the expected shape") {
  const char* src = R"(int main() {
    int num1, num2, sum;
    scan_value("%d");
    scan_value("%d");
    sum = num1 + num2;
    if (sum == 0x400400) {
        printf("You Win!");
    }
    return 0;
})";
  Function fn = parse_single_function(src);
  const auto& body = fn.body.children;
  REQUIRE(body.size() == 8);
  CHECK(body[0].kind == NodeKind::Decl);
  CHECK(body[1].kind == NodeKind::Decl);
  CHECK(body[2].kind == NodeKind::Decl);
  CHECK(body[0].type == TypeTag::Int);
  CHECK(body[3].kind == NodeKind::Call);
  CHECK(body[5].kind == NodeKind::Assign);
  const AstNode& cond = body[6].children[0];
  CHECK(cond.kind == NodeKind::BinOp);
  CHECK(cond.name == "==");
  CHECK(cond.children[1].int_value == 0x400400);
  const AstNode& then_block = body[6].children[1];
  REQUIRE(then_block.children.size() == 1);
  CHECK(then_block.children[0].kind == NodeKind::Call);
  CHECK(then_block.children[0].name == "printf");
  CHECK(then_block.children[0].children[0].kind == NodeKind::ConstStr);
  CHECK(then_block.children[0].children[0].str_value == "You Win!");
}

TEST_CASE("printing preserves tree shape through reparsing") {
  // Right-associated additions need parentheses to survive a reparse.
  Function fn;
  fn.name = "main";
  AstNode value = make_binop("+", make_var("a", TypeTag::Int),
                             make_binop("+", make_var("b", TypeTag::Int),
                                        make_var("c", TypeTag::Int)));
  fn.body = make_block({});
  fn.body.children.push_back(make_decl("a", TypeTag::Int));
  fn.body.children.push_back(make_decl("b", TypeTag::Int));
  fn.body.children.push_back(make_decl("c", TypeTag::Int));
  fn.body.children.push_back(make_assign(make_var("a", TypeTag::Int), std::move(value)));
  fn.body.children.push_back(make_return(make_const_int(0)));

  std::string text = print_function(fn);
  CHECK(text.find("a = a + (b + c);") != std::string::npos);
  CHECK(function_equal(fn, roundtrip(fn)));

  // Mixed precedence: a - b * c needs no parens, (a - b) * c does.
  AstNode prod = make_binop("*", make_binop("-", make_var("a", TypeTag::Int),
                                            make_var("b", TypeTag::Int)),
                            make_var("c", TypeTag::Int));
  fn.body.children[3] = make_assign(make_var("a", TypeTag::Int), std::move(prod));
  text = print_function(fn);
  CHECK(text.find("a = (a - b) * c;") != std::string::npos);
  CHECK(function_equal(fn, roundtrip(fn)));

  // Unary negation over a comparison keeps its operand parenthesized.
  AstNode negation = make_unop("!", make_binop("<", make_var("a", TypeTag::Int),
                                               make_var("b", TypeTag::Int)));
  fn.body.children[3] = make_assign(make_var("c", TypeTag::Int), std::move(negation));
  text = print_function(fn);
  CHECK(text.find("c = !(a < b);") != std::string::npos);
  CHECK(function_equal(fn, roundtrip(fn)));
}

TEST_CASE("parse errors carry positions and reasons") {
  CHECK_THROWS_WITH_AS(parse_c("int main() { x = 1; }"),
                       doctest::Contains("undeclared"), SeamError);
  CHECK_THROWS_WITH_AS(parse_c("int main() { int a; int a; }"),
                       doctest::Contains("redeclaration"), SeamError);
  CHECK_THROWS_WITH_AS(parse_c("int main() { int a; a = ; }"),
                       doctest::Contains("expression"), SeamError);
  CHECK_THROWS_WITH_AS(parse_c("int main() { if (1) a = 2; }"),
                       doctest::Contains("braced"), SeamError);
  CHECK_THROWS_WITH_AS(parse_c("int main() { float f; }"),
                       doctest::Contains("after identifier"), SeamError);
  // Position prefix: the broken token sits on line 2.
  try {
    parse_c("int main() {\n  broken @ here;\n}");
    FAIL("expected a parse error");
  } catch (const SeamError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("validation rejects out-of-subset shapes") {
  Function fn;
  fn.name = "main";
  fn.body = make_block({});
  fn.body.children.push_back(make_decl("a", TypeTag::Int));
  fn.body.children.push_back(make_decl("b", TypeTag::Long));

  SUBCASE("mixed operand types") {
    fn.body.children.push_back(
        make_assign(make_var("a", TypeTag::Int),
                    make_binop("+", make_var("a", TypeTag::Int), make_var("b", TypeTag::Long))));
    CHECK_THROWS_WITH_AS(validate_function(fn), doctest::Contains("mixed"), SeamError);
  }
  SUBCASE("string outside a call argument") {
    fn.body.children.push_back(
        make_assign(make_var("a", TypeTag::Int), make_const_str("nope")));
    CHECK_THROWS_WITH_AS(validate_function(fn), doctest::Contains("string"), SeamError);
  }
  SUBCASE("expression depth limit") {
    AstNode deep = make_var("a", TypeTag::Int);
    for (int i = 0; i < 6; ++i) deep = make_binop("+", std::move(deep), make_const_int(1));
    fn.body.children.push_back(make_assign(make_var("a", TypeTag::Int), std::move(deep)));
    CHECK_THROWS_WITH_AS(validate_function(fn), doctest::Contains("deeper"), SeamError);
  }
  SUBCASE("constant range") {
    fn.body.children.push_back(
        make_assign(make_var("a", TypeTag::Int), make_const_int(1LL << 31)));
    CHECK_THROWS_WITH_AS(validate_function(fn), doctest::Contains("range"), SeamError);
  }
}

TEST_CASE("alpha equality tracks occurrence patterns, not names") {
  Function a = parse_single_function("int main() { int x, y; x = x + y; return x; }");
  Function b = parse_single_function("int main() { int p, q; p = p + q; return p; }");
  Function c = parse_single_function("int main() { int p, q; p = q + q; return p; }");
  CHECK(alpha_equal(a, b));
  CHECK(!alpha_equal(a, c));

  // Types stay strict under alpha comparison.
  Function d = parse_single_function("int main() { long p, q; p = p + q; return 0; }");
  Function e = parse_single_function("int main() { int p, q; p = p + q; return 0; }");
  CHECK(!alpha_equal(d, e));
}

TEST_CASE("generator is deterministic and honors the spec knobs") {
  GenSpec spec;
  spec.kind = StmtKind::While;
  spec.level = 1;
  spec.seed = 1234;
  spec.statement_count = 2;
  Function a = gen_random_program(spec);
  Function b = gen_random_program(spec);
  CHECK(print_function(a) == print_function(b));

  spec.seed = 1235;
  Function c = gen_random_program(spec);
  CHECK(print_function(a) != print_function(c));
}

TEST_CASE("generated programs satisfy the subset contract across the grid") {
  for (StmtKind kind :
       {StmtKind::Expression, StmtKind::If, StmtKind::While, StmtKind::Call}) {
    for (int level = 0; level <= 2; ++level) {
      for (std::uint64_t seed = 0; seed < 40; ++seed) {
        GenSpec spec;
        spec.kind = kind;
        spec.level = level;
        spec.seed = seed * 7 + level;
        spec.statement_count = 1 + static_cast<int>(seed % 3);
        spec.allow_unsigned = (seed % 5 == 0);
        Function fn = gen_random_program(spec);

        CAPTURE(stmt_kind_name(kind));
        CAPTURE(level);
        CAPTURE(seed);
        CHECK_NOTHROW(validate_function(fn));
        CHECK(max_expr_depth(fn.body) <= 5);
        check_divisors(fn.body);

        // Declarations cover exactly the referenced names.
        std::set<std::string> declared, referenced;
        collect_names(fn.body, declared, referenced);
        CHECK(declared == referenced);

        // Ends with a return statement.
        REQUIRE(!fn.body.children.empty());
        CHECK(fn.body.children.back().kind == NodeKind::Return);

        // Full parse/print round-trip.
        CHECK(function_equal(fn, roundtrip(fn)));
      }
    }
  }
}

TEST_CASE("while-kind programs read and step a counter") {
  GenSpec spec;
  spec.kind = StmtKind::While;
  spec.level = 0;
  spec.seed = 99;
  Function fn = gen_random_program(spec);
  const AstNode* loop = nullptr;
  for (const AstNode& stmt : fn.body.children) {
    if (stmt.kind == NodeKind::While) loop = &stmt;
  }
  REQUIRE(loop != nullptr);
  const AstNode& cond = loop->children[0];
  const AstNode& body = loop->children[1];
  REQUIRE(!body.children.empty());
  const AstNode& last = body.children.back();
  REQUIRE(last.kind == NodeKind::Assign);
  // The stepped variable appears in the loop condition.
  const std::string& stepped = last.children[0].name;
  std::set<std::string> declared, cond_vars;
  collect_names(cond, declared, cond_vars);
  CHECK(cond_vars.count(stepped) == 1);
}

TEST_CASE("line layout matches the printed text") {
  Function fn = parse_single_function(
      "int main() { int a; a = 1; while (a < 3) { a = a + 1; } if (a > 1) { a = 0; } else { "
      "a = 2; } return a; }");
  PrintedFunction printed = print_function_with_layout(fn);
  // Statements: decl, assign, while, assign, if, assign, assign, return.
  REQUIRE(printed.layout.stmt_line.size() == 8);
  CHECK(printed.layout.header_line == 1);
  CHECK(printed.layout.stmt_line[0] == 2);  // int a;
  CHECK(printed.layout.stmt_line[1] == 3);  // a = 1;
  CHECK(printed.layout.stmt_line[2] == 4);  // while (...) {
  CHECK(printed.layout.stmt_line[3] == 5);  //     a = a + 1;
  CHECK(printed.layout.close_line.at(2) == 6);
  CHECK(printed.layout.stmt_line[4] == 7);  // if (...) {
  CHECK(printed.layout.else_line.at(4) == 9);
  CHECK(printed.layout.close_line.at(4) == 11);
  CHECK(printed.layout.stmt_line[7] == 12);  // return a;
  CHECK(printed.layout.footer_line == 13);

  // The text agrees: line 9 is the else joint.
  std::istringstream lines(printed.text);
  std::string line;
  std::vector<std::string> all;
  while (std::getline(lines, line)) all.push_back(line);
  CHECK(all[8].find("} else {") != std::string::npos);
}
