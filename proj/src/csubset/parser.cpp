#include "csubset/parser.hpp"

#include <cctype>
#include <map>
#include <optional>
#include <vector>

#include "common/error.hpp"

namespace seam {

namespace {

enum class TokKind { Ident, Keyword, Int, Str, Punct, End };

struct Token {
  TokKind kind;
  std::string text;
  std::int64_t value = 0;
  int line = 0;
  int col = 0;
};

const std::vector<std::string> kKeywords = {"int", "long", "unsigned", "if",
                                            "else", "while", "return"};

// Multi-character operators first so maximal munch wins.
const std::vector<std::string> kPuncts = {"<<", ">>", "<=", ">=", "==", "!=", "&&", "||",
                                          "(",  ")",  "{",  "}",  ";",  ",",  "=",  "+",
                                          "-",  "*",  "/",  "%",  "<",  ">",  "&",  "^",
                                          "|",  "!"};

bool is_keyword(const std::string& word) {
  for (const std::string& kw : kKeywords) {
    if (word == kw) return true;
  }
  return false;
}

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space_and_comments();
      if (pos_ >= src_.size()) break;
      out.push_back(next_token());
    }
    out.push_back({TokKind::End, "<eof>", 0, line_, col_});
    return out;
  }

 private:
  const std::string& src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;

  [[noreturn]] void fail(const std::string& msg) const {
    raise(ErrorKind::Parse,
          "line " + std::to_string(line_) + ", col " + std::to_string(col_) + ": " + msg);
  }

  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  char advance() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_space_and_comments() {
    while (pos_ < src_.size()) {
      char c = peek();
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '/' && peek(1) == '/') {
        while (pos_ < src_.size() && peek() != '\n') advance();
      } else if (c == '/' && peek(1) == '*') {
        advance();
        advance();
        while (pos_ < src_.size() && !(peek() == '*' && peek(1) == '/')) advance();
        if (pos_ >= src_.size()) fail("unterminated comment");
        advance();
        advance();
      } else {
        break;
      }
    }
  }

  Token next_token() {
    Token tok;
    tok.line = line_;
    tok.col = col_;
    char c = peek();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string word;
      while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') {
        word.push_back(advance());
      }
      tok.kind = is_keyword(word) ? TokKind::Keyword : TokKind::Ident;
      tok.text = word;
      return tok;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return lex_number(tok);
    if (c == '"') return lex_string(tok);
    for (const std::string& p : kPuncts) {
      if (src_.compare(pos_, p.size(), p) == 0) {
        for (std::size_t i = 0; i < p.size(); ++i) advance();
        tok.kind = TokKind::Punct;
        tok.text = p;
        return tok;
      }
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  Token lex_number(Token tok) {
    std::string digits;
    int base = 10;
    if (peek() == '0' && (peek(1) == 'x' || peek(1) == 'X')) {
      advance();
      advance();
      base = 16;
      while (std::isxdigit(static_cast<unsigned char>(peek()))) digits.push_back(advance());
      if (digits.empty()) fail("malformed hex literal");
    } else {
      while (std::isdigit(static_cast<unsigned char>(peek()))) digits.push_back(advance());
    }
    if (std::isalpha(static_cast<unsigned char>(peek())) || peek() == '_') {
      fail("integer literal suffixes are not part of the subset");
    }
    tok.kind = TokKind::Int;
    tok.text = base == 16 ? "0x" + digits : digits;
    errno = 0;
    tok.value = std::stoll(digits, nullptr, base);
    return tok;
  }

  Token lex_string(Token tok) {
    advance();  // opening quote
    std::string contents;
    while (true) {
      if (pos_ >= src_.size()) fail("unterminated string literal");
      char c = advance();
      if (c == '"') break;
      if (c == '\n') fail("newline inside string literal");
      if (c == '\\') {
        if (pos_ >= src_.size()) fail("unterminated escape");
        char e = advance();
        switch (e) {
          case 'n': contents.push_back('\n'); break;
          case 't': contents.push_back('\t'); break;
          case '\\': contents.push_back('\\'); break;
          case '"': contents.push_back('"'); break;
          case '0': contents.push_back('\0'); break;
          default: fail(std::string("unsupported escape '\\") + e + "'");
        }
      } else {
        contents.push_back(c);
      }
    }
    tok.kind = TokKind::Str;
    tok.text = contents;
    return tok;
  }
};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  Program parse_program() {
    Program program;
    while (!at(TokKind::End)) program.functions.push_back(parse_function());
    if (program.functions.empty()) fail("expected a function definition");
    return program;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<std::map<std::string, TypeTag>> scopes_;

  const Token& cur() const { return toks_[pos_]; }

  bool at(TokKind kind) const { return cur().kind == kind; }

  bool at_punct(const std::string& text) const {
    return cur().kind == TokKind::Punct && cur().text == text;
  }

  bool at_keyword(const std::string& text) const {
    return cur().kind == TokKind::Keyword && cur().text == text;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    raise(ErrorKind::Parse, "line " + std::to_string(cur().line) + ", col " +
                                std::to_string(cur().col) + ": " + msg);
  }

  Token eat() { return toks_[pos_++]; }

  Token expect_punct(const std::string& text) {
    if (!at_punct(text)) fail("expected '" + text + "'");
    return eat();
  }

  bool at_type_keyword() const {
    return at_keyword("int") || at_keyword("long") || at_keyword("unsigned");
  }

  TypeTag parse_type() {
    if (!at_type_keyword()) fail("expected a type name");
    std::string word = eat().text;
    // `unsigned int` and `long int` spellings collapse to the canonical tag.
    if ((word == "unsigned" || word == "long") && at_keyword("int")) eat();
    if (word == "int") return TypeTag::Int;
    if (word == "long") return TypeTag::Long;
    return TypeTag::Unsigned;
  }

  const TypeTag* lookup(const std::string& name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto found = it->find(name);
      if (found != it->end()) return &found->second;
    }
    return nullptr;
  }

  Function parse_function() {
    Function fn;
    fn.return_type = parse_type();
    if (!at(TokKind::Ident)) fail("expected a function name");
    fn.name = eat().text;
    expect_punct("(");
    expect_punct(")");
    scopes_.push_back({});
    fn.body = parse_block();
    scopes_.pop_back();
    return fn;
  }

  AstNode parse_block() {
    expect_punct("{");
    scopes_.push_back({});
    std::vector<AstNode> stmts;
    while (!at_punct("}")) {
      if (at(TokKind::End)) fail("unexpected end of input inside a block");
      parse_statement_into(stmts);
    }
    eat();  // closing brace
    scopes_.pop_back();
    return make_block(std::move(stmts));
  }

  // Declarations may expand to several statement nodes (`int a, b;`).
  void parse_statement_into(std::vector<AstNode>& out) {
    if (at_type_keyword()) {
      TypeTag type = parse_type();
      while (true) {
        if (!at(TokKind::Ident)) fail("expected a variable name");
        Token name = eat();
        if (lookup(name.text) != nullptr) fail("redeclaration of '" + name.text + "'");
        scopes_.back().emplace(name.text, type);
        out.push_back(make_decl(name.text, type));
        if (at_punct(",")) {
          eat();
          continue;
        }
        break;
      }
      expect_punct(";");
      return;
    }
    if (at_keyword("if")) {
      out.push_back(parse_if());
      return;
    }
    if (at_keyword("while")) {
      out.push_back(parse_while());
      return;
    }
    if (at_keyword("return")) {
      eat();
      if (at_punct(";")) {
        eat();
        out.push_back(make_return(std::nullopt));
      } else {
        AstNode value = parse_expression();
        expect_punct(";");
        out.push_back(make_return(std::move(value)));
      }
      return;
    }
    if (at(TokKind::Ident)) {
      Token name = eat();
      if (at_punct("(")) {
        out.push_back(parse_call(name.text));
        expect_punct(";");
        return;
      }
      if (at_punct("=")) {
        eat();
        const TypeTag* type = lookup(name.text);
        if (type == nullptr) fail("use of undeclared '" + name.text + "'");
        AstNode value = parse_expression();
        expect_punct(";");
        out.push_back(make_assign(make_var(name.text, *type), std::move(value)));
        return;
      }
      fail("expected '=' or '(' after identifier");
    }
    fail("expected a statement");
  }

  AstNode parse_if() {
    eat();  // if
    expect_punct("(");
    AstNode cond = parse_expression();
    expect_punct(")");
    AstNode then_block = parse_braced_body();
    if (at_keyword("else")) {
      eat();
      AstNode else_block = parse_braced_body();
      return make_if_else(std::move(cond), std::move(then_block), std::move(else_block));
    }
    return make_if(std::move(cond), std::move(then_block));
  }

  AstNode parse_while() {
    eat();  // while
    expect_punct("(");
    AstNode cond = parse_expression();
    expect_punct(")");
    AstNode body = parse_braced_body();
    return make_while(std::move(cond), std::move(body));
  }

  // Bodies must be braced; brace-less single statements are out of subset.
  AstNode parse_braced_body() {
    if (!at_punct("{")) fail("control-flow bodies must be braced");
    return parse_block();
  }

  AstNode parse_call(const std::string& callee) {
    expect_punct("(");
    std::vector<AstNode> args;
    if (!at_punct(")")) {
      while (true) {
        args.push_back(parse_expression());
        if (at_punct(",")) {
          eat();
          continue;
        }
        break;
      }
    }
    expect_punct(")");
    return make_call(callee, std::move(args));
  }

  AstNode parse_expression() { return parse_binary(0); }

  AstNode parse_binary(int min_prec) {
    AstNode lhs = parse_unary();
    while (cur().kind == TokKind::Punct) {
      const OpInfo* op = find_binary_op(cur().text);
      if (op == nullptr || op->precedence < min_prec) break;
      std::string symbol = eat().text;
      // Left associative: the right operand must bind strictly tighter.
      AstNode rhs = parse_binary(op->precedence + 1);
      lhs = make_binop(symbol, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  AstNode parse_unary() {
    if (at_punct("!")) {
      eat();
      return make_unop("!", parse_unary());
    }
    return parse_primary();
  }

  AstNode parse_primary() {
    if (at_punct("(")) {
      eat();
      AstNode inner = parse_expression();
      expect_punct(")");
      return inner;
    }
    if (at(TokKind::Int)) {
      Token tok = eat();
      AstNode node = make_const_int(tok.value);
      node.str_value = tok.text;  // keep the written spelling (decimal or hex)
      return node;
    }
    if (at(TokKind::Str)) {
      Token tok = eat();
      return make_const_str(tok.text);
    }
    if (at(TokKind::Ident)) {
      Token tok = eat();
      const TypeTag* type = lookup(tok.text);
      if (type == nullptr) fail("use of undeclared '" + tok.text + "'");
      return make_var(tok.text, *type);
    }
    fail("expected an expression");
  }
};

}  // namespace

Program parse_c(const std::string& source) {
  Lexer lexer(source);
  Parser parser(lexer.run());
  Program program = parser.parse_program();
  validate_program(program);
  return program;
}

Function parse_single_function(const std::string& source) {
  Program program = parse_c(source);
  if (program.functions.size() != 1) {
    raise(ErrorKind::Parse, "expected exactly one function definition");
  }
  return std::move(program.functions.front());
}

}  // namespace seam
