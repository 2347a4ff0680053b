#include "csubset/generator.hpp"

#include <algorithm>
#include <set>

#include "common/error.hpp"
#include "common/rng.hpp"

namespace seam {

const char* stmt_kind_name(StmtKind kind) {
  switch (kind) {
    case StmtKind::Expression: return "expression";
    case StmtKind::If: return "if";
    case StmtKind::While: return "while";
    case StmtKind::Call: return "call";
  }
  return "expression";
}

StmtKind stmt_kind_from_name(const std::string& name) {
  if (name == "expression") return StmtKind::Expression;
  if (name == "if") return StmtKind::If;
  if (name == "while") return StmtKind::While;
  if (name == "call") return StmtKind::Call;
  raise(ErrorKind::Config, "unknown statement kind '" + name + "'");
}

namespace {

// Names are grouped by the role they usually play so that recovered
// identifiers carry signal: counters drive loops, sizes bound them, and
// accumulators collect results.
const std::vector<std::string> kCounterNames = {"i", "j", "k", "idx", "pos", "step"};
const std::vector<std::string> kBoundNames = {"n", "m", "size", "len", "count", "limit", "bound"};
const std::vector<std::string> kAccumNames = {"sum", "total", "acc", "result", "prod", "avg"};
const std::vector<std::string> kGeneralNames = {"a", "b", "c", "d", "x", "y", "z",
                                                "tmp", "val", "num1", "num2", "delta", "base"};
const std::vector<std::string> kCalleeNames = {"printf", "compute", "process", "update", "record",
                                               "notify", "dispatch", "foo", "bar", "helper"};
const std::vector<std::string> kStringPool = {"You Win!", "done", "%d\n", "result: %d",
                                              "error", "ok", "start", "overflow"};

// Operators allowed inside value expressions (conditions add comparisons).
const std::vector<std::string> kValueOps = {"+", "-", "*", "/", "%", "<<", ">>", "&", "|", "^"};
const std::vector<std::string> kRelOps = {"<", ">", "<=", ">=", "==", "!="};

constexpr std::int64_t kConstLimit = 1LL << 31;

struct PoolVar {
  std::string name;
  TypeTag type;
};

class ProgramBuilder {
 public:
  ProgramBuilder(const GenSpec& spec, Rng rng) : spec_(spec), rng_(std::move(rng)) {}

  Function run() {
    draw_pool();
    std::vector<AstNode> stmts;
    for (int i = 0; i < std::max(1, spec_.statement_count); ++i) {
      switch (spec_.kind) {
        case StmtKind::Expression: stmts.push_back(gen_expression_stmt()); break;
        case StmtKind::If: stmts.push_back(gen_if_stmt()); break;
        case StmtKind::While: stmts.push_back(gen_while_stmt()); break;
        case StmtKind::Call: stmts.push_back(gen_call_stmt()); break;
      }
    }
    stmts.push_back(gen_return_stmt());

    // Declarations cover exactly the referenced variables, in pool order, so
    // every declared slot is visible in the compiled body.
    std::vector<AstNode> body;
    for (const PoolVar& var : pool_) {
      if (used_.count(var.name) != 0) body.push_back(make_decl(var.name, var.type));
    }
    for (AstNode& stmt : stmts) body.push_back(std::move(stmt));

    Function fn;
    fn.name = spec_.function_name;
    fn.return_type = TypeTag::Int;
    fn.body = make_block(std::move(body));
    validate_function(fn);
    return fn;
  }

 private:
  GenSpec spec_;
  Rng rng_;
  std::vector<PoolVar> pool_;
  std::set<std::string> used_;

  void draw_pool() {
    const std::size_t size = static_cast<std::size_t>(rng_.range(3, 8));
    std::vector<std::string> candidates;
    candidates.insert(candidates.end(), kCounterNames.begin(), kCounterNames.end());
    candidates.insert(candidates.end(), kBoundNames.begin(), kBoundNames.end());
    candidates.insert(candidates.end(), kAccumNames.begin(), kAccumNames.end());
    candidates.insert(candidates.end(), kGeneralNames.begin(), kGeneralNames.end());
    rng_.shuffle(candidates);
    // While-kind functions want a counter-flavored variable in the pool.
    if (spec_.kind == StmtKind::While) {
      const std::string& counter = rng_.pick(kCounterNames);
      auto it = std::find(candidates.begin(), candidates.end(), counter);
      std::rotate(candidates.begin(), it, it + 1);
    }
    for (std::size_t i = 0; i < size; ++i) {
      pool_.push_back({candidates[i], draw_type()});
    }
    if (spec_.kind == StmtKind::While) pool_.front().type = TypeTag::Int;
  }

  TypeTag draw_type() {
    if (spec_.allow_unsigned && rng_.chance(1, 4)) return TypeTag::Unsigned;
    return rng_.chance(3, 5) ? TypeTag::Int : TypeTag::Long;
  }

  const PoolVar& any_var() { return pool_[rng_.below(pool_.size())]; }

  std::vector<const PoolVar*> vars_of_type(TypeTag type) {
    std::vector<const PoolVar*> out;
    for (const PoolVar& var : pool_) {
      if (var.type == type) out.push_back(&var);
    }
    return out;
  }

  AstNode use_var(const PoolVar& var) {
    used_.insert(var.name);
    return make_var(var.name, var.type);
  }

  AstNode var_of_type(TypeTag type) {
    auto candidates = vars_of_type(type);
    // The pool always has the statement type because types are chosen by
    // first picking a pool variable.
    return use_var(*candidates[rng_.below(candidates.size())]);
  }

  AstNode const_leaf(const std::string& op_above, bool rhs_of_op) {
    // Divisor and modulus constants stay nonzero; shift counts stay in range.
    if (rhs_of_op && (op_above == "/" || op_above == "%")) {
      return make_const_int(rng_.range(1, kConstLimit - 1));
    }
    if (rhs_of_op && (op_above == "<<" || op_above == ">>")) {
      return make_const_int(rng_.range(0, 31));
    }
    if (rng_.chance(1, 2)) return make_const_int(rng_.range(0, 999));
    return make_const_int(rng_.range(0, kConstLimit - 1));
  }

  AstNode leaf(TypeTag type, const std::string& op_above, bool rhs_of_op, bool force_var) {
    if (!force_var && rng_.chance(3, 10)) return const_leaf(op_above, rhs_of_op);
    return var_of_type(type);
  }

  std::string pick_value_op() { return rng_.pick(kValueOps); }

  // Random value tree with depth in [min_depth, max_depth] (leaves depth 1).
  AstNode value_tree(TypeTag type, int min_depth, int max_depth) {
    if (max_depth <= 1 || (min_depth <= 1 && rng_.chance(2, 5))) {
      return leaf(type, "", false, /*force_var=*/rng_.chance(7, 10));
    }
    std::string op = pick_value_op();
    AstNode lhs = value_tree(type, std::max(1, min_depth - 1), max_depth - 1);
    AstNode rhs = value_tree(type, 1, max_depth - 1);
    if ((op == "/" || op == "%") && rhs.kind == NodeKind::ConstInt && rhs.int_value == 0) {
      rhs.int_value = 1 + static_cast<std::int64_t>(rng_.below(1000));
    }
    if ((op == "<<" || op == ">>") && rhs.kind == NodeKind::ConstInt) {
      rhs.int_value = rng_.range(0, 31);
    }
    return make_binop(op, std::move(lhs), std::move(rhs));
  }

  // The statement's top operation follows the requested complexity level.
  AstNode leveled_value(TypeTag type) {
    std::string op = pick_value_op();
    switch (spec_.level) {
      case 0: {
        AstNode lhs = var_of_type(type);
        AstNode rhs = leaf(type, op, true, /*force_var=*/rng_.chance(3, 5));
        return make_binop(op, std::move(lhs), std::move(rhs));
      }
      case 1: {
        AstNode single = var_of_type(type);
        AstNode tree = value_tree(type, 2, 3);
        if (rng_.chance(1, 2)) return make_binop(op, std::move(single), std::move(tree));
        return make_binop(op, std::move(tree), std::move(single));
      }
      default: {
        AstNode lhs = value_tree(type, 2, 4);
        AstNode rhs = value_tree(type, 2, 4);
        return make_binop(op, std::move(lhs), std::move(rhs));
      }
    }
  }

  AstNode leveled_condition() {
    TypeTag type = any_var().type;
    std::string rel = rng_.pick(kRelOps);
    switch (spec_.level) {
      case 0: {
        AstNode lhs = var_of_type(type);
        AstNode rhs = leaf(type, rel, true, /*force_var=*/rng_.chance(1, 2));
        return make_binop(rel, std::move(lhs), std::move(rhs));
      }
      case 1: {
        AstNode lhs = var_of_type(type);
        AstNode rhs = value_tree(type, 2, 3);
        return make_binop(rel, std::move(lhs), std::move(rhs));
      }
      default: {
        if (rng_.chance(1, 2)) {
          AstNode lhs = value_tree(type, 2, 4);
          AstNode rhs = value_tree(type, 1, 4);
          return make_binop(rel, std::move(lhs), std::move(rhs));
        }
        // Logical combination of two simple comparisons, optionally negated.
        auto simple_rel = [&]() {
          TypeTag t = any_var().type;
          AstNode lhs = var_of_type(t);
          AstNode rhs = leaf(t, "<", true, /*force_var=*/rng_.chance(1, 2));
          return make_binop(rng_.pick(kRelOps), std::move(lhs), std::move(rhs));
        };
        AstNode left = simple_rel();
        AstNode right = simple_rel();
        if (rng_.chance(1, 4)) left = make_unop("!", std::move(left));
        return make_binop(rng_.chance(1, 2) ? "&&" : "||", std::move(left), std::move(right));
      }
    }
  }

  AstNode gen_expression_stmt() {
    const PoolVar& target = pool_[rng_.below(pool_.size())];
    AstNode value = leveled_value(target.type);
    return make_assign(use_var(target), std::move(value));
  }

  AstNode simple_assign() {
    const PoolVar& target = pool_[rng_.below(pool_.size())];
    std::string op = pick_value_op();
    AstNode lhs = var_of_type(target.type);
    AstNode rhs = leaf(target.type, op, true, /*force_var=*/rng_.chance(1, 2));
    return make_assign(use_var(target), make_binop(op, std::move(lhs), std::move(rhs)));
  }

  std::vector<AstNode> small_body() {
    std::vector<AstNode> stmts;
    const int count = static_cast<int>(rng_.range(1, 2));
    for (int i = 0; i < count; ++i) stmts.push_back(simple_assign());
    return stmts;
  }

  AstNode gen_if_stmt() {
    AstNode cond = leveled_condition();
    AstNode then_block = make_block(small_body());
    if (rng_.chance(7, 20)) {
      return make_if_else(std::move(cond), std::move(then_block), make_block(small_body()));
    }
    return make_if(std::move(cond), std::move(then_block));
  }

  AstNode gen_while_stmt() {
    // The counter is read in the condition and stepped by the body's last
    // statement — the shape the loop-counter position is defined by.
    const PoolVar& counter = pool_.front();
    AstNode cond;
    if (spec_.level == 0) {
      cond = make_binop(rng_.chance(1, 2) ? "<" : "<=", use_var(counter),
                        leaf(counter.type, "<", true, /*force_var=*/rng_.chance(1, 2)));
    } else {
      AstNode bound = value_tree(counter.type, 2, spec_.level == 1 ? 3 : 4);
      cond = make_binop(rng_.pick(kRelOps), use_var(counter), std::move(bound));
    }
    std::vector<AstNode> body;
    const int extra = static_cast<int>(rng_.range(0, 2));
    for (int i = 0; i < extra; ++i) body.push_back(simple_assign());
    std::string step_op = rng_.chance(4, 5) ? "+" : "-";
    body.push_back(make_assign(use_var(counter),
                               make_binop(step_op, use_var(counter), make_const_int(1))));
    return make_while(std::move(cond), make_block(std::move(body)));
  }

  AstNode gen_call_stmt() {
    std::string callee = rng_.pick(kCalleeNames);
    std::vector<AstNode> args;
    int argc = static_cast<int>(rng_.range(0, 4));
    if (callee == "printf" && argc == 0) argc = 1;
    for (int i = 0; i < argc; ++i) {
      if (i == 0 && callee == "printf") {
        args.push_back(make_const_str(rng_.pick(kStringPool)));
        continue;
      }
      if (rng_.chance(1, 8)) {
        args.push_back(make_const_str(rng_.pick(kStringPool)));
        continue;
      }
      TypeTag type = any_var().type;
      if (spec_.level >= 1 && rng_.chance(spec_.level == 1 ? 1 : 2, 4)) {
        args.push_back(value_tree(type, 2, spec_.level == 1 ? 3 : 4));
      } else if (rng_.chance(1, 3)) {
        args.push_back(make_const_int(rng_.range(0, kConstLimit - 1)));
      } else {
        args.push_back(var_of_type(type));
      }
    }
    return make_call(std::move(callee), std::move(args));
  }

  AstNode gen_return_stmt() {
    std::vector<const PoolVar*> ints;
    for (const PoolVar& var : pool_) {
      if (var.type == TypeTag::Int && used_.count(var.name) != 0) ints.push_back(&var);
    }
    if (!ints.empty() && rng_.chance(3, 5)) {
      return make_return(use_var(*ints[rng_.below(ints.size())]));
    }
    return make_return(make_const_int(rng_.range(0, 9)));
  }
};

}  // namespace

Function gen_random_program(const GenSpec& spec) {
  if (spec.level < 0 || spec.level > 2) raise(ErrorKind::Config, "level must be 0, 1, or 2");
  if (spec.statement_count < 1) raise(ErrorKind::Config, "statement count must be >= 1");
  ProgramBuilder builder(spec, Rng(spec.seed));
  return builder.run();
}

}  // namespace seam
