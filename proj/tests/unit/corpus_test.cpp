#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "asmtext/canonicalize.hpp"
#include "common/error.hpp"
#include "corpus/boundary.hpp"
#include "corpus/builder.hpp"
#include "corpus/codegen.hpp"
#include "corpus/compile.hpp"
#include "corpus/positions.hpp"
#include "csubset/generator.hpp"
#include "csubset/parser.hpp"
#include "csubset/printer.hpp"
#include "seamcode/lower.hpp"

using namespace seam;

namespace {

Program single(const std::string& source) { return parse_c(source); }

CorpusSample ref_sample(const std::string& source) {
  Program program = single(source);
  return make_sample(program.functions[0], reference_codegen(program), "ref");
}

std::vector<std::string> canon_lines(const CorpusSample& sample) {
  std::vector<std::string> out;
  for (const CanonicalInstruction& insn : sample.insns) out.push_back(canonical_line(insn));
  return out;
}

std::vector<std::string> literal_texts(const std::vector<SeamLiteral>& lits) {
  std::vector<std::string> out;
  for (const SeamLiteral& lit : lits) out.push_back(lit.text);
  return out;
}

const char* kStraightLine = R"(int main() {
    int a;
    int b;
    a = 5;
    b = a + 2;
    return b;
}
)";

const char* kLoop = R"(int main() {
    int i;
    i = 0;
    while (i < 3) {
        i = i + 1;
    }
    return i;
}
)";

const char* kBranch = R"(int main() {
    int a;
    int b;
    a = 1;
    if (a < 2) {
        b = 1;
    } else {
        b = 2;
    }
    return b;
}
)";

}  // namespace

TEST_CASE("straight-line function compiles to the expected canonical body") {
  CorpusSample sample = ref_sample(kStraightLine);
  CHECK(sample.backend == "ref");
  CHECK(sample.name == "main");

  const std::vector<std::string> expected = {
      "mov eax , IMM",
      "mov DWORD PTR [ rbp - 4 ] , eax",
      "mov eax , DWORD PTR [ rbp - 4 ]",
      "mov edx , IMM",
      "add eax , edx",
      "mov DWORD PTR [ rbp - 8 ] , eax",
      "mov eax , DWORD PTR [ rbp - 8 ]",
  };
  CHECK(canon_lines(sample) == expected);
  CHECK(sample.boundary == std::vector<int>{0, 1, 0, 0, 0, 1, 1});

  REQUIRE(sample.lines.size() == 3);
  CHECK(sample.lines[0].kind == "ASSIGN");
  CHECK(sample.lines[1].kind == "ASSIGN");
  CHECK(sample.lines[2].kind == "RET");

  CHECK(literal_texts(sample.asm_literals) == std::vector<std::string>{"5", "2"});
  CHECK(literal_texts(sample.sc_literals) == std::vector<std::string>{"5", "2"});
  CHECK(leaked_literals(sample.insns).empty());
}

TEST_CASE("loop body owns a separate loop-back segment") {
  CorpusSample sample = ref_sample(kLoop);

  REQUIRE(sample.lines.size() == 5);
  CHECK(sample.lines[0].kind == "ASSIGN");
  CHECK(sample.lines[1].kind == "WHILE");
  CHECK(sample.lines[2].kind == "ASSIGN");
  CHECK(sample.lines[3].kind == "END");
  CHECK(sample.lines[4].kind == "RET");

  std::vector<LinePair> pairs = line_pairs(sample);
  REQUIRE(pairs.size() == 5);
  // Loop header: load counter, load bound, compare, exit forward.
  REQUIRE(pairs[1].segment.size() == 4);
  CHECK(canonical_line(pairs[1].segment[2]) == "cmp eax , edx");
  CHECK(canonical_line(pairs[1].segment[3]) == "jge UP");
  // Block END is exactly the backward jump.
  REQUIRE(pairs[3].segment.size() == 1);
  CHECK(canonical_line(pairs[3].segment[0]) == "jmp DOWN");
  CHECK(pairs[3].target == std::vector<std::string>{"END"});
}

TEST_CASE("taken-arm exit jump rides the previous statement's segment") {
  CorpusSample sample = ref_sample(kBranch);

  REQUIRE(sample.lines.size() == 5);
  CHECK(sample.lines[1].kind == "IF");
  std::vector<LinePair> pairs = line_pairs(sample);

  // Then-arm assignment carries the jump that skips the else arm.
  REQUIRE(pairs[2].segment.size() == 3);
  CHECK(canonical_line(pairs[2].segment[0]) == "mov eax , IMM");
  CHECK(canonical_line(pairs[2].segment[2]) == "jmp UP");
  // Else-arm assignment has no trailing jump.
  REQUIRE(pairs[3].segment.size() == 2);
  CHECK(canonical_line(pairs[3].segment[1]) == "mov DWORD PTR [ rbp - 8 ] , eax");
  // The if header ends on the inverted conditional branch.
  CHECK(canonical_line(pairs[1].segment.back()) == "jge UP");
}

TEST_CASE("division, modulo, and shifts keep every constant harvestable") {
  CorpusSample sample = ref_sample(
      "int main() { int a; int b; a = 6; b = a / 3; b = a % 3; b = a << 2; return b; }");
  std::vector<std::string> lines = canon_lines(sample);

  auto contains = [&lines](const std::string& needle) {
    for (const std::string& line : lines) {
      if (line == needle) return true;
    }
    return false;
  };
  CHECK(contains("cdq"));
  CHECK(contains("idiv ecx"));
  CHECK(contains("mov eax , edx"));  // modulo takes the remainder register
  CHECK(contains("mov ecx , edx"));
  CHECK(contains("sal eax , cl"));
  CHECK(literal_texts(sample.asm_literals) == std::vector<std::string>{"6", "3", "3", "2"});
  CHECK(leaked_literals(sample.insns).empty());
}

TEST_CASE("unsigned arithmetic selects unsigned forms") {
  CorpusSample sample = ref_sample(
      "int main() { unsigned x; unsigned y; x = 7; y = x / 2; y = x >> 1; return 0; }");
  std::vector<std::string> lines = canon_lines(sample);
  auto contains = [&lines](const std::string& needle) {
    for (const std::string& line : lines) {
      if (line == needle) return true;
    }
    return false;
  };
  CHECK(contains("xor edx , edx"));
  CHECK(contains("div ecx"));
  CHECK(contains("shr eax , cl"));
  CHECK_FALSE(contains("cdq"));
}

TEST_CASE("long locals get quadword slots and registers") {
  CorpusSample sample =
      ref_sample("int main() { long p; long q; p = 5; q = p * 2; return 0; }");
  std::vector<std::string> lines = canon_lines(sample);
  CHECK(lines[0] == "mov rax , IMM");
  CHECK(lines[1] == "mov QWORD PTR [ rbp - 8 ] , rax");
  CHECK(lines[2] == "mov rax , QWORD PTR [ rbp - 8 ]");
  CHECK(lines[3] == "mov rdx , IMM");
  CHECK(lines[4] == "imul rax , rdx");
  CHECK(lines[5] == "mov QWORD PTR [ rbp - 16 ] , rax");
}

TEST_CASE("calls push arguments left to right and pop into the argument registers") {
  CorpusSample sample = ref_sample(
      "int main() { int x; x = 3; printf(\"x=%d\\n\", x); return 0; }");
  std::vector<LinePair> pairs = line_pairs(sample);
  REQUIRE(pairs.size() == 3);

  std::vector<std::string> call_lines;
  for (const CanonicalInstruction& insn : pairs[1].segment) {
    call_lines.push_back(canonical_line(insn));
  }
  const std::vector<std::string> expected = {
      "push STR",
      "mov eax , DWORD PTR [ rbp - 4 ]",
      "push rax",
      "pop rsi",
      "pop rdi",
      "xor eax , eax",
      "call FUNC",
  };
  CHECK(call_lines == expected);

  // Harvest order: assignment constant, string, callee, return constant; the
  // data literals (callee excluded) mirror the IL's exactly.
  REQUIRE(sample.asm_literals.size() == 4);
  CHECK(sample.asm_literals[0].text == "3");
  CHECK(sample.asm_literals[1].kind == LiteralKind::Str);
  CHECK(sample.asm_literals[1].text == "\"x=%d\\n\"");
  CHECK(sample.asm_literals[2].kind == LiteralKind::Func);
  CHECK(sample.asm_literals[2].text == "printf");
  CHECK(sample.asm_literals[3].text == "0");
  CHECK(literal_texts(sample.sc_literals) ==
        std::vector<std::string>{"3", "\"x=%d\\n\"", "0"});
}

TEST_CASE("hex spellings survive into the harvested literals") {
  CorpusSample sample = ref_sample(
      "int main() { int a; a = 0x10; if (a == 0x400400) { a = 1; } return a; }");
  CHECK(literal_texts(sample.sc_literals) ==
        std::vector<std::string>{"0x10", "0x400400", "1"});
  std::vector<std::string> imms;
  for (const SeamLiteral& lit : sample.asm_literals) {
    if (lit.kind == LiteralKind::Imm) imms.push_back(lit.text);
  }
  CHECK(imms == std::vector<std::string>{"0x10", "0x400400", "1"});
}

TEST_CASE("raw view lexes the normalized source lines") {
  Program program = single(kBranch);
  std::vector<std::vector<std::string>> raw = raw_view(program.functions[0]);
  REQUIRE(raw.size() == 5);
  CHECK(raw[0] == std::vector<std::string>{"v0", "=", "IMM", ";"});
  CHECK(raw[1] == std::vector<std::string>{"if", "(", "v0", "<", "IMM", ")", "{"});
  CHECK(raw[2] == std::vector<std::string>{"v1", "=", "IMM", ";"});
  CHECK(raw[3] == std::vector<std::string>{"v1", "=", "IMM", ";"});
  CHECK(raw[4] == std::vector<std::string>{"return", "v1", ";"});

  Program loop = single(kLoop);
  std::vector<std::vector<std::string>> loop_raw = raw_view(loop.functions[0]);
  REQUIRE(loop_raw.size() == 5);
  CHECK(loop_raw[1] == std::vector<std::string>{"while", "(", "v0", "<", "IMM", ")", "{"});
  CHECK(loop_raw[3] == std::vector<std::string>{"}"});
}

TEST_CASE("line lexer handles strings, hex, and two-character operators") {
  CHECK(lex_c_line("b = a + 0x400400;") ==
        std::vector<std::string>{"b", "=", "a", "+", "IMM", ";"});
  CHECK(lex_c_line("    printf(\"hi %d\\n\", x);") ==
        std::vector<std::string>{"printf", "(", "STR", ",", "x", ")", ";"});
  CHECK(lex_c_line("if (a <= b && c != 2) {") ==
        std::vector<std::string>{"if", "(", "a", "<=", "b", "&&", "c", "!=", "IMM", ")", "{"});
  CHECK(lex_c_line("x = y >> 3;") == std::vector<std::string>{"x", "=", "y", ">>", "IMM", ";"});
}

TEST_CASE("generated functions always align segments with the translation view") {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    GenSpec spec;
    spec.kind = static_cast<StmtKind>(seed % 4);
    spec.level = static_cast<int>(seed % 3);
    spec.seed = seed * 7919;
    spec.statement_count = 1 + static_cast<int>(seed % 3);
    spec.allow_unsigned = seed % 2 == 0;
    Function fn = gen_random_program(spec);

    Program program;
    program.functions.push_back(fn);
    CorpusSample sample = make_sample(fn, reference_codegen(program), "ref");

    int bits = 0;
    for (int b : sample.boundary) bits += b;
    CHECK(static_cast<std::size_t>(bits) == sample.lines.size());
    CHECK(sample.raw_lines.size() == sample.lines.size());
    CHECK(leaked_literals(sample.insns).empty());

    // Canonical text is a fixed point of the canonicalizer.
    const std::string text = canonical_text(sample.insns);
    CanonicalFunction again = canonicalize(parse_canonical_lines(text), {});
    CHECK(canonical_text(again.insns) == text);
    CHECK(again.literals.empty());
  }
}

TEST_CASE("multi-function programs compile and sample per function") {
  Program program = parse_c(
      "int helper() { return 4; }\n\nint main() { int r; r = 2; return r; }\n");
  const std::string asm_text = reference_codegen(program);
  CorpusSample helper = make_sample(program.functions[0], asm_text, "ref");
  CorpusSample main_fn = make_sample(program.functions[1], asm_text, "ref");
  CHECK(helper.lines.size() == 1);
  CHECK(main_fn.lines.size() == 2);
}

TEST_CASE("samples reject assembly that cannot be aligned") {
  Program program = single(kStraightLine);

  SUBCASE("missing function") {
    CHECK_THROWS_WITH_AS(make_sample(program.functions[0], "\t.text\nother:\n\tret\n", "ref"),
                         doctest::Contains("lacks function"), SeamError);
  }
  SUBCASE("missing line info") {
    const char* no_loc = "\t.text\nmain:\n\tpush\trbp\n\tret\n";
    CHECK_THROWS_AS(make_sample(program.functions[0], no_loc, "ref"), SeamError);
  }
  SUBCASE("segment drift") {
    // One statement group too few: the loop body line is missing its marker.
    const char* drifted =
        "\t.text\nmain:\n\t.loc 1 1 1\n\tpush\trbp\n\t.loc 1 4 1\n\tmov\teax, 5\n"
        "\t.loc 1 7 1\n\tleave\n\tret\n";
    CHECK_THROWS_WITH_AS(make_sample(program.functions[0], drifted, "ref"),
                         doctest::Contains("segments"), SeamError);
  }
}

TEST_CASE("corpus builds deterministically with disjoint splits") {
  CorpusSpec spec;
  spec.seed = 11;
  spec.level = 0;
  spec.functions = 24;
  spec.statements_min = 1;
  spec.statements_max = 2;
  spec.use_gcc = false;

  Corpus a = build_corpus(spec);
  Corpus b = build_corpus(spec);

  CHECK(a.stats.generated == 24);
  CHECK(a.train.size() + a.val.size() + a.test.size() + a.stats.duplicates == 24);
  CHECK(!a.train.empty());

  auto keys = [](const Corpus& corpus) {
    std::vector<std::string> out;
    for (const auto* split : {&corpus.train, &corpus.val, &corpus.test}) {
      for (const CorpusSample& sample : *split) {
        out.push_back(canonical_text(sample.insns) + seam_lines_text(sample.lines));
      }
    }
    return out;
  };
  const std::vector<std::string> key_list = keys(a);
  CHECK(key_list == keys(b));

  std::set<std::string> unique(key_list.begin(), key_list.end());
  CHECK(unique.size() == key_list.size());

  // Even kind mix before dedup: every fourth draw is the same family.
  int kind_counts[4] = {0, 0, 0, 0};
  for (const auto* split : {&a.train, &a.val, &a.test}) {
    for (const CorpusSample& sample : *split) kind_counts[static_cast<int>(sample.kind)]++;
  }
  int represented = 0;
  for (int count : kind_counts) represented += count > 0 ? 1 : 0;
  CHECK(represented == 4);
}

TEST_CASE("corpus rows round-trip through the JSONL form") {
  CorpusSpec spec;
  spec.seed = 3;
  spec.functions = 8;
  spec.level = 1;
  spec.use_gcc = false;
  Corpus corpus = build_corpus(spec);
  REQUIRE(!corpus.train.empty());

  const std::filesystem::path path =
      std::filesystem::temp_directory_path() / "seam-corpus-roundtrip.jsonl";
  write_corpus_jsonl(path, corpus.train);
  std::vector<CorpusSample> loaded = load_corpus_jsonl(path);
  std::remove(path.string().c_str());

  REQUIRE(loaded.size() == corpus.train.size());
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    const CorpusSample& x = corpus.train[i];
    const CorpusSample& y = loaded[i];
    CHECK(x.backend == y.backend);
    CHECK(x.seed == y.seed);
    CHECK(x.level == y.level);
    CHECK(x.kind == y.kind);
    CHECK(x.source == y.source);
    CHECK(canonical_text(x.insns) == canonical_text(y.insns));
    CHECK(x.boundary == y.boundary);
    CHECK(seam_lines_text(x.lines) == seam_lines_text(y.lines));
    CHECK(x.raw_lines == y.raw_lines);
    CHECK(literal_texts(x.asm_literals) == literal_texts(y.asm_literals));
    CHECK(literal_texts(x.sc_literals) == literal_texts(y.sc_literals));
    REQUIRE(x.renaming.vars.size() == y.renaming.vars.size());
    for (std::size_t v = 0; v < x.renaming.vars.size(); ++v) {
      CHECK(x.renaming.vars[v].original == y.renaming.vars[v].original);
      CHECK(x.renaming.vars[v].type == y.renaming.vars[v].type);
      CHECK(x.renaming.vars[v].global_index == y.renaming.vars[v].global_index);
      CHECK(x.renaming.vars[v].index_within_type == y.renaming.vars[v].index_within_type);
    }
    CHECK(x.renaming.call_names == y.renaming.call_names);
    CHECK(x.renaming.function_name == y.renaming.function_name);
    // Jump metadata survives the text form.
    for (std::size_t k = 0; k < x.insns.size(); ++k) {
      CHECK(x.insns[k].jump_up == y.insns[k].jump_up);
      CHECK(x.insns[k].is_conditional == y.insns[k].is_conditional);
    }
  }
}

TEST_CASE("position table counts a hand-checked function") {
  Function fn = parse_single_function(R"(int f() {
    int i;
    int n;
    int sum;
    i = 0;
    sum = 0;
    while (i < n) {
        sum = sum + i;
        i = i + 1;
    }
    if (sum > 10) {
        sum = 10;
    }
    return sum;
}
)");
  std::map<std::string, PositionVector> counts = count_positions(fn);
  REQUIRE(counts.size() == 3);

  PositionVector i_expected{};
  i_expected[kLoopCounterPos] = 1;
  i_expected[kLoopCondPos] = 1;
  i_expected[operator_before_position("<")] = 1;   // i < n
  i_expected[operator_after_position("+")] = 1;    // sum + i
  i_expected[operator_before_position("+")] = 1;   // i + 1
  CHECK(counts.at("i") == i_expected);

  PositionVector n_expected{};
  n_expected[kLoopCondPos] = 1;
  n_expected[operator_after_position("<")] = 1;
  CHECK(counts.at("n") == n_expected);

  PositionVector sum_expected{};
  sum_expected[operator_before_position("+")] = 1;  // sum + i
  sum_expected[kIfCondPos] = 1;
  sum_expected[operator_before_position(">")] = 1;  // sum > 10
  sum_expected[kReturnPos] = 1;
  CHECK(counts.at("sum") == sum_expected);
}

TEST_CASE("position tables aggregate and round-trip") {
  std::vector<std::string> sources = {
      "int f() { int i; int n; i = 0; while (i < n) { i = i + 1; } return i; }",
      "int g() { int i; i = 2; return i; }",
  };
  PositionTable table = collect_position_stats_from_sources(sources);
  CHECK(table.functions == 2);
  CHECK(table.counts.at("i")[kReturnPos] == 2);
  CHECK(table.counts.at("i")[kLoopCounterPos] == 1);
  CHECK(table.counts.at("n")[kLoopCondPos] == 1);

  const std::filesystem::path path =
      std::filesystem::temp_directory_path() / "seam-positions-roundtrip.json";
  save_position_table(path, table);
  PositionTable loaded = load_position_table(path);
  std::remove(path.string().c_str());
  CHECK(loaded.functions == table.functions);
  CHECK(loaded.counts == table.counts);
}

TEST_CASE("external compiler backend agrees on segment counts") {
  if (!compiler_available()) {
    MESSAGE("external compiler unavailable; skipping backend comparison");
    return;
  }

  for (const char* source : {kStraightLine, kLoop, kBranch}) {
    Program program = single(source);
    CompileResult compiled = compile_to_asm(source);
    REQUIRE_MESSAGE(compiled.ok, compiled.diagnostics);
    CorpusSample external = make_sample(program.functions[0], compiled.asm_text, "gcc");
    CorpusSample reference = ref_sample(source);
    CHECK(external.lines.size() == reference.lines.size());
    int bits = 0;
    for (int b : external.boundary) bits += b;
    CHECK(static_cast<std::size_t>(bits) == external.lines.size());
  }

  // A small randomized sweep over simple levels.
  int built = 0;
  for (std::uint64_t seed = 100; seed < 112; ++seed) {
    GenSpec spec;
    spec.kind = static_cast<StmtKind>(seed % 4);
    spec.level = static_cast<int>(seed % 2);
    spec.seed = seed;
    spec.statement_count = 1 + static_cast<int>(seed % 2);
    Function fn = gen_random_program(spec);
    CompileResult compiled = compile_to_asm(print_function(fn));
    REQUIRE_MESSAGE(compiled.ok, compiled.diagnostics);
    CorpusSample external = make_sample(fn, compiled.asm_text, "gcc");
    CHECK(external.lines.size() == translation_view(lower_ast(fn).lines).size());
    ++built;
  }
  CHECK(built == 12);
}

TEST_CASE("corpus builder records external backend statistics") {
  if (!compiler_available()) {
    MESSAGE("external compiler unavailable; skipping gcc corpus smoke");
    return;
  }
  CorpusSpec spec;
  spec.seed = 21;
  spec.functions = 8;
  spec.level = 0;
  spec.use_gcc = true;
  Corpus corpus = build_corpus(spec);
  CHECK(corpus.stats.gcc_built + corpus.stats.gcc_rejected + corpus.stats.gcc_failed +
            corpus.stats.duplicates ==
        8);
  CHECK(corpus.stats.gcc_built > 0);
  int gcc_samples = 0;
  for (const auto* split : {&corpus.train, &corpus.val, &corpus.test}) {
    for (const CorpusSample& sample : *split) {
      if (sample.backend == "gcc") ++gcc_samples;
    }
  }
  CHECK(gcc_samples == corpus.stats.gcc_built);
}
