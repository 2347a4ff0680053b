#include <doctest.h>

#include <string>
#include <vector>

#include "asmtext/asm_parser.hpp"
#include "asmtext/canonicalize.hpp"
#include "common/error.hpp"

using namespace seam;

namespace {

// Constant-divisor division as GCC -O0 emits it: the divisor is strength-
// reduced to a multiply by a magic number; no div instruction appears.
const char* kMagicDivision = R"(	.text
qdiv:
	mov     eax, DWORD PTR [rbp-4]
	movsx   rdx, eax
	imul    rdx, rdx, 1431655766
	shr     rdx, 32
	sar     eax, 31
	mov     ecx, edx
	sub     ecx, eax
	mov     eax, ecx
	mov     DWORD PTR [rbp-8], eax
)";

CanonicalFunction canon_of(const std::string& text) {
  ParsedAsm parsed = parse_asm(text);
  REQUIRE(parsed.functions.size() == 1);
  return canonicalize(parsed.functions[0].insns, parsed.strings);
}

}  // namespace

TEST_CASE("operand tokenization keeps brackets and PTR, splits displacements") {
  ParsedAsm parsed = parse_asm(".text\nf:\n\tmov eax, DWORD PTR [rbp-4]\n");
  REQUIRE(parsed.functions.size() == 1);
  REQUIRE(parsed.functions[0].insns.size() == 1);
  const AsmInstruction& insn = parsed.functions[0].insns[0];
  CHECK(insn.mnemonic == "mov");
  std::vector<std::string> expected = {"eax", "DWORD", "PTR", "[", "rbp", "-", "4", "]"};
  CHECK(insn.operands == expected);
  CHECK(insn.group_lens == std::vector<int>{1, 7});
}

TEST_CASE("magic-division sequence canonicalizes with exactly one IMM") {
  CanonicalFunction canon = canon_of(kMagicDivision);
  REQUIRE(canon.insns.size() == 9);

  int imm_tokens = 0;
  for (const CanonicalInstruction& insn : canon.insns) {
    for (const std::string& tok : insn.tokens) {
      if (tok == "IMM") ++imm_tokens;
    }
  }
  CHECK(imm_tokens == 1);
  REQUIRE(canon.literals.size() == 1);
  CHECK(canon.literals[0].kind == LiteralKind::Imm);
  CHECK(canon.literals[0].text == "1431655766");

  CHECK(canonical_line(canon.insns[2]) == "imul rdx , rdx , IMM");
  // Shift counts identify the operation, not program data: they stay.
  CHECK(canonical_line(canon.insns[3]) == "shr rdx , 32");
  CHECK(canonical_line(canon.insns[4]) == "sar eax , 31");
  CHECK(leaked_literals(canon.insns).empty());
}

TEST_CASE("jump targets become UP or DOWN by address comparison") {
  const char* text = R"(.text
f:
	cmp eax, 0
	jge .L2
	mov eax, 1
.L2:
	mov edx, 2
	jl .L2
	jmp .L3
.L3:
	ret
)";
  ParsedAsm parsed = parse_asm(text);
  const std::vector<AsmInstruction>& insns = parsed.functions.at(0).insns;
  CHECK(insns[1].jump_target == 3);  // .L2 resolves to the instruction after it
  CHECK(insns[4].jump_target == 3);

  CanonicalFunction canon = canonicalize(insns, parsed.strings);
  CHECK(canon.insns[1].tokens == std::vector<std::string>{"UP"});     // 1 -> 3
  CHECK(canon.insns[4].tokens == std::vector<std::string>{"DOWN"});   // 4 -> 3
  CHECK(canon.insns[5].tokens == std::vector<std::string>{"UP"});     // 5 -> 6
  CHECK(canon.insns[1].jump_up == true);
  CHECK(canon.insns[4].jump_up == false);

  // Brute-force oracle: every branch direction equals the address comparison.
  for (std::size_t i = 0; i < insns.size(); ++i) {
    if (!insns[i].is_jump) continue;
    bool forward = insns[i].address < *insns[i].jump_target;
    CHECK(canon.insns[i].jump_up == forward);
  }
}

TEST_CASE("string references resolve through the rodata table") {
  const char* text = R"(	.section	.rodata
.LC0:
	.string	"You Win!"
	.text
f:
	mov	edi, OFFSET FLAT:.LC0
	call	puts
	lea	rax, [rip+.LC0]
)";
  CanonicalFunction canon = canon_of(text);
  CHECK(canonical_line(canon.insns[0]) == "mov edi , STR");
  CHECK(canonical_line(canon.insns[1]) == "call FUNC");
  CHECK(canonical_line(canon.insns[2]) == "lea rax , [ rip + STR ]");
  REQUIRE(canon.literals.size() == 3);
  CHECK(canon.literals[0].kind == LiteralKind::Str);
  CHECK(canon.literals[0].text == "\"You Win!\"");
  CHECK(canon.literals[1].kind == LiteralKind::Func);
  CHECK(canon.literals[1].text == "puts");
  CHECK(canon.literals[2].text == "\"You Win!\"");
}

TEST_CASE("canonicalization is idempotent on its own text form") {
  CanonicalFunction first = canon_of(kMagicDivision);
  std::string text = canonical_text(first.insns);
  std::vector<AsmInstruction> reparsed = parse_canonical_lines(text);
  AsmStringTable empty;
  CanonicalFunction second = canonicalize(reparsed, empty);
  CHECK(canonical_text(second.insns) == text);
  CHECK(second.literals.empty());  // placeholders are not re-harvested
}

TEST_CASE("debug sections and .loc bookkeeping") {
  const char* text = R"(	.file	"t.c"
	.text
	.globl	main
main:
	.loc 1 1 12
	push	rbp
	.loc 1 3 7
	mov	DWORD PTR [rbp-4], 0
	ret
	.section	.debug_info,"",@progbits
	.long	0x6b
	.uleb128 0x2
	.string	"not code"
	.text
)";
  ParsedAsm parsed = parse_asm(text);
  REQUIRE(parsed.functions.size() == 1);
  const std::vector<AsmInstruction>& insns = parsed.functions[0].insns;
  REQUIRE(insns.size() == 3);
  CHECK(insns[0].line == 1);
  CHECK(insns[1].line == 3);
  CHECK(insns[2].line == 3);  // inherits the active .loc
  CHECK(parsed.strings.entries.empty());
}

TEST_CASE("empty function body parses to an empty list") {
  ParsedAsm parsed = parse_asm(".text\nempty:\nnext:\n\tret\n");
  REQUIRE(parsed.functions.size() == 2);
  CHECK(parsed.functions[0].name == "empty");
  CHECK(parsed.functions[0].insns.empty());
  CHECK(parsed.functions[1].insns.size() == 1);
}

TEST_CASE("parse errors") {
  CHECK_THROWS_WITH_AS(parse_asm(".text\nf:\n\t.bogus 12\n"),
                       doctest::Contains(".bogus"), SeamError);
  CHECK_THROWS_WITH_AS(parse_asm(".text\nf:\n\tjmp .Lmissing\n"),
                       doctest::Contains("unresolvable"), SeamError);
}

TEST_CASE("backfill substitutes placeholders positionally") {
  std::vector<std::string> diagnostics;

  SUBCASE("two IMMs restore in harvest order") {
    std::vector<std::string> tokens = {"mov", "eax", ",", "IMM", ";", "cmp", "eax", ",", "IMM"};
    std::vector<SeamLiteral> literals = {{LiteralKind::Imm, "3"}, {LiteralKind::Imm, "4"}};
    std::vector<std::string> out = backfill(tokens, literals, diagnostics);
    CHECK(out[3] == "3");
    CHECK(out[8] == "4");
    CHECK(diagnostics.empty());
  }
  SUBCASE("zero placeholders is the identity") {
    std::vector<std::string> tokens = {"ret"};
    CHECK(backfill(tokens, {}, diagnostics) == tokens);
    CHECK(diagnostics.empty());
  }
  SUBCASE("surplus placeholders degrade to diagnostics") {
    std::vector<std::string> tokens = {"STR", "IMM"};
    std::vector<SeamLiteral> literals = {{LiteralKind::Str, "\"x\""}};
    std::vector<std::string> out = backfill(tokens, literals, diagnostics);
    CHECK(out[0] == "\"x\"");
    CHECK(out[1] == "IMM");
    REQUIRE(diagnostics.size() == 1);
    CHECK(diagnostics[0].find("IMM") != std::string::npos);
  }
  SUBCASE("harvested literals come back byte-identical") {
    CanonicalFunction canon = canon_of(kMagicDivision);
    std::vector<std::string> flat;
    for (const CanonicalInstruction& insn : canon.insns) {
      flat.push_back(insn.mnemonic);
      flat.insert(flat.end(), insn.tokens.begin(), insn.tokens.end());
    }
    std::vector<std::string> restored = backfill(flat, canon.literals, diagnostics);
    CHECK(diagnostics.empty());
    bool found = false;
    for (const std::string& tok : restored) {
      if (tok == "1431655766") found = true;
      CHECK(tok != "IMM");
    }
    CHECK(found);
  }
}
