#include "corpus/builder.hpp"

#include <cctype>
#include <set>
#include <utility>

#include "common/error.hpp"
#include "common/jsonio.hpp"
#include "common/rng.hpp"
#include "corpus/codegen.hpp"
#include "corpus/compile.hpp"
#include "csubset/printer.hpp"
#include "seamcode/normalize.hpp"

namespace seam {

namespace {

void collect_view_lines(const AstNode& block, const LineLayout& layout, int& next_id,
                        std::vector<int>& out) {
  for (const AstNode& stmt : block.children) {
    const int id = next_id++;
    switch (stmt.kind) {
      case NodeKind::Decl:
        break;
      case NodeKind::Assign:
      case NodeKind::Call:
      case NodeKind::Return:
        out.push_back(layout.stmt_line.at(static_cast<std::size_t>(id)));
        break;
      case NodeKind::If:
        out.push_back(layout.stmt_line.at(static_cast<std::size_t>(id)));
        collect_view_lines(stmt.children[1], layout, next_id, out);
        if (stmt.children.size() == 3) collect_view_lines(stmt.children[2], layout, next_id, out);
        break;
      case NodeKind::While:
        out.push_back(layout.stmt_line.at(static_cast<std::size_t>(id)));
        collect_view_lines(stmt.children[1], layout, next_id, out);
        out.push_back(layout.close_line.at(id));
        break;
      default:
        raise(ErrorKind::Validate, "expression node in statement position");
    }
  }
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    lines.push_back(text.substr(pos, eol - pos));
    if (eol == text.size()) break;
    pos = eol + 1;
  }
  return lines;
}

LiteralKind literal_kind_from_name(const std::string& name) {
  if (name == "IMM") return LiteralKind::Imm;
  if (name == "STR") return LiteralKind::Str;
  if (name == "FUNC") return LiteralKind::Func;
  raise(ErrorKind::Parse, "unknown literal kind '" + name + "'");
}

TypeTag type_tag_from_keyword(const std::string& keyword) {
  if (keyword == "int") return TypeTag::Int;
  if (keyword == "long") return TypeTag::Long;
  if (keyword == "unsigned") return TypeTag::Unsigned;
  raise(ErrorKind::Parse, "unknown type keyword '" + keyword + "'");
}

Json literals_to_json(const std::vector<SeamLiteral>& literals) {
  Json rows = Json::array();
  for (const SeamLiteral& lit : literals) {
    rows.push_back(Json::array({literal_kind_name(lit.kind), lit.text}));
  }
  return rows;
}

std::vector<SeamLiteral> literals_from_json(const Json& rows) {
  std::vector<SeamLiteral> out;
  for (const Json& row : rows) {
    out.push_back({literal_kind_from_name(row.at(0).get<std::string>()),
                   row.at(1).get<std::string>()});
  }
  return out;
}

Json sample_to_json(const CorpusSample& sample) {
  Json row;
  row["backend"] = sample.backend;
  row["seed"] = sample.seed;
  row["level"] = sample.level;
  row["kind"] = stmt_kind_name(sample.kind);
  row["name"] = sample.name;
  row["source"] = sample.source;
  Json insns = Json::array();
  for (const CanonicalInstruction& insn : sample.insns) insns.push_back(canonical_line(insn));
  row["insns"] = std::move(insns);
  row["bits"] = sample.boundary;
  Json lines = Json::array();
  for (const SeamLine& line : sample.lines) lines.push_back(seam_line_flat(line));
  row["lines"] = std::move(lines);
  row["raw"] = sample.raw_lines;
  row["lits"] = literals_to_json(sample.asm_literals);
  row["sc_lits"] = literals_to_json(sample.sc_literals);
  Json vars = Json::array();
  for (const RenameEntry& entry : sample.renaming.vars) {
    vars.push_back(Json::array({entry.original, type_tag_keyword(entry.type), entry.global_index,
                                entry.index_within_type}));
  }
  row["ren"] = Json{{"vars", std::move(vars)},
                    {"calls", sample.renaming.call_names},
                    {"fn", sample.renaming.function_name}};
  return row;
}

CorpusSample sample_from_json(const Json& row) {
  CorpusSample sample;
  sample.backend = row.at("backend").get<std::string>();
  sample.seed = row.at("seed").get<std::uint64_t>();
  sample.level = row.at("level").get<int>();
  sample.kind = stmt_kind_from_name(row.at("kind").get<std::string>());
  sample.name = row.at("name").get<std::string>();
  sample.source = row.at("source").get<std::string>();

  std::string canon_text;
  for (const Json& line : row.at("insns")) {
    canon_text += line.get<std::string>();
    canon_text += '\n';
  }
  // Re-canonicalizing placeholder text is the identity; it only rebuilds the
  // structured form (jump directions, operand groups). Line info and absolute
  // jump targets are not persisted — training needs neither.
  CanonicalFunction canon = canonicalize(parse_canonical_lines(canon_text), {});
  sample.insns = std::move(canon.insns);

  sample.boundary = row.at("bits").get<std::vector<int>>();
  for (const Json& flat : row.at("lines")) {
    SeamLine line;
    line.kind = flat.at(0).get<std::string>();
    for (std::size_t i = 1; i < flat.size(); ++i) {
      line.tokens.push_back(flat.at(i).get<std::string>());
    }
    sample.lines.push_back(std::move(line));
  }
  sample.raw_lines = row.at("raw").get<std::vector<std::vector<std::string>>>();
  sample.asm_literals = literals_from_json(row.at("lits"));
  sample.sc_literals = literals_from_json(row.at("sc_lits"));
  const Json& ren = row.at("ren");
  for (const Json& var : ren.at("vars")) {
    RenameEntry entry;
    entry.original = var.at(0).get<std::string>();
    entry.type = type_tag_from_keyword(var.at(1).get<std::string>());
    entry.global_index = var.at(2).get<int>();
    entry.index_within_type = var.at(3).get<int>();
    sample.renaming.vars.push_back(std::move(entry));
  }
  sample.renaming.call_names = ren.at("calls").get<std::vector<std::string>>();
  sample.renaming.function_name = ren.at("fn").get<std::string>();
  return sample;
}

std::string dedup_key(const CorpusSample& sample) {
  return canonical_text(sample.insns) + "==\n" + seam_lines_text(sample.lines);
}

}  // namespace

std::vector<int> view_source_lines(const Function& fn, const LineLayout& layout) {
  std::vector<int> out;
  int next_id = 0;
  collect_view_lines(fn.body, layout, next_id, out);
  return out;
}

std::vector<std::string> lex_c_line(const std::string& line) {
  static const std::vector<std::string> kTwoChar = {"<<", ">>", "<=", ">=",
                                                    "==", "!=", "&&", "||"};
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    const char c = line[i];
    if (c == ' ' || c == '\t') {
      ++i;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < line.size() && (std::isalnum(static_cast<unsigned char>(line[j])) ||
                                 line[j] == '_')) {
        ++j;
      }
      tokens.push_back(line.substr(i, j - i));
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < line.size() && std::isalnum(static_cast<unsigned char>(line[j]))) ++j;
      tokens.push_back("IMM");  // numeric spelling (decimal or hex) is a literal
      i = j;
      continue;
    }
    if (c == '"') {
      std::size_t j = i + 1;
      while (j < line.size() && !(line[j] == '"' && line[j - 1] != '\\')) ++j;
      if (j >= line.size()) raise(ErrorKind::Parse, "unterminated string literal: " + line);
      tokens.push_back("STR");
      i = j + 1;
      continue;
    }
    bool matched = false;
    if (i + 1 < line.size()) {
      const std::string pair = line.substr(i, 2);
      for (const std::string& op : kTwoChar) {
        if (pair == op) {
          tokens.push_back(op);
          i += 2;
          matched = true;
          break;
        }
      }
    }
    if (matched) continue;
    tokens.push_back(std::string(1, c));
    ++i;
  }
  return tokens;
}

std::vector<std::vector<std::string>> raw_view(const Function& fn) {
  NormalizedFunction normalized = normalize_identifiers(fn);
  PrintedFunction printed = print_function_with_layout(normalized.ast);
  const std::vector<int> source_lines = view_source_lines(normalized.ast, printed.layout);
  const std::vector<std::string> text_lines = split_lines(printed.text);
  std::vector<std::vector<std::string>> out;
  for (int line_no : source_lines) {
    out.push_back(lex_c_line(text_lines.at(static_cast<std::size_t>(line_no - 1))));
  }
  return out;
}

CorpusSample make_sample(const Function& fn, const std::string& asm_text,
                         const std::string& backend) {
  ParsedAsm parsed = parse_asm(asm_text);
  const AsmFunction* target = nullptr;
  for (const AsmFunction& candidate : parsed.functions) {
    if (candidate.name == fn.name) target = &candidate;
  }
  if (target == nullptr) {
    raise(ErrorKind::Corpus, "assembly lacks function '" + fn.name + "'");
  }

  CoreBody core;
  try {
    core = strip_frame(target->insns);
  } catch (const SeamError& err) {
    raise(ErrorKind::Corpus, err.what());
  }

  CanonicalFunction canon = canonicalize(core.insns, parsed.strings);
  LoweredFunction lowered = lower_ast(fn);
  std::vector<SeamLine> view = translation_view(lowered.lines);

  int segments = 0;
  for (int bit : core.boundary) segments += bit;
  if (static_cast<std::size_t>(segments) != view.size()) {
    raise(ErrorKind::Corpus, "assembly has " + std::to_string(segments) +
                                 " segments for " + std::to_string(view.size()) + " IL lines");
  }

  if (backend == "ref") {
    // The reference backend guarantees placeholder fidelity; any drift is a
    // pipeline bug, not a property of the input.
    std::vector<SeamLiteral> data_literals;
    for (const SeamLiteral& lit : canon.literals) {
      if (lit.kind != LiteralKind::Func) data_literals.push_back(lit);
    }
    bool same = data_literals.size() == lowered.literals.size();
    for (std::size_t i = 0; same && i < data_literals.size(); ++i) {
      same = data_literals[i].kind == lowered.literals[i].kind &&
             data_literals[i].text == lowered.literals[i].text;
    }
    if (!same) raise(ErrorKind::Corpus, "harvested literals drifted from the IL's");
    if (!leaked_literals(canon.insns).empty()) {
      raise(ErrorKind::Corpus, "literal leakage in canonicalized body");
    }
  }

  CorpusSample sample;
  sample.backend = backend;
  sample.name = fn.name;
  sample.source = print_function(fn);
  sample.insns = std::move(canon.insns);
  sample.boundary = std::move(core.boundary);
  sample.lines = std::move(view);
  sample.raw_lines = raw_view(fn);
  if (sample.raw_lines.size() != sample.lines.size()) {
    raise(ErrorKind::Corpus, "raw view does not align with the translation view");
  }
  sample.asm_literals = std::move(canon.literals);
  sample.sc_literals = std::move(lowered.literals);
  sample.renaming = std::move(lowered.renaming);
  return sample;
}

Corpus build_corpus(const CorpusSpec& spec) {
  if (spec.functions < 1) raise(ErrorKind::Config, "corpus needs at least one function");
  if (spec.val_fraction < 0 || spec.test_fraction < 0 ||
      spec.val_fraction + spec.test_fraction >= 1.0) {
    raise(ErrorKind::Config, "split fractions must be nonnegative and sum below 1");
  }

  static const StmtKind kKinds[4] = {StmtKind::Expression, StmtKind::If, StmtKind::While,
                                     StmtKind::Call};
  Rng rng(spec.seed);
  Corpus corpus;
  std::set<std::string> seen;
  std::vector<std::vector<CorpusSample>> grouped;  // renderings of one function stay together
  const bool gcc_ok = spec.use_gcc && compiler_available();

  for (int i = 0; i < spec.functions; ++i) {
    GenSpec gen;
    gen.kind = kKinds[i % 4];
    gen.level = spec.level;
    gen.seed = rng.next();
    gen.statement_count = static_cast<int>(rng.range(spec.statements_min, spec.statements_max));
    gen.allow_unsigned = spec.allow_unsigned;
    Function fn = gen_random_program(gen);
    ++corpus.stats.generated;

    Program program;
    program.functions.push_back(fn);
    CorpusSample sample = make_sample(fn, reference_codegen(program), "ref");
    sample.seed = gen.seed;
    sample.level = gen.level;
    sample.kind = gen.kind;
    if (!seen.insert(dedup_key(sample)).second) {
      ++corpus.stats.duplicates;
      continue;
    }

    std::vector<CorpusSample> group;
    group.push_back(std::move(sample));
    if (gcc_ok) {
      CompileResult compiled = compile_to_asm(group.front().source);
      if (!compiled.ok) {
        ++corpus.stats.gcc_failed;
      } else {
        try {
          CorpusSample external = make_sample(fn, compiled.asm_text, "gcc");
          external.seed = gen.seed;
          external.level = gen.level;
          external.kind = gen.kind;
          group.push_back(std::move(external));
          ++corpus.stats.gcc_built;
        } catch (const SeamError&) {
          ++corpus.stats.gcc_rejected;
        }
      }
    }
    grouped.push_back(std::move(group));
  }

  rng.shuffle(grouped);
  const std::size_t n = grouped.size();
  std::size_t n_test = static_cast<std::size_t>(static_cast<double>(n) * spec.test_fraction + 0.5);
  std::size_t n_val = static_cast<std::size_t>(static_cast<double>(n) * spec.val_fraction + 0.5);
  while (n > 0 && n_test + n_val >= n) {  // training split always keeps at least one function
    if (n_test >= n_val && n_test > 0) {
      --n_test;
    } else if (n_val > 0) {
      --n_val;
    } else {
      break;
    }
  }
  for (std::size_t g = 0; g < grouped.size(); ++g) {
    std::vector<CorpusSample>* split = &corpus.train;
    if (g < n_test) {
      split = &corpus.test;
    } else if (g < n_test + n_val) {
      split = &corpus.val;
    }
    for (CorpusSample& sample : grouped[g]) split->push_back(std::move(sample));
  }
  return corpus;
}

void write_corpus_jsonl(const std::filesystem::path& path,
                        const std::vector<CorpusSample>& rows) {
  std::vector<Json> out;
  out.reserve(rows.size());
  for (const CorpusSample& sample : rows) out.push_back(sample_to_json(sample));
  save_jsonl_file(path, out);
}

std::vector<CorpusSample> load_corpus_jsonl(const std::filesystem::path& path) {
  std::vector<CorpusSample> rows;
  for_each_jsonl_row(path, [&rows](const Json& row, std::size_t) {
    rows.push_back(sample_from_json(row));
  });
  return rows;
}

std::vector<LinePair> line_pairs(const CorpusSample& sample) {
  std::vector<LinePair> pairs;
  std::vector<CanonicalInstruction> segment;
  std::size_t k = 0;
  for (std::size_t i = 0; i < sample.insns.size(); ++i) {
    segment.push_back(sample.insns[i]);
    if (sample.boundary.at(i) == 1) {
      if (k >= sample.lines.size()) {
        raise(ErrorKind::Corpus, "more segments than IL lines in sample");
      }
      LinePair pair;
      pair.segment = std::move(segment);
      pair.target = seam_line_flat(sample.lines[k]);
      // An if header and a loop header compile to the same segment shape
      // (condition eval + forward conditional branch); only the closing jump
      // elsewhere in the function tells them apart.  Train one merged kind and
      // let reassembly pick IF or WHILE from the jump directions.
      if (pair.target.at(0) == "WHILE") pair.target[0] = "IF";
      pair.raw_target = sample.raw_lines.at(k);
      pairs.push_back(std::move(pair));
      segment.clear();
      ++k;
    }
  }
  if (k != sample.lines.size() || !segment.empty()) {
    raise(ErrorKind::Corpus, "segment stream does not close every IL line");
  }
  return pairs;
}

}  // namespace seam
