#include "bintran/reassemble.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <set>

#include "asmtext/asm_parser.hpp"
#include "common/error.hpp"
#include "csubset/ast.hpp"

namespace seam {

namespace {

bool is_forward_jmp(const CanonicalInstruction& insn) {
  return !insn.is_conditional && insn.jump_up.has_value() && *insn.jump_up &&
         insn.jump_target.has_value();
}

int arg_register_index(const std::string& token) {
  const std::string family = register_family(token);
  if (family == "rdi") return 0;
  if (family == "rsi") return 1;
  if (family == "rdx") return 2;
  if (family == "rcx") return 3;
  return -1;
}

bool writes_accumulator(const CanonicalInstruction& insn) {
  return (insn.mnemonic == "xor" || insn.mnemonic == "mov") && !insn.tokens.empty() &&
         register_family(insn.tokens.front()) == "rax";
}

}  // namespace

std::vector<std::pair<int, int>> boundary_ranges(const std::vector<int>& bits) {
  std::vector<std::pair<int, int>> ranges;
  int begin = 0;
  for (int i = 0; i < static_cast<int>(bits.size()); ++i) {
    const bool closes = bits[static_cast<std::size_t>(i)] != 0 ||
                        i + 1 == static_cast<int>(bits.size());
    if (closes) {
      ranges.emplace_back(begin, i + 1);
      begin = i + 1;
    }
  }
  return ranges;
}

std::vector<FrameSlot> collect_frame_slots(const std::vector<CanonicalInstruction>& insns) {
  std::map<int, int> widths;  // offset -> widest reference
  for (const CanonicalInstruction& insn : insns) {
    const auto& toks = insn.tokens;
    for (std::size_t i = 0; i + 3 < toks.size(); ++i) {
      if (toks[i] != "[" || toks[i + 1] != "rbp" || toks[i + 2] != "-" || !looks_numeric(toks[i + 3])) {
        continue;
      }
      int width = 4;
      if (i >= 2 && toks[i - 2] == "QWORD") width = 8;
      const int offset = std::stoi(toks[i + 3]);
      auto [it, fresh] = widths.emplace(offset, width);
      if (!fresh) it->second = std::max(it->second, width);
    }
  }
  std::vector<FrameSlot> slots;
  slots.reserve(widths.size());
  for (const auto& [offset, width] : widths) slots.push_back({offset, width});
  return slots;  // std::map iterates in ascending offset order
}

std::optional<int> implied_arg_count(const std::vector<std::string>& payload) {
  int depth = 0;
  for (const std::string& tok : payload) {
    if (tok == "=" || is_structural_token(tok)) return std::nullopt;
    if (tok == "!") {
      if (depth < 1) return std::nullopt;
    } else if (find_binary_op(tok) != nullptr) {
      if (depth < 2) return std::nullopt;
      --depth;
    } else {
      ++depth;
    }
  }
  return depth;
}

ArgCountGuess infer_call_arg_count(const std::vector<CanonicalInstruction>& insns, int call_idx) {
  ArgCountGuess guess;
  std::vector<bool> seen(4, false);
  int j = call_idx - 1;
  // The zeroed vector-register count (xor eax / mov eax, 0) sits between the
  // argument loads and the call; step over accumulator writes first.
  while (j >= 0 && writes_accumulator(insns[static_cast<std::size_t>(j)])) --j;
  for (; j >= 0; --j) {
    const CanonicalInstruction& insn = insns[static_cast<std::size_t>(j)];
    if (insn.mnemonic != "pop" && insn.mnemonic != "mov" && insn.mnemonic != "lea") break;
    if (insn.tokens.empty()) break;
    const int reg = arg_register_index(insn.tokens.front());
    if (reg < 0) break;
    seen[static_cast<std::size_t>(reg)] = true;
  }
  for (bool s : seen) {
    if (s) ++guess.count;
  }
  for (int r = 0; r < guess.count; ++r) {
    if (!seen[static_cast<std::size_t>(r)]) guess.contiguous = false;
  }
  return guess;
}

namespace {

struct Frame {
  std::int64_t close_at = 0;
  bool in_else = false;
};

class Reassembler {
 public:
  Reassembler(const std::vector<CanonicalInstruction>& insns,
              const std::vector<std::pair<int, int>>& segments,
              const std::vector<SeamLine>& translated)
      : insns_(insns), segments_(segments), translated_(translated) {}

  ReassembledFunction run() {
    validate();
    seg_of_.resize(insns_.size());
    for (std::size_t k = 0; k < segments_.size(); ++k) {
      for (int i = segments_[k].first; i < segments_[k].second; ++i) {
        seg_of_[static_cast<std::size_t>(i)] = static_cast<int>(k);
      }
    }
    for (const CanonicalInstruction& insn : insns_) {
      if (!insn.is_conditional && insn.jump_up.has_value() && !*insn.jump_up &&
          insn.jump_target.has_value()) {
        loop_tops_.insert(*insn.jump_target);
      }
    }

    for (const FrameSlot& slot : collect_frame_slots(insns_)) {
      const int index = static_cast<int>(out_.lines.size());
      out_.lines.push_back(
          {"DECL", {slot.width == 8 ? "T_LONG" : "T_INT", var_token(index)}});
    }

    for (std::size_t k = 0; k < segments_.size(); ++k) {
      const auto [begin, end] = segments_[k];
      close_frames(insns_[static_cast<std::size_t>(begin)].address);
      emit_segment(static_cast<int>(k), begin, end);
    }
    close_frames(std::numeric_limits<std::int64_t>::max());
    return std::move(out_);
  }

 private:
  const std::vector<CanonicalInstruction>& insns_;
  const std::vector<std::pair<int, int>>& segments_;
  const std::vector<SeamLine>& translated_;
  std::vector<int> seg_of_;
  std::set<std::int64_t> loop_tops_;
  std::vector<Frame> frames_;
  ReassembledFunction out_;

  void validate() const {
    if (insns_.empty()) raise(ErrorKind::Validate, "cannot reassemble an empty function");
    if (segments_.size() != translated_.size()) {
      raise(ErrorKind::Validate, "segment count (" + std::to_string(segments_.size()) +
                                     ") does not match translation count (" +
                                     std::to_string(translated_.size()) + ")");
    }
    int expect = 0;
    for (const auto& [begin, end] : segments_) {
      if (begin != expect || end <= begin) {
        raise(ErrorKind::Validate, "segments do not partition the instruction range");
      }
      expect = end;
    }
    if (expect != static_cast<int>(insns_.size())) {
      raise(ErrorKind::Validate, "segments do not cover every instruction");
    }
    for (std::size_t k = 0; k < translated_.size(); ++k) {
      if (translated_[k].kind.empty()) {
        raise(ErrorKind::Parse, "translation of segment " + std::to_string(k) + " is empty");
      }
    }
  }

  void note(const std::string& text) { out_.notes.push_back(text); }

  // First instruction index at or past the address.
  int index_at(std::int64_t address) const {
    int lo = 0, hi = static_cast<int>(insns_.size());
    while (lo < hi) {
      const int mid = (lo + hi) / 2;
      if (insns_[static_cast<std::size_t>(mid)].address < address) {
        lo = mid + 1;
      } else {
        hi = mid;
      }
    }
    return lo;
  }

  void close_frames(std::int64_t reached) {
    while (!frames_.empty() && frames_.back().close_at <= reached) {
      const Frame frame = frames_.back();
      frames_.pop_back();
      if (frame.in_else) {
        out_.lines.push_back({"END", {}});
        continue;
      }
      const int j = index_at(frame.close_at) - 1;
      const CanonicalInstruction* cand =
          j >= 0 ? &insns_[static_cast<std::size_t>(j)] : nullptr;
      if (cand != nullptr && is_forward_jmp(*cand) && *cand->jump_target != frame.close_at) {
        // A lone epilogue jump ends a mid-function return; an else-skip jump
        // either follows one inside the same segment or ends a non-return arm.
        const bool ret_arm = translated_[static_cast<std::size_t>(
                                             seg_of_[static_cast<std::size_t>(j)])].kind == "RET";
        const bool second_jmp = j > 0 &&
                                seg_of_[static_cast<std::size_t>(j - 1)] ==
                                    seg_of_[static_cast<std::size_t>(j)] &&
                                is_forward_jmp(insns_[static_cast<std::size_t>(j - 1)]);
        if (ret_arm && !second_jmp) {
          out_.lines.push_back({"END", {}});
        } else {
          out_.lines.push_back({"ELSE", {}});
          frames_.push_back({*cand->jump_target, true});
        }
      } else {
        out_.lines.push_back({"END", {}});
      }
    }
  }

  void emit_segment(int k, int begin, int end) {
    SeamLine line = translated_[static_cast<std::size_t>(k)];
    if (line.kind == "IF" || line.kind == "WHILE") {
      const CanonicalInstruction& last = insns_[static_cast<std::size_t>(end - 1)];
      if (!last.is_conditional || !last.jump_up.has_value() || !*last.jump_up ||
          !last.jump_target.has_value()) {
        raise(ErrorKind::Parse, "segment " + std::to_string(k) + " translated as " + line.kind +
                                    " does not end in a forward conditional branch");
      }
      // Conditional opens translate as a merged kind; a backward jump landing
      // on this segment's first instruction is what makes it a loop header.
      const bool loops = loop_tops_.count(insns_[static_cast<std::size_t>(begin)].address) > 0;
      line.kind = loops ? "WHILE" : "IF";
      if (!loops) frames_.push_back({*last.jump_target, false});
    } else if (line.kind == "CALL") {
      reconcile_call(k, begin, end, line);
    }
    out_.lines.push_back(std::move(line));
  }

  void reconcile_call(int k, int begin, int end, SeamLine& line) {
    int call_idx = -1;
    for (int i = end - 1; i >= begin; --i) {
      if (insns_[static_cast<std::size_t>(i)].is_call) {
        call_idx = i;
        break;
      }
    }
    if (call_idx < 0) {
      note("segment " + std::to_string(k) + ": translated CALL but no call instruction");
      return;
    }
    const ArgCountGuess guess = infer_call_arg_count(insns_, call_idx);
    if (!guess.contiguous) {
      note("segment " + std::to_string(k) + ": argument registers are not an ABI prefix");
    }
    std::vector<std::string> payload(line.tokens.begin() + (line.tokens.empty() ? 0 : 1),
                                     line.tokens.end());
    const std::optional<int> implied =
        line.tokens.empty() || line.tokens[0] != "FUNC" ? std::nullopt
                                                        : implied_arg_count(payload);
    if (!implied.has_value()) {
      // Unusable argument stream: fall back to the register count with
      // variable placeholders, which consume no literals.
      note("segment " + std::to_string(k) + ": malformed call arguments; rebuilt " +
           std::to_string(guess.count) + " from the argument registers");
      line.tokens.assign(1, "FUNC");
      for (int a = 0; a < guess.count; ++a) line.tokens.push_back(var_token(0));
      return;
    }
    if (*implied != guess.count) {
      note("segment " + std::to_string(k) + ": translation carries " + std::to_string(*implied) +
           " argument(s) but the registers suggest " + std::to_string(guess.count) +
           " (low confidence)");
    }
  }
};

}  // namespace

ReassembledFunction reassemble(const std::vector<CanonicalInstruction>& insns,
                               const std::vector<std::pair<int, int>>& segments,
                               const std::vector<SeamLine>& translated) {
  return Reassembler(insns, segments, translated).run();
}

}  // namespace seam
