#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "csubset/ast.hpp"

namespace seam {

// The 26 syntactic positions used for name placement:
//   0      loop counter (assigned in the last loop-body statement and read in
//          the loop condition)
//   1      inside a while condition
//   2      inside an if condition
//   3..24  immediate left/right operand of one of the 11 tracked operators
//   25     inside a return expression
inline constexpr int kPositionCount = 26;
inline constexpr int kLoopCounterPos = 0;
inline constexpr int kLoopCondPos = 1;
inline constexpr int kIfCondPos = 2;
inline constexpr int kReturnPos = 25;

using PositionVector = std::array<std::int64_t, kPositionCount>;

// The tracked operators in index order; operator k owns positions 3+2k
// (before) and 4+2k (after).
const std::vector<std::string>& position_operators();

// -1 when the operator is untracked (shifts, bitwise, logical).
int operator_before_position(const std::string& op);
int operator_after_position(const std::string& op);

std::string position_name(int index);

// Counts, per variable name, how often it occupies each position in `fn`.
// Every declared or referenced variable gets an entry (possibly all-zero).
std::map<std::string, PositionVector> count_positions(const Function& fn);

}  // namespace seam
