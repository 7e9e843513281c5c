#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "haarlab/rational.hpp"

namespace haarlab {

enum class RadixRule { Constant, Cl, NotIdeal, NullMeager };

std::string to_string(RadixRule rule);

// Radix schedule r_i together with the cumulative denominators
// q(i) = r_0 * r_1 * ... * r_i, so digit i carries weight 1/q(i).
//
//   constant(r)      r_i = r
//   cl / not-ideal   r_i = 25 * 3^i            (q(0) = 25)
//   null-meager(k)   r_i = 2n + 3 for k_n <= i < k_{n+1}
//
// Values are immutable; q(i) is memoised in a shared, mutex-guarded cache.
class MixedRadixSystem {
 public:
  static MixedRadixSystem constant(std::int64_t radix);
  static MixedRadixSystem cl();
  static MixedRadixSystem not_ideal();
  // `schedule` lists k_0 = 0 < k_1 < ... ; it is extended past its end with
  // the last increment (or with step 1 when only k_0 is given).
  static MixedRadixSystem null_meager(std::vector<std::int64_t> schedule);

  RadixRule rule() const noexcept { return rule_; }
  std::int64_t constant_radix() const noexcept { return constant_; }
  const std::vector<std::int64_t>& schedule() const noexcept { return schedule_; }
  bool is_constant() const noexcept { return rule_ == RadixRule::Constant; }

  Integer radix(std::size_t level) const;
  // Radix as a machine integer; throws CapacityExceeded past 2^62.
  std::int64_t small_radix(std::size_t level) const;
  const Integer& q(std::size_t level) const;
  // 1 / q(depth - 1): width of a depth-`depth` cell (1 for depth 0).
  Rational cell_width(std::size_t depth) const;
  // Index n of the schedule block containing `level` (null-meager only).
  std::int64_t block_of(std::size_t level) const;
  // k_n of the (extended) null-meager schedule.
  std::int64_t schedule_at(std::size_t n) const;

  std::string describe() const;

  friend bool operator==(const MixedRadixSystem& a, const MixedRadixSystem& b) {
    return a.rule_ == b.rule_ && a.constant_ == b.constant_ && a.schedule_ == b.schedule_;
  }

 private:
  struct Cache;
  MixedRadixSystem(RadixRule rule, std::int64_t constant, std::vector<std::int64_t> schedule);

  RadixRule rule_;
  std::int64_t constant_ = 0;
  std::vector<std::int64_t> schedule_;
  std::shared_ptr<Cache> cache_;
};

Integer q_denominator(const MixedRadixSystem& system, std::size_t level);

struct DigitWord {
  MixedRadixSystem system;
  std::vector<std::int64_t> digits;

  std::size_t size() const noexcept { return digits.size(); }
};

// Throws InvalidDigit when some digit is outside its level's range.
void validate(const DigitWord& word);

// Exact value sum_i x_i / q(i).
Rational eval_word(const DigitWord& word);

// Index p of the depth-k cell [p/q(k-1), (p+1)/q(k-1)] whose left end is the
// word's value.
Integer cell_index(const DigitWord& word);

// Digits of a cell index at the given depth (inverse of cell_index).
DigitWord word_from_cell(const MixedRadixSystem& system, Integer index, std::size_t depth);

// Greedy (floor) expansion of a value in [0, 1) truncated to `depth` digits.
// This is the representative that never ends in a run of maximal digits.
DigitWord expand(const MixedRadixSystem& system, const Rational& value, std::size_t depth);

struct CarryTrace {
  DigitWord result;
  // beta[i] == 1 iff a carry enters level i from level i + 1.
  std::vector<int> beta;
};

// Digitwise addition on a constant-radix system, carried right to left.
// Shorter operand is right-padded with zeros. Throws OverflowBeyondUnit when
// the sum reaches 1 and SystemMismatch for differing systems.
CarryTrace add_with_carry(const DigitWord& a, const DigitWord& d);

// Carry flags defined left to right from the raw digit sums abar_i = a_i + d_i:
// beta_i = 1 when abar_{i+1} exceeds the top digit, otherwise beta_i = 1 iff
// beta_{i+1} = 1 and abar_{i+1} + 1 exceeds it. The last flag is 0 (zero tail).
std::vector<int> carry_flags_from_sums(const std::vector<std::int64_t>& raw_sums, std::int64_t radix);

}  // namespace haarlab
