#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "haarlab/radix.hpp"

namespace haarlab {

// Binary node s = (s_0, ..., s_{n-1}) of the witness tree.
using Branch = std::vector<std::uint8_t>;

// Branches of length n in lexicographic order; index b has bits of b, most
// significant first.
Branch branch_from_index(std::uint64_t index, std::size_t length);
std::uint64_t branch_index(const Branch& s);
std::string to_string(const Branch& s);

// Lexicographic rank/unrank of k-subsets of {0, ..., n-1}.
std::vector<std::uint64_t> unrank_combination(std::uint64_t n, std::uint64_t k, const Integer& rank);
Integer rank_combination(std::uint64_t n, const std::vector<std::uint64_t>& subset);

// Combinatorial recipe shared by the blockwise witnesses: generation n is a
// header followed by C(2^n, T) slots, slot p serving the p-th T-subset of
// branches in lexicographic order.
struct BlockScheme {
  std::size_t tuple_size = 0;
  std::size_t slot_length = 0;
  std::size_t header_length = 0;

  Integer slot_count(std::size_t generation) const;
  Integer generation_length(std::size_t generation) const;
};

// Pattern lookup inside a slot: position of `branch` within the slot's tuple
// (0-based), or -1 when the branch is not a member.
std::int64_t slot_member(std::size_t generation, std::size_t tuple_size, const Integer& slot, std::uint64_t branch);

class WitnessSource {
 public:
  virtual ~WitnessSource() = default;
  virtual std::string name() const = 0;
  virtual const MixedRadixSystem& system() const = 0;
  virtual std::size_t first_generation() const = 0;
  // Levels [block_start(n), block_end(n)) carry the generation-n block.
  virtual Integer block_start(std::size_t generation) const = 0;
  virtual Integer block_end(std::size_t generation) const { return block_start(generation + 1); }
  // Digit at `position` inside the block of node s (generation |s|).
  virtual Integer digit(const Branch& s, const Integer& position) const = 0;
  // Exact contribution of node s; default sums its digit block.
  virtual Rational increment(const Branch& s) const;
  // Strict upper bound for the tail beyond generation n.
  virtual Rational tail_bound(std::size_t generation) const;
};

// Blockwise Cantor set D = { sum_n increment(x|n) : x in 2^omega }. Node
// increments are cached in a write-once map.
class CantorWitness {
 public:
  explicit CantorWitness(std::shared_ptr<const WitnessSource> source);

  std::string name() const { return source_->name(); }
  const MixedRadixSystem& system() const { return source_->system(); }
  std::size_t first_generation() const { return source_->first_generation(); }
  Integer block_start(std::size_t n) const { return source_->block_start(n); }
  Integer block_end(std::size_t n) const { return source_->block_end(n); }
  Integer digit(const Branch& s, const Integer& position) const { return source_->digit(s, position); }
  // Digits of node s; throws CapacityExceeded past `cap` digits.
  std::vector<Integer> block(const Branch& s, std::size_t cap = 1u << 20) const;
  Rational increment(const Branch& s) const;
  // Value of the branch with zero tail after generation |s|.
  Rational branch_value(const Branch& s) const;
  Rational tail_bound(std::size_t generation) const { return source_->tail_bound(generation); }
  const WitnessSource& source() const { return *source_; }

 private:
  struct Cache {
    std::mutex mutex;
    std::map<Branch, Rational> increments;
  };
  std::shared_ptr<const WitnessSource> source_;
  std::shared_ptr<Cache> cache_;
};

struct BranchPoint {
  Branch branch;
  Rational value;
};

std::vector<BranchPoint> generation_points(const CantorWitness& witness, std::size_t generation);
// value_j - value_i for every i < j in lexicographic branch order.
std::vector<Rational> branch_translate_pairs(const CantorWitness& witness, std::size_t generation);

// x-bar and y-bar of the ternary triple scheme.
const std::vector<std::int64_t>& ternary_x_pattern();
const std::vector<std::int64_t>& ternary_y_pattern();

CantorWitness build_ternary_haar2_witness();
// Offsets k_n of the ternary witness.
Integer ternary_offset(std::size_t n);

// Generation -> l, with w_n = m_l. Round robin over `ls` from `first`.
struct WSchedule {
  std::vector<std::int64_t> ls{0};
  std::size_t first = 0;  // 0: first admissible generation of ls[0]

  std::int64_t l_at(std::size_t generation) const;
  static WSchedule constant_m0() { return WSchedule{}; }
};

CantorWitness build_cl_witness(std::int64_t l);
CantorWitness build_notideal_D(const WSchedule& schedule = WSchedule::constant_m0());
CantorWitness build_notideal_E(const WSchedule& schedule = WSchedule::constant_m0());

// m_l = (25 * 3^l - 1) / 2
Integer m_value(std::int64_t l);
// Smallest n with 2^n >= 2 m_l + 2.
std::size_t first_admissible_generation(std::int64_t l);

// Slot layout of the lem2-type witnesses: which slot of generation n serves a
// sorted tuple of branches and at which level its two digits sit.
struct SlotLocation {
  std::size_t generation;
  Integer slot;
  Integer level;  // level of the first slot digit
  std::int64_t l;
};
SlotLocation locate_slot(const CantorWitness& witness, std::size_t generation, const std::vector<std::uint64_t>& tuple);
std::size_t slot_tuple_size(const CantorWitness& witness, std::size_t generation);

// Increment tree d_s of a Cantor set; d_s = 0 unless s ends with 1.
struct IncrementTree {
  std::function<Rational(const Branch&)> d;
  std::size_t max_depth = 256;
  std::string name = "custom";
};

// d_{s^1} = (2/3) * 2 / 3^{|s|+1}: the ternary Cantor set scaled into [0, 2/3].
IncrementTree scaled_ternary_tree();

struct SparseSubCantor {
  CantorWitness witness;
  std::map<Branch, Branch> t;  // s in S -> t_s
};

// Sub-Cantor E of the tree's set whose generation-n increments fall below
// 1 / (2 q(k_{2^{n+1}+1})) (1 / (2 q(k_3)) for the first one).
SparseSubCantor extract_sparse_subcantor(const IncrementTree& tree, const MixedRadixSystem& system,
                                         std::size_t generations);

// Base-3 witness whose generation-n block is zeros ending in s_{n-1}, with the
// given cumulative lengths l_1 < l_2 < ...
CantorWitness build_tail_marker_witness(std::vector<std::int64_t> lengths);

}  // namespace haarlab
