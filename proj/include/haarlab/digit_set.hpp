#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "haarlab/interval.hpp"
#include "haarlab/radix.hpp"

namespace haarlab {

struct DigitRange {
  std::int64_t lo;
  std::int64_t hi;  // inclusive

  friend bool operator==(const DigitRange& a, const DigitRange& b) { return a.lo == b.lo && a.hi == b.hi; }
};

// Allowed digits at one level: everything, an explicit list, or the complement
// of a list, minus any number of forbidden blocks [lo, hi].
class LevelRule {
 public:
  enum class Mode { All, Allowed, Excluded };

  static LevelRule all() { return LevelRule(Mode::All, {}); }
  static LevelRule allowed(std::vector<std::int64_t> digits) { return LevelRule(Mode::Allowed, std::move(digits)); }
  static LevelRule excluded(std::vector<std::int64_t> digits) { return LevelRule(Mode::Excluded, std::move(digits)); }
  // Forbids every d with floor(d / width) == index.
  LevelRule forbid_block(std::int64_t index, std::int64_t width) const;
  LevelRule forbid_range(DigitRange range) const;

  Mode mode() const noexcept { return mode_; }
  const std::vector<std::int64_t>& values() const noexcept { return values_; }
  const std::vector<DigitRange>& forbidden() const noexcept { return forbidden_; }
  bool is_all() const noexcept { return mode_ == Mode::All && forbidden_.empty(); }

  // Sorted disjoint allowed ranges within [0, radix). Throws InvalidDigit when
  // an explicit digit is out of range and InvalidParams when nothing remains.
  std::vector<DigitRange> ranges(std::int64_t radix) const;
  bool allows(std::int64_t digit, std::int64_t radix) const;

  nlohmann::ordered_json to_json() const;
  static LevelRule from_json(const nlohmann::json& j);

 private:
  LevelRule(Mode mode, std::vector<std::int64_t> values);

  Mode mode_;
  std::vector<std::int64_t> values_;
  std::vector<DigitRange> forbidden_;
};

// Per-level constraints for a product set: explicit rules for the first
// levels, then a mandatory tail rule.
struct TailRule {
  enum class Kind { Repeat, ClBlock, NullMeager };
  Kind kind = Kind::Repeat;
  std::vector<LevelRule> cycle{LevelRule::all()};  // Repeat: rule for level i is cycle[i % size]
  std::int64_t l = 0;                               // ClBlock: forbid floor(d / 3^(i-l)) == m_l, i >= l

  static TailRule repeat(std::vector<LevelRule> cycle);
  static TailRule cl_block(std::int64_t l);
  static TailRule null_meager();
};

struct ProductSpec {
  std::vector<LevelRule> prefix;
  TailRule tail;

  LevelRule rule_at(std::size_t level, const MixedRadixSystem& system) const;
  // True when every level >= `level` allows all digits.
  bool unconstrained_from(std::size_t level) const;
};

// Countable union of members X_n together with a collapse rule. Member n has
// collapse digits on every level below n; a point whose digits all follow the
// collapse rule stays in the collapse state forever (the limit set).
struct FamilySpec {
  std::string name;
  std::function<LevelRule(std::size_t level)> collapse;
  std::function<ProductSpec(std::size_t member)> member;
  std::size_t min_member = 0;  // members below this index are dropped
};

class DigitSetExpr {
 public:
  enum class Kind { Product, Union, Reflect, Family };

  static DigitSetExpr product(const MixedRadixSystem& system, ProductSpec spec);
  static DigitSetExpr union_of(std::vector<DigitSetExpr> members);
  static DigitSetExpr reflect(const DigitSetExpr& member);
  static DigitSetExpr family(const MixedRadixSystem& system, FamilySpec spec);

  Kind kind() const;
  const MixedRadixSystem& system() const;
  const ProductSpec& product_spec() const;
  const FamilySpec& family_spec() const;
  const std::vector<DigitSetExpr>& members() const;

  // JSON descriptor; named constructions replace it with their identifier.
  const nlohmann::ordered_json& descriptor() const;
  DigitSetExpr with_descriptor(nlohmann::ordered_json descriptor) const;
  std::string label() const;

 private:
  struct Node;
  explicit DigitSetExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

DigitSetExpr reflect(const DigitSetExpr& set);
DigitSetExpr union_of(std::vector<DigitSetExpr> sets);

nlohmann::ordered_json system_to_json(const MixedRadixSystem& system);
MixedRadixSystem system_from_json(const nlohmann::json& j);
nlohmann::ordered_json product_to_json(const ProductSpec& spec);
ProductSpec product_from_json(const nlohmann::json& j);

// Nondeterministic prefix automaton compiled from an expression.
struct AutomatonState {
  std::uint32_t node = 0;
  std::int64_t aux = -1;  // family: -1 collapse, n >= 0 member n
  bool flipped = false;

  friend bool operator==(const AutomatonState& a, const AutomatonState& b) {
    return a.node == b.node && a.aux == b.aux && a.flipped == b.flipped;
  }
  friend bool operator<(const AutomatonState& a, const AutomatonState& b) {
    if (a.node != b.node) return a.node < b.node;
    if (a.aux != b.aux) return a.aux < b.aux;
    return a.flipped < b.flipped;
  }
};

struct AutomatonStateHash {
  std::size_t operator()(const AutomatonState& s) const noexcept {
    return (static_cast<std::size_t>(s.node) * 1000003u) ^ (static_cast<std::size_t>(s.aux) * 7919u) ^
           (s.flipped ? 0x9e3779b9u : 0u);
  }
};

struct InitialState {
  AutomatonState state;
  std::int64_t origin = 0;  // the set part reached from this state lies in [origin, origin + 1]
};

struct Arc {
  std::int64_t lo;
  std::int64_t hi;
  AutomatonState next;
};

class DigitAutomaton {
 public:
  explicit DigitAutomaton(const DigitSetExpr& set);

  const MixedRadixSystem& system() const noexcept { return system_; }
  const std::vector<InitialState>& initial() const noexcept { return initial_; }
  std::int64_t radix(std::size_t level) const { return system_.small_radix(level); }

  std::vector<Arc> arcs(const AutomatonState& state, std::size_t level) const;
  bool unconstrained_from(const AutomatonState& state, std::size_t level) const;
  // Runs the word from `origin`; true iff some initial state accepts it.
  bool accepts(std::int64_t origin, const std::vector<std::int64_t>& digits) const;

 private:
  struct Compiled;
  void compile(const DigitSetExpr& set, bool flipped);
  const ProductSpec& member_spec(std::uint32_t node, std::size_t member) const;
  const LevelRule& collapse_rule(std::uint32_t node, std::size_t level) const;

  MixedRadixSystem system_;
  std::vector<DigitSetExpr> nodes_;  // product or family expressions
  std::vector<InitialState> initial_;
  std::shared_ptr<Compiled> cache_;
};

// Union of closed depth-k cells over all admissible k-digit prefixes, with
// runs of cells whose future is unconstrained merged. Throws CapacityExceeded
// when the frontier outgrows the interval cap.
IntervalUnion project(const DigitSetExpr& set, std::size_t depth);

bool is_admissible_prefix(const DigitSetExpr& set, const DigitWord& word);
// Cell p at the given depth (p / q(depth-1) is its left end) is admissible.
bool is_admissible_cell(const DigitSetExpr& set, const Integer& cell, std::size_t depth);
// value lies in project(set, depth).
bool member_at_depth(const DigitSetExpr& set, const Rational& value, std::size_t depth);

}  // namespace haarlab
