#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "haarlab/rational.hpp"

namespace haarlab {

struct Interval {
  Rational lo;
  Rational hi;

  friend bool operator==(const Interval& a, const Interval& b) { return a.lo == b.lo && a.hi == b.hi; }
};

// Finite union of closed intervals kept sorted and pairwise separated
// (b_i < a_{i+1}); touching or overlapping input intervals are merged.
class IntervalUnion {
 public:
  IntervalUnion() = default;

  // Throws MalformedInterval when some lo > hi.
  static IntervalUnion normalize(std::vector<Interval> raw);
  static IntervalUnion closed(const Rational& lo, const Rational& hi);
  static IntervalUnion point(const Rational& x) { return closed(x, x); }

  const std::vector<Interval>& intervals() const noexcept { return iv_; }
  std::size_t size() const noexcept { return iv_.size(); }
  bool empty() const noexcept { return iv_.empty(); }

  bool contains(const Rational& x) const;
  bool contains(const Interval& piece) const;
  bool includes(const IntervalUnion& other) const;

  friend bool operator==(const IntervalUnion& a, const IntervalUnion& b) { return a.iv_ == b.iv_; }

 private:
  std::vector<Interval> iv_;
};

// Cap on interval counts produced by quadratic operations.
std::size_t interval_cap();
void set_interval_cap(std::size_t cap);

IntervalUnion normalize(std::vector<Interval> raw);
IntervalUnion intersect(const IntervalUnion& u, const IntervalUnion& v);
IntervalUnion unite(const IntervalUnion& u, const IntervalUnion& v);
IntervalUnion translate(const IntervalUnion& u, const Rational& t);
IntervalUnion negate(const IntervalUnion& u);
IntervalUnion scale(const IntervalUnion& u, const Rational& factor);
IntervalUnion minkowski_diff(const IntervalUnion& u, const IntervalUnion& v);
IntervalUnion pad(const IntervalUnion& u, const Rational& eps);
IntervalUnion ifs_step(const IntervalUnion& u, const Rational& ratio, const std::vector<Rational>& offsets);

std::optional<Rational> min_gap(const IntervalUnion& u);
bool is_empty(const IntervalUnion& u);
bool has_interior(const IntervalUnion& u);
bool contains_zero_neighborhood(const IntervalUnion& u, const Rational& eps);
// Infimum of |a - b| over a in u, b in v; nullopt when either side is empty.
std::optional<Rational> distance(const IntervalUnion& u, const IntervalUnion& v);
Rational total_length(const IntervalUnion& u);

}  // namespace haarlab
