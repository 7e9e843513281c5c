#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "haarlab/digit_set.hpp"
#include "haarlab/interval.hpp"

namespace haarlab {

// One factor of a translate intersection: set - shift - [0, pad), the pad
// being half-open (a zero pad means the plain translate).
struct TranslatePart {
  DigitSetExpr set;
  Rational shift;
  Rational pad;
};

struct EngineOptions {
  std::size_t signature_cap = 4000000;
  std::int64_t window_cap = 4096;
  std::size_t residual_sample = 8;
};

struct EngineResult {
  bool empty = false;
  std::size_t depth = 0;          // deepest depth fully refined
  bool window_limited = false;    // stopped early because pads outgrew the cell width
  std::size_t signatures = 0;     // surviving signatures at `depth`
  std::vector<Interval> residual; // sample of surviving pieces
  bool residual_complete = false; // sample lists every surviving signature
};

// Decides whether the intersection of the depth-k projections of all parts is
// empty by refining cell tuples level by level. Tuples that agree on automaton
// states and relative cell offsets have identical futures, so only one
// representative per signature is kept.
EngineResult intersect_translates(const std::vector<TranslatePart>& parts, std::size_t depth,
                                  const EngineOptions& options = {});

// Explicit interval-union intersection with closed pads [0, pad]; a superset
// of what the engine tracks, equal to it when every pad is zero.
IntervalUnion explicit_intersection(const std::vector<TranslatePart>& parts, std::size_t depth);

// projected - shift - [0, pad]
IntervalUnion widened_part(const IntervalUnion& projected, const Rational& shift, const Rational& pad);

}  // namespace haarlab
