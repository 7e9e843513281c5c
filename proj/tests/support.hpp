#pragma once

#include <vector>

#include "haarlab/interval.hpp"
#include "oracle.hpp"

namespace support {

inline haarlab::Rational q(long p, long d = 1) { return haarlab::make_rational(p, d); }

inline haarlab::IntervalUnion from_pieces(const oracle::Pieces& p) {
  std::vector<haarlab::Interval> raw;
  for (const auto& [a, b] : p) raw.push_back({a, b});
  return haarlab::IntervalUnion::normalize(raw);
}

inline oracle::Pieces to_pieces(const haarlab::IntervalUnion& u) {
  oracle::Pieces out;
  for (const auto& iv : u.intervals()) out.emplace_back(iv.lo, iv.hi);
  return out;
}

inline haarlab::IntervalUnion U(std::initializer_list<std::pair<haarlab::Rational, haarlab::Rational>> pieces) {
  std::vector<haarlab::Interval> raw;
  for (const auto& [a, b] : pieces) raw.push_back({a, b});
  return haarlab::IntervalUnion::normalize(raw);
}

}  // namespace support
