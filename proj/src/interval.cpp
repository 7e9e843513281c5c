#include "haarlab/interval.hpp"

#include <algorithm>
#include <atomic>

#include "haarlab/error.hpp"

namespace haarlab {

namespace {

std::atomic<std::size_t> g_cap{1000000};

void check_cap(std::size_t n) {
  if (n > g_cap.load()) {
    throw Error(ErrorCode::CapacityExceeded,
                "interval count " + std::to_string(n) + " exceeds cap " + std::to_string(g_cap.load()));
  }
}

}  // namespace

std::size_t interval_cap() { return g_cap.load(); }
void set_interval_cap(std::size_t cap) { g_cap.store(cap); }

IntervalUnion IntervalUnion::normalize(std::vector<Interval> raw) {
  for (const auto& piece : raw) {
    if (piece.lo > piece.hi) {
      throw Error(ErrorCode::MalformedInterval,
                  "[" + to_string(piece.lo) + ", " + to_string(piece.hi) + "] has lo > hi");
    }
  }
  std::sort(raw.begin(), raw.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  IntervalUnion out;
  for (auto& piece : raw) {
    if (!out.iv_.empty() && piece.lo <= out.iv_.back().hi) {
      if (piece.hi > out.iv_.back().hi) out.iv_.back().hi = std::move(piece.hi);
    } else {
      out.iv_.push_back(std::move(piece));
    }
  }
  return out;
}

IntervalUnion IntervalUnion::closed(const Rational& lo, const Rational& hi) {
  return normalize({Interval{lo, hi}});
}

bool IntervalUnion::contains(const Rational& x) const {
  auto it = std::upper_bound(iv_.begin(), iv_.end(), x,
                             [](const Rational& v, const Interval& piece) { return v < piece.lo; });
  if (it == iv_.begin()) return false;
  --it;
  return x <= it->hi;
}

bool IntervalUnion::contains(const Interval& piece) const {
  auto it = std::upper_bound(iv_.begin(), iv_.end(), piece.lo,
                             [](const Rational& v, const Interval& p) { return v < p.lo; });
  if (it == iv_.begin()) return false;
  --it;
  return piece.hi <= it->hi;
}

bool IntervalUnion::includes(const IntervalUnion& other) const {
  return std::all_of(other.iv_.begin(), other.iv_.end(),
                     [this](const Interval& piece) { return contains(piece); });
}

IntervalUnion normalize(std::vector<Interval> raw) { return IntervalUnion::normalize(std::move(raw)); }

IntervalUnion intersect(const IntervalUnion& u, const IntervalUnion& v) {
  const auto& a = u.intervals();
  const auto& b = v.intervals();
  std::vector<Interval> out;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const Rational& lo = a[i].lo > b[j].lo ? a[i].lo : b[j].lo;
    const Rational& hi = a[i].hi < b[j].hi ? a[i].hi : b[j].hi;
    if (lo <= hi) out.push_back(Interval{lo, hi});
    if (a[i].hi < b[j].hi) {
      ++i;
    } else {
      ++j;
    }
  }
  return IntervalUnion::normalize(std::move(out));
}

IntervalUnion unite(const IntervalUnion& u, const IntervalUnion& v) {
  std::vector<Interval> raw(u.intervals());
  raw.insert(raw.end(), v.intervals().begin(), v.intervals().end());
  return IntervalUnion::normalize(std::move(raw));
}

IntervalUnion translate(const IntervalUnion& u, const Rational& t) {
  std::vector<Interval> raw;
  raw.reserve(u.size());
  for (const auto& piece : u.intervals()) raw.push_back(Interval{piece.lo + t, piece.hi + t});
  return IntervalUnion::normalize(std::move(raw));
}

IntervalUnion negate(const IntervalUnion& u) {
  std::vector<Interval> raw;
  raw.reserve(u.size());
  for (const auto& piece : u.intervals()) raw.push_back(Interval{-piece.hi, -piece.lo});
  return IntervalUnion::normalize(std::move(raw));
}

IntervalUnion scale(const IntervalUnion& u, const Rational& factor) {
  if (factor < 0) return negate(scale(u, -factor));
  std::vector<Interval> raw;
  raw.reserve(u.size());
  for (const auto& piece : u.intervals()) raw.push_back(Interval{piece.lo * factor, piece.hi * factor});
  return IntervalUnion::normalize(std::move(raw));
}

IntervalUnion minkowski_diff(const IntervalUnion& u, const IntervalUnion& v) {
  check_cap(u.size() * v.size());
  std::vector<Interval> raw;
  raw.reserve(u.size() * v.size());
  for (const auto& a : u.intervals()) {
    for (const auto& b : v.intervals()) raw.push_back(Interval{a.lo - b.hi, a.hi - b.lo});
  }
  return IntervalUnion::normalize(std::move(raw));
}

IntervalUnion pad(const IntervalUnion& u, const Rational& eps) {
  if (eps < 0) throw Error(ErrorCode::InvalidArgument, "pad width must be non-negative");
  std::vector<Interval> raw;
  raw.reserve(u.size());
  for (const auto& piece : u.intervals()) raw.push_back(Interval{piece.lo, piece.hi + eps});
  return IntervalUnion::normalize(std::move(raw));
}

IntervalUnion ifs_step(const IntervalUnion& u, const Rational& ratio, const std::vector<Rational>& offsets) {
  if (offsets.empty()) throw Error(ErrorCode::InvalidArgument, "ifs_step needs offsets");
  if (ratio <= 1) throw Error(ErrorCode::InvalidArgument, "ifs ratio must exceed 1");
  check_cap(u.size() * offsets.size());
  std::vector<Interval> raw;
  raw.reserve(u.size() * offsets.size());
  for (const auto& delta : offsets) {
    for (const auto& piece : u.intervals()) {
      raw.push_back(Interval{(piece.lo + delta) / ratio, (piece.hi + delta) / ratio});
    }
  }
  return IntervalUnion::normalize(std::move(raw));
}

std::optional<Rational> min_gap(const IntervalUnion& u) {
  const auto& iv = u.intervals();
  if (iv.size() < 2) return std::nullopt;
  Rational best = iv[1].lo - iv[0].hi;
  for (std::size_t i = 2; i < iv.size(); ++i) {
    Rational g = iv[i].lo - iv[i - 1].hi;
    if (g < best) best = g;
  }
  return best;
}

bool is_empty(const IntervalUnion& u) { return u.empty(); }

bool has_interior(const IntervalUnion& u) {
  return std::any_of(u.intervals().begin(), u.intervals().end(),
                     [](const Interval& piece) { return piece.lo < piece.hi; });
}

bool contains_zero_neighborhood(const IntervalUnion& u, const Rational& eps) {
  return u.contains(Interval{-eps, eps});
}

std::optional<Rational> distance(const IntervalUnion& u, const IntervalUnion& v) {
  if (u.empty() || v.empty()) return std::nullopt;
  const auto& a = u.intervals();
  const auto& b = v.intervals();
  std::optional<Rational> best;
  std::size_t j = 0;
  for (const auto& piece : a) {
    while (j + 1 < b.size() && b[j + 1].lo <= piece.hi) ++j;
    for (std::size_t k = (j > 0 ? j - 1 : 0); k < b.size() && k <= j + 1; ++k) {
      Rational gap = 0;
      if (b[k].lo > piece.hi) {
        gap = b[k].lo - piece.hi;
      } else if (piece.lo > b[k].hi) {
        gap = piece.lo - b[k].hi;
      }
      if (!best || gap < *best) best = gap;
    }
  }
  return best;
}

Rational total_length(const IntervalUnion& u) {
  Rational sum = 0;
  for (const auto& piece : u.intervals()) sum += piece.hi - piece.lo;
  return sum;
}

}  // namespace haarlab
