#include "haarlab/translate_engine.hpp"

#include <algorithm>
#include <limits>
#include <unordered_map>

#include "haarlab/error.hpp"

namespace haarlab {

namespace {

using Key = std::vector<std::int64_t>;

struct KeyHash {
  std::size_t operator()(const Key& k) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (auto v : k) {
      h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }
};

// Flat signature: per part (node, aux, flipped, gamma).
constexpr std::size_t kStride = 4;

AutomatonState state_at(const Key& k, std::size_t i) {
  return AutomatonState{static_cast<std::uint32_t>(k[i * kStride]), k[i * kStride + 1], k[i * kStride + 2] != 0};
}

void put(Key& k, std::size_t i, const AutomatonState& s, std::int64_t gamma) {
  k[i * kStride] = s.node;
  k[i * kStride + 1] = s.aux;
  k[i * kStride + 2] = s.flipped ? 1 : 0;
  k[i * kStride + 3] = gamma;
}

struct LevelFrame {
  Integer q;                    // cell count per unit at this depth
  std::vector<Rational> frac;   // frac(q * (t_i - t_0))
  std::vector<std::vector<std::int64_t>> bound;  // gamma_i - gamma_k <= bound[i][k]
};

LevelFrame make_frame(const Integer& q, std::vector<Rational> frac, const std::vector<TranslatePart>& parts,
                      std::int64_t window_cap, bool& too_wide) {
  const std::size_t n = parts.size();
  LevelFrame f{q, std::move(frac), std::vector<std::vector<std::int64_t>>(n, std::vector<std::int64_t>(n, 0))};
  too_wide = false;
  for (std::size_t i = 0; i < n; ++i) {
    const Rational widened = parts[i].pad * Rational(q);
    if (widened > Rational(window_cap)) {
      too_wide = true;
      return f;
    }
    for (std::size_t k = 0; k < n; ++k) {
      if (i == k) continue;
      const Rational rhs = Rational(1) + f.frac[i] - f.frac[k] + widened;
      // pads are half-open: [0, pad)
      f.bound[i][k] = to_int64(parts[i].pad > 0 ? ceil_of(rhs) - 1 : floor_of(rhs));
    }
  }
  return f;
}

Interval piece_of(const Integer& p0, const Key& key, const LevelFrame& frame,
                  const std::vector<TranslatePart>& parts) {
  const std::size_t n = parts.size();
  Rational lo, hi;
  for (std::size_t i = 0; i < n; ++i) {
    const Integer shift_cells = floor_of(Rational(frame.q) * (parts[i].shift - parts[0].shift));
    const Integer p = p0 + shift_cells + static_cast<long>(key[i * kStride + 3]);
    const Rational a = make_rational(p, frame.q) - parts[i].shift - parts[i].pad;
    const Rational b = make_rational(p + 1, frame.q) - parts[i].shift;
    if (i == 0 || a > lo) lo = a;
    if (i == 0 || b < hi) hi = b;
  }
  return Interval{lo, hi};
}

}  // namespace

IntervalUnion widened_part(const IntervalUnion& projected, const Rational& shift, const Rational& pad) {
  return translate(haarlab::pad(projected, pad), -shift - pad);
}

IntervalUnion explicit_intersection(const std::vector<TranslatePart>& parts, std::size_t depth) {
  if (parts.empty()) throw Error(ErrorCode::InvalidArgument, "intersection needs at least one translate");
  IntervalUnion acc;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i].pad < 0) throw Error(ErrorCode::InvalidArgument, "pads must be non-negative");
    IntervalUnion piece = widened_part(project(parts[i].set, depth), parts[i].shift, parts[i].pad);
    acc = i == 0 ? std::move(piece) : intersect(acc, piece);
    if (acc.empty()) break;
  }
  return acc;
}

EngineResult intersect_translates(const std::vector<TranslatePart>& parts, std::size_t depth,
                                  const EngineOptions& options) {
  if (parts.empty()) throw Error(ErrorCode::InvalidArgument, "intersection needs at least one translate");
  const std::size_t n = parts.size();
  const auto& system = parts.front().set.system();
  std::vector<DigitAutomaton> automata;
  automata.reserve(n);
  for (const auto& part : parts) {
    if (!(part.set.system() == system)) throw Error(ErrorCode::SystemMismatch, "translates use different systems");
    if (part.pad < 0) throw Error(ErrorCode::InvalidArgument, "pads must be non-negative");
    automata.emplace_back(part.set);
  }

  // depth 0: cells [origin, origin + 1]
  std::vector<Rational> frac(n);
  std::vector<Integer> shift0(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Rational rel = parts[i].shift - parts[0].shift;
    shift0[i] = floor_of(rel);
    frac[i] = rel - Rational(shift0[i]);
  }
  bool too_wide = false;
  LevelFrame frame = make_frame(Integer(1), frac, parts, options.window_cap, too_wide);
  EngineResult result;
  if (too_wide) throw Error(ErrorCode::CapacityExceeded, "pad wider than the window cap at depth 0");

  std::unordered_map<Key, Integer, KeyHash> current;
  {
    // extend partial tuples part by part, pruning pairwise
    struct Partial {
      Key key;
      std::int64_t origin0;
    };
    std::vector<Partial> partial;
    for (const auto& init : automata[0].initial()) {
      Partial p{Key(n * kStride, 0), init.origin};
      put(p.key, 0, init.state, 0);
      partial.push_back(std::move(p));
    }
    for (std::size_t i = 1; i < n; ++i) {
      std::vector<Partial> next;
      for (const auto& p : partial) {
        for (const auto& init : automata[i].initial()) {
          const Integer g = Integer(static_cast<long>(init.origin - p.origin0)) - shift0[i];
          if (!fits_int64(g)) continue;
          const std::int64_t gamma = to_int64(g);
          bool ok = gamma <= frame.bound[i][0] && -gamma <= frame.bound[0][i];
          for (std::size_t k = 1; ok && k < i; ++k) {
            const std::int64_t gk = p.key[k * kStride + 3];
            ok = gamma - gk <= frame.bound[i][k] && gk - gamma <= frame.bound[k][i];
          }
          if (!ok) continue;
          Partial q = p;
          put(q.key, i, init.state, gamma);
          next.push_back(std::move(q));
        }
      }
      partial = std::move(next);
    }
    for (auto& p : partial) current.emplace(std::move(p.key), Integer(static_cast<long>(p.origin0)));
  }

  std::size_t reached = 0;
  for (std::size_t level = 0; level < depth && !current.empty(); ++level) {
    const std::int64_t r = automata[0].radix(level);
    std::vector<std::int64_t> phi(n, 0);
    std::vector<Rational> next_frac(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Rational scaled = frame.frac[i] * Rational(r);
      const Integer fl = floor_of(scaled);
      phi[i] = to_int64(fl);
      next_frac[i] = scaled - Rational(fl);
    }
    LevelFrame next_frame = make_frame(frame.q * static_cast<long>(r), std::move(next_frac), parts,
                                       options.window_cap, too_wide);
    if (too_wide) {
      result.window_limited = true;
      break;
    }
    std::unordered_map<Key, Integer, KeyHash> next;
    std::vector<std::vector<Arc>> arcs(n);
    std::vector<std::int64_t> gamma_new(n, 0);
    std::vector<AutomatonState> state_new(n);
    for (const auto& [key, p0] : current) {
      for (std::size_t i = 0; i < n; ++i) arcs[i] = automata[i].arcs(state_at(key, i), level);
      for (const auto& a0 : arcs[0]) {
        for (std::int64_t d0 = a0.lo; d0 <= a0.hi; ++d0) {
          state_new[0] = a0.next;
          // depth-first choice of digits for parts 1..n-1
          std::vector<std::size_t> arc_idx(n, 0);
          std::vector<std::int64_t> digit(n, 0);
          std::size_t i = 1;
          bool fresh = true;
          auto base_of = [&](std::size_t j) { return key[j * kStride + 3] * r - phi[j] - d0; };
          if (n == 1) {
            Key child(kStride, 0);
            put(child, 0, a0.next, 0);
            if (next.find(child) == next.end()) next.emplace(std::move(child), p0 * static_cast<long>(r) + d0);
            continue;
          }
          while (i >= 1) {
            if (i == n) {
              Key child(n * kStride, 0);
              put(child, 0, state_new[0], 0);
              for (std::size_t j = 1; j < n; ++j) put(child, j, state_new[j], gamma_new[j]);
              if (next.find(child) == next.end()) {
                next.emplace(std::move(child), p0 * static_cast<long>(r) + d0);
                if (next.size() > options.signature_cap) {
                  throw Error(ErrorCode::CapacityExceeded, "translate engine exceeds signature cap");
                }
              }
              --i;
              fresh = false;
              continue;
            }
            const std::int64_t base = base_of(i);
            const std::int64_t lo_d = -next_frame.bound[0][i] - base;
            const std::int64_t hi_d = next_frame.bound[i][0] - base;
            if (fresh) {
              arc_idx[i] = 0;
              digit[i] = std::numeric_limits<std::int64_t>::min();
            }
            bool advanced = false;
            while (arc_idx[i] < arcs[i].size()) {
              const auto& a = arcs[i][arc_idx[i]];
              std::int64_t d = digit[i] == std::numeric_limits<std::int64_t>::min() ? std::max(a.lo, lo_d)
                                                                                   : digit[i] + 1;
              const std::int64_t top = std::min(a.hi, hi_d);
              bool found = false;
              for (; d <= top; ++d) {
                const std::int64_t g = base + d;
                bool ok = true;
                for (std::size_t k = 1; ok && k < i; ++k) {
                  ok = g - gamma_new[k] <= next_frame.bound[i][k] && gamma_new[k] - g <= next_frame.bound[k][i];
                }
                if (ok) {
                  found = true;
                  break;
                }
              }
              if (found) {
                digit[i] = d;
                gamma_new[i] = base + d;
                state_new[i] = a.next;
                advanced = true;
                break;
              }
              ++arc_idx[i];
              digit[i] = std::numeric_limits<std::int64_t>::min();
            }
            if (advanced) {
              ++i;
              fresh = true;
            } else {
              --i;
              fresh = false;
            }
          }
        }
      }
    }
    current = std::move(next);
    frame = std::move(next_frame);
    reached = level + 1;
  }
  result.depth = reached;
  result.signatures = current.size();
  result.empty = current.empty();
  for (const auto& [key, p0] : current) {
    if (result.residual.size() >= options.residual_sample) break;
    result.residual.push_back(piece_of(p0, key, frame, parts));
  }
  result.residual_complete = result.residual.size() == current.size();
  return result;
}

}  // namespace haarlab
