#include <doctest.h>

#include <random>

#include "haarlab/constructions.hpp"
#include "haarlab/digit_set.hpp"
#include "haarlab/error.hpp"
#include "haarlab/witness.hpp"
#include "random_systems.hpp"
#include "support.hpp"

using namespace haarlab;
using support::q;
using support::U;

namespace {

bool admissible(const DigitSetExpr& s, std::vector<std::int64_t> d) {
  return is_admissible_prefix(s, DigitWord{s.system(), std::move(d)});
}

std::int64_t m_of(std::int64_t l) { return to_int64(m_value(l)); }

// digit rules written out independently of the library's rule objects
oracle::CellModel cl_model(std::int64_t l, std::size_t depth) {
  oracle::CellModel m;
  for (std::size_t i = 0; i < depth; ++i) m.radices.push_back(to_int64(MixedRadixSystem::cl().radix(i)));
  m.allowed = [l](std::size_t level, long d) {
    if (static_cast<std::int64_t>(level) < l) return true;
    const long w = to_int64(pow_int(3, level - static_cast<std::size_t>(l)));
    return d / w != m_of(l);
  };
  return m;
}

}  // namespace

TEST_CASE("project examples") {
  CHECK(project(ternary_cantor(), 1) == U({{q(0), q(1, 3)}, {q(2, 3), q(1)}}));
  CHECK(project(cl_set(0), 1) == U({{q(0), q(12, 25)}, {q(13, 25), q(1)}}));
  CHECK(project(notideal_set(NotIdealPart::X), 1) == U({{q(0), q(12, 25)}, {q(13, 25), q(1)}}));
  CHECK(project(ternary_cantor(), 0) == U({{q(0), q(1)}}));
}

TEST_CASE("is_admissible_prefix examples") {
  CHECK(admissible(ternary_cantor(), {0, 2}));
  CHECK_FALSE(admissible(ternary_cantor(), {1}));
  CHECK_FALSE(admissible(cl_set(0), {12}));
  CHECK(admissible(cl_set(0), {11, 74}));
}

TEST_CASE("reflect and union") {
  const DigitSetExpr c = ternary_cantor();
  CHECK(project(reflect(c), 1) == U({{q(-1), q(-2, 3)}, {q(-1, 3), q(0)}}));
  CHECK(project(union_of({c}), 3) == project(c, 3));
  const DigitSetExpr a0 = haar_family_member(1, 0), a1 = haar_family_member(1, 1);
  for (std::size_t k = 0; k <= 4; ++k) {
    CHECK(project(union_of({a0, a1}), k) == unite(project(a0, k), project(a1, k)));
  }
  CHECK_THROWS_AS(union_of({c, cl_set(0)}), Error);
}

TEST_CASE("level rules") {
  const LevelRule r = LevelRule::excluded({1, 3}).forbid_block(2, 2);
  CHECK(r.ranges(7) == std::vector<DigitRange>{{0, 0}, {2, 2}, {6, 6}});
  CHECK(r.allows(6, 7));
  CHECK_FALSE(r.allows(4, 7));
  CHECK(LevelRule::from_json(r.to_json()).ranges(7) == r.ranges(7));
  CHECK_THROWS_AS(LevelRule::allowed({1}).forbid_range({0, 2}).ranges(3), Error);
  CHECK_THROWS_AS(LevelRule::allowed({5}).ranges(3), Error);
}

TEST_CASE("project matches exhaustive enumeration on random systems") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 150; ++trial) {
    const support::RandomSet s = support::random_set(rng);
    for (std::size_t k = 1; k <= 3; ++k) {
      CHECK(support::to_pieces(project(s.expr, k)) == support::enumerate(s, k));
    }
  }
}

TEST_CASE("named constructions agree with their digit rules") {
  SUBCASE("cl(l)") {
    for (std::int64_t l : {0, 1}) {
      for (std::size_t k = 1; k <= 3; ++k) {
        CHECK(support::to_pieces(project(cl_set(l), k)) == oracle::enumerate_cells(cl_model(l, k), k));
      }
    }
  }
  SUBCASE("gap(m)") {
    for (std::int64_t mm : {4, 5, 7}) {
      oracle::CellModel model{std::vector<long>(3, mm), [mm](std::size_t, long d) { return d == 0 || d == mm - 1; }};
      for (std::size_t k = 1; k <= 3; ++k) CHECK(support::to_pieces(project(gap_set(mm), k)) == oracle::enumerate_cells(model, k));
    }
  }
  SUBCASE("haar_family(n, m)") {
    for (std::int64_t n : {1, 2}) {
      for (std::int64_t mm = 0; mm <= n; ++mm) {
        oracle::CellModel model{std::vector<long>(3, 5), [n, mm](std::size_t i, long d) {
                                  return static_cast<std::int64_t>(i) % (n + 1) != mm || d == 0 || d == 4;
                                }};
        for (std::size_t k = 1; k <= 3; ++k) {
          CHECK(support::to_pieces(project(haar_family_member(n, mm), k)) == oracle::enumerate_cells(model, k));
        }
      }
    }
  }
  SUBCASE("w(k, l)") {
    oracle::CellModel model = cl_model(0, 3);
    model.allowed = [](std::size_t level, long d) { return level != 1 || d / 3 != 12; };
    for (std::size_t k = 1; k <= 3; ++k) CHECK(support::to_pieces(project(w_set(1, 0), k)) == oracle::enumerate_cells(model, k));
  }
  SUBCASE("nullmeager") {
    const std::vector<std::int64_t> sched{0, 1, 3};
    const DigitSetExpr x = nullmeager_set(sched);
    auto block = [&](std::size_t i) {
      std::int64_t n = 0;
      while (n + 1 < static_cast<std::int64_t>(sched.size()) && sched[static_cast<std::size_t>(n + 1)] <= static_cast<std::int64_t>(i)) ++n;
      return n;
    };
    oracle::CellModel model;
    for (std::size_t i = 0; i < 3; ++i) model.radices.push_back(2 * block(i) + 3);
    model.allowed = [&](std::size_t i, long d) { return d != block(i) + 1; };
    for (std::size_t k = 1; k <= 3; ++k) CHECK(support::to_pieces(project(x, k)) == oracle::enumerate_cells(model, k));
  }
  SUBCASE("notideal X") {
    // X_n: L digits below n, level-n digit outside L_n u {m_n}, C_n block rule
    // above; members beyond the depth leave only all-L cells.
    for (std::size_t k = 1; k <= 2; ++k) {
      oracle::Pieces all;
      for (std::size_t n = 0; n <= k; ++n) {
        oracle::CellModel model = cl_model(0, k);
        model.allowed = [n](std::size_t i, long d) {
          const auto L = L_set(std::min(i, n));
          const bool in_l = std::find(L.begin(), L.end(), d) != L.end();
          if (i < n) return in_l;
          if (i == n) return !in_l && d != m_of(static_cast<std::int64_t>(n));
          const long w = to_int64(pow_int(3, i - n));
          return d / w != m_of(static_cast<std::int64_t>(n));
        };
        if (n == k) model.allowed = [](std::size_t i, long d) {
          const auto L = L_set(i);
          return std::find(L.begin(), L.end(), d) != L.end();
        };
        const auto cells = oracle::enumerate_cells(model, k);
        all.insert(all.end(), cells.begin(), cells.end());
      }
      CHECK(support::to_pieces(project(notideal_set(NotIdealPart::X), k)) == oracle::merge(all));
    }
  }
}

TEST_CASE("not-ideal parts") {
  const DigitSetExpr x = notideal_set(NotIdealPart::X), a = notideal_set(NotIdealPart::A), b = notideal_set(NotIdealPart::B);
  for (std::size_t k = 1; k <= 2; ++k) {
    const IntervalUnion px = project(x, k), pa = project(a, k), pb = project(b, k);
    CHECK(px.includes(pa));
    CHECK(px.includes(pb));
    CHECK(unite(pa, pb) == px);
  }
  // B_0: level-0 digits within distance 1 of L_0 + h or L_0 - h, h = 6
  const LevelRule b0 = notideal_level_rule(NotIdealPart::B, 0);
  for (std::int64_t d = 0; d < 25; ++d) {
    bool near = false;
    for (std::int64_t l : L_set(0)) near = near || std::abs(d - 6 - l) <= 1 || std::abs(d + 6 - l) <= 1;
    const bool x_out = d == 8 || d == 10 || d == 12;
    CHECK(b0.allows(d, 25) == (near && !x_out));
  }
}

TEST_CASE("projection properties") {
  const std::vector<DigitSetExpr> sets{ternary_cantor(),
                                       gap_set(5),
                                       haar_family_member(2, 1),
                                       cl_set(0),
                                       w_set(1, 0),
                                       notideal_set(NotIdealPart::X),
                                       notideal_set(NotIdealPart::A),
                                       reflect(notideal_set(NotIdealPart::X)),
                                       nullmeager_set({0})};
  SUBCASE("monotone in depth") {
    for (const auto& s : sets) {
      for (std::size_t k = 0; k < 3; ++k) CHECK(project(s, k).includes(project(s, k + 1)));
    }
  }
  SUBCASE("prefix extensibility") {
    for (const auto& s : {ternary_cantor(), haar_family_member(1, 0), nullmeager_set({0}), cl_set(0)}) {
      const IntervalUnion coarse = project(s, 2), fine = project(s, 4);
      for (const auto& iv : coarse.intervals()) {
        // each piece of depth 2 contains some depth-4 piece
        CHECK_FALSE(intersect(IntervalUnion::closed(iv.lo, iv.hi), fine).empty());
      }
    }
  }
  SUBCASE("sampled admissible words lie in the projection") {
    std::mt19937_64 rng(23);
    std::size_t sampled = 0;
    for (const auto& s : {ternary_cantor(), gap_set(5), haar_family_member(2, 0), cl_set(0), nullmeager_set({0})}) {
      DigitAutomaton aut(s);
      const IntervalUnion p = project(s, 2);
      for (int t = 0; t < 120; ++t) {
        std::vector<std::int64_t> d;
        const std::size_t len = 2 + rng() % 5;
        for (std::size_t i = 0; i < len; ++i) {
          const auto r = s.system().small_radix(i);
          std::int64_t digit = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(r));
          for (std::int64_t tries = 0; tries < r; ++tries) {
            d.push_back(digit);
            if (aut.accepts(0, d)) break;
            d.pop_back();
            digit = (digit + 1) % r;
          }
          REQUIRE(d.size() == i + 1);
        }
        CHECK(p.contains(eval_word(DigitWord{s.system(), d})));
        ++sampled;
      }
    }
    CHECK(sampled >= 500);
  }
}

TEST_CASE("membership and descriptors") {
  CHECK(member_at_depth(ternary_cantor(), q(1, 4), 12));
  CHECK_FALSE(member_at_depth(ternary_cantor(), q(1, 2), 3));
  CHECK(member_at_depth(reflect(ternary_cantor()), q(-1, 4), 12));
  CHECK(is_admissible_cell(cl_set(0), Integer(11), 1));
  CHECK_FALSE(is_admissible_cell(cl_set(0), Integer(12), 1));
  for (const auto& s : {ternary_cantor(), cl_set(1), notideal_set(NotIdealPart::B), reflect(gap_set(5)),
                        union_of({haar_family_member(1, 0), haar_family_member(1, 1)}), nullmeager_set({0, 2})}) {
    const DigitSetExpr back = parse_descriptor(to_descriptor(s));
    for (std::size_t k = 0; k <= 2; ++k) CHECK(project(back, k) == project(s, k));
  }
}
