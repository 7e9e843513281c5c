#include <doctest.h>

#include <random>

#include "haarlab/error.hpp"
#include "haarlab/interval.hpp"
#include "support.hpp"

using namespace haarlab;
using support::q;
using support::U;

TEST_CASE("normalize examples") {
  CHECK(U({{q(0), q(1, 3)}, {q(1, 3), q(1)}}) == U({{q(0), q(1)}}));
  CHECK(IntervalUnion::normalize({}).empty());
  CHECK(U({{q(0), q(1, 2)}, {q(1, 4), q(3, 4)}}) == U({{q(0), q(3, 4)}}));
  CHECK_THROWS_AS(IntervalUnion::normalize({{q(1), q(0)}}), Error);
}

TEST_CASE("intersect examples") {
  const IntervalUnion c1 = U({{q(0), q(1, 3)}, {q(2, 3), q(1)}});
  CHECK(intersect(c1, U({{q(0), q(1)}})) == c1);
  CHECK(intersect(c1, translate(c1, q(-4, 9))) == U({{q(2, 9), q(1, 3)}}));
  CHECK(intersect(U({{q(0), q(1, 4)}}), U({{q(1, 2), q(1)}})).empty());
}

TEST_CASE("translate, negate, scale") {
  const IntervalUnion u = U({{q(0), q(1, 9)}, {q(1, 3), q(2, 3)}});
  CHECK(translate(u, 0) == u);
  CHECK(negate(negate(u)) == u);
  CHECK(translate(U({{q(0), q(1, 9)}}), q(2, 9)) == U({{q(2, 9), q(3, 9)}}));
  CHECK(negate(U({{q(0), q(1, 3)}})) == U({{q(-1, 3), q(0)}}));
  CHECK(scale(u, q(3)) == U({{q(0), q(1, 3)}, {q(1), q(2)}}));
}

TEST_CASE("minkowski_diff examples") {
  const IntervalUnion unit = U({{q(0), q(1)}});
  CHECK(minkowski_diff(unit, unit) == U({{q(-1), q(1)}}));
  const IntervalUnion c1 = U({{q(0), q(1, 3)}, {q(2, 3), q(1)}});
  CHECK(minkowski_diff(c1, c1) == U({{q(-1), q(1)}}));
  CHECK(minkowski_diff(IntervalUnion{}, unit).empty());
}

TEST_CASE("pad examples") {
  const IntervalUnion u = U({{q(0), q(1, 9)}, {q(1, 3), q(4, 9)}});
  CHECK(pad(u, 0) == u);
  CHECK(pad(IntervalUnion::point(0), q(1, 9)) == U({{q(0), q(1, 9)}}));
  CHECK(pad(u, q(1, 9)) == U({{q(0), q(2, 9)}, {q(1, 3), q(5, 9)}}));
}

TEST_CASE("ifs_step examples") {
  const IntervalUnion sym = U({{q(-1), q(1)}});
  CHECK(ifs_step(sym, q(3), {q(-2), q(0), q(2)}) == sym);
  CHECK(ifs_step(IntervalUnion{}, q(3), {q(0), q(2)}).empty());
  CHECK(ifs_step(U({{q(0), q(1)}}), q(3), {q(0), q(2)}) == U({{q(0), q(1, 3)}, {q(2, 3), q(1)}}));
}

TEST_CASE("predicates") {
  CHECK(*min_gap(U({{q(0), q(1, 3)}, {q(2, 3), q(1)}})) == q(1, 3));
  CHECK_FALSE(min_gap(U({{q(0), q(1)}})).has_value());
  CHECK_FALSE(has_interior(IntervalUnion::point(q(1, 2))));
  CHECK(has_interior(U({{q(0), q(1, 2)}})));
  CHECK(contains_zero_neighborhood(U({{q(-1), q(1)}}), q(1, 2)));
  CHECK_FALSE(contains_zero_neighborhood(U({{q(0), q(1)}}), q(1, 2)));
  CHECK(is_empty(IntervalUnion{}));
  CHECK(*distance(U({{q(0), q(1, 3)}}), U({{q(1, 2), q(1)}})) == q(1, 6));
  CHECK(total_length(U({{q(0), q(1, 3)}, {q(2, 3), q(1)}})) == q(2, 3));
}

TEST_CASE("interval cap") {
  const std::size_t old = interval_cap();
  set_interval_cap(3);
  const IntervalUnion many = U({{q(0), q(0)}, {q(10), q(10)}, {q(20), q(20)}});
  CHECK_THROWS_AS(minkowski_diff(many, many), Error);
  set_interval_cap(old);
  CHECK(minkowski_diff(many, many).size() == 5);
}

TEST_CASE("operations agree with the brute-force oracle") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    const oracle::Pieces a = oracle::random_pieces(rng, 16, 10000);
    const oracle::Pieces b = oracle::random_pieces(rng, 16, 10000);
    const IntervalUnion ua = support::from_pieces(a), ub = support::from_pieces(b);
    const Rational t = make_rational(static_cast<std::int64_t>(rng() % 2001) - 1000, 1 + static_cast<std::int64_t>(rng() % 10000));
    const Rational eps = make_rational(static_cast<std::int64_t>(rng() % 50), 1 + static_cast<std::int64_t>(rng() % 100));

    const oracle::Pieces inter = oracle::pair_intersections(a, b);
    const oracle::Pieces diff = oracle::pair_differences(a, b);
    const oracle::Pieces shift = oracle::merge(oracle::shifted(a, t));
    oracle::Pieces padded;
    for (const auto& [lo, hi] : a) padded.emplace_back(lo, hi + eps);
    padded = oracle::merge(padded);
    const oracle::Pieces uni = oracle::merge([&] {
      oracle::Pieces all = a;
      all.insert(all.end(), b.begin(), b.end());
      return all;
    }());

    const IntervalUnion li = intersect(ua, ub), ld = minkowski_diff(ua, ub), lt = translate(ua, t), lp = pad(ua, eps),
                        lu = unite(ua, ub);
    const oracle::Pieces pli = support::to_pieces(li), pld = support::to_pieces(ld), plt = support::to_pieces(lt),
                         plp = support::to_pieces(lp), plu = support::to_pieces(lu);

    const auto probes = oracle::probes({&a, &b, &inter, &diff, &shift, &padded, &pli, &pld, &plt, &plp});
    for (const auto& x : probes) {
      CHECK(oracle::member(pli, x) == oracle::member(inter, x));
      CHECK(oracle::member(pld, x) == oracle::member(diff, x));
      CHECK(oracle::member(plt, x) == oracle::member(shift, x));
      CHECK(oracle::member(plp, x) == oracle::member(padded, x));
      CHECK(oracle::member(plu, x) == oracle::member(uni, x));
      CHECK(ua.contains(x) == oracle::member(a, x));
    }
    // canonical form: equal sets give equal representations
    CHECK(li == support::from_pieces(inter));
    CHECK(ld == support::from_pieces(diff));
  }
}

TEST_CASE("algebraic identities on random unions") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const IntervalUnion u = support::from_pieces(oracle::random_pieces(rng, 10, 200));
    const IntervalUnion v = support::from_pieces(oracle::random_pieces(rng, 10, 200));
    const Rational t = make_rational(static_cast<std::int64_t>(rng() % 101) - 50, 1 + static_cast<std::int64_t>(rng() % 60));
    CHECK(intersect(u, v) == intersect(v, u));
    CHECK(minkowski_diff(u, u) == negate(minkowski_diff(u, u)));
    CHECK(minkowski_diff(u, v) == negate(minkowski_diff(v, u)));
    CHECK(translate(intersect(u, v), t) == intersect(translate(u, t), translate(v, t)));
    CHECK(unite(u, v).includes(u));
    CHECK(u.includes(intersect(u, v)));
  }
}
