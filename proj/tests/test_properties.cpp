#include <doctest.h>

#include <random>

#include "haarlab/certifier.hpp"
#include "haarlab/constructions.hpp"
#include "haarlab/witness.hpp"
#include "random_systems.hpp"
#include "support.hpp"

using namespace haarlab;
using support::q;

namespace {

// membership by walking the closed cell(s) containing v, without the library's
// member_at_depth helper
bool in_cells(const DigitSetExpr& s, const Rational& v, std::size_t depth) {
  const Integer qd = s.system().q(depth - 1);
  const Rational scaled = v * Rational(qd);
  const Integer p = floor_of(scaled);
  if (is_admissible_cell(s, p, depth)) return true;
  return scaled == Rational(p) && is_admissible_cell(s, p - 1, depth);
}

}  // namespace

TEST_CASE("certified emptiness persists at larger depths") {
  std::mt19937_64 rng(8);
  const DigitSetExpr c = ternary_cantor();
  std::size_t certified = 0;
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<Rational> t{0};
    std::vector<Rational> pads{0};
    for (int j = 0; j < 2; ++j) {
      t.push_back(make_rational(static_cast<std::int64_t>(rng() % 81), 81));
      pads.push_back(make_rational(static_cast<std::int64_t>(rng() % 2), 243));
    }
    for (std::size_t k = 2; k <= 6; ++k) {
      if (certify_empty_intersection(c, t, pads, k).status != Status::CertifiedEmpty) continue;
      ++certified;
      for (std::size_t k2 = k + 1; k2 <= k + 3; ++k2) {
        CHECK(certify_empty_intersection(c, t, pads, k2).status == Status::CertifiedEmpty);
      }
      break;
    }
  }
  CHECK(certified > 0);
}

TEST_CASE("engine agrees with explicit interval intersection") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 120; ++trial) {
    const support::RandomSet a = support::random_set(rng);
    std::vector<TranslatePart> parts;
    const std::size_t count = 2 + rng() % 2;
    for (std::size_t i = 0; i < count; ++i) {
      const Rational shift = make_rational(static_cast<std::int64_t>(rng() % 50) - 25, 25);
      parts.push_back(TranslatePart{a.expr, shift, 0});
    }
    for (std::size_t k = 1; k <= 3; ++k) {
      const EngineResult r = intersect_translates(parts, k);
      // brute force from the oracle's cells
      oracle::Pieces acc;
      for (std::size_t i = 0; i < parts.size(); ++i) {
        const oracle::Pieces cells = oracle::shifted(support::enumerate(a, k), -parts[i].shift);
        acc = i == 0 ? oracle::merge(cells) : oracle::pair_intersections(acc, cells);
      }
      CHECK(r.empty == acc.empty());
      CHECK(explicit_intersection(parts, k).empty() == acc.empty());
    }
  }
}

TEST_CASE("greedy points re-verify independently") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 15; ++trial) {
    std::vector<Rational> t;
    const std::size_t count = 1 + rng() % 6;
    for (std::size_t i = 0; i < count; ++i) t.push_back(make_rational(static_cast<std::int64_t>(1 + rng() % 74), 25 * 75));
    const Certificate c = lem1_common_point(0, {}, t, 3);
    REQUIRE(c.status == Status::PointFound);
    const DigitSetExpr c0 = cl_set(0);
    CHECK(in_cells(c0, *c.point, 3));
    for (const auto& x : t) CHECK(in_cells(c0, *c.point + x, 3));
    // a finite word evaluates to the point
    CHECK(eval_word(DigitWord{MixedRadixSystem::cl(), *c.digits}) == *c.point);
  }
}

TEST_CASE("carry identity on random anchors") {
  std::mt19937_64 rng(77);
  for (std::int64_t n : {1, 2}) {
    for (int trial = 0; trial < 4; ++trial) {
      std::vector<Rational> anchors;
      Rational x = make_rational(static_cast<std::int64_t>(rng() % 3000), 15625);
      for (std::int64_t i = 0; i <= n; ++i) {
        anchors.push_back(x);
        x += make_rational(1 + static_cast<std::int64_t>(rng() % 400), 15625 * 2);
      }
      if (anchors.back() - anchors.front() >= q(1, 5)) continue;
      const Certificate c = carry_intersection_point(n, anchors, 30);
      REQUIRE(c.status == Status::PointFound);
      CHECK(c.evidence.at("carry_identity_exact").get<bool>());
      REQUIRE(c.memberships.size() == static_cast<std::size_t>(n + 1));
      for (std::int64_t m = 0; m <= n; ++m) {
        const auto& mc = c.memberships[static_cast<std::size_t>(m)];
        CHECK(mc.ok);
        CHECK(in_cells(haar_family_member(n, m), mc.value, 30));
      }
    }
  }
}

TEST_CASE("avoiding pairs on random points") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<Rational> pts;
    for (int i = 0; i < 6; ++i) pts.push_back(make_rational(static_cast<std::int64_t>(rng() % 1000), 997));
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const AvoidingPairs ap = cantor_avoiding_pairs(pts, 3);
    CHECK(ap.certificate.status == Status::Verified);
    const auto g = generation_points(ap.witness, 3);
    const Rational tail = ap.witness.tail_bound(3);
    // padded differences of distinct branches never reach a pairwise difference
    for (std::size_t i = 0; i < g.size(); ++i) {
      for (std::size_t j = i + 1; j < g.size(); ++j) {
        const Rational d = g[j].value - g[i].value;
        for (const auto& a : pts) {
          for (const auto& b : pts) {
            if (a == b) continue;
            const Rational gap = a - b;
            CHECK((gap <= d - tail || gap >= d + tail));
          }
        }
      }
    }
  }
}
