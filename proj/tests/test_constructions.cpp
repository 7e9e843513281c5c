#include <doctest.h>

#include "haarlab/constructions.hpp"
#include "haarlab/witness.hpp"
#include "haarlab/error.hpp"
#include "support.hpp"

using namespace haarlab;
using support::q;

TEST_CASE("L sets") {
  CHECK(L_set(0) == std::vector<std::int64_t>{8, 10});
  CHECK(L_set(1) == std::vector<std::int64_t>{24, 26, 30, 32});
  // recurrence written out
  std::vector<std::int64_t> prev{8, 10};
  for (std::size_t n = 1; n <= 6; ++n) {
    std::vector<std::int64_t> next;
    for (auto x : prev) next.push_back(3 * x);
    for (auto x : prev) next.push_back(3 * x + 2);
    std::sort(next.begin(), next.end());
    CHECK(L_set(n) == next);
    prev = next;
  }
}

TEST_CASE("L bounds") {
  const LBoundsReport r = check_L_bounds(8);
  CHECK(r.ok);
  REQUIRE(r.rows.size() == 9);
  CHECK(r.rows[0].max_l == 10);
  CHECK(r.rows[0].m - 1 == 11);
  CHECK(r.rows[0].min_l == 8);
  CHECK(2 * r.rows[0].min_l > r.rows[0].m + 1);  // 8 > 13/2
  for (const auto& row : r.rows) {
    CHECK(row.max_below);
    CHECK(row.min_above);
    CHECK(row.no_consecutive);
  }
}

TEST_CASE("pigeonhole inequality") {
  for (std::int64_t n = 0; n <= 8; ++n) {
    for (std::int64_t l = 0; l <= n; ++l) {
      const Integer p = pow_int(3, static_cast<unsigned long>(n - l));
      const Integer lhs = (p + 1) * (m_value(l) - 1);
      const Integer rhs = 25 * pow_int(3, static_cast<unsigned long>(n)) - p;
      CHECK(lhs < rhs);
      CHECK(pigeonhole_bound_holds(l, n));
    }
  }
}

TEST_CASE("named factories") {
  const NamedConstruction cl = make("cl(0)");
  CHECK(cl.name == "cl(0)");
  CHECK(cl.system == MixedRadixSystem::cl());
  const LevelRule r0 = cl.expr.product_spec().rule_at(0, cl.system);
  for (std::int64_t d = 0; d < 25; ++d) CHECK(r0.allows(d, 25) == (d != 12));

  const NamedConstruction g = make("gap(5)");
  CHECK(g.system == MixedRadixSystem::constant(5));
  const auto gaps = gap_sequence(5, 4);
  REQUIRE(gaps.size() == 4);
  for (std::size_t k = 0; k < gaps.size(); ++k) CHECK(gaps[k] == Rational(2) / Rational(pow_int(5, k + 1)));

  // d_{m,k} = 5 / (2 * 5^((n+1)k + m + 1))
  for (std::int64_t n : {1, 2}) {
    for (std::int64_t mm = 0; mm <= n; ++mm) {
      const auto hg = haar_family_gaps(n, mm, 4);
      for (std::size_t k = 0; k < hg.size(); ++k) {
        CHECK(hg[k] == Rational(5) / Rational(2 * pow_int(5, static_cast<unsigned long>((n + 1) * static_cast<std::int64_t>(k) + mm + 1))));
      }
    }
  }

  CHECK(make("ternary").name == make("ternary_cantor").name);
  CHECK(make("notideal_X").system == MixedRadixSystem::not_ideal());
  CHECK(make("nullmeager").system == MixedRadixSystem::null_meager({0}));
  CHECK(make("nullmeager(0,2,5)").system == MixedRadixSystem::null_meager({0, 2, 5}));
  CHECK(make("haar_family(2)").expr.kind() == DigitSetExpr::Kind::Union);
  CHECK(make("reflect(ternary)").expr.kind() == DigitSetExpr::Kind::Reflect);
  CHECK(make("L(1)").companions.at("L").at(1).size() == 4);
}

TEST_CASE("factory errors") {
  auto code = [](const std::string& id) {
    try {
      make(id);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::ParseError;
  };
  CHECK(code("sierpinski") == ErrorCode::UnknownConstruction);
  CHECK(code("gap(3)") == ErrorCode::InvalidParams);
  CHECK(code("cl(-1)") == ErrorCode::InvalidParams);
  CHECK(code("haar_family(1,2)") == ErrorCode::InvalidParams);
  CHECK(code("nullmeager(1,2)") == ErrorCode::InvalidSchedule);
}

TEST_CASE("w translates and Z/T families") {
  const auto x = w_translates(2, 1);
  CHECK(x.size() == static_cast<std::size_t>(2 * to_int64(m_value(1)) + 2));
  CHECK(std::is_sorted(x.begin(), x.end() - 1));
  CHECK(make("z(1,0)").expr.system() == MixedRadixSystem::cl());
  CHECK(make("t(1,1)").expr.system() == MixedRadixSystem::cl());
}
