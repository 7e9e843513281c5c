#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "haarlab/digit_set.hpp"

namespace haarlab {

struct NamedConstruction {
  std::string name;             // canonical identifier, e.g. "cl(0)"
  nlohmann::ordered_json params;
  MixedRadixSystem system;
  DigitSetExpr expr;
  nlohmann::ordered_json companions;  // gap sequences, m_l, L-sets, translate formulas
};

// Identifiers: ternary | gap(m) | haar_family(n) | haar_family(n,m) | cl(l) |
// w(k,l) | z(k,l) | t(k,n) | L(n) | notideal_X | notideal_A | notideal_B |
// notideal_Y | nullmeager | nullmeager(k_0,k_1,...) | reflect(ID). Long aliases
// (ternary_cantor, gap_set, cl_set, w_set, z_family, t_family, L_sets,
// nullmeager_X) are accepted as well.
NamedConstruction make(const std::string& identifier);
NamedConstruction make(const std::string& name, const nlohmann::json& params);

// L_0 = {8, 10}, L_n = 3 L_{n-1} u (3 L_{n-1} + 2).
std::vector<std::int64_t> L_set(std::size_t n);

struct LBoundsRow {
  std::size_t n;
  Integer max_l, min_l, m;
  bool max_below;      // max L_n < m_n - 1
  bool min_above;      // 2 min L_n > m_n + 1
  bool no_consecutive;
};
struct LBoundsReport {
  std::vector<LBoundsRow> rows;
  bool ok = true;
};
LBoundsReport check_L_bounds(std::size_t n_max);

// (3^{n-l} + 1)(m_l - 1) < 25 * 3^n - 3^{n-l}
bool pigeonhole_bound_holds(std::int64_t l, std::int64_t n);

// Building blocks shared with the certifier.
DigitSetExpr ternary_cantor();
DigitSetExpr gap_set(std::int64_t m);
DigitSetExpr haar_family_member(std::int64_t n, std::int64_t m);
DigitSetExpr cl_set(std::int64_t l);
// Points whose level-k digit avoids the m_l block.
DigitSetExpr w_set(std::int64_t k, std::int64_t l);
// Lemma-type translates x_j, j = 0..2m_l, then x_{2m_l+1} = 0.
std::vector<Rational> w_translates(std::int64_t k, std::int64_t l);

enum class NotIdealPart { X, A, B };
// min_member drops X_n (A_n, B_n) with n below it; the limit set stays.
DigitSetExpr notideal_set(NotIdealPart part, std::size_t min_member = 0);
// Level-n digits of X_n, A_n, B_n.
LevelRule notideal_level_rule(NotIdealPart part, std::size_t n);
DigitSetExpr nullmeager_set(std::vector<std::int64_t> schedule);

// Gap sequences whose translates miss the set.
std::vector<Rational> gap_sequence(std::int64_t m, std::size_t count);
std::vector<Rational> haar_family_gaps(std::int64_t n, std::int64_t m, std::size_t count);

// Full descriptor {"system": ..., "set": ...} and its inverse.
nlohmann::ordered_json to_descriptor(const DigitSetExpr& set);
DigitSetExpr parse_descriptor(const nlohmann::json& j);

}  // namespace haarlab
