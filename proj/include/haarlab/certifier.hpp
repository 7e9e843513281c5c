#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "haarlab/digit_set.hpp"
#include "haarlab/translate_engine.hpp"
#include "haarlab/witness.hpp"

namespace haarlab {

// Verified: a structural identity or bound was checked exactly (fixed points,
// separations, pair avoidance).
enum class Status { CertifiedEmpty, PointFound, Inconclusive, Verified };
std::string to_string(Status status);
Status status_from_string(const std::string& s);

struct MembershipCheck {
  std::string label;
  nlohmann::ordered_json set;  // full descriptor
  Rational value;  // sign * point + offset
  int sign = 1;
  Rational offset;
  std::size_t depth = 0;
  bool ok = false;
};

// claim["kind"] says how `check` re-verifies the certificate.
struct Certificate {
  nlohmann::ordered_json claim = nlohmann::ordered_json::object();
  Status status = Status::Inconclusive;
  std::string verdict;  // NOT_HAAR1, HAAR1, HAAR1_EVIDENCE, ALL_CERTIFIED, ... or empty
  std::size_t depth = 0;
  std::optional<std::vector<std::int64_t>> digits;
  std::optional<Rational> point;
  std::vector<MembershipCheck> memberships;
  std::vector<Interval> residual;
  nlohmann::ordered_json evidence = nlohmann::ordered_json::object();
  std::int64_t elapsed_ms = 0;

  nlohmann::ordered_json to_json() const;
  static Certificate from_json(const nlohmann::json& j);
};

MembershipCheck check_membership(const DigitSetExpr& set, const Rational& point, int sign, const Rational& offset,
                                 std::size_t depth, std::string label);

// ---------------------------------------------------------------- emptiness

Certificate certify_empty_intersection(const DigitSetExpr& set, const std::vector<Rational>& translates,
                                       const std::vector<Rational>& pads, std::size_t depth,
                                       const EngineOptions& options = {});

struct HaarReport {
  std::string verdict;  // ALL_CERTIFIED, INCONCLUSIVE, VACUOUS
  std::size_t tuples = 0;
  std::size_t certified = 0;
  std::size_t inconclusive = 0;
  std::vector<Certificate> certificates;  // lexicographic tuple order
  std::int64_t elapsed_ms = 0;
};

// Every `arity`-subset of generation-g branch points, pads = tail bound.
HaarReport verify_haar_n(const DigitSetExpr& set, const CantorWitness& witness, std::size_t arity,
                         std::size_t generation, std::size_t depth, unsigned workers = 1);

// Slot-cover certificate for one tuple of a lemma-type witness (cl, D, E):
// the tuple's slot pins every x + y_j modulo the slot's cell width, and the
// excluded arcs of the forbidden C_l block cover the whole circle.
Certificate certify_slot_cover(const CantorWitness& witness, std::size_t generation,
                               const std::vector<std::uint64_t>& tuple);

HaarReport verify_sampled_tuples(const CantorWitness& witness, std::size_t generation, std::size_t samples,
                                 std::uint64_t seed);

// ---------------------------------------------------------------- Haar-1

Certificate certify_haar1_gap_sequence(const DigitSetExpr& set, const std::vector<Rational>& gaps, std::size_t depth);

Certificate refute_haar1_difference_interval(const DigitSetExpr& set, const IntervalUnion& candidate);

// ---------------------------------------------------------------- greedy points

// Builds a finite word c (zero tail) digit by digit, smallest pool digit
// first. A digit is kept while the depth-(i+1) cell of c + t_j without an
// incoming carry is not forbidden; complete words are checked on their exact
// cells and the search backtracks on failure.
struct GreedySpec {
  MixedRadixSystem system;
  std::vector<Rational> translates;
  std::function<std::vector<std::int64_t>(std::size_t level)> pool;
  std::function<bool(std::size_t j, std::size_t level, const DigitWord& cell)> forbidden;
  std::vector<std::int64_t> prefix;  // forced leading digits (still checked)
  std::vector<DigitSetExpr> targets; // c + t_j must lie in targets[j]
  std::optional<DigitSetExpr> self_target;
  std::string label = "greedy";
};

Certificate greedy_common_point(const GreedySpec& spec, std::size_t depth);

// c in C_l extending `prefix` with c + t_j in C_l for every translate.
Certificate lem1_common_point(std::int64_t l, const std::vector<std::int64_t>& prefix,
                              const std::vector<Rational>& translates, std::size_t depth);

// r with r + c_i in X for decreasing c_0 < 12/25, c_i < 1/q(i-1).
Certificate refute_haar_finite_X(const std::vector<Rational>& translates, std::size_t depth);

// x with sequence_i - x in Y = X u -X for the first N terms; `limit` is the
// limit of the monotone sequence.
Certificate refute_null_finite(const std::vector<Rational>& sequence, const Rational& limit, std::size_t count,
                               std::size_t depth);

// x with x + e in the null-meager set for each point e; a nonempty prefix s
// forces x to extend s followed by a zero digit.
Certificate refute_haar_countable(const DigitSetExpr& set, const std::vector<Rational>& points, std::size_t depth,
                                  const std::vector<std::int64_t>& prefix = {});

// ---------------------------------------------------------------- carries

Certificate carry_intersection_point(std::int64_t n, const std::vector<Rational>& anchors, std::size_t depth);

// ---------------------------------------------------------------- not-ideal checks

// distance(project(A_{>k}, depth) - floor(m_k/2)/q(k), project(A, depth)) >= 1/q(k)
Certificate step4_separation(std::size_t k_tilde, std::size_t depth);

// ---------------------------------------------------------------- avoiding pairs

struct AvoidingPairs {
  CantorWitness witness;
  Certificate certificate;
};

AvoidingPairs cantor_avoiding_pairs(const std::vector<Rational>& points, std::size_t generation);

}  // namespace haarlab
