#include "haarlab/certifier.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <random>
#include <set>
#include <thread>

#include "haarlab/constructions.hpp"
#include "haarlab/error.hpp"

namespace haarlab {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

class Stopwatch {
 public:
  std::int64_t ms() const {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

ordered_json rationals(const std::vector<Rational>& v) {
  ordered_json a = ordered_json::array();
  for (const auto& x : v) a.push_back(to_string(x));
  return a;
}

ordered_json interval_json(const Interval& iv) { return ordered_json::array({to_string(iv.lo), to_string(iv.hi)}); }

Rational word_value(const MixedRadixSystem& system, const std::vector<std::int64_t>& digits) {
  return eval_word(DigitWord{system, digits});
}

}  // namespace

std::string to_string(Status status) {
  switch (status) {
    case Status::CertifiedEmpty: return "CERTIFIED_EMPTY";
    case Status::PointFound: return "POINT_FOUND";
    case Status::Inconclusive: return "INCONCLUSIVE_AT_DEPTH";
    case Status::Verified: return "VERIFIED";
  }
  return "UNKNOWN";
}

Status status_from_string(const std::string& s) {
  if (s == "CERTIFIED_EMPTY") return Status::CertifiedEmpty;
  if (s == "POINT_FOUND") return Status::PointFound;
  if (s == "INCONCLUSIVE_AT_DEPTH") return Status::Inconclusive;
  if (s == "VERIFIED") return Status::Verified;
  throw Error(ErrorCode::ParseError, "unknown status '" + s + "'");
}

ordered_json Certificate::to_json() const {
  ordered_json j;
  j["claim"] = claim;
  j["status"] = to_string(status);
  j["verdict"] = verdict.empty() ? ordered_json(nullptr) : ordered_json(verdict);
  j["depth"] = depth;
  if (point) {
    ordered_json p;
    p["digits"] = digits ? ordered_json(*digits) : ordered_json(nullptr);
    p["value"] = to_string(*point);
    j["point"] = p;
  } else {
    j["point"] = nullptr;
  }
  if (memberships.empty()) {
    j["memberships"] = nullptr;
  } else {
    ordered_json ms = ordered_json::array();
    for (const auto& m : memberships) {
      ordered_json e;
      e["label"] = m.label;
      e["set"] = m.set;
      e["sign"] = m.sign;
      e["offset"] = to_string(m.offset);
      e["value"] = to_string(m.value);
      e["depth"] = m.depth;
      e["ok"] = m.ok;
      ms.push_back(e);
    }
    j["memberships"] = ms;
  }
  if (status == Status::Inconclusive && !residual.empty()) {
    ordered_json r = ordered_json::array();
    for (const auto& iv : residual) r.push_back(interval_json(iv));
    j["residual"] = r;
  } else {
    j["residual"] = nullptr;
  }
  j["evidence"] = evidence;
  j["elapsed_ms"] = elapsed_ms;
  return j;
}

Certificate Certificate::from_json(const json& j) {
  try {
    Certificate c;
    c.claim = j.at("claim");
    c.status = status_from_string(j.at("status").get<std::string>());
    if (j.contains("verdict") && j.at("verdict").is_string()) c.verdict = j.at("verdict").get<std::string>();
    c.depth = j.at("depth").get<std::size_t>();
    if (j.contains("point") && j.at("point").is_object()) {
      const auto& p = j.at("point");
      c.point = parse_rational(p.at("value").get<std::string>());
      if (p.contains("digits") && p.at("digits").is_array()) c.digits = p.at("digits").get<std::vector<std::int64_t>>();
    }
    if (j.contains("memberships") && j.at("memberships").is_array()) {
      for (const auto& e : j.at("memberships")) {
        MembershipCheck m;
        m.label = e.at("label").get<std::string>();
        m.set = e.at("set");
        m.sign = e.at("sign").get<int>();
        m.offset = parse_rational(e.at("offset").get<std::string>());
        m.value = parse_rational(e.at("value").get<std::string>());
        m.depth = e.at("depth").get<std::size_t>();
        m.ok = e.at("ok").get<bool>();
        c.memberships.push_back(std::move(m));
      }
    }
    if (j.contains("residual") && j.at("residual").is_array()) {
      for (const auto& iv : j.at("residual")) {
        c.residual.push_back(Interval{parse_rational(iv.at(0).get<std::string>()), parse_rational(iv.at(1).get<std::string>())});
      }
    }
    if (j.contains("evidence")) c.evidence = j.at("evidence");
    if (j.contains("elapsed_ms")) c.elapsed_ms = j.at("elapsed_ms").get<std::int64_t>();
    return c;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("certificate: ") + e.what());
  }
}

MembershipCheck check_membership(const DigitSetExpr& set, const Rational& point, int sign, const Rational& offset,
                                 std::size_t depth, std::string label) {
  MembershipCheck m;
  m.label = std::move(label);
  m.set = to_descriptor(set);
  m.sign = sign;
  m.offset = offset;
  m.value = (sign < 0 ? -point : point) + offset;
  m.depth = depth;
  m.ok = member_at_depth(set, m.value, depth);
  return m;
}

// ---------------------------------------------------------------- emptiness

Certificate certify_empty_intersection(const DigitSetExpr& set, const std::vector<Rational>& translates,
                                       const std::vector<Rational>& pads, std::size_t depth,
                                       const EngineOptions& options) {
  const Stopwatch watch;
  if (translates.empty()) throw Error(ErrorCode::InvalidArgument, "at least one translate is required");
  if (!pads.empty() && pads.size() != translates.size()) {
    throw Error(ErrorCode::InvalidArgument, "one pad per translate");
  }
  std::vector<TranslatePart> parts;
  std::vector<Rational> used_pads;
  for (std::size_t i = 0; i < translates.size(); ++i) {
    const Rational pad = pads.empty() ? Rational(0) : pads[i];
    if (pad < 0) throw Error(ErrorCode::InvalidArgument, "pads must be non-negative");
    parts.push_back(TranslatePart{set, translates[i], pad});
    used_pads.push_back(pad);
  }
  const EngineResult r = intersect_translates(parts, depth, options);

  Certificate c;
  c.claim["kind"] = "empty_intersection";
  c.claim["set"] = to_descriptor(set);
  c.claim["translates"] = rationals(translates);
  c.claim["pads"] = rationals(used_pads);
  c.claim["pad_convention"] = "half-open [0, pad)";
  c.claim["tuple_size"] = translates.size();
  c.status = r.empty ? Status::CertifiedEmpty : Status::Inconclusive;
  c.depth = depth;
  c.residual = r.residual;
  c.evidence["emptied_at_depth"] = r.empty ? ordered_json(r.depth) : ordered_json(nullptr);
  c.evidence["refined_depth"] = r.depth;
  c.evidence["surviving_signatures"] = r.signatures;
  c.evidence["window_limited"] = r.window_limited;
  c.evidence["residual_complete"] = r.residual_complete;
  c.elapsed_ms = watch.ms();
  return c;
}

namespace {

std::vector<std::vector<std::uint64_t>> all_subsets(std::uint64_t n, std::size_t k) {
  std::vector<std::vector<std::uint64_t>> out;
  if (k > n) return out;
  if (binomial(static_cast<unsigned long>(n), static_cast<unsigned long>(k)) > 2000000) {
    throw Error(ErrorCode::CapacityExceeded, "too many tuples to enumerate");
  }
  std::vector<std::uint64_t> cur(k);
  for (std::size_t i = 0; i < k; ++i) cur[i] = i;
  while (true) {
    out.push_back(cur);
    std::size_t i = k;
    while (i > 0 && cur[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) break;
    ++cur[i - 1];
    for (std::size_t t = i; t < k; ++t) cur[t] = cur[t - 1] + 1;
  }
  return out;
}

template <typename Fn>
void run_parallel(std::size_t count, unsigned workers, Fn fn) {
  workers = std::max(1u, workers);
  if (workers == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

void finish_report(HaarReport& report) {
  report.tuples = report.certificates.size();
  for (const auto& c : report.certificates) {
    if (c.status == Status::CertifiedEmpty) {
      ++report.certified;
    } else {
      ++report.inconclusive;
    }
  }
  if (report.tuples == 0) {
    report.verdict = "VACUOUS";
  } else {
    report.verdict = report.inconclusive == 0 ? "ALL_CERTIFIED" : "INCONCLUSIVE";
  }
}

}  // namespace

HaarReport verify_haar_n(const DigitSetExpr& set, const CantorWitness& witness, std::size_t arity,
                         std::size_t generation, std::size_t depth, unsigned workers) {
  const Stopwatch watch;
  if (arity == 0) throw Error(ErrorCode::InvalidArgument, "tuple size must be positive");
  if (generation > 20) throw Error(ErrorCode::CapacityExceeded, "generation too large to enumerate");
  const auto points = generation_points(witness, generation);
  const Rational pad = witness.tail_bound(generation);
  const auto tuples = all_subsets(points.size(), arity);

  HaarReport report;
  report.certificates.resize(tuples.size());
  run_parallel(tuples.size(), workers, [&](std::size_t i) {
    std::vector<Rational> translates;
    ordered_json branches = ordered_json::array();
    for (auto b : tuples[i]) {
      translates.push_back(points[b].value);
      branches.push_back(to_string(points[b].branch));
    }
    Certificate c = certify_empty_intersection(set, translates, std::vector<Rational>(translates.size(), pad), depth);
    c.claim["witness"] = witness.name();
    c.claim["generation"] = generation;
    c.claim["branches"] = branches;
    report.certificates[i] = std::move(c);
  });
  finish_report(report);
  report.elapsed_ms = watch.ms();
  return report;
}

// ---------------------------------------------------------------- slot cover

Certificate certify_slot_cover(const CantorWitness& witness, std::size_t generation,
                               const std::vector<std::uint64_t>& tuple) {
  const Stopwatch watch;
  const SlotLocation loc = locate_slot(witness, generation, tuple);
  const Integer& a = loc.level;
  if (a > 10000000) throw Error(ErrorCode::CapacityExceeded, "slot level beyond 10^7");
  const auto au = a.get_ui();
  const auto l = static_cast<unsigned long>(loc.l);
  if (au < l) throw Error(ErrorCode::InvalidParams, "slot level below l");

  // integer units of 1 / (R_a R_{a+1} R_{a+2}) of the level-a cell width
  const Integer p3 = pow_int(3, au);
  const Integer Ra = 25 * p3;
  const Integer Ra1 = 75 * p3;
  const Integer Ra2 = 225 * p3;
  const Integer unit_a = Ra1 * Ra2;
  const Integer modulus = Ra * unit_a;
  const Integer m = m_value(loc.l);
  const Integer block = pow_int(3, au - l);
  const Integer g_lo = m * block * unit_a;
  const Integer g_hi = (m + 1) * block * unit_a;
  const Integer tail = 2 * m * block * 9 + 1;  // level a+2 digit bound plus the rest
  if (g_hi - tail <= g_lo) throw Error(ErrorCode::InvalidParams, "tail bound swallows the gap");

  const Integer pos = a - witness.block_start(generation);
  struct Arc {
    Integer lo;
    Integer len;
  };
  std::vector<Arc> arcs;
  ordered_json branches = ordered_json::array();
  for (auto b : tuple) {
    const Branch s = branch_from_index(b, generation);
    branches.push_back(to_string(s));
    const Integer d0 = witness.digit(s, pos);
    const Integer d1 = witness.digit(s, pos + 1);
    const Integer here = d0 * unit_a + d1 * Ra2;
    Integer lo = g_lo - here;
    mpz_fdiv_r(lo.get_mpz_t(), lo.get_mpz_t(), modulus.get_mpz_t());
    arcs.push_back(Arc{lo, g_hi - tail - g_lo});
  }
  auto inside = [&](const Integer& p) {
    for (const auto& arc : arcs) {
      Integer d = p - arc.lo;
      if (d < 0) d += modulus;
      if (d > 0 && d < arc.len) return true;
    }
    return false;
  };
  bool covered = true;
  std::size_t bad_endpoint = 0;
  for (std::size_t i = 0; i < arcs.size() && covered; ++i) {
    Integer hi = arcs[i].lo + arcs[i].len;
    if (hi >= modulus) hi -= modulus;
    if (!inside(arcs[i].lo)) {
      covered = false;
      bad_endpoint = i;
    } else if (!inside(hi)) {
      covered = false;
      bad_endpoint = i;
    }
  }

  Certificate c;
  c.claim["kind"] = "slot_cover";
  c.claim["witness"] = witness.name();
  c.claim["generation"] = generation;
  ordered_json t = ordered_json::array();
  for (auto b : tuple) t.push_back(b);
  c.claim["tuple"] = t;
  c.claim["branches"] = branches;
  c.claim["set"] = "cl(" + std::to_string(loc.l) + ")";
  c.status = covered ? Status::CertifiedEmpty : Status::Inconclusive;
  c.depth = au + 2;
  c.evidence["slot"] = to_string(loc.slot);
  c.evidence["level"] = to_string(a);
  c.evidence["l"] = loc.l;
  c.evidence["arcs"] = arcs.size();
  c.evidence["circle"] = "x modulo 1/q(level-1)";
  if (!covered) c.evidence["uncovered_endpoint_of_arc"] = bad_endpoint;
  c.elapsed_ms = watch.ms();
  return c;
}

HaarReport verify_sampled_tuples(const CantorWitness& witness, std::size_t generation, std::size_t samples,
                                 std::uint64_t seed) {
  const Stopwatch watch;
  if (generation > 62) throw Error(ErrorCode::CapacityExceeded, "generation too large");
  const std::uint64_t branches = std::uint64_t{1} << generation;
  const std::size_t size = slot_tuple_size(witness, generation);
  if (size > branches) throw Error(ErrorCode::InvalidArgument, "generation has fewer branches than a tuple");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint64_t> pick(0, branches - 1);
  HaarReport report;
  for (std::size_t s = 0; s < samples; ++s) {
    std::set<std::uint64_t> chosen;
    while (chosen.size() < size) chosen.insert(pick(rng));
    const std::vector<std::uint64_t> tuple(chosen.begin(), chosen.end());
    report.certificates.push_back(certify_slot_cover(witness, generation, tuple));
  }
  finish_report(report);
  report.elapsed_ms = watch.ms();
  return report;
}

// ---------------------------------------------------------------- Haar-1

Certificate certify_haar1_gap_sequence(const DigitSetExpr& set, const std::vector<Rational>& gaps, std::size_t depth) {
  const Stopwatch watch;
  if (gaps.empty()) throw Error(ErrorCode::InvalidArgument, "gap list is empty");
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    if (gaps[i] <= 0) throw Error(ErrorCode::InvalidArgument, "gaps must be positive");
    if (i > 0 && gaps[i] >= gaps[i - 1]) throw Error(ErrorCode::InvalidArgument, "gaps must decrease strictly");
  }
  Certificate c;
  c.claim["kind"] = "gap_sequence";
  c.claim["set"] = to_descriptor(set);
  c.claim["gaps"] = rationals(gaps);
  c.depth = depth;
  ordered_json per = ordered_json::array();
  std::optional<std::size_t> last_certified;
  bool all = true;
  for (std::size_t k = 0; k < gaps.size(); ++k) {
    const Certificate g = certify_empty_intersection(set, {Rational(0), gaps[k]}, {}, depth);
    ordered_json e;
    e["index"] = k;
    e["gap"] = to_string(gaps[k]);
    e["status"] = to_string(g.status);
    e["emptied_at_depth"] = g.evidence["emptied_at_depth"];
    per.push_back(e);
    if (g.status == Status::CertifiedEmpty) {
      last_certified = k;
    } else {
      all = false;
      if (c.residual.empty()) c.residual = g.residual;
    }
  }
  c.status = all ? Status::CertifiedEmpty : Status::Inconclusive;
  if (all) c.verdict = "HAAR1_EVIDENCE";
  c.evidence["gaps"] = per;
  c.evidence["largest_certified_index"] = last_certified ? ordered_json(*last_certified) : ordered_json(nullptr);
  c.elapsed_ms = watch.ms();
  return c;
}

Certificate refute_haar1_difference_interval(const DigitSetExpr& set, const IntervalUnion& candidate) {
  const Stopwatch watch;
  if (set.kind() != DigitSetExpr::Kind::Product || !set.system().is_constant()) {
    throw Error(ErrorCode::InvalidArgument, "difference IFS needs a constant-radix product set");
  }
  const ProductSpec& spec = set.product_spec();
  if (!spec.prefix.empty() || spec.tail.kind != TailRule::Kind::Repeat || spec.tail.cycle.size() != 1) {
    throw Error(ErrorCode::InvalidArgument, "difference IFS needs one repeating digit rule");
  }
  const std::int64_t radix = set.system().constant_radix();
  std::vector<std::int64_t> digits;
  for (const auto& r : spec.tail.cycle.front().ranges(radix)) {
    for (auto d = r.lo; d <= r.hi; ++d) digits.push_back(d);
  }
  std::set<std::int64_t> diff;
  for (auto a : digits) {
    for (auto b : digits) diff.insert(a - b);
  }
  std::vector<Rational> offsets;
  for (auto d : diff) offsets.push_back(Rational(static_cast<long>(d)));
  if (candidate.empty()) throw Error(ErrorCode::NotAFixedPoint, "empty candidate is not the difference set");
  const IntervalUnion image = ifs_step(candidate, Rational(static_cast<long>(radix)), offsets);
  if (!(image == candidate)) throw Error(ErrorCode::NotAFixedPoint, "candidate is not fixed by the difference IFS");

  bool zero_inside = false;
  for (const auto& iv : candidate.intervals()) {
    if (iv.lo < 0 && iv.hi > 0) zero_inside = true;
  }
  Certificate c;
  c.claim["kind"] = "fixed_point";
  c.claim["set"] = to_descriptor(set);
  ordered_json cand = ordered_json::array();
  for (const auto& iv : candidate.intervals()) cand.push_back(interval_json(iv));
  c.claim["candidate"] = cand;
  c.status = Status::Verified;
  c.verdict = zero_inside ? "NOT_HAAR1" : (has_interior(candidate) ? "INTERIOR_AWAY_FROM_ZERO" : "HAAR1");
  c.evidence["ratio"] = radix;
  ordered_json off = ordered_json::array();
  for (auto d : diff) off.push_back(d);
  c.evidence["offsets"] = off;
  c.evidence["fixed_point"] = true;
  c.elapsed_ms = watch.ms();
  return c;
}

// ---------------------------------------------------------------- greedy points

Certificate greedy_common_point(const GreedySpec& spec, std::size_t depth) {
  const Stopwatch watch;
  if (depth == 0) throw Error(ErrorCode::InvalidArgument, "depth must be positive");
  if (spec.targets.size() != spec.translates.size()) throw Error(ErrorCode::InvalidArgument, "one target per translate");
  for (const auto& t : spec.translates) {
    if (t < 0) throw Error(ErrorCode::InvalidArgument, "translates must be non-negative");
  }
  const MixedRadixSystem& sys = spec.system;
  const std::size_t count = spec.translates.size();
  std::vector<std::vector<Integer>> cell_of(depth, std::vector<Integer>(count));
  for (std::size_t level = 0; level < depth; ++level) {
    for (std::size_t j = 0; j < count; ++j) cell_of[level][j] = floor_of(spec.translates[j] * Rational(sys.q(level)));
  }
  auto blocked = [&](std::size_t j, std::size_t level, const Integer& cell) {
    return cell < sys.q(level) && spec.forbidden(j, level, word_from_cell(sys, cell, level + 1));
  };
  // the finite word c has a zero tail, so each c + t_j has exact cells
  auto exact_ok = [&](const std::vector<std::int64_t>& word) {
    const Rational value = word_value(sys, word);
    for (std::size_t j = 0; j < count; ++j) {
      for (std::size_t level = 0; level < depth; ++level) {
        if (blocked(j, level, floor_of((value + spec.translates[j]) * Rational(sys.q(level))))) return false;
      }
    }
    return true;
  };

  // Depth-first over pool digits in increasing order, pruning on the cell that
  // c + t_j occupies when no carry arrives from below.
  std::vector<std::int64_t> digits;
  std::size_t nodes = 0;
  std::size_t deepest = 0;
  const std::size_t budget = 200000;
  std::function<bool(std::size_t, const Integer&)> extend = [&](std::size_t level, const Integer& prefix_index) {
    if (level == depth) return exact_ok(digits);
    deepest = std::max(deepest, level);
    const Integer radix = sys.radix(level);
    const std::vector<std::int64_t> pool =
        level < spec.prefix.size() ? std::vector<std::int64_t>{spec.prefix[level]} : spec.pool(level);
    for (auto d : pool) {
      if (d < 0 || Integer(static_cast<long>(d)) >= radix) continue;
      if (++nodes > budget) return false;
      const Integer p = prefix_index * radix + static_cast<long>(d);
      bool ok = true;
      for (std::size_t j = 0; j < count && ok; ++j) ok = !blocked(j, level, p + cell_of[level][j]);
      if (!ok) continue;
      digits.push_back(d);
      if (extend(level + 1, p)) return true;
      digits.pop_back();
    }
    return false;
  };
  if (!extend(0, Integer(0))) {
    throw Error(ErrorCode::NoAdmissibleDigit, spec.label + ": no admissible digit at level " + std::to_string(deepest) +
                                                   (nodes > budget ? " (search budget exhausted)" : ""));
  }

  Certificate c;
  const Rational value = word_value(sys, digits);
  c.claim["kind"] = "common_point";
  c.claim["label"] = spec.label;
  c.claim["system"] = system_to_json(sys);
  c.claim["translates"] = rationals(spec.translates);
  c.depth = depth;
  c.digits = digits;
  c.point = value;
  c.evidence["digit_value"] = to_string(value);
  c.evidence["search_nodes"] = nodes;
  if (spec.self_target) {
    c.memberships.push_back(check_membership(*spec.self_target, value, 1, Rational(0), depth, "c"));
  }
  for (std::size_t j = 0; j < spec.translates.size(); ++j) {
    c.memberships.push_back(
        check_membership(spec.targets[j], value, 1, spec.translates[j], depth, "c + t_" + std::to_string(j)));
  }
  const bool all = std::all_of(c.memberships.begin(), c.memberships.end(), [](const auto& m) { return m.ok; });
  c.status = all ? Status::PointFound : Status::Inconclusive;
  c.elapsed_ms = watch.ms();
  return c;
}

Certificate lem1_common_point(std::int64_t l, const std::vector<std::int64_t>& prefix,
                              const std::vector<Rational>& translates, std::size_t depth) {
  const DigitSetExpr cl = cl_set(l);
  const MixedRadixSystem sys = cl.system();
  if (!prefix.empty()) {
    if (prefix.size() > depth) throw Error(ErrorCode::InvalidArgument, "prefix longer than depth");
    if (!is_admissible_prefix(cl, DigitWord{sys, prefix})) {
      throw Error(ErrorCode::InvalidArgument, "prefix is not admissible for C_" + std::to_string(l));
    }
    const Rational bound = make_rational(Integer(1), sys.q(prefix.size() - 1));
    for (const auto& t : translates) {
      if (t >= bound) throw Error(ErrorCode::InvalidArgument, "translates must lie below the prefix cell width");
    }
  }
  const std::int64_t m = to_int64(m_value(l));
  auto block_width = [l](std::size_t level) {
    return to_int64(pow_int(3, static_cast<unsigned long>(static_cast<std::int64_t>(level) - l)));
  };
  GreedySpec spec{sys, translates, {}, {}, prefix, std::vector<DigitSetExpr>(translates.size(), cl), cl,
                  "lem1(l=" + std::to_string(l) + ")"};
  spec.pool = [&](std::size_t level) {
    const std::int64_t radix = sys.small_radix(level);
    std::vector<std::int64_t> pool;
    const bool constrained = static_cast<std::int64_t>(level) >= l;
    const std::int64_t w = constrained ? block_width(level) : 1;
    for (std::int64_t d = 0; d < radix; ++d) {
      if (!constrained || d / w != m) pool.push_back(d);
    }
    return pool;
  };
  spec.forbidden = [&](std::size_t, std::size_t level, const DigitWord& cell) {
    if (static_cast<std::int64_t>(level) < l) return false;
    return cell.digits[level] / block_width(level) == m;
  };
  Certificate c = greedy_common_point(spec, depth);
  c.claim["kind"] = "common_point";
  c.claim["variant"] = "lem1";
  c.claim["l"] = l;
  c.claim["prefix"] = prefix;
  return c;
}

namespace {

void require_decreasing_positive(const std::vector<Rational>& v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] <= 0) throw Error(ErrorCode::InvalidArgument, "translates must be positive");
    if (i > 0 && v[i] >= v[i - 1]) throw Error(ErrorCode::InvalidArgument, "translates must decrease strictly");
  }
}

}  // namespace

Certificate refute_haar_finite_X(const std::vector<Rational>& translates, std::size_t depth) {
  require_decreasing_positive(translates);
  const DigitSetExpr x = make("notideal_X").expr;
  const MixedRadixSystem sys = x.system();
  bool within = true;
  for (std::size_t i = 0; i < translates.size(); ++i) {
    const Rational bound = i == 0 ? make_rational(12, 25) : make_rational(Integer(1), sys.q(i - 1));
    if (translates[i] >= bound) within = false;
  }
  std::vector<std::vector<std::int64_t>> L;
  for (std::size_t i = 0; i <= depth; ++i) L.push_back(L_set(i));
  auto in_L = [&L](std::size_t level, std::int64_t d) { return std::binary_search(L[level].begin(), L[level].end(), d); };

  GreedySpec spec{sys, translates, {}, {}, {}, std::vector<DigitSetExpr>(translates.size(), x), x, "haar-finite-X"};
  spec.pool = [&L](std::size_t level) { return L[level]; };
  spec.forbidden = [&](std::size_t j, std::size_t level, const DigitWord& cell) {
    if (level < j) return false;
    for (std::size_t i = 0; i < j; ++i) {
      if (!in_L(i, cell.digits[i])) return false;
    }
    const std::int64_t w = to_int64(pow_int(3, static_cast<unsigned long>(level - j)));
    return cell.digits[level] / w == to_int64(m_value(static_cast<std::int64_t>(j)));
  };
  Certificate c = greedy_common_point(spec, depth);
  c.claim["variant"] = "haar_finite_X";
  c.claim["set"] = "notideal_X";
  c.evidence["translates_within_bounds"] = within;
  return c;
}

Certificate refute_null_finite(const std::vector<Rational>& sequence, const Rational& limit, std::size_t count,
                               std::size_t depth) {
  const Stopwatch watch;
  if (count > sequence.size()) throw Error(ErrorCode::InvalidArgument, "sequence shorter than N");
  Certificate c;
  c.claim["kind"] = "null_finite";
  c.claim["system"] = system_to_json(MixedRadixSystem::not_ideal());
  c.claim["sequence"] = rationals(std::vector<Rational>(sequence.begin(), sequence.begin() + static_cast<long>(count)));
  c.claim["limit"] = to_string(limit);
  c.claim["count"] = count;
  c.claim["set"] = "notideal_Y";
  c.depth = depth;
  if (count == 0) {
    c.status = Status::Verified;
    c.verdict = "VACUOUS";
    c.elapsed_ms = watch.ms();
    return c;
  }
  const bool decreasing = sequence.front() > limit;
  std::vector<Rational> offsets;
  for (std::size_t i = 0; i < count; ++i) {
    const Rational d = decreasing ? sequence[i] - limit : limit - sequence[i];
    if (d <= 0) throw Error(ErrorCode::InvalidArgument, "sequence is not monotone towards its limit");
    offsets.push_back(d);
  }
  const Certificate inner = refute_haar_finite_X(offsets, depth);
  const Rational r = *inner.point;
  const Rational x = decreasing ? Rational(limit - r) : Rational(limit + r);
  const DigitSetExpr y = make("notideal_Y").expr;

  c.claim["case"] = decreasing ? "decreasing" : "increasing";
  c.digits = inner.digits;
  c.point = x;
  c.evidence["digit_value"] = to_string(r);
  c.evidence["relation"] = decreasing ? "point = limit - digit_value" : "point = limit + digit_value";
  c.evidence["translates_within_bounds"] = inner.evidence["translates_within_bounds"];
  for (std::size_t i = 0; i < count; ++i) {
    c.memberships.push_back(check_membership(y, x, -1, sequence[i], depth, "s_" + std::to_string(i) + " - x"));
  }
  const bool all = std::all_of(c.memberships.begin(), c.memberships.end(), [](const auto& m) { return m.ok; });
  c.status = all ? Status::PointFound : Status::Inconclusive;
  c.elapsed_ms = watch.ms();
  return c;
}

Certificate refute_haar_countable(const DigitSetExpr& set, const std::vector<Rational>& points, std::size_t depth,
                                  const std::vector<std::int64_t>& prefix) {
  const MixedRadixSystem& sys = set.system();
  if (sys.rule() != RadixRule::NullMeager) throw Error(ErrorCode::SystemMismatch, "needs a null-meager set");
  std::vector<std::int64_t> forced = prefix;
  forced.push_back(0);
  if (forced.size() > depth) throw Error(ErrorCode::InvalidArgument, "prefix longer than depth");
  GreedySpec spec{sys, points, {}, {}, forced, std::vector<DigitSetExpr>(points.size(), set), std::nullopt,
                  prefix.empty() ? "haar-countable" : "haar-countable-prefix"};
  spec.pool = [&sys](std::size_t level) {
    const std::int64_t m = sys.block_of(level);
    std::vector<std::int64_t> pool;
    for (std::int64_t d = m + 2; d <= 2 * m + 2; ++d) pool.push_back(d);
    return pool;
  };
  spec.forbidden = [&sys](std::size_t, std::size_t level, const DigitWord& cell) {
    return cell.digits[level] == sys.block_of(level) + 1;
  };
  Certificate c = greedy_common_point(spec, depth);
  c.claim["variant"] = prefix.empty() ? "haar_countable" : "haar_countable_prefix";
  c.claim["set"] = to_descriptor(set);
  c.claim["prefix"] = prefix;
  return c;
}

// ---------------------------------------------------------------- carries

Certificate carry_intersection_point(std::int64_t n, const std::vector<Rational>& anchors, std::size_t depth) {
  const Stopwatch watch;
  if (n < 1) throw Error(ErrorCode::InvalidParams, "n must be at least 1");
  if (anchors.size() != static_cast<std::size_t>(n + 1)) throw Error(ErrorCode::InvalidArgument, "need n + 1 anchors");
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    if (anchors[i] < 0 || anchors[i] >= 1) throw Error(ErrorCode::InvalidArgument, "anchors must lie in [0, 1)");
    if (i > 0 && anchors[i] <= anchors[i - 1]) throw Error(ErrorCode::InvalidArgument, "anchors must increase strictly");
  }
  if (anchors.back() - anchors.front() >= make_rational(1, 5)) {
    throw Error(ErrorCode::InvalidArgument, "anchor spread must stay below 1/5");
  }
  const auto sys = MixedRadixSystem::constant(5);
  const auto period = static_cast<std::size_t>(n + 1);
  std::vector<Rational> d;
  std::vector<DigitWord> dw;
  bool exact = true;
  for (const auto& x : anchors) {
    d.push_back(x - anchors.front());
    dw.push_back(expand(sys, d.back(), depth));
    if (eval_word(dw.back()) != d.back()) exact = false;
  }
  DigitWord a0{sys, std::vector<std::int64_t>(depth, 0)};
  for (std::size_t i = 0; i < depth; ++i) {
    const std::size_t m = i % period;
    a0.digits[i] = m == 0 ? 0 : 4 - dw[m].digits[i];
  }
  const Rational a0v = eval_word(a0);

  Certificate c;
  c.claim["kind"] = "carry";
  c.claim["system"] = system_to_json(sys);
  c.claim["n"] = n;
  c.claim["anchors"] = rationals(anchors);
  c.depth = depth;
  c.digits = a0.digits;
  c.point = a0v;
  c.evidence["digit_value"] = to_string(a0v);
  c.evidence["refutation_point"] = to_string(a0v - anchors.front());
  c.evidence["anchor_expansions_exact"] = exact;
  ordered_json carries = ordered_json::array();
  bool carry_exact = true;
  for (std::size_t m = 0; m < period; ++m) {
    const CarryTrace trace = add_with_carry(a0, dw[m]);
    const bool identity = a0v + eval_word(dw[m]) == eval_word(trace.result);
    carry_exact = carry_exact && identity;
    ordered_json e;
    e["m"] = m;
    e["a_m"] = trace.result.digits;
    e["beta"] = trace.beta;
    e["sum_identity"] = identity;
    carries.push_back(e);
    c.memberships.push_back(check_membership(haar_family_member(n, static_cast<std::int64_t>(m)), a0v, 1, d[m], depth,
                                             "a_0 + d_" + std::to_string(m) + " in A_" + std::to_string(m)));
  }
  c.evidence["carries"] = carries;
  c.evidence["carry_identity_exact"] = carry_exact;
  const bool all = std::all_of(c.memberships.begin(), c.memberships.end(), [](const auto& e) { return e.ok; });
  c.status = all && carry_exact && depth >= period ? Status::PointFound : Status::Inconclusive;
  c.elapsed_ms = watch.ms();
  return c;
}

// ---------------------------------------------------------------- not-ideal checks

Certificate step4_separation(std::size_t k_tilde, std::size_t depth) {
  const Stopwatch watch;
  if (depth <= k_tilde) throw Error(ErrorCode::InsufficientDepth, "depth must exceed the level");
  const DigitSetExpr a = notideal_set(NotIdealPart::A);
  const DigitSetExpr upper = notideal_set(NotIdealPart::A, k_tilde + 1);
  const Integer& q = a.system().q(k_tilde);
  const Rational shift = make_rational(m_value(static_cast<std::int64_t>(k_tilde)) / 2, q);
  const IntervalUnion u = translate(project(upper, depth), -shift);
  const IntervalUnion v = project(a, depth);
  const auto dist = distance(u, v);
  const Rational need = make_rational(Integer(1), q);

  Certificate c;
  c.claim["kind"] = "separation";
  c.claim["k"] = k_tilde;
  c.claim["shift"] = to_string(shift);
  c.claim["bound"] = to_string(need);
  c.depth = depth;
  c.evidence["distance"] = dist ? ordered_json(to_string(*dist)) : ordered_json(nullptr);
  c.evidence["shifted_pieces"] = u.size();
  c.evidence["projected_pieces"] = v.size();
  c.status = dist && *dist >= need ? Status::Verified : Status::Inconclusive;
  c.elapsed_ms = watch.ms();
  return c;
}

// ---------------------------------------------------------------- avoiding pairs

AvoidingPairs cantor_avoiding_pairs(const std::vector<Rational>& points, std::size_t generation) {
  const Stopwatch watch;
  if (generation == 0 || generation > 16) throw Error(ErrorCode::InvalidArgument, "generation must be in 1..16");
  std::set<Rational> diffs;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (i == j) continue;
      if (points[i] == points[j]) throw Error(ErrorCode::InvalidArgument, "points must be distinct");
      if (points[i] > points[j]) diffs.insert(points[i] - points[j]);
    }
  }
  // a split at length l moves pairs apart by a distance in [3^-l / 2, 3 * 3^-l / 2]
  auto band = [](std::int64_t len) {
    const Integer p = pow_int(3, static_cast<unsigned long>(len));
    return Interval{make_rational(Integer(1), 2 * p), make_rational(Integer(3), 2 * p)};
  };
  auto band_clear = [&](std::int64_t len) {
    const Interval b = band(len);
    auto it = diffs.lower_bound(b.lo);
    return it == diffs.end() || *it > b.hi;
  };
  std::vector<std::int64_t> lengths;
  std::int64_t len = 0;
  const std::optional<Rational> smallest = diffs.empty() ? std::nullopt : std::optional<Rational>(*diffs.begin());
  while (lengths.size() < generation || (smallest && band(len + 1).hi >= *smallest)) {
    ++len;
    if (band_clear(len)) lengths.push_back(len);
    if (len > 100000) throw Error(ErrorCode::CapacityExceeded, "no clear length found");
  }
  CantorWitness witness = build_tail_marker_witness(lengths);

  // exhaustive padded pair check at the requested generation
  const auto pts = generation_points(witness, generation);
  const Rational tb = witness.tail_bound(generation);
  bool pairs_ok = true;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < pts.size() && pairs_ok; ++i) {
    for (std::size_t j = i + 1; j < pts.size() && pairs_ok; ++j) {
      ++pairs;
      Rational lo = pts[j].value - pts[i].value - tb;
      Rational hi = pts[j].value - pts[i].value + tb;
      if (lo > hi) std::swap(lo, hi);
      for (const auto& d : diffs) {
        if ((d >= lo && d <= hi) || (-d >= lo && -d <= hi)) {
          pairs_ok = false;
          break;
        }
      }
    }
  }
  bool lengths_ok = true;
  for (auto l : lengths) lengths_ok = lengths_ok && band_clear(l);
  const bool beyond_ok = !smallest || band(lengths.back() + 1).hi < *smallest;

  Certificate c;
  c.claim["kind"] = "avoiding_pairs";
  c.claim["points"] = rationals(points);
  c.claim["generation"] = generation;
  c.claim["lengths"] = lengths;
  c.depth = static_cast<std::size_t>(lengths.back());
  c.status = pairs_ok && lengths_ok && beyond_ok ? Status::Verified : Status::Inconclusive;
  c.verdict = c.status == Status::Verified ? "AT_MOST_ONE_HIT" : "";
  c.evidence["difference_count"] = diffs.size();
  c.evidence["pairs_checked"] = pairs;
  c.evidence["pairs_avoid_differences"] = pairs_ok;
  c.evidence["every_split_band_clear"] = lengths_ok;
  c.evidence["later_bands_below_smallest_difference"] = beyond_ok;
  c.elapsed_ms = watch.ms();
  return AvoidingPairs{std::move(witness), std::move(c)};
}

}  // namespace haarlab
