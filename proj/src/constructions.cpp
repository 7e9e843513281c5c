#include "haarlab/constructions.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "haarlab/error.hpp"

namespace haarlab {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::vector<std::string> split_args(const std::string& s) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(cur);
      cur.clear();
      continue;
    }
    if (!std::isspace(static_cast<unsigned char>(c))) cur += c;
  }
  if (!cur.empty() || !out.empty()) out.push_back(cur);
  return out;
}

std::int64_t parse_int(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidParams, what + ": expected an integer, got '" + s + "'");
  }
}

ordered_json rationals_json(const std::vector<Rational>& v) {
  ordered_json a = ordered_json::array();
  for (const auto& x : v) a.push_back(to_string(x));
  return a;
}

LevelRule only_range(std::int64_t lo, std::int64_t hi, std::int64_t radix) {
  LevelRule r = LevelRule::all();
  if (lo > 0) r = r.forbid_range(DigitRange{0, lo - 1});
  if (hi < radix - 1) r = r.forbid_range(DigitRange{hi + 1, radix - 1});
  return r;
}

std::int64_t small(const Integer& v) { return to_int64(v); }

Integer pow3(std::int64_t e) { return pow_int(3, static_cast<unsigned long>(e)); }

Integer m_of(std::int64_t l) {
  if (l < 0) throw Error(ErrorCode::InvalidParams, "l must be non-negative");
  return (25 * pow3(l) - 1) / 2;
}

}  // namespace

// ---------------------------------------------------------------- building blocks

std::vector<std::int64_t> L_set(std::size_t n) {
  std::vector<std::int64_t> L{8, 10};
  for (std::size_t i = 1; i <= n; ++i) {
    if (L.size() > (std::size_t{1} << 24)) throw Error(ErrorCode::CapacityExceeded, "L_n too large");
    std::vector<std::int64_t> next;
    next.reserve(2 * L.size());
    for (auto v : L) {
      next.push_back(3 * v);
      next.push_back(3 * v + 2);
    }
    std::sort(next.begin(), next.end());
    L = std::move(next);
  }
  return L;
}

DigitSetExpr ternary_cantor() {
  return DigitSetExpr::product(MixedRadixSystem::constant(3), ProductSpec{{}, TailRule::repeat({LevelRule::allowed({0, 2})})});
}

DigitSetExpr gap_set(std::int64_t m) {
  if (m < 4) throw Error(ErrorCode::InvalidParams, "gap(m) needs m >= 4");
  return DigitSetExpr::product(MixedRadixSystem::constant(m),
                               ProductSpec{{}, TailRule::repeat({LevelRule::allowed({0, m - 1})})});
}

DigitSetExpr haar_family_member(std::int64_t n, std::int64_t m) {
  if (n < 1 || m < 0 || m > n) throw Error(ErrorCode::InvalidParams, "haar_family(n,m) needs n >= 1 and 0 <= m <= n");
  std::vector<LevelRule> cycle(static_cast<std::size_t>(n + 1), LevelRule::all());
  cycle[static_cast<std::size_t>(m)] = LevelRule::allowed({0, 4});
  return DigitSetExpr::product(MixedRadixSystem::constant(5), ProductSpec{{}, TailRule::repeat(std::move(cycle))});
}

DigitSetExpr cl_set(std::int64_t l) {
  if (l < 0 || l > 30) throw Error(ErrorCode::InvalidParams, "cl(l) needs 0 <= l <= 30");
  return DigitSetExpr::product(MixedRadixSystem::cl(), ProductSpec{{}, TailRule::cl_block(l)});
}

DigitSetExpr w_set(std::int64_t k, std::int64_t l) {
  if (l < 0 || k < l || k > 30) throw Error(ErrorCode::InvalidParams, "w(k,l) needs 0 <= l <= k <= 30");
  ProductSpec spec;
  spec.prefix.assign(static_cast<std::size_t>(k), LevelRule::all());
  spec.prefix.push_back(LevelRule::all().forbid_block(small(m_of(l)), small(pow3(k - l))));
  spec.tail = TailRule::repeat({LevelRule::all()});
  return DigitSetExpr::product(MixedRadixSystem::cl(), std::move(spec));
}

std::vector<Rational> w_translates(std::int64_t k, std::int64_t l) {
  const auto sys = MixedRadixSystem::cl();
  const Integer m = m_of(l);
  std::vector<Rational> out;
  const auto ku = static_cast<std::size_t>(k);
  for (Integer j = 0; j <= 2 * m; ++j) {
    Rational x = make_rational(j * pow3(k - l), sys.q(ku)) + make_rational(25 * pow3(k + 1) - 1 - j, sys.q(ku + 1));
    out.push_back(x);
  }
  out.push_back(Rational(0));
  return out;
}

LevelRule notideal_level_rule(NotIdealPart part, std::size_t n) {
  const auto L = L_set(n);
  const std::int64_t m = small(m_of(static_cast<std::int64_t>(n)));
  const std::int64_t radix = small(25 * pow3(static_cast<std::int64_t>(n)));
  std::vector<std::int64_t> x_out = L;
  x_out.push_back(m);
  std::sort(x_out.begin(), x_out.end());
  if (part == NotIdealPart::X) return LevelRule::excluded(x_out);
  const std::int64_t h = m / 2;
  std::set<std::int64_t> b;
  for (auto v : L) {
    for (std::int64_t delta = -1; delta <= 1; ++delta) {
      for (auto cand : {v + h + delta, v - h + delta}) {
        if (cand < 0 || cand >= radix) continue;
        if (std::binary_search(x_out.begin(), x_out.end(), cand)) continue;
        b.insert(cand);
      }
    }
  }
  std::vector<std::int64_t> bv(b.begin(), b.end());
  if (part == NotIdealPart::B) return LevelRule::allowed(bv);
  std::vector<std::int64_t> a_out = x_out;
  a_out.insert(a_out.end(), bv.begin(), bv.end());
  std::sort(a_out.begin(), a_out.end());
  return LevelRule::excluded(a_out);
}

DigitSetExpr notideal_set(NotIdealPart part, std::size_t min_member) {
  FamilySpec spec;
  spec.name = part == NotIdealPart::X ? "notideal_X" : (part == NotIdealPart::A ? "notideal_A" : "notideal_B");
  if (min_member > 0) spec.name += "[>=" + std::to_string(min_member) + "]";
  spec.min_member = min_member;
  // Member n keeps L-digits below n, so every cell whose digits so far all lie
  // in L also meets members of larger index: the collapse cells.
  spec.collapse = [](std::size_t level) { return LevelRule::allowed(L_set(level)); };
  spec.member = [part](std::size_t n) {
    ProductSpec p;
    for (std::size_t i = 0; i < n; ++i) p.prefix.push_back(LevelRule::allowed(L_set(i)));
    p.prefix.push_back(notideal_level_rule(part, n));
    p.tail = TailRule::cl_block(static_cast<std::int64_t>(n));
    return p;
  };
  return DigitSetExpr::family(MixedRadixSystem::not_ideal(), std::move(spec));
}

DigitSetExpr nullmeager_set(std::vector<std::int64_t> schedule) {
  return DigitSetExpr::product(MixedRadixSystem::null_meager(std::move(schedule)),
                               ProductSpec{{}, TailRule::null_meager()});
}

std::vector<Rational> gap_sequence(std::int64_t m, std::size_t count) {
  std::vector<Rational> out;
  for (std::size_t k = 0; k < count; ++k) out.push_back(make_rational(Integer(m - 1), 2 * pow_int(m, k + 1)));
  return out;
}

std::vector<Rational> haar_family_gaps(std::int64_t n, std::int64_t m, std::size_t count) {
  std::vector<Rational> out;
  for (std::size_t k = 0; k < count; ++k) {
    const auto e = static_cast<unsigned long>((n + 1) * static_cast<std::int64_t>(k) + m + 1);
    out.push_back(make_rational(Integer(5), 2 * pow_int(5, e)));
  }
  return out;
}

// ---------------------------------------------------------------- checks

LBoundsReport check_L_bounds(std::size_t n_max) {
  LBoundsReport report;
  for (std::size_t n = 0; n <= n_max; ++n) {
    const auto L = L_set(n);
    LBoundsRow row;
    row.n = n;
    row.max_l = Integer(static_cast<long>(L.back()));
    row.min_l = Integer(static_cast<long>(L.front()));
    row.m = m_of(static_cast<std::int64_t>(n));
    row.max_below = row.max_l < row.m - 1;
    row.min_above = 2 * row.min_l > row.m + 1;
    row.no_consecutive = true;
    for (std::size_t i = 1; i < L.size(); ++i) {
      if (L[i] - L[i - 1] <= 1) row.no_consecutive = false;
    }
    report.ok = report.ok && row.max_below && row.min_above && row.no_consecutive;
    report.rows.push_back(row);
  }
  return report;
}

bool pigeonhole_bound_holds(std::int64_t l, std::int64_t n) {
  if (l < 0 || n < l) throw Error(ErrorCode::InvalidParams, "need 0 <= l <= n");
  const Integer lhs = (pow3(n - l) + 1) * (m_of(l) - 1);
  const Integer rhs = 25 * pow3(n) - pow3(n - l);
  return lhs < rhs;
}

// ---------------------------------------------------------------- factory

namespace {

NamedConstruction finish(std::string name, ordered_json params, const DigitSetExpr& expr, ordered_json companions) {
  ordered_json d;
  d["kind"] = "named";
  d["name"] = name;
  return NamedConstruction{std::move(name), std::move(params), expr.system(), expr.with_descriptor(d),
                           std::move(companions)};
}

ordered_json L_json(std::size_t n) {
  ordered_json a = ordered_json::array();
  for (std::size_t i = 0; i <= n; ++i) a.push_back(L_set(i));
  return a;
}

std::string canonical(const std::string& raw) {
  static const std::vector<std::pair<std::string, std::string>> aliases{
      {"ternary_cantor", "ternary"}, {"gap_set", "gap"},     {"cl_set", "cl"},   {"w_set", "w"},
      {"z_family", "z"},             {"t_family", "t"},      {"L_sets", "L"},    {"nullmeager_X", "nullmeager"},
      {"notideal-X", "notideal_X"},  {"notideal-A", "notideal_A"}, {"notideal-B", "notideal_B"},
      {"notideal-Y", "notideal_Y"},
  };
  for (const auto& [from, to] : aliases) {
    if (raw == from) return to;
  }
  return raw;
}

}  // namespace

NamedConstruction make(const std::string& identifier) {
  std::string id;
  for (char c : identifier) {
    if (!std::isspace(static_cast<unsigned char>(c))) id += c;
  }
  std::string name = id;
  std::vector<std::string> args;
  const auto open = id.find('(');
  if (open != std::string::npos) {
    if (id.back() != ')') throw Error(ErrorCode::UnknownConstruction, "malformed identifier '" + identifier + "'");
    name = id.substr(0, open);
    args = split_args(id.substr(open + 1, id.size() - open - 2));
  }
  name = canonical(name);
  auto ints = [&](std::size_t lo, std::size_t hi) {
    if (args.size() < lo || args.size() > hi) {
      throw Error(ErrorCode::InvalidParams, name + " takes " + std::to_string(lo) + ".." + std::to_string(hi) + " arguments");
    }
    std::vector<std::int64_t> v;
    for (const auto& a : args) v.push_back(parse_int(a, name));
    return v;
  };

  if (name == "reflect") {
    if (args.size() != 1) throw Error(ErrorCode::InvalidParams, "reflect takes one construction");
    auto inner = make(args[0]);
    ordered_json params;
    params["of"] = inner.name;
    return finish("reflect(" + inner.name + ")", params, reflect(inner.expr), inner.companions);
  }
  if (name == "ternary") {
    ints(0, 0);
    ordered_json c;
    c["difference_ifs"] = {{"ratio", 3}, {"offsets", {-2, 0, 2}}};
    return finish("ternary", ordered_json::object(), ternary_cantor(), c);
  }
  if (name == "gap") {
    const auto v = ints(1, 1);
    ordered_json p, c;
    p["m"] = v[0];
    c["gaps"] = rationals_json(gap_sequence(v[0], 11));
    c["difference_ifs"] = {{"ratio", v[0]}, {"offsets", {-(v[0] - 1), 0, v[0] - 1}}};
    return finish("gap(" + std::to_string(v[0]) + ")", p, gap_set(v[0]), c);
  }
  if (name == "haar_family") {
    const auto v = ints(1, 2);
    ordered_json p, c;
    p["n"] = v[0];
    if (v.size() == 2) {
      p["m"] = v[1];
      c["gaps"] = rationals_json(haar_family_gaps(v[0], v[1], 9));
      return finish("haar_family(" + std::to_string(v[0]) + "," + std::to_string(v[1]) + ")", p,
                    haar_family_member(v[0], v[1]), c);
    }
    std::vector<DigitSetExpr> members;
    ordered_json names = ordered_json::array();
    for (std::int64_t m = 0; m <= v[0]; ++m) {
      members.push_back(haar_family_member(v[0], m));
      names.push_back("haar_family(" + std::to_string(v[0]) + "," + std::to_string(m) + ")");
    }
    c["members"] = names;
    return finish("haar_family(" + std::to_string(v[0]) + ")", p, union_of(std::move(members)), c);
  }
  if (name == "cl") {
    const auto v = ints(1, 1);
    ordered_json p, c;
    p["l"] = v[0];
    c["m_l"] = to_string(m_of(v[0]));
    c["forbidden_block"] = {{"index", to_string(m_of(v[0]))}, {"width", "3^(k-l)"}};
    return finish("cl(" + std::to_string(v[0]) + ")", p, cl_set(v[0]), c);
  }
  if (name == "w") {
    const auto v = ints(2, 2);
    ordered_json p, c;
    p["k"] = v[0];
    p["l"] = v[1];
    c["m_l"] = to_string(m_of(v[1]));
    c["translates"] = rationals_json(w_translates(v[0], v[1]));
    return finish("w(" + std::to_string(v[0]) + "," + std::to_string(v[1]) + ")", p, w_set(v[0], v[1]), c);
  }
  if (name == "z" || name == "t") {
    // z(k,l): level-k digit inside the m_l block; t(k,n) adds L-digits below n
    const auto v = ints(2, 2);
    const std::int64_t k = v[0], l = v[1];
    if (l < 0 || k < l || k > 30) throw Error(ErrorCode::InvalidParams, name + "(k,l) needs 0 <= l <= k <= 30");
    const std::int64_t width = small(pow3(k - l));
    const std::int64_t lo = small(m_of(l)) * width;
    ProductSpec spec;
    for (std::int64_t i = 0; i < k; ++i) {
      spec.prefix.push_back(name == "t" && i < l ? LevelRule::allowed(L_set(static_cast<std::size_t>(i))) : LevelRule::all());
    }
    spec.prefix.push_back(only_range(lo, lo + width - 1, small(25 * pow3(k))));
    spec.tail = TailRule::repeat({LevelRule::all()});
    ordered_json p;
    p["k"] = k;
    p[name == "z" ? "l" : "n"] = l;
    return finish(name + "(" + std::to_string(k) + "," + std::to_string(l) + ")", p,
                  DigitSetExpr::product(MixedRadixSystem::cl(), std::move(spec)), ordered_json::object());
  }
  if (name == "L") {
    const auto v = ints(1, 1);
    if (v[0] < 0 || v[0] > 20) throw Error(ErrorCode::InvalidParams, "L(n) needs 0 <= n <= 20");
    ProductSpec spec;
    for (std::int64_t i = 0; i <= v[0]; ++i) spec.prefix.push_back(LevelRule::allowed(L_set(static_cast<std::size_t>(i))));
    spec.tail = TailRule::repeat({LevelRule::all()});
    ordered_json p, c;
    p["n"] = v[0];
    c["L"] = L_json(static_cast<std::size_t>(v[0]));
    return finish("L(" + std::to_string(v[0]) + ")", p, DigitSetExpr::product(MixedRadixSystem::not_ideal(), std::move(spec)), c);
  }
  if (name == "notideal_X" || name == "notideal_A" || name == "notideal_B" || name == "notideal_Y") {
    ints(0, 0);
    ordered_json c;
    c["L"] = L_json(2);
    c["m"] = {to_string(m_of(0)), to_string(m_of(1)), to_string(m_of(2))};
    if (name == "notideal_Y") {
      const auto x = notideal_set(NotIdealPart::X);
      return finish(name, ordered_json::object(), union_of({x, reflect(x)}), c);
    }
    const auto part = name == "notideal_X" ? NotIdealPart::X : (name == "notideal_A" ? NotIdealPart::A : NotIdealPart::B);
    return finish(name, ordered_json::object(), notideal_set(part), c);
  }
  if (name == "nullmeager") {
    std::vector<std::int64_t> schedule{0};
    if (!args.empty()) schedule = ints(1, 64);
    ordered_json p, c;
    p["schedule"] = schedule;
    c["forbidden_digit"] = "n+1 on block n";
    std::string canon = "nullmeager";
    if (!args.empty()) {
      canon += "(";
      for (std::size_t i = 0; i < schedule.size(); ++i) canon += (i ? "," : "") + std::to_string(schedule[i]);
      canon += ")";
    }
    return finish(canon, p, nullmeager_set(schedule), c);
  }
  throw Error(ErrorCode::UnknownConstruction, "unknown construction '" + identifier + "'");
}

NamedConstruction make(const std::string& name, const json& params) {
  if (params.is_null() || (params.is_object() && params.empty())) return make(name);
  if (!params.is_object()) throw Error(ErrorCode::InvalidParams, "params must be an object");
  const std::string base = canonical(name);
  auto arg = [&](const char* key) -> std::string {
    if (!params.contains(key)) throw Error(ErrorCode::InvalidParams, base + " needs parameter '" + key + "'");
    const auto& v = params.at(key);
    if (v.is_string()) return v.get<std::string>();
    if (!v.is_number_integer()) throw Error(ErrorCode::InvalidParams, std::string("parameter '") + key + "' must be an integer");
    return std::to_string(v.get<std::int64_t>());
  };
  if (base == "gap") return make("gap(" + arg("m") + ")");
  if (base == "haar_family") {
    return params.contains("m") ? make("haar_family(" + arg("n") + "," + arg("m") + ")") : make("haar_family(" + arg("n") + ")");
  }
  if (base == "cl") return make("cl(" + arg("l") + ")");
  if (base == "w") return make("w(" + arg("k") + "," + arg("l") + ")");
  if (base == "z") return make("z(" + arg("k") + "," + arg("l") + ")");
  if (base == "t") return make("t(" + arg("k") + "," + arg("n") + ")");
  if (base == "L") return make("L(" + arg("n") + ")");
  if (base == "reflect") return make("reflect(" + arg("of") + ")");
  if (base == "nullmeager") {
    if (!params.contains("schedule")) return make("nullmeager");
    std::string s = "nullmeager(";
    const auto v = params.at("schedule").get<std::vector<std::int64_t>>();
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return make(s + ")");
  }
  return make(base);
}

// ---------------------------------------------------------------- descriptors

ordered_json to_descriptor(const DigitSetExpr& set) {
  ordered_json j;
  j["system"] = system_to_json(set.system());
  j["set"] = set.descriptor();
  return j;
}

namespace {

DigitSetExpr parse_node(const json& node, const std::optional<MixedRadixSystem>& system) {
  if (node.is_string()) return make(node.get<std::string>()).expr;
  if (!node.is_object() || !node.contains("kind")) throw Error(ErrorCode::ParseError, "set node needs a 'kind'");
  const auto kind = node.at("kind").get<std::string>();
  if (kind == "named") {
    const auto name = node.at("name").get<std::string>();
    return node.contains("params") ? make(name, node.at("params")).expr : make(name).expr;
  }
  if (kind == "product") {
    if (!system) throw Error(ErrorCode::ParseError, "product sets need a system");
    return DigitSetExpr::product(*system, product_from_json(node));
  }
  if (kind == "union") {
    std::vector<DigitSetExpr> members;
    for (const auto& m : node.at("members")) members.push_back(parse_node(m, system));
    return union_of(std::move(members));
  }
  if (kind == "reflect") return reflect(parse_node(node.at("member"), system));
  throw Error(ErrorCode::ParseError, "unknown set kind '" + kind + "'");
}

}  // namespace

DigitSetExpr parse_descriptor(const json& j) {
  try {
    std::optional<MixedRadixSystem> system;
    if (j.contains("system")) system = system_from_json(j.at("system"));
    const json& node = j.contains("set") ? j.at("set") : j;
    DigitSetExpr expr = parse_node(node, system);
    if (system && !(expr.system() == *system)) throw Error(ErrorCode::SystemMismatch, "descriptor system disagrees with its set");
    return expr;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("set descriptor: ") + e.what());
  }
}

}  // namespace haarlab
