#include "haarlab/digit_set.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <set>
#include <utility>

#include "haarlab/error.hpp"

namespace haarlab {

using nlohmann::json;
using nlohmann::ordered_json;

// ---------------------------------------------------------------- LevelRule

LevelRule::LevelRule(Mode mode, std::vector<std::int64_t> values) : mode_(mode), values_(std::move(values)) {
  std::sort(values_.begin(), values_.end());
  values_.erase(std::unique(values_.begin(), values_.end()), values_.end());
}

LevelRule LevelRule::forbid_block(std::int64_t index, std::int64_t width) const {
  if (width <= 0 || index < 0) throw Error(ErrorCode::InvalidParams, "bad forbidden block");
  return forbid_range(DigitRange{index * width, (index + 1) * width - 1});
}

LevelRule LevelRule::forbid_range(DigitRange range) const {
  LevelRule out = *this;
  out.forbidden_.push_back(range);
  std::sort(out.forbidden_.begin(), out.forbidden_.end(),
            [](const DigitRange& a, const DigitRange& b) { return a.lo < b.lo; });
  return out;
}

namespace {

std::vector<DigitRange> ranges_of_sorted(const std::vector<std::int64_t>& v) {
  std::vector<DigitRange> out;
  for (auto d : v) {
    if (!out.empty() && out.back().hi + 1 == d) {
      out.back().hi = d;
    } else {
      out.push_back(DigitRange{d, d});
    }
  }
  return out;
}

std::vector<DigitRange> subtract(const std::vector<DigitRange>& base, const std::vector<DigitRange>& cut) {
  std::vector<DigitRange> out;
  for (const auto& b : base) {
    std::int64_t lo = b.lo;
    for (const auto& c : cut) {
      if (c.hi < lo || c.lo > b.hi) continue;
      if (c.lo > lo) out.push_back(DigitRange{lo, c.lo - 1});
      lo = std::max(lo, c.hi + 1);
      if (lo > b.hi) break;
    }
    if (lo <= b.hi) out.push_back(DigitRange{lo, b.hi});
  }
  return out;
}

}  // namespace

std::vector<DigitRange> LevelRule::ranges(std::int64_t radix) const {
  for (auto d : values_) {
    if (d < 0 || d >= radix) {
      throw Error(ErrorCode::InvalidDigit, "digit " + std::to_string(d) + " outside radix " + std::to_string(radix));
    }
  }
  std::vector<DigitRange> base;
  switch (mode_) {
    case Mode::All: base = {DigitRange{0, radix - 1}}; break;
    case Mode::Allowed: base = ranges_of_sorted(values_); break;
    case Mode::Excluded: base = subtract({DigitRange{0, radix - 1}}, ranges_of_sorted(values_)); break;
  }
  auto out = subtract(base, forbidden_);
  if (out.empty()) throw Error(ErrorCode::InvalidParams, "level rule leaves no admissible digit");
  return out;
}

bool LevelRule::allows(std::int64_t digit, std::int64_t radix) const {
  if (digit < 0 || digit >= radix) return false;
  for (const auto& r : ranges(radix)) {
    if (digit >= r.lo && digit <= r.hi) return true;
  }
  return false;
}

ordered_json LevelRule::to_json() const {
  ordered_json j;
  switch (mode_) {
    case Mode::All: j["all"] = true; break;
    case Mode::Allowed: j["allowed"] = values_; break;
    case Mode::Excluded: j["excluded"] = values_; break;
  }
  if (!forbidden_.empty()) {
    ordered_json f = ordered_json::array();
    for (const auto& r : forbidden_) f.push_back({r.lo, r.hi});
    j["forbidden"] = f;
  }
  return j;
}

LevelRule LevelRule::from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "level rule must be an object");
  LevelRule rule = LevelRule::all();
  if (j.contains("allowed")) {
    rule = LevelRule::allowed(j.at("allowed").get<std::vector<std::int64_t>>());
  } else if (j.contains("excluded")) {
    rule = LevelRule::excluded(j.at("excluded").get<std::vector<std::int64_t>>());
  }
  if (j.contains("block")) {
    const auto b = j.at("block").get<std::vector<std::int64_t>>();
    if (b.size() != 2) throw Error(ErrorCode::ParseError, "block needs [index, width]");
    rule = rule.forbid_block(b[0], b[1]);
  }
  if (j.contains("forbidden")) {
    for (const auto& r : j.at("forbidden")) {
      const auto v = r.get<std::vector<std::int64_t>>();
      if (v.size() != 2 || v[0] > v[1]) throw Error(ErrorCode::ParseError, "forbidden range needs [lo, hi]");
      rule = rule.forbid_range(DigitRange{v[0], v[1]});
    }
  }
  return rule;
}

// ---------------------------------------------------------------- ProductSpec

TailRule TailRule::repeat(std::vector<LevelRule> cycle) {
  if (cycle.empty()) throw Error(ErrorCode::InvalidParams, "repeat tail needs at least one rule");
  TailRule t;
  t.kind = Kind::Repeat;
  t.cycle = std::move(cycle);
  return t;
}

TailRule TailRule::cl_block(std::int64_t l) {
  if (l < 0) throw Error(ErrorCode::InvalidParams, "cl block needs l >= 0");
  TailRule t;
  t.kind = Kind::ClBlock;
  t.l = l;
  return t;
}

TailRule TailRule::null_meager() {
  TailRule t;
  t.kind = Kind::NullMeager;
  return t;
}

LevelRule ProductSpec::rule_at(std::size_t level, const MixedRadixSystem& system) const {
  if (level < prefix.size()) return prefix[level];
  switch (tail.kind) {
    case TailRule::Kind::Repeat: return tail.cycle[level % tail.cycle.size()];
    case TailRule::Kind::ClBlock: {
      const auto lv = static_cast<std::int64_t>(level);
      if (lv < tail.l) return LevelRule::all();
      const std::int64_t m = to_int64((25 * pow_int(3, static_cast<unsigned long>(tail.l)) - 1) / 2);
      return LevelRule::all().forbid_block(m, to_int64(pow_int(3, static_cast<unsigned long>(lv - tail.l))));
    }
    case TailRule::Kind::NullMeager: return LevelRule::excluded({system.block_of(level) + 1});
  }
  return LevelRule::all();
}

bool ProductSpec::unconstrained_from(std::size_t level) const {
  for (std::size_t i = level; i < prefix.size(); ++i) {
    if (!prefix[i].is_all()) return false;
  }
  if (tail.kind != TailRule::Kind::Repeat) return false;
  return std::all_of(tail.cycle.begin(), tail.cycle.end(), [](const LevelRule& r) { return r.is_all(); });
}

ordered_json product_to_json(const ProductSpec& spec) {
  ordered_json j;
  j["kind"] = "product";
  ordered_json levels = ordered_json::array();
  for (const auto& r : spec.prefix) levels.push_back(r.to_json());
  j["levels"] = levels;
  ordered_json tail;
  switch (spec.tail.kind) {
    case TailRule::Kind::Repeat: {
      tail["kind"] = "repeat";
      ordered_json cycle = ordered_json::array();
      for (const auto& r : spec.tail.cycle) cycle.push_back(r.to_json());
      tail["cycle"] = cycle;
      break;
    }
    case TailRule::Kind::ClBlock:
      tail["kind"] = "cl-block";
      tail["l"] = spec.tail.l;
      break;
    case TailRule::Kind::NullMeager: tail["kind"] = "null-meager"; break;
  }
  j["tail"] = tail;
  return j;
}

ProductSpec product_from_json(const json& j) {
  ProductSpec spec;
  if (j.contains("levels")) {
    for (const auto& r : j.at("levels")) spec.prefix.push_back(LevelRule::from_json(r));
  }
  if (!j.contains("tail")) throw Error(ErrorCode::ParseError, "product needs a tail rule");
  const auto& t = j.at("tail");
  const auto kind = t.at("kind").get<std::string>();
  if (kind == "repeat") {
    std::vector<LevelRule> cycle;
    for (const auto& r : t.at("cycle")) cycle.push_back(LevelRule::from_json(r));
    spec.tail = TailRule::repeat(std::move(cycle));
  } else if (kind == "cl-block") {
    spec.tail = TailRule::cl_block(t.at("l").get<std::int64_t>());
  } else if (kind == "null-meager") {
    spec.tail = TailRule::null_meager();
  } else {
    throw Error(ErrorCode::ParseError, "unknown tail kind '" + kind + "'");
  }
  return spec;
}

ordered_json system_to_json(const MixedRadixSystem& system) {
  ordered_json j;
  j["rule"] = to_string(system.rule());
  ordered_json params = ordered_json::object();
  if (system.rule() == RadixRule::Constant) params["radix"] = system.constant_radix();
  if (system.rule() == RadixRule::NullMeager) params["schedule"] = system.schedule();
  j["params"] = params;
  return j;
}

MixedRadixSystem system_from_json(const json& j) {
  const auto rule = j.at("rule").get<std::string>();
  const json params = j.contains("params") ? j.at("params") : json::object();
  if (rule == "constant") return MixedRadixSystem::constant(params.at("radix").get<std::int64_t>());
  if (rule == "cl") return MixedRadixSystem::cl();
  if (rule == "not-ideal") return MixedRadixSystem::not_ideal();
  if (rule == "null-meager") {
    std::vector<std::int64_t> schedule{0};
    if (params.contains("schedule")) schedule = params.at("schedule").get<std::vector<std::int64_t>>();
    return MixedRadixSystem::null_meager(std::move(schedule));
  }
  throw Error(ErrorCode::ParseError, "unknown radix rule '" + rule + "'");
}

// ---------------------------------------------------------------- DigitSetExpr

struct DigitSetExpr::Node {
  Kind kind;
  MixedRadixSystem system;
  ProductSpec product;
  FamilySpec family;
  std::vector<DigitSetExpr> members;
  ordered_json descriptor;
};

DigitSetExpr DigitSetExpr::product(const MixedRadixSystem& system, ProductSpec spec) {
  auto node = std::make_shared<Node>(Node{Kind::Product, system, std::move(spec), {}, {}, {}});
  node->descriptor = product_to_json(node->product);
  return DigitSetExpr(std::move(node));
}

DigitSetExpr DigitSetExpr::union_of(std::vector<DigitSetExpr> members) {
  if (members.empty()) throw Error(ErrorCode::InvalidArgument, "union needs at least one member");
  for (const auto& m : members) {
    if (!(m.system() == members.front().system())) {
      throw Error(ErrorCode::SystemMismatch, "union members use different systems");
    }
  }
  ordered_json d;
  d["kind"] = "union";
  d["members"] = ordered_json::array();
  for (const auto& m : members) d["members"].push_back(m.descriptor());
  const auto system = members.front().system();
  auto node = std::make_shared<Node>(Node{Kind::Union, system, {}, {}, std::move(members), std::move(d)});
  return DigitSetExpr(std::move(node));
}

DigitSetExpr DigitSetExpr::reflect(const DigitSetExpr& member) {
  ordered_json d;
  d["kind"] = "reflect";
  d["member"] = member.descriptor();
  auto node = std::make_shared<Node>(Node{Kind::Reflect, member.system(), {}, {}, {member}, std::move(d)});
  return DigitSetExpr(std::move(node));
}

DigitSetExpr DigitSetExpr::family(const MixedRadixSystem& system, FamilySpec spec) {
  if (!spec.collapse || !spec.member) {
    throw Error(ErrorCode::UnprojectableFamily, "family '" + spec.name + "' lacks a collapse rule");
  }
  ordered_json d;
  d["kind"] = "named";
  d["name"] = spec.name;
  auto node = std::make_shared<Node>(Node{Kind::Family, system, {}, std::move(spec), {}, std::move(d)});
  return DigitSetExpr(std::move(node));
}

DigitSetExpr::Kind DigitSetExpr::kind() const { return node_->kind; }
const MixedRadixSystem& DigitSetExpr::system() const { return node_->system; }
const ProductSpec& DigitSetExpr::product_spec() const { return node_->product; }
const FamilySpec& DigitSetExpr::family_spec() const { return node_->family; }
const std::vector<DigitSetExpr>& DigitSetExpr::members() const { return node_->members; }
const ordered_json& DigitSetExpr::descriptor() const { return node_->descriptor; }

DigitSetExpr DigitSetExpr::with_descriptor(ordered_json descriptor) const {
  auto node = std::make_shared<Node>(*node_);
  node->descriptor = std::move(descriptor);
  return DigitSetExpr(std::move(node));
}

std::string DigitSetExpr::label() const {
  const auto& d = node_->descriptor;
  if (d.contains("kind") && d["kind"] == "named" && d.contains("name")) return d["name"].get<std::string>();
  return d.dump();
}

DigitSetExpr reflect(const DigitSetExpr& set) { return DigitSetExpr::reflect(set); }
DigitSetExpr union_of(std::vector<DigitSetExpr> sets) { return DigitSetExpr::union_of(std::move(sets)); }

// ---------------------------------------------------------------- automaton

struct DigitAutomaton::Compiled {
  std::mutex mutex;
  std::map<std::pair<std::uint32_t, std::size_t>, ProductSpec> members;
  std::map<std::pair<std::uint32_t, std::size_t>, LevelRule> collapse;
};

DigitAutomaton::DigitAutomaton(const DigitSetExpr& set)
    : system_(set.system()), cache_(std::make_shared<Compiled>()) {
  compile(set, false);
}

void DigitAutomaton::compile(const DigitSetExpr& set, bool flipped) {
  switch (set.kind()) {
    case DigitSetExpr::Kind::Product:
    case DigitSetExpr::Kind::Family: {
      const auto id = static_cast<std::uint32_t>(nodes_.size());
      nodes_.push_back(set);
      initial_.push_back(InitialState{AutomatonState{id, -1, flipped}, flipped ? -1 : 0});
      break;
    }
    case DigitSetExpr::Kind::Union:
      for (const auto& m : set.members()) compile(m, flipped);
      break;
    case DigitSetExpr::Kind::Reflect: compile(set.members().front(), !flipped); break;
  }
}

const ProductSpec& DigitAutomaton::member_spec(std::uint32_t node, std::size_t member) const {
  std::lock_guard<std::mutex> lock(cache_->mutex);
  auto key = std::make_pair(node, member);
  auto it = cache_->members.find(key);
  if (it == cache_->members.end()) {
    it = cache_->members.emplace(key, nodes_[node].family_spec().member(member)).first;
  }
  return it->second;
}

const LevelRule& DigitAutomaton::collapse_rule(std::uint32_t node, std::size_t level) const {
  std::lock_guard<std::mutex> lock(cache_->mutex);
  auto key = std::make_pair(node, level);
  auto it = cache_->collapse.find(key);
  if (it == cache_->collapse.end()) {
    it = cache_->collapse.emplace(key, nodes_[node].family_spec().collapse(level)).first;
  }
  return it->second;
}

std::vector<Arc> DigitAutomaton::arcs(const AutomatonState& state, std::size_t level) const {
  const std::int64_t r = radix(level);
  const auto& expr = nodes_[state.node];
  std::vector<Arc> out;
  auto add = [&](const LevelRule& rule, AutomatonState next) {
    for (const auto& rg : rule.ranges(r)) out.push_back(Arc{rg.lo, rg.hi, next});
  };
  if (expr.kind() == DigitSetExpr::Kind::Product) {
    add(expr.product_spec().rule_at(level, system_), state);
  } else if (state.aux < 0) {
    add(collapse_rule(state.node, level), state);
    if (level >= expr.family_spec().min_member) {
      add(member_spec(state.node, level).rule_at(level, system_),
          AutomatonState{state.node, static_cast<std::int64_t>(level), state.flipped});
    }
  } else {
    add(member_spec(state.node, static_cast<std::size_t>(state.aux)).rule_at(level, system_), state);
  }
  if (state.flipped) {
    for (auto& a : out) {
      const auto lo = r - 1 - a.hi;
      a.hi = r - 1 - a.lo;
      a.lo = lo;
    }
    std::reverse(out.begin(), out.end());
  }
  return out;
}

bool DigitAutomaton::unconstrained_from(const AutomatonState& state, std::size_t level) const {
  const auto& expr = nodes_[state.node];
  if (expr.kind() == DigitSetExpr::Kind::Product) return expr.product_spec().unconstrained_from(level);
  if (state.aux < 0) return false;
  return member_spec(state.node, static_cast<std::size_t>(state.aux)).unconstrained_from(level);
}

bool DigitAutomaton::accepts(std::int64_t origin, const std::vector<std::int64_t>& digits) const {
  for (const auto& init : initial_) {
    if (init.origin != origin) continue;
    std::vector<AutomatonState> current{init.state};
    for (std::size_t level = 0; level < digits.size() && !current.empty(); ++level) {
      std::vector<AutomatonState> next;
      for (const auto& s : current) {
        for (const auto& a : arcs(s, level)) {
          if (digits[level] >= a.lo && digits[level] <= a.hi) next.push_back(a.next);
        }
      }
      std::sort(next.begin(), next.end());
      next.erase(std::unique(next.begin(), next.end()), next.end());
      current = std::move(next);
    }
    if (!current.empty()) return true;
  }
  return false;
}

// ---------------------------------------------------------------- projection

IntervalUnion project(const DigitSetExpr& set, std::size_t depth) {
  const DigitAutomaton automaton(set);
  const auto& system = automaton.system();
  std::vector<Interval> out;
  if (depth == 0) {
    for (const auto& init : automaton.initial()) {
      out.push_back(Interval{Rational(init.origin), Rational(init.origin + 1)});
    }
    return normalize(std::move(out));
  }
  using Node = std::pair<Integer, AutomatonState>;
  std::vector<Node> frontier;
  for (const auto& init : automaton.initial()) frontier.emplace_back(Integer(static_cast<long>(init.origin)), init.state);
  const std::size_t cap = interval_cap();
  for (std::size_t level = 0; level < depth && !frontier.empty(); ++level) {
    const std::int64_t r = automaton.radix(level);
    const Integer& q = system.q(level);
    std::vector<Node> next;
    for (const auto& [p, state] : frontier) {
      const Integer base = p * static_cast<long>(r);
      for (const auto& a : automaton.arcs(state, level)) {
        if (level + 1 == depth || automaton.unconstrained_from(a.next, level + 1)) {
          out.push_back(Interval{make_rational(base + static_cast<long>(a.lo), q),
                                 make_rational(base + static_cast<long>(a.hi) + 1, q)});
          if (out.size() > cap) throw Error(ErrorCode::CapacityExceeded, "projection exceeds interval cap");
          continue;
        }
        for (std::int64_t d = a.lo; d <= a.hi; ++d) {
          next.emplace_back(base + static_cast<long>(d), a.next);
          if (next.size() > cap) throw Error(ErrorCode::CapacityExceeded, "projection frontier exceeds cap");
        }
      }
    }
    std::sort(next.begin(), next.end(), [](const Node& x, const Node& y) {
      if (x.first != y.first) return x.first < y.first;
      return x.second < y.second;
    });
    next.erase(std::unique(next.begin(), next.end()), next.end());
    frontier = std::move(next);
  }
  return normalize(std::move(out));
}

bool is_admissible_cell(const DigitSetExpr& set, const Integer& cell, std::size_t depth) {
  const DigitAutomaton automaton(set);
  const auto& system = automaton.system();
  const Integer q = depth == 0 ? Integer(1) : system.q(depth - 1);
  std::set<std::int64_t> origins;
  for (const auto& init : automaton.initial()) origins.insert(init.origin);
  for (auto origin : origins) {
    const Integer local = cell - q * static_cast<long>(origin);
    if (local < 0 || local >= q) continue;
    if (automaton.accepts(origin, word_from_cell(system, local, depth).digits)) return true;
  }
  return false;
}

bool is_admissible_prefix(const DigitSetExpr& set, const DigitWord& word) {
  if (!(word.system == set.system())) throw Error(ErrorCode::SystemMismatch, "word and set use different systems");
  validate(word);
  const DigitAutomaton automaton(set);
  return automaton.accepts(0, word.digits);
}

bool member_at_depth(const DigitSetExpr& set, const Rational& value, std::size_t depth) {
  const Integer q = depth == 0 ? Integer(1) : set.system().q(depth - 1);
  const Rational x = value * Rational(q);
  const Integer p = floor_of(x);
  if (is_admissible_cell(set, p, depth)) return true;
  return x.get_den() == 1 && is_admissible_cell(set, p - 1, depth);
}

}  // namespace haarlab
