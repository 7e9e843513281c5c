#include "haarlab/witness.hpp"

#include <algorithm>

#include "haarlab/error.hpp"

namespace haarlab {

namespace {

constexpr long kMaxLevel = 10'000'000;

std::uint64_t branch_count(std::size_t generation) {
  if (generation >= 63) throw Error(ErrorCode::CapacityExceeded, "generation too large");
  return std::uint64_t{1} << generation;
}

unsigned long checked_level(const Integer& level) {
  if (level < 0 || level > kMaxLevel) throw Error(ErrorCode::CapacityExceeded, "witness level beyond 10^7");
  return level.get_ui();
}

}  // namespace

// ---------------------------------------------------------------- branches

Branch branch_from_index(std::uint64_t index, std::size_t length) {
  Branch s(length, 0);
  for (std::size_t i = 0; i < length; ++i) s[length - 1 - i] = static_cast<std::uint8_t>((index >> i) & 1u);
  return s;
}

std::uint64_t branch_index(const Branch& s) {
  std::uint64_t b = 0;
  for (auto bit : s) b = (b << 1) | bit;
  return b;
}

std::string to_string(const Branch& s) {
  std::string out;
  for (auto bit : s) out += bit ? '1' : '0';
  return out.empty() ? "()" : out;
}

std::vector<std::uint64_t> unrank_combination(std::uint64_t n, std::uint64_t k, const Integer& rank) {
  if (k > n) throw Error(ErrorCode::InvalidArgument, "subset larger than ground set");
  if (rank < 0 || rank >= binomial(n, k)) throw Error(ErrorCode::InvalidArgument, "combination rank out of range");
  std::vector<std::uint64_t> out;
  out.reserve(k);
  Integer r = rank;
  std::uint64_t c = 0;
  for (std::uint64_t i = 0; i < k; ++i) {
    for (;; ++c) {
      const Integer count = binomial(n - c - 1, k - i - 1);
      if (r < count) {
        out.push_back(c++);
        break;
      }
      r -= count;
    }
  }
  return out;
}

Integer rank_combination(std::uint64_t n, const std::vector<std::uint64_t>& subset) {
  Integer r = 0;
  const std::uint64_t k = subset.size();
  std::uint64_t c = 0;
  for (std::uint64_t i = 0; i < k; ++i) {
    if (subset[i] >= n || (i > 0 && subset[i] <= subset[i - 1])) {
      throw Error(ErrorCode::InvalidArgument, "subset must be strictly increasing within range");
    }
    for (; c < subset[i]; ++c) r += binomial(n - c - 1, k - i - 1);
    ++c;
  }
  return r;
}

Integer BlockScheme::slot_count(std::size_t generation) const {
  return binomial(branch_count(generation), tuple_size);
}

Integer BlockScheme::generation_length(std::size_t generation) const {
  return Integer(static_cast<unsigned long>(header_length)) +
         Integer(static_cast<unsigned long>(slot_length)) * slot_count(generation);
}

std::int64_t slot_member(std::size_t generation, std::size_t tuple_size, const Integer& slot, std::uint64_t branch) {
  const auto tuple = unrank_combination(branch_count(generation), tuple_size, slot);
  auto it = std::lower_bound(tuple.begin(), tuple.end(), branch);
  if (it == tuple.end() || *it != branch) return -1;
  return it - tuple.begin();
}

// ---------------------------------------------------------------- base classes

Rational WitnessSource::increment(const Branch& s) const {
  const Integer start = block_start(s.size());
  const Integer length = block_end(s.size()) - start;
  if (length > (1 << 20)) throw Error(ErrorCode::CapacityExceeded, "block too long to evaluate exactly");
  Rational sum = 0;
  const auto& sys = system();
  for (unsigned long pos = 0; pos < length.get_ui(); ++pos) {
    const Integer d = digit(s, Integer(pos));
    if (d != 0) sum += Rational(d) / Rational(sys.q(start.get_ui() + pos));
  }
  sum.canonicalize();
  return sum;
}

Rational WitnessSource::tail_bound(std::size_t generation) const {
  const Integer end = block_end(generation);
  return system().cell_width(checked_level(end));
}

CantorWitness::CantorWitness(std::shared_ptr<const WitnessSource> source)
    : source_(std::move(source)), cache_(std::make_shared<Cache>()) {}

std::vector<Integer> CantorWitness::block(const Branch& s, std::size_t cap) const {
  const Integer start = block_start(s.size());
  const Integer length = block_end(s.size()) - start;
  if (length > static_cast<unsigned long>(cap)) throw Error(ErrorCode::CapacityExceeded, "block longer than cap");
  std::vector<Integer> out;
  out.reserve(length.get_ui());
  for (unsigned long pos = 0; pos < length.get_ui(); ++pos) out.push_back(digit(s, Integer(pos)));
  return out;
}

Rational CantorWitness::increment(const Branch& s) const {
  {
    std::lock_guard<std::mutex> lock(cache_->mutex);
    auto it = cache_->increments.find(s);
    if (it != cache_->increments.end()) return it->second;
  }
  Rational value = source_->increment(s);
  std::lock_guard<std::mutex> lock(cache_->mutex);
  return cache_->increments.emplace(s, value).first->second;
}

Rational CantorWitness::branch_value(const Branch& s) const {
  Rational sum = 0;
  for (std::size_t n = first_generation(); n <= s.size(); ++n) {
    sum += increment(Branch(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(n)));
  }
  sum.canonicalize();
  return sum;
}

std::vector<BranchPoint> generation_points(const CantorWitness& witness, std::size_t generation) {
  if (generation < witness.first_generation()) {
    throw Error(ErrorCode::InvalidArgument, "generation precedes the witness's first generation");
  }
  std::vector<BranchPoint> out;
  const std::uint64_t count = branch_count(generation);
  for (std::uint64_t b = 0; b < count; ++b) {
    Branch s = branch_from_index(b, generation);
    Rational v = witness.branch_value(s);
    out.push_back(BranchPoint{std::move(s), std::move(v)});
  }
  return out;
}

std::vector<Rational> branch_translate_pairs(const CantorWitness& witness, std::size_t generation) {
  const auto points = generation_points(witness, generation);
  std::vector<Rational> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      Rational d = points[j].value - points[i].value;
      d.canonicalize();
      out.push_back(std::move(d));
    }
  }
  return out;
}

// ---------------------------------------------------------------- ternary

const std::vector<std::int64_t>& ternary_x_pattern() {
  static const std::vector<std::int64_t> x{1, 1, 1, 1, 1, 0, 1, 1, 1, 1, 1};
  return x;
}

const std::vector<std::int64_t>& ternary_y_pattern() {
  static const std::vector<std::int64_t> y{0, 2, 0, 0, 2, 1, 0, 2, 0, 0, 2};
  return y;
}

Integer ternary_offset(std::size_t n) {
  if (n == 0) return 0;
  Integer k = 1;
  for (std::size_t g = 2; g <= n; ++g) k += 12 * binomial(branch_count(g), 3);
  return k;
}

namespace {

class TernarySource final : public WitnessSource {
 public:
  std::string name() const override { return "ternary-haar2"; }
  const MixedRadixSystem& system() const override { return system_; }
  std::size_t first_generation() const override { return 1; }
  Integer block_start(std::size_t n) const override { return n == 0 ? Integer(0) : ternary_offset(n - 1); }
  Integer block_end(std::size_t n) const override { return ternary_offset(std::max<std::size_t>(n, 1)); }

  Integer digit(const Branch& s, const Integer& position) const override {
    const std::size_t n = s.size();
    if (n == 0) throw Error(ErrorCode::InvalidArgument, "ternary witness has no generation 0");
    if (position < 0 || position >= block_end(n) - block_start(n)) {
      throw Error(ErrorCode::InvalidArgument, "position outside block");
    }
    if (n == 1) return s[0];
    const Integer slot = position / 12;
    const auto j = static_cast<std::size_t>(Integer(position % 12).get_ui());
    const auto t = slot_member(n, 3, slot, branch_index(s));
    if (t <= 0) return 0;
    if (j == 11) return 1;
    return t == 1 ? ternary_x_pattern()[j] : ternary_y_pattern()[j];
  }

 private:
  MixedRadixSystem system_ = MixedRadixSystem::constant(3);
};

enum class LemTwoKind { Cl, D, E };

class LemTwoSource final : public WitnessSource {
 public:
  LemTwoSource(LemTwoKind kind, WSchedule schedule, MixedRadixSystem system)
      : kind_(kind), schedule_(std::move(schedule)), system_(std::move(system)) {
    if (schedule_.ls.empty()) throw Error(ErrorCode::InvalidSchedule, "empty schedule");
    for (auto l : schedule_.ls) {
      if (l < 0) throw Error(ErrorCode::InvalidSchedule, "schedule values must be m_l with l >= 0");
    }
    first_ = schedule_.first == 0 ? first_admissible_generation(schedule_.ls.front()) : schedule_.first;
    // each l first appears within one round; later generations only grow
    for (std::size_t i = 0; i < schedule_.ls.size(); ++i) {
      const std::size_t n = first_ + i;
      if (2 * m_value(schedule_.l_at(n)) + 2 > Integer(1) << static_cast<unsigned long>(std::min<std::size_t>(n, 4000))) {
        throw Error(ErrorCode::InvalidSchedule, "schedule violates 2 w_n + 2 <= 2^n at generation " + std::to_string(n));
      }
    }
    base_ = kind_ == LemTwoKind::Cl ? Integer(static_cast<long>(schedule_.ls.front())) : Integer(0);
  }

  std::string name() const override {
    switch (kind_) {
      case LemTwoKind::Cl: return "cl-witness(" + std::to_string(schedule_.ls.front()) + ")";
      case LemTwoKind::D: return "notideal-D";
      case LemTwoKind::E: return "notideal-E";
    }
    return "lem2";
  }
  const MixedRadixSystem& system() const override { return system_; }
  std::size_t first_generation() const override { return first_; }

  std::size_t header() const { return kind_ == LemTwoKind::Cl ? 0 : (kind_ == LemTwoKind::D ? 1 : 2); }
  std::size_t tuple_size(std::size_t n) const { return 2 * m_value(schedule_.l_at(n)).get_ui() + 2; }
  std::int64_t l_at(std::size_t n) const { return schedule_.l_at(n); }

  Integer block_start(std::size_t n) const override {
    if (n < first_) return base_;
    std::lock_guard<std::mutex> lock(mutex_);
    if (offsets_.empty()) offsets_.push_back(base_);  // k_{first-1}
    while (offsets_.size() <= n - first_) {
      const std::size_t g = first_ + offsets_.size() - 1;
      offsets_.push_back(offsets_.back() + static_cast<unsigned long>(header()) +
                         2 * binomial(branch_count(g), tuple_size(g)));
    }
    return offsets_[n - first_];
  }

  Integer digit(const Branch& s, const Integer& position) const override {
    const std::size_t n = s.size();
    if (n < first_) throw Error(ErrorCode::InvalidArgument, "generation precedes the first block");
    const Integer start = block_start(n);
    if (position < 0 || position >= block_end(n) - start) throw Error(ErrorCode::InvalidArgument, "position outside block");
    const std::uint8_t last = s.back();
    if (position < static_cast<unsigned long>(header())) {
      if (kind_ == LemTwoKind::D) return last ? m_value(static_cast<std::int64_t>(checked_level(start))) / 2 : Integer(0);
      return position == 0 ? Integer(last) : Integer(0);
    }
    const Integer q = position - static_cast<unsigned long>(header());
    const Integer slot = q / 2;
    const bool second = q % 2 != 0;
    const auto t = slot_member(n, tuple_size(n), slot, branch_index(s));
    if (t <= 0) return 0;
    const Integer a = start + static_cast<unsigned long>(header()) + 2 * slot;
    return slot_digit(a, l_at(n), t - 1, second);
  }

  static Integer slot_digit(const Integer& a, std::int64_t l, std::int64_t j, bool second) {
    const unsigned long level = checked_level(a);
    if (!second) {
      if (static_cast<long>(level) < l) throw Error(ErrorCode::InvalidParams, "slot level below l");
      return Integer(static_cast<long>(j)) * pow_int(3, level - static_cast<unsigned long>(l));
    }
    return 25 * pow_int(3, level + 1) - 1 - static_cast<long>(j);
  }

  SlotLocation locate(std::size_t n, const std::vector<std::uint64_t>& tuple) const {
    if (n < first_) throw Error(ErrorCode::InvalidArgument, "generation precedes the first block");
    if (tuple.size() != tuple_size(n)) throw Error(ErrorCode::InvalidArgument, "tuple size does not match the scheme");
    const Integer slot = rank_combination(branch_count(n), tuple);
    return SlotLocation{n, slot, block_start(n) + static_cast<unsigned long>(header()) + 2 * slot, l_at(n)};
  }

 private:
  LemTwoKind kind_;
  WSchedule schedule_;
  MixedRadixSystem system_;
  std::size_t first_ = 0;
  Integer base_;
  mutable std::mutex mutex_;
  mutable std::vector<Integer> offsets_;
};

}  // namespace

CantorWitness build_ternary_haar2_witness() { return CantorWitness(std::make_shared<TernarySource>()); }

Integer m_value(std::int64_t l) {
  if (l < 0) throw Error(ErrorCode::InvalidParams, "l must be non-negative");
  return (25 * pow_int(3, static_cast<unsigned long>(l)) - 1) / 2;
}

std::size_t first_admissible_generation(std::int64_t l) {
  const Integer need = 2 * m_value(l) + 2;
  std::size_t n = 0;
  while ((Integer(1) << static_cast<unsigned long>(n)) < need) ++n;
  return n;
}

std::int64_t WSchedule::l_at(std::size_t generation) const {
  if (ls.empty()) throw Error(ErrorCode::InvalidSchedule, "empty schedule");
  const std::size_t start = first == 0 ? first_admissible_generation(ls.front()) : first;
  if (generation < start) return ls.front();
  return ls[(generation - start) % ls.size()];
}

CantorWitness build_cl_witness(std::int64_t l) {
  return CantorWitness(
      std::make_shared<LemTwoSource>(LemTwoKind::Cl, WSchedule{{l}, 0}, MixedRadixSystem::cl()));
}

CantorWitness build_notideal_D(const WSchedule& schedule) {
  return CantorWitness(std::make_shared<LemTwoSource>(LemTwoKind::D, schedule, MixedRadixSystem::not_ideal()));
}

CantorWitness build_notideal_E(const WSchedule& schedule) {
  return CantorWitness(std::make_shared<LemTwoSource>(LemTwoKind::E, schedule, MixedRadixSystem::not_ideal()));
}

SlotLocation locate_slot(const CantorWitness& witness, std::size_t generation, const std::vector<std::uint64_t>& tuple) {
  const auto* src = dynamic_cast<const LemTwoSource*>(&witness.source());
  if (src == nullptr) throw Error(ErrorCode::InvalidArgument, "witness has no two-digit slots");
  return src->locate(generation, tuple);
}

std::size_t slot_tuple_size(const CantorWitness& witness, std::size_t generation) {
  const auto* src = dynamic_cast<const LemTwoSource*>(&witness.source());
  if (src == nullptr) throw Error(ErrorCode::InvalidArgument, "witness has no two-digit slots");
  return src->tuple_size(generation);
}

// ---------------------------------------------------------------- sparse sub-Cantor

IncrementTree scaled_ternary_tree() {
  IncrementTree tree;
  tree.name = "scaled-ternary";
  tree.d = [](const Branch& s) -> Rational {
    if (s.empty() || s.back() == 0) return 0;
    // s = u^1 with |u| = |s| - 1
    return make_rational(Integer(4), 3 * pow_int(3, static_cast<unsigned long>(s.size())));
  };
  return tree;
}

namespace {

class SparseSource final : public WitnessSource {
 public:
  SparseSource(MixedRadixSystem system, std::map<Branch, Rational> inc, std::vector<Rational> thresholds)
      : system_(std::move(system)), inc_(std::move(inc)), thresholds_(std::move(thresholds)) {}

  std::string name() const override { return "sparse-subcantor"; }
  const MixedRadixSystem& system() const override { return system_; }
  std::size_t first_generation() const override { return 1; }
  Integer block_start(std::size_t) const override { return 0; }
  Integer block_end(std::size_t) const override { return 0; }
  Integer digit(const Branch&, const Integer&) const override {
    throw Error(ErrorCode::InvalidArgument, "sparse sub-Cantor sets are given by increments");
  }
  Rational increment(const Branch& s) const override {
    if (s.empty() || s.back() == 0) return 0;
    auto it = inc_.find(s);
    if (it == inc_.end()) throw Error(ErrorCode::InsufficientDepth, "node beyond the extracted generations");
    return it->second;
  }
  Rational tail_bound(std::size_t generation) const override {
    if (generation >= thresholds_.size()) throw Error(ErrorCode::InsufficientDepth, "tail beyond extracted generations");
    return 2 * thresholds_[generation];
  }

 private:
  MixedRadixSystem system_;
  std::map<Branch, Rational> inc_;
  std::vector<Rational> thresholds_;  // thresholds_[n]: bound for nodes of length n + 1
};

}  // namespace

SparseSubCantor extract_sparse_subcantor(const IncrementTree& tree, const MixedRadixSystem& system,
                                         std::size_t generations) {
  if (system.rule() != RadixRule::NullMeager) {
    throw Error(ErrorCode::SystemMismatch, "thresholds follow a null-meager schedule");
  }
  auto threshold = [&](std::size_t length) {
    const std::size_t idx = length == 1 ? 3 : (std::size_t{1} << (length + 1)) + 1;
    const auto level = system.schedule_at(idx);
    return make_rational(Integer(1), 2 * system.q(static_cast<std::size_t>(level)));
  };
  std::vector<Rational> thresholds;
  for (std::size_t n = 1; n <= generations + 1 && n < 24; ++n) thresholds.push_back(threshold(n));

  std::map<Branch, Branch> t;
  std::map<Branch, std::size_t> zeros;
  std::map<Branch, Rational> inc;
  for (std::size_t n = 1; n <= generations; ++n) {
    if (n >= 24) throw Error(ErrorCode::CapacityExceeded, "too many generations");
    const Rational bound = thresholds[n - 1];
    for (std::uint64_t b = 0; b < branch_count(n - 1); ++b) {
      const Branch s = branch_from_index(b, n - 1);
      Branch u = s;
      u.push_back(1);
      // longest S-prefix of s
      std::size_t cut = s.size();
      while (cut > 0 && s[cut - 1] == 0) --cut;
      const Branch base = cut == 0 ? Branch{} : t.at(Branch(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(cut)));
      std::size_t z = 0;
      if (s.size() > cut) {
        Branch prev(s.begin(), s.end() - 1);
        prev.push_back(1);
        z = zeros.at(prev) + 1;
      }
      for (;; ++z) {
        if (base.size() + z + 1 > tree.max_depth) {
          throw Error(ErrorCode::InsufficientDepth, "increment tree too shallow for node " + to_string(u));
        }
        Branch cand = base;
        cand.insert(cand.end(), z, 0);
        cand.push_back(1);
        const Rational d = tree.d(cand);
        if (d < bound) {
          t[u] = cand;
          zeros[u] = z;
          inc[u] = d;
          break;
        }
      }
    }
  }
  SparseSubCantor out{CantorWitness(std::make_shared<SparseSource>(system, inc, thresholds)), std::move(t)};
  return out;
}

// ---------------------------------------------------------------- tail-marker witness

namespace {

class TailMarkerSource final : public WitnessSource {
 public:
  explicit TailMarkerSource(std::vector<std::int64_t> lengths) : lengths_(std::move(lengths)) {
    std::int64_t prev = 0;
    for (auto l : lengths_) {
      if (l <= prev) throw Error(ErrorCode::InvalidParams, "lengths must increase from 1");
      prev = l;
    }
  }
  std::string name() const override { return "tail-marker"; }
  const MixedRadixSystem& system() const override { return system_; }
  std::size_t first_generation() const override { return 1; }
  Integer block_start(std::size_t n) const override { return n <= 1 ? Integer(0) : Integer(static_cast<long>(length(n - 1))); }
  Integer block_end(std::size_t n) const override { return Integer(static_cast<long>(length(n))); }
  Integer digit(const Branch& s, const Integer& position) const override {
    const Integer len = block_end(s.size()) - block_start(s.size());
    if (position < 0 || position >= len) throw Error(ErrorCode::InvalidArgument, "position outside block");
    return position == len - 1 ? Integer(s.back()) : Integer(0);
  }
  Rational tail_bound(std::size_t n) const override {
    return make_rational(Integer(1), 2 * pow_int(3, static_cast<unsigned long>(length(n))));
  }

 private:
  // l_n, extended by one per generation past the list
  std::int64_t length(std::size_t n) const {
    if (n == 0) return 0;
    if (n <= lengths_.size()) return lengths_[n - 1];
    return (lengths_.empty() ? 0 : lengths_.back()) + static_cast<std::int64_t>(n - lengths_.size());
  }
  std::vector<std::int64_t> lengths_;
  MixedRadixSystem system_ = MixedRadixSystem::constant(3);
};

}  // namespace

CantorWitness build_tail_marker_witness(std::vector<std::int64_t> lengths) {
  return CantorWitness(std::make_shared<TailMarkerSource>(std::move(lengths)));
}

}  // namespace haarlab
