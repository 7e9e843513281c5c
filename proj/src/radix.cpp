#include "haarlab/radix.hpp"

#include <algorithm>
#include <deque>
#include <mutex>

#include "haarlab/error.hpp"

namespace haarlab {

std::string to_string(RadixRule rule) {
  switch (rule) {
    case RadixRule::Constant: return "constant";
    case RadixRule::Cl: return "cl";
    case RadixRule::NotIdeal: return "not-ideal";
    case RadixRule::NullMeager: return "null-meager";
  }
  return "unknown";
}

struct MixedRadixSystem::Cache {
  std::mutex mutex;
  std::deque<Integer> q;  // deque keeps references stable while growing
};

MixedRadixSystem::MixedRadixSystem(RadixRule rule, std::int64_t constant,
                                   std::vector<std::int64_t> schedule)
    : rule_(rule), constant_(constant), schedule_(std::move(schedule)),
      cache_(std::make_shared<Cache>()) {}

MixedRadixSystem MixedRadixSystem::constant(std::int64_t radix) {
  if (radix < 2) throw Error(ErrorCode::InvalidParams, "radix must be at least 2");
  return MixedRadixSystem(RadixRule::Constant, radix, {});
}

MixedRadixSystem MixedRadixSystem::cl() { return MixedRadixSystem(RadixRule::Cl, 0, {}); }

MixedRadixSystem MixedRadixSystem::not_ideal() {
  return MixedRadixSystem(RadixRule::NotIdeal, 0, {});
}

MixedRadixSystem MixedRadixSystem::null_meager(std::vector<std::int64_t> schedule) {
  if (schedule.empty()) schedule = {0};
  if (schedule.front() != 0) throw Error(ErrorCode::InvalidSchedule, "schedule must start at 0");
  for (std::size_t i = 1; i < schedule.size(); ++i) {
    if (schedule[i] <= schedule[i - 1]) {
      throw Error(ErrorCode::InvalidSchedule, "schedule must be strictly increasing");
    }
  }
  return MixedRadixSystem(RadixRule::NullMeager, 0, std::move(schedule));
}

std::int64_t MixedRadixSystem::block_of(std::size_t level) const {
  if (rule_ != RadixRule::NullMeager) {
    throw Error(ErrorCode::SystemMismatch, "block index exists only for null-meager systems");
  }
  const auto lv = static_cast<std::int64_t>(level);
  if (lv < schedule_.back()) {
    auto it = std::upper_bound(schedule_.begin(), schedule_.end(), lv);
    return static_cast<std::int64_t>(it - schedule_.begin()) - 1;
  }
  const std::int64_t step =
      schedule_.size() > 1 ? schedule_.back() - schedule_[schedule_.size() - 2] : 1;
  return static_cast<std::int64_t>(schedule_.size()) - 1 + (lv - schedule_.back()) / step;
}

std::int64_t MixedRadixSystem::schedule_at(std::size_t n) const {
  if (rule_ != RadixRule::NullMeager) {
    throw Error(ErrorCode::SystemMismatch, "schedule exists only for null-meager systems");
  }
  if (n < schedule_.size()) return schedule_[n];
  const std::int64_t step =
      schedule_.size() > 1 ? schedule_.back() - schedule_[schedule_.size() - 2] : 1;
  return schedule_.back() + static_cast<std::int64_t>(n - (schedule_.size() - 1)) * step;
}

Integer MixedRadixSystem::radix(std::size_t level) const {
  switch (rule_) {
    case RadixRule::Constant: return Integer(static_cast<long>(constant_));
    case RadixRule::Cl:
    case RadixRule::NotIdeal: return 25 * pow_int(3, level);
    case RadixRule::NullMeager: return Integer(static_cast<long>(2 * block_of(level) + 3));
  }
  return Integer(2);
}

std::int64_t MixedRadixSystem::small_radix(std::size_t level) const {
  if (rule_ == RadixRule::Constant) return constant_;
  if (rule_ == RadixRule::NullMeager) return 2 * block_of(level) + 3;
  if (level > 36) throw Error(ErrorCode::CapacityExceeded, "radix exceeds 64-bit digits");
  return to_int64(radix(level));
}

const Integer& MixedRadixSystem::q(std::size_t level) const {
  std::lock_guard<std::mutex> lock(cache_->mutex);
  auto& q = cache_->q;
  while (q.size() <= level) {
    const std::size_t i = q.size();
    if (i == 0) {
      q.push_back(radix(0));
    } else {
      q.push_back(q.back() * radix(i));
    }
  }
  return q[level];
}

Rational MixedRadixSystem::cell_width(std::size_t depth) const {
  if (depth == 0) return Rational(1);
  return make_rational(Integer(1), q(depth - 1));
}

std::string MixedRadixSystem::describe() const {
  switch (rule_) {
    case RadixRule::Constant: return "constant(" + std::to_string(constant_) + ")";
    case RadixRule::Cl: return "cl";
    case RadixRule::NotIdeal: return "not-ideal";
    case RadixRule::NullMeager: {
      std::string out = "null-meager(";
      for (std::size_t i = 0; i < schedule_.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(schedule_[i]);
      }
      return out + ")";
    }
  }
  return "unknown";
}

Integer q_denominator(const MixedRadixSystem& system, std::size_t level) {
  return system.q(level);
}

void validate(const DigitWord& word) {
  for (std::size_t i = 0; i < word.digits.size(); ++i) {
    const auto d = word.digits[i];
    if (d < 0 || Integer(static_cast<long>(d)) >= word.system.radix(i)) {
      throw Error(ErrorCode::InvalidDigit, "digit " + std::to_string(d) + " out of range at level " +
                                               std::to_string(i));
    }
  }
}

Integer cell_index(const DigitWord& word) {
  validate(word);
  Integer n = 0;
  for (std::size_t i = 0; i < word.digits.size(); ++i) {
    n = n * word.system.radix(i) + static_cast<long>(word.digits[i]);
  }
  return n;
}

Rational eval_word(const DigitWord& word) {
  if (word.digits.empty()) return Rational(0);
  return make_rational(cell_index(word), word.system.q(word.digits.size() - 1));
}

DigitWord word_from_cell(const MixedRadixSystem& system, Integer index, std::size_t depth) {
  DigitWord out{system, std::vector<std::int64_t>(depth, 0)};
  if (index < 0 || (depth > 0 && index >= system.q(depth - 1)) || (depth == 0 && index != 0)) {
    throw Error(ErrorCode::InvalidArgument, "cell index outside [0, q)");
  }
  for (std::size_t i = depth; i-- > 0;) {
    const Integer r = system.radix(i);
    Integer digit;
    mpz_fdiv_qr(index.get_mpz_t(), digit.get_mpz_t(), index.get_mpz_t(), r.get_mpz_t());
    out.digits[i] = to_int64(digit);
  }
  return out;
}

DigitWord expand(const MixedRadixSystem& system, const Rational& value, std::size_t depth) {
  if (value < 0 || value >= 1) {
    throw Error(ErrorCode::InvalidArgument, "expansion needs a value in [0, 1)");
  }
  if (depth == 0) return DigitWord{system, {}};
  const Integer index = floor_of(value * Rational(system.q(depth - 1)));
  return word_from_cell(system, index, depth);
}

CarryTrace add_with_carry(const DigitWord& a, const DigitWord& d) {
  if (!(a.system == d.system)) throw Error(ErrorCode::SystemMismatch, "operands on different systems");
  if (!a.system.is_constant()) {
    throw Error(ErrorCode::SystemMismatch, "carry addition needs a constant-radix system");
  }
  validate(a);
  validate(d);
  const std::int64_t r = a.system.constant_radix();
  const std::size_t n = std::max(a.size(), d.size());
  CarryTrace out{DigitWord{a.system, std::vector<std::int64_t>(n, 0)}, std::vector<int>(n, 0)};
  int carry = 0;
  for (std::size_t i = n; i-- > 0;) {
    out.beta[i] = carry;
    const std::int64_t s = (i < a.size() ? a.digits[i] : 0) + (i < d.size() ? d.digits[i] : 0) + carry;
    out.result.digits[i] = s % r;
    carry = s >= r ? 1 : 0;
  }
  if (carry) throw Error(ErrorCode::OverflowBeyondUnit, "sum is at least 1");
  return out;
}

std::vector<int> carry_flags_from_sums(const std::vector<std::int64_t>& raw_sums, std::int64_t radix) {
  const std::size_t n = raw_sums.size();
  std::vector<int> beta(n, 0);
  const std::int64_t top = radix - 1;
  for (std::size_t i = n; i-- > 0;) {
    if (i + 1 >= n) {
      beta[i] = 0;
    } else if (raw_sums[i + 1] > top) {
      beta[i] = 1;
    } else {
      beta[i] = (beta[i + 1] == 1 && raw_sums[i + 1] + 1 > top) ? 1 : 0;
    }
  }
  return beta;
}

}  // namespace haarlab
