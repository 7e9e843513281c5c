#include "haarlab/rational.hpp"

#include "haarlab/error.hpp"

namespace haarlab {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidDigit: return "InvalidDigit";
    case ErrorCode::OverflowBeyondUnit: return "OverflowBeyondUnit";
    case ErrorCode::MalformedInterval: return "MalformedInterval";
    case ErrorCode::CapacityExceeded: return "CapacityExceeded";
    case ErrorCode::UnprojectableFamily: return "UnprojectableFamily";
    case ErrorCode::SystemMismatch: return "SystemMismatch";
    case ErrorCode::InvalidSchedule: return "InvalidSchedule";
    case ErrorCode::InsufficientDepth: return "InsufficientDepth";
    case ErrorCode::NotAFixedPoint: return "NotAFixedPoint";
    case ErrorCode::NoAdmissibleDigit: return "NoAdmissibleDigit";
    case ErrorCode::UnknownConstruction: return "UnknownConstruction";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

Rational make_rational(const Integer& num, const Integer& den) {
  if (den == 0) throw Error(ErrorCode::InvalidArgument, "zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

Rational make_rational(std::int64_t num, std::int64_t den) {
  return make_rational(Integer(static_cast<long>(num)), Integer(static_cast<long>(den)));
}

namespace {

bool is_integer_literal(std::string_view s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  return true;
}

Integer parse_integer(std::string_view s) {
  if (!is_integer_literal(s)) {
    throw Error(ErrorCode::ParseError, "not an exact rational: '" + std::string(s) + "'");
  }
  if (s[0] == '+') s.remove_prefix(1);
  return Integer(std::string(s));
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
    text.remove_suffix(1);
  }
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return make_rational(parse_integer(text), Integer(1));
  return make_rational(parse_integer(text.substr(0, slash)), parse_integer(text.substr(slash + 1)));
}

std::string to_string(const Rational& value) {
  if (value.get_den() == 1) return value.get_num().get_str();
  return value.get_num().get_str() + "/" + value.get_den().get_str();
}

std::string to_string(const Integer& value) { return value.get_str(); }

Integer floor_of(const Rational& value) {
  Integer out;
  mpz_fdiv_q(out.get_mpz_t(), value.get_num_mpz_t(), value.get_den_mpz_t());
  return out;
}

Integer ceil_of(const Rational& value) {
  Integer out;
  mpz_cdiv_q(out.get_mpz_t(), value.get_num_mpz_t(), value.get_den_mpz_t());
  return out;
}

Rational frac_of(const Rational& value) {
  Rational out = value - Rational(floor_of(value));
  out.canonicalize();
  return out;
}

Integer pow_int(std::int64_t base, unsigned long exponent) {
  Integer out;
  Integer b(static_cast<long>(base));
  mpz_pow_ui(out.get_mpz_t(), b.get_mpz_t(), exponent);
  return out;
}

Integer binomial(unsigned long n, unsigned long k) {
  Integer out;
  mpz_bin_uiui(out.get_mpz_t(), n, k);
  return out;
}

static_assert(sizeof(long) == sizeof(std::int64_t), "LP64 platform expected");

bool fits_int64(const Integer& value) { return mpz_fits_slong_p(value.get_mpz_t()) != 0; }

std::int64_t to_int64(const Integer& value) {
  if (!fits_int64(value)) throw Error(ErrorCode::CapacityExceeded, "integer exceeds 64 bits");
  return mpz_get_si(value.get_mpz_t());
}

}  // namespace haarlab
