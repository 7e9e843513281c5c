#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace haarlab {

// Arbitrary precision integers and rationals. mpq_class keeps values in
// lowest terms with a positive denominator as long as every constructor call
// is followed by canonicalize(); the helpers below do that.
using Integer = mpz_class;
using Rational = mpq_class;

Rational make_rational(const Integer& num, const Integer& den);
Rational make_rational(std::int64_t num, std::int64_t den = 1);

// Parses "p/q" or "p" (optionally signed). No decimal notation.
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& value);
std::string to_string(const Integer& value);

Integer floor_of(const Rational& value);
Integer ceil_of(const Rational& value);
// value - floor(value), in [0, 1).
Rational frac_of(const Rational& value);

Integer pow_int(std::int64_t base, unsigned long exponent);
Integer binomial(unsigned long n, unsigned long k);

bool fits_int64(const Integer& value);
std::int64_t to_int64(const Integer& value);

}  // namespace haarlab
