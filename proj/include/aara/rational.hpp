#pragma once

#include <string>
#include <string_view>

#include <boost/multiprecision/gmp.hpp>

namespace aara {

using BigInt = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;

/// Parses `3`, `-1`, `5/2`. Throws std::invalid_argument on malformed text
/// or a zero denominator.
Rational parse_rational(std::string_view text);

/// Canonical text: integers without a slash, otherwise `num/den` in lowest terms.
std::string to_string(const Rational& r);
std::string to_string(const BigInt& i);

inline Rational max0(const Rational& r) { return r > 0 ? r : Rational(0); }

}  // namespace aara
