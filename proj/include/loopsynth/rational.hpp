#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace loopsynth {

/// Exact rational scalar. GMP keeps every value canonical: the denominator is
/// positive and coprime to the numerator.
using Rational = mpq_class;
using Integer = mpz_class;

/// Parses "p", "-p", or "p/q" with decimal integers. Throws loopsynth::Error on
/// malformed input or a zero denominator.
Rational parse_rational(std::string_view text);

std::string to_string(const Rational& q);
std::string to_string(const Integer& z);

inline bool is_integer(const Rational& q) { return q.get_den() == 1; }

}  // namespace loopsynth
