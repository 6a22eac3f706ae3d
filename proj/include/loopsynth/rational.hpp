#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace loopsynth {

/// Exact rational number in lowest terms. GMP keeps mpq_class canonical after
/// every arithmetic operation, so no explicit normalization is needed.
using Rational = mpq_class;
using Integer = mpz_class;

/// Parses "3", "-7/4" or an exact decimal such as "2.50". Throws
/// std::invalid_argument on malformed text or a zero denominator.
Rational parse_rational(std::string_view text);

/// "3", "-7/4".
std::string to_string(const Rational& q);

inline bool is_integer(const Rational& q) { return q.get_den() == 1; }

/// q^e for e >= 0.
Rational pow(const Rational& q, unsigned e);

}  // namespace loopsynth
