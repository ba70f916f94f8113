#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/rational.hpp>

namespace market_rounds {

/// Exact value type used for valuations, welfare and prices.
/// Compare for equality against Rational(n), not a bare integer: boost 1.74's mixed operator==
/// recurses forever under C++20 rewritten comparisons.
using Rational = boost::rational<std::int64_t>;

/// Parses "7", "-3", "3/4" or a finite decimal such as "0.125" into an exact rational.
/// Throws std::invalid_argument on malformed text.
Rational parse_rational(std::string_view text);

/// Converts a double to the rational spelled by its shortest round-trip decimal form.
Rational rational_from_double(double value);

/// "p" for integers, "p/q" otherwise.
std::string to_string(const Rational& value);

double to_double(const Rational& value);

/// Largest power of two (possibly fractional, 2^e with e < 0) that is <= value. Requires value > 0.
Rational floor_power_of_two(const Rational& value);

/// Binary exponent e of a power of two 2^e. Requires the argument to be an exact power of two.
int power_of_two_exponent(const Rational& power);

}  // namespace market_rounds
