#include "market_rounds/rational.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <system_error>

namespace market_rounds {
namespace {

std::int64_t parse_int(std::string_view text, std::string_view whole) {
  std::int64_t out = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw std::invalid_argument("malformed rational: '" + std::string(whole) + "'");
  }
  return out;
}

bool is_power_of_two(std::int64_t x) { return x > 0 && (x & (x - 1)) == 0; }

}  // namespace

Rational parse_rational(std::string_view text) {
  const std::string_view whole = text;
  if (text.empty()) throw std::invalid_argument("empty rational");

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    const auto num = parse_int(text.substr(0, slash), whole);
    const auto den = parse_int(text.substr(slash + 1), whole);
    if (den == 0) throw std::invalid_argument("zero denominator: '" + std::string(whole) + "'");
    return Rational(num, den);
  }

  bool negative = false;
  if (text.front() == '-' || text.front() == '+') {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }

  // Scientific notation shows up for very small or very large doubles.
  std::int64_t exponent = 0;
  if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    exponent = parse_int(text.substr(e + 1).front() == '+' ? text.substr(e + 2) : text.substr(e + 1), whole);
    text = text.substr(0, e);
  }

  std::string digits;
  std::int64_t scale = 0;
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    digits = std::string(text.substr(0, dot)) + std::string(text.substr(dot + 1));
    scale = static_cast<std::int64_t>(text.size() - dot - 1);
  } else {
    digits = std::string(text);
  }
  if (digits.empty()) throw std::invalid_argument("malformed rational: '" + std::string(whole) + "'");
  scale -= exponent;

  std::int64_t numerator = parse_int(digits, whole);
  std::int64_t denominator = 1;
  constexpr auto kMax = std::numeric_limits<std::int64_t>::max() / 10;
  for (; scale > 0; --scale) {
    if (denominator > kMax) throw std::invalid_argument("rational out of range: '" + std::string(whole) + "'");
    denominator *= 10;
  }
  for (; scale < 0; ++scale) {
    if (numerator > kMax) throw std::invalid_argument("rational out of range: '" + std::string(whole) + "'");
    numerator *= 10;
  }
  return Rational(negative ? -numerator : numerator, denominator);
}

Rational rational_from_double(double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("non-finite value");
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  if (ec != std::errc{}) throw std::invalid_argument("cannot format value");
  return parse_rational(std::string_view(buffer, static_cast<std::size_t>(ptr - buffer)));
}

std::string to_string(const Rational& value) {
  if (value.denominator() == 1) return std::to_string(value.numerator());
  return std::to_string(value.numerator()) + "/" + std::to_string(value.denominator());
}

double to_double(const Rational& value) {
  return static_cast<double>(value.numerator()) / static_cast<double>(value.denominator());
}

Rational floor_power_of_two(const Rational& value) {
  if (value <= 0) throw std::invalid_argument("floor_power_of_two requires a positive value");
  Rational power(1);
  while (power > value) power /= 2;
  while (power * 2 <= value) power *= 2;
  return power;
}

int power_of_two_exponent(const Rational& power) {
  if (power.numerator() == 1 && is_power_of_two(power.denominator())) {
    int e = 0;
    for (auto d = power.denominator(); d > 1; d >>= 1) --e;
    return e;
  }
  if (power.denominator() == 1 && is_power_of_two(power.numerator())) {
    int e = 0;
    for (auto n = power.numerator(); n > 1; n >>= 1) ++e;
    return e;
  }
  throw std::invalid_argument("not a power of two: " + to_string(power));
}

}  // namespace market_rounds
