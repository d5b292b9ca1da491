#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>
#include <string_view>

namespace hvcg {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Nearest double to r.
double to_double(const Rational& r);

/// Exact rational value of a finite double.
Rational from_double(double d);

/// Parses "12", "-3", "0.125", "1/3". Returns nullopt on malformed text.
std::optional<Rational> parse_rational(std::string_view text);

/// Decimal text when the value has a terminating expansion, "p/q" otherwise.
std::string format_rational(const Rational& r);

bool is_integer(const Rational& r);

} // namespace hvcg
