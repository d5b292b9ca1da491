#include "hvcg/rational.hpp"

#include <cmath>
#include <stdexcept>

namespace hvcg {

double to_double(const Rational& r) {
  return r.convert_to<double>();
}

Rational from_double(double d) {
  if (!std::isfinite(d)) {
    throw std::domain_error("from_double: non-finite value");
  }
  int exp = 0;
  double mant = std::frexp(d, &exp);
  // 53 bits of mantissa are exact after scaling by 2^53
  BigInt num = static_cast<long long>(std::ldexp(mant, 53));
  exp -= 53;
  Rational r(num);
  if (exp > 0) {
    r *= Rational(BigInt(1) << exp);
  } else if (exp < 0) {
    r /= Rational(BigInt(1) << -exp);
  }
  return r;
}

std::optional<Rational> parse_rational(std::string_view text) {
  if (text.empty()) return std::nullopt;
  bool neg = false;
  if (text.front() == '-' || text.front() == '+') {
    neg = text.front() == '-';
    text.remove_prefix(1);
  }
  if (text.empty()) return std::nullopt;
  auto slash = text.find('/');
  auto digits = [](std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
      if (c < '0' || c > '9') return false;
    return true;
  };
  Rational value;
  if (slash != std::string_view::npos) {
    auto p = text.substr(0, slash), q = text.substr(slash + 1);
    if (!digits(p) || !digits(q)) return std::nullopt;
    BigInt den{std::string(q)};
    if (den == 0) return std::nullopt;
    value = Rational(BigInt(std::string(p)), den);
  } else {
    auto dot = text.find('.');
    std::string_view ip = text.substr(0, dot);
    std::string_view fp = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
    if (ip.empty() && fp.empty()) return std::nullopt;
    if (!ip.empty() && !digits(ip)) return std::nullopt;
    if (dot != std::string_view::npos && !fp.empty() && !digits(fp)) return std::nullopt;
    BigInt num = ip.empty() ? BigInt(0) : BigInt(std::string(ip));
    BigInt den = 1;
    for (char c : fp) {
      num = num * 10 + (c - '0');
      den *= 10;
    }
    value = Rational(num, den);
  }
  return neg ? Rational(-value) : value;
}

bool is_integer(const Rational& r) {
  return boost::multiprecision::denominator(r) == 1;
}

std::string format_rational(const Rational& r) {
  BigInt num = boost::multiprecision::numerator(r);
  BigInt den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  // terminating decimal iff den = 2^a 5^b
  BigInt d = den;
  int twos = 0, fives = 0;
  while (d % 2 == 0) { d /= 2; ++twos; }
  while (d % 5 == 0) { d /= 5; ++fives; }
  if (d != 1) return num.str() + "/" + den.str();
  int places = std::max(twos, fives);
  BigInt scale = 1;
  for (int i = 0; i < places; ++i) scale *= 10;
  BigInt scaled = num * (scale / den);
  bool neg = scaled < 0;
  if (neg) scaled = -scaled;
  std::string digits = scaled.str();
  while (static_cast<int>(digits.size()) <= places) digits.insert(digits.begin(), '0');
  digits.insert(digits.end() - places, '.');
  return (neg ? "-" : "") + digits;
}

} // namespace hvcg
