// SPDX-License-Identifier: Apache-2.0
#include "psoa/decimal.hpp"

#include <cctype>

namespace psoa {

namespace {

using boost::multiprecision::cpp_int;

cpp_int pow10(unsigned n) {
  cpp_int r = 1;
  for (unsigned i = 0; i < n; ++i) r *= 10;
  return r;
}

}  // namespace

std::optional<Decimal> Decimal::parse(std::string_view s) {
  std::size_t i = 0;
  bool negative = false;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
    negative = s[i] == '-';
    ++i;
  }
  cpp_int mantissa = 0;
  long long scale = 0;
  std::size_t digits = 0;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
    mantissa = mantissa * 10 + (s[i] - '0');
    ++i;
    ++digits;
  }
  if (digits == 0) return std::nullopt;
  if (i < s.size() && s[i] == '.') {
    ++i;
    std::size_t frac = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      mantissa = mantissa * 10 + (s[i] - '0');
      ++i;
      ++frac;
      --scale;
    }
    if (frac == 0) return std::nullopt;
  }
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    bool eneg = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
      eneg = s[i] == '-';
      ++i;
    }
    long long e = 0;
    std::size_t edigits = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      e = e * 10 + (s[i] - '0');
      if (e > 100000) return std::nullopt;
      ++i;
      ++edigits;
    }
    if (edigits == 0) return std::nullopt;
    scale += eneg ? -e : e;
  }
  if (i != s.size()) return std::nullopt;
  if (negative) mantissa = -mantissa;
  Rational r;
  if (scale >= 0)
    r = Rational(mantissa * pow10(static_cast<unsigned>(scale)));
  else
    r = Rational(mantissa, pow10(static_cast<unsigned>(-scale)));
  return Decimal(r);
}

bool Decimal::is_integer() const { return denominator(value_) == 1; }

std::string Decimal::to_string() const {
  cpp_int num = numerator(value_);
  cpp_int den = denominator(value_);
  if (den == 1) return num.str();
  bool negative = num < 0;
  if (negative) num = -num;

  cpp_int d = den;
  unsigned twos = 0, fives = 0;
  while (d % 2 == 0) {
    d /= 2;
    ++twos;
  }
  while (d % 5 == 0) {
    d /= 5;
    ++fives;
  }
  unsigned places = d == 1 ? std::max(twos, fives) : 30;
  cpp_int scaled = num * pow10(places) / den;
  std::string digits = scaled.str();
  if (digits.size() <= places) digits.insert(0, places - digits.size() + 1, '0');
  std::string out = digits.substr(0, digits.size() - places) + "." + digits.substr(digits.size() - places);
  while (out.back() == '0') out.pop_back();
  if (out.back() == '.') out.pop_back();
  return negative ? "-" + out : out;
}

}  // namespace psoa
