// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace psoa {

// Exact decimal number. Stored as a rational so that 2, 2.0 and 20e-1 are the
// same value and sums/products of decimals stay exact.
class Decimal {
 public:
  using Rational = boost::multiprecision::cpp_rational;

  Decimal() = default;
  explicit Decimal(long long v) : value_(v) {}
  explicit Decimal(Rational v) : value_(std::move(v)) {}

  // Accepts [+-]digits[.digits][(e|E)[+-]digits]. Returns nullopt otherwise.
  static std::optional<Decimal> parse(std::string_view lexical);

  // Shortest exact decimal spelling: "29400", "-3.25". Values that have no
  // finite decimal expansion are rounded to 30 fractional digits.
  std::string to_string() const;

  bool is_integer() const;
  const Rational& rational() const { return value_; }

  friend Decimal operator+(const Decimal& a, const Decimal& b) { return Decimal(a.value_ + b.value_); }
  friend Decimal operator-(const Decimal& a, const Decimal& b) { return Decimal(a.value_ - b.value_); }
  friend Decimal operator*(const Decimal& a, const Decimal& b) { return Decimal(a.value_ * b.value_); }
  friend bool operator==(const Decimal& a, const Decimal& b) { return a.value_ == b.value_; }
  friend std::strong_ordering operator<=>(const Decimal& a, const Decimal& b) {
    if (a.value_ < b.value_) return std::strong_ordering::less;
    if (a.value_ > b.value_) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

 private:
  Rational value_;
};

}  // namespace psoa
