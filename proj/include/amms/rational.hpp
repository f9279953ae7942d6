#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace amms {

using BigInt = boost::multiprecision::cpp_int;

/// Exact rational number with arbitrary-precision numerator and denominator.
///
/// Always kept in lowest terms with a positive denominator. There is no
/// conversion to or from floating point; decimal rendering is left to callers
/// that only need it for display.
class Rational {
 public:
  using value_type = boost::multiprecision::cpp_rational;

  Rational() = default;
  Rational(std::int64_t value) : value_(value) {}  // NOLINT(google-explicit-constructor)
  Rational(const BigInt& num, const BigInt& den) {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    value_ = den < 0 ? value_type(BigInt(-num), BigInt(-den)) : value_type(num, den);
  }
  explicit Rational(value_type value) : value_(std::move(value)) {}

  /// Accepts "p", "-p", "p/q" and "-p/q" with decimal digits only.
  static Rational parse(std::string_view text) {
    auto parse_int = [&](std::string_view digits, bool allow_sign) -> BigInt {
      bool negative = false;
      if (allow_sign && !digits.empty() && (digits.front() == '-' || digits.front() == '+')) {
        negative = digits.front() == '-';
        digits.remove_prefix(1);
      }
      if (digits.empty()) throw std::invalid_argument("malformed rational: '" + std::string(text) + "'");
      BigInt out = 0;
      for (char ch : digits) {
        if (ch < '0' || ch > '9') throw std::invalid_argument("malformed rational: '" + std::string(text) + "'");
        out = out * 10 + (ch - '0');
      }
      return negative ? BigInt(-out) : out;
    };
    auto slash = text.find('/');
    if (slash == std::string_view::npos) return Rational(parse_int(text, true), BigInt(1));
    BigInt num = parse_int(text.substr(0, slash), true);
    BigInt den = parse_int(text.substr(slash + 1), false);
    if (den == 0) throw std::invalid_argument("malformed rational: zero denominator in '" + std::string(text) + "'");
    return Rational(num, den);
  }

  BigInt numerator() const { return boost::multiprecision::numerator(value_); }
  BigInt denominator() const { return boost::multiprecision::denominator(value_); }
  const value_type& raw() const { return value_; }

  bool is_zero() const { return value_ == 0; }
  bool is_integer() const { return denominator() == 1; }
  int sign() const { return value_.sign(); }

  /// "p/q", or just "p" when the denominator is one.
  std::string str() const {
    if (is_integer()) return numerator().str();
    return numerator().str() + "/" + denominator().str();
  }

  Rational& operator+=(const Rational& rhs) { value_ += rhs.value_; return *this; }
  Rational& operator-=(const Rational& rhs) { value_ -= rhs.value_; return *this; }
  Rational& operator*=(const Rational& rhs) { value_ *= rhs.value_; return *this; }
  Rational& operator/=(const Rational& rhs) {
    if (rhs.is_zero()) throw std::domain_error("rational division by zero");
    value_ /= rhs.value_;
    return *this;
  }

  friend Rational operator+(Rational lhs, const Rational& rhs) { return lhs += rhs; }
  friend Rational operator-(Rational lhs, const Rational& rhs) { return lhs -= rhs; }
  friend Rational operator*(Rational lhs, const Rational& rhs) { return lhs *= rhs; }
  friend Rational operator/(Rational lhs, const Rational& rhs) { return lhs /= rhs; }
  friend Rational operator-(const Rational& x) { return Rational(value_type(-x.value_)); }

  friend bool operator==(const Rational& a, const Rational& b) { return a.value_ == b.value_; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    int c = a.value_.compare(b.value_);
    return c < 0 ? std::strong_ordering::less : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

 private:
  value_type value_{0};
};

inline Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }
inline Rational min(const Rational& a, const Rational& b) { return b < a ? b : a; }

}  // namespace amms
