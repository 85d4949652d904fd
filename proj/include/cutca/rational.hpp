#pragma once

#include <gmpxx.h>

#include <compare>
#include <concepts>
#include <cstdint>
#include <string>
#include <string_view>

namespace cutca {

using Rational = mpq_class;

Rational floor_q(const Rational& a);
Rational ceil_q(const Rational& a);
/// f(a) = a - floor(a), always in [0, 1).
Rational frac_q(const Rational& a);
bool is_integral(const Rational& a);

/// Greatest common divisor of two rationals: gcd(num) / lcm(den).
Rational gcd_q(const Rational& a, const Rational& b);

/// Canonical text form: "p" for integers, "p/q" otherwise.
std::string to_string(const Rational& a);

/// Accepts "p", "p/q" and plain decimals ("-1.25"). Exponents are rejected so
/// that every accepted literal maps to exactly one rational.
Rational parse_rational(std::string_view text);

/// A rational extended with +inf and -inf. Arithmetic follows the extended
/// reals; inf - inf throws std::domain_error.
class ExtRational {
 public:
  enum class Kind : std::uint8_t { NegInf, Finite, PosInf };

  ExtRational() = default;
  template <typename T>
    requires std::constructible_from<Rational, const T&>
  ExtRational(const T& v) : value_(v) {}  // NOLINT(google-explicit-constructor)

  static ExtRational pos_inf() { return ExtRational(Kind::PosInf); }
  static ExtRational neg_inf() { return ExtRational(Kind::NegInf); }

  Kind kind() const { return kind_; }
  bool is_finite() const { return kind_ == Kind::Finite; }
  bool is_pos_inf() const { return kind_ == Kind::PosInf; }
  bool is_neg_inf() const { return kind_ == Kind::NegInf; }

  /// Throws std::domain_error when infinite.
  const Rational& value() const;

  std::string str() const;

  ExtRational operator-() const;
  friend ExtRational operator+(const ExtRational& a, const ExtRational& b);
  friend ExtRational operator-(const ExtRational& a, const ExtRational& b);
  /// Scaling by a finite factor; 0 * inf is 0.
  friend ExtRational operator*(const ExtRational& a, const Rational& k);
  friend ExtRational operator*(const Rational& k, const ExtRational& a) { return a * k; }
  ExtRational& operator+=(const ExtRational& o) { return *this = *this + o; }

  friend bool operator==(const ExtRational& a, const ExtRational& b);
  friend std::strong_ordering operator<=>(const ExtRational& a, const ExtRational& b);

 private:
  explicit ExtRational(Kind k) : kind_(k) {}

  Kind kind_ = Kind::Finite;
  Rational value_;
};

}  // namespace cutca
