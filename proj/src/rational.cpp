#include "cutca/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace cutca {

Rational floor_q(const Rational& a) {
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_num_mpz_t(), a.get_den_mpz_t());
  return Rational(q);
}

Rational ceil_q(const Rational& a) {
  mpz_class q;
  mpz_cdiv_q(q.get_mpz_t(), a.get_num_mpz_t(), a.get_den_mpz_t());
  return Rational(q);
}

Rational frac_q(const Rational& a) { return Rational(a - floor_q(a)); }

bool is_integral(const Rational& a) { return a.get_den() == 1; }

Rational gcd_q(const Rational& a, const Rational& b) {
  if (a == 0) return abs(b);
  if (b == 0) return abs(a);
  mpz_class num;
  mpz_class den;
  mpz_gcd(num.get_mpz_t(), a.get_num_mpz_t(), b.get_num_mpz_t());
  mpz_lcm(den.get_mpz_t(), a.get_den_mpz_t(), b.get_den_mpz_t());
  Rational g(num, den);
  g.canonicalize();
  return g;
}

std::string to_string(const Rational& a) { return a.get_str(); }

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view body = text;
  bool negative = false;
  if (!body.empty() && (body.front() == '+' || body.front() == '-')) {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  auto bad = [&]() { return std::invalid_argument("malformed rational '" + std::string(text) + "'"); };

  Rational value;
  if (auto slash = body.find('/'); slash != std::string_view::npos) {
    auto num = body.substr(0, slash);
    auto den = body.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) throw bad();
    mpz_class d{std::string(den)};
    if (d == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    value = Rational(mpz_class(std::string(num)), d);
    value.canonicalize();
  } else if (auto dot = body.find('.'); dot != std::string_view::npos) {
    auto whole = body.substr(0, dot);
    auto fraction = body.substr(dot + 1);
    if (whole.empty() && fraction.empty()) throw bad();
    if (!whole.empty() && !all_digits(whole)) throw bad();
    if (!fraction.empty() && !all_digits(fraction)) throw bad();
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, fraction.size());
    mpz_class w(whole.empty() ? std::string("0") : std::string(whole));
    mpz_class f(fraction.empty() ? std::string("0") : std::string(fraction));
    value = Rational(w * scale + f, scale);
    value.canonicalize();
  } else {
    if (!all_digits(body)) throw bad();
    value = Rational(mpz_class(std::string(body)));
  }
  if (negative) value = -value;
  return value;
}

const Rational& ExtRational::value() const {
  if (kind_ != Kind::Finite) throw std::domain_error("value() of infinite bound");
  return value_;
}

std::string ExtRational::str() const {
  switch (kind_) {
    case Kind::NegInf:
      return "-inf";
    case Kind::PosInf:
      return "inf";
    case Kind::Finite:
      break;
  }
  return to_string(value_);
}

ExtRational ExtRational::operator-() const {
  switch (kind_) {
    case Kind::NegInf:
      return pos_inf();
    case Kind::PosInf:
      return neg_inf();
    case Kind::Finite:
      break;
  }
  return ExtRational(Rational(-value_));
}

ExtRational operator+(const ExtRational& a, const ExtRational& b) {
  if (a.is_finite() && b.is_finite()) return ExtRational(Rational(a.value_ + b.value_));
  if ((a.is_pos_inf() && b.is_neg_inf()) || (a.is_neg_inf() && b.is_pos_inf())) {
    throw std::domain_error("inf - inf is undefined");
  }
  return a.is_finite() ? b : a;
}

ExtRational operator-(const ExtRational& a, const ExtRational& b) { return a + (-b); }

ExtRational operator*(const ExtRational& a, const Rational& k) {
  if (a.is_finite()) return ExtRational(Rational(a.value_ * k));
  if (k == 0) return ExtRational(0);
  return (k > 0) == a.is_pos_inf() ? ExtRational::pos_inf() : ExtRational::neg_inf();
}

bool operator==(const ExtRational& a, const ExtRational& b) {
  if (a.kind_ != b.kind_) return false;
  return !a.is_finite() || a.value_ == b.value_;
}

std::strong_ordering operator<=>(const ExtRational& a, const ExtRational& b) {
  if (a.kind_ != b.kind_) {
    return static_cast<int>(a.kind_) <=> static_cast<int>(b.kind_);
  }
  if (!a.is_finite()) return std::strong_ordering::equal;
  int c = cmp(a.value_, b.value_);
  return c <=> 0;
}

}  // namespace cutca
