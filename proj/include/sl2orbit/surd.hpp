#pragma once

#include <gmpxx.h>

#include <map>
#include <optional>
#include <string>

namespace sl2orbit {

// Exact element of the field generated over Q by square roots of
// positive integers: a finite sum  sum_r c_r * sqrt(r)  with square-free
// radicands r >= 1 and nonzero rational coefficients c_r.
//
// Square roots of distinct square-free integers are linearly independent
// over Q, so the term map is a canonical form: a value is zero iff the
// map is empty, and equality is structural. Products never need integer
// factoring: sqrt(r)*sqrt(s) = g*sqrt((r/g)*(s/g)) with g = gcd(r, s)
// keeps radicands square-free. Division works by multiplying numerator
// and denominator with sign-flipped conjugates until the denominator is
// rational.
class Surd {
public:
  Surd() = default; // zero
  Surd(long v) : Surd(mpq_class(v)) {}
  explicit Surd(const mpz_class& v) : Surd(mpq_class(v)) {}
  explicit Surd(const mpq_class& v);

  // c * sqrt(d); d >= 1 is canonicalized by extracting its square part.
  static Surd sqrt_of(const mpz_class& d, const mpq_class& c = 1);
  static Surd ratio(const mpz_class& num, const mpz_class& den);

  bool is_zero() const { return terms_.empty(); }
  bool is_rational() const;
  // The exact rational value, when the value is rational.
  std::optional<mpq_class> as_rational() const;

  Surd operator-() const;
  Surd operator+(const Surd& o) const;
  Surd operator-(const Surd& o) const;
  Surd operator*(const Surd& o) const;
  Surd inverse() const; // requires nonzero (DivisionByZero otherwise)
  Surd operator/(const Surd& o) const { return *this * o.inverse(); }
  bool operator==(const Surd& o) const { return terms_ == o.terms_; }
  bool operator!=(const Surd& o) const { return !(*this == o); }

  int sign() const; // exact: -1, 0, or +1
  Surd abs() const { return sign() >= 0 ? *this : -*this; }
  mpz_class floor() const; // exact greatest integer <= value
  Surd pow_uint(unsigned long e) const;

  // Rational enclosure lo <= value <= hi with hi - lo <= 2^-bits.
  void enclose(long bits, mpq_class& lo, mpq_class& hi) const;
  double to_double() const;
  std::string str() const; // e.g. "-105/2 + 47/2*sqrt(5)"

  const std::map<mpz_class, mpq_class>& terms() const { return terms_; }

private:
  // radicand (square-free, >= 1) -> coefficient (nonzero)
  std::map<mpz_class, mpq_class> terms_;
  void add_term(const mpz_class& r, const mpq_class& c);
};

} // namespace sl2orbit
