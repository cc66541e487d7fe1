#pragma once

#include "sl2orbit/surd.hpp"

#include <gmpxx.h>

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sl2orbit {

// Closed rational interval [lo, hi] enclosing a real value.
struct Interval {
  mpq_class lo, hi;
  mpq_class width() const { return hi - lo; }
  bool contains(const mpq_class& v) const { return lo <= v && v <= hi; }
};

struct RealNode;

// A computable real number with decidable comparisons.
//
// Four kinds of leaves:
//   * exact values in a real multi-quadratic field (rationals, quadratic
//     surds, folded continued fractions with a periodic tail),
//   * continued-fraction inputs carrying their digits verbatim (finite
//     lists are exact rationals; a digit rule yields an irrational that
//     can be enclosed to any precision),
//   * fixed decimal balls midpoint +- radius (cannot be refined; any
//     comparison the ball does not settle fails loudly).
// Arithmetic on exact values stays exact; anything touching a ball is
// evaluated by exact rational interval arithmetic with doubling working
// precision up to a global cap (default 4096 bits), after which
// comparisons raise PrecisionExhausted instead of guessing.
class Real {
public:
  Real();
  Real(long v);
  Real(const mpz_class& v);
  Real(const mpq_class& v);
  Real(const Surd& v);

  // Fixed enclosure [lo, hi] (decimal-ball input).
  static Real from_ball(const mpq_class& lo, const mpq_class& hi);
  // Continued fraction [a0; a1, a2, ...] with optional periodic tail.
  // Finite (empty cycle) folds to an exact rational; a nonempty cycle
  // folds to an exact quadratic surd. Digits are kept for echoing.
  static Real from_cf(std::vector<mpz_class> digits,
                      std::vector<mpz_class> cycle = {});
  // Continued fraction with digits from a rule: digit(k) for k >= 1
  // must return a positive integer; a0 is given explicitly.
  static Real from_cf_rule(const mpz_class& a0,
                           std::function<mpz_class(long)> digit);

  bool is_exact() const;
  const Surd& exact_value() const; // requires is_exact()
  bool is_rational() const;        // provably rational
  std::optional<mpq_class> as_rational() const;

  // Continued-fraction inputs expose their digits for echoing.
  bool has_cf_digits() const;
  // Digits a_0..a_n as given; for finite inputs fewer may be available
  // (returns what exists); rule/periodic inputs always fill the request.
  std::vector<mpz_class> cf_digits(std::size_t count) const;

  Real operator-() const;
  Real operator+(const Real& o) const;
  Real operator-(const Real& o) const;
  Real operator*(const Real& o) const;
  Real operator/(const Real& o) const;
  Real inverse() const;
  Real abs() const;
  Real pow_uint(unsigned long e) const;

  // 1/(v - a): the Gauss map step used for digit extraction.
  Real reciprocal_shift(const mpz_class& a) const;

  int sign() const;                       // exact -1/0/+1
  int compare(const mpq_class& r) const;  // -1/0/+1 against a rational
  int compare(const Real& o) const;       // -1/0/+1
  mpz_class floor() const;

  // Enclosure with width <= 2^-bits when the value is refinable; for
  // ball-limited values the tightest available interval is returned.
  Interval enclose(long bits) const;
  double to_double() const;
  std::string str() const;

  // Working-precision cap (bits) for comparison refinement.
  static long precision_cap();
  static void set_precision_cap(long bits);

private:
  explicit Real(std::shared_ptr<const RealNode> node);
  std::shared_ptr<const RealNode> node_;
  friend Real derive(char op, const Real& a, const Real& b);
};

// Parse one real from the input grammar:
//   rat:<p>/<q>
//   surd:(<a>+<b>*sqrt(<d>))/<c>      (also (<a>-<b>*sqrt(<d>))/<c>)
//   cf:[a0;a1,a2,...]                  with optional repeat:[b1,...]
//   dec:<digits>~<radius>              (radius: fraction or decimal)
//   bare integers, fractions, decimals (e.g. "2", "-3/2", "0.5")
Real parse_real(const std::string& text);

// Parse "a,b" or "(a,b)" with bracket-aware splitting.
std::pair<Real, Real> parse_point(const std::string& text);

} // namespace sl2orbit
