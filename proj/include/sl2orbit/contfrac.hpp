#pragma once

#include "sl2orbit/real.hpp"
#include "sl2orbit/sl2.hpp"

#include <gmpxx.h>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sl2orbit {

// One convergent p_k/q_k of a slope x, with the exact signed residual
// epsilon_k = q_k x - p_k.
struct Convergent {
  long k;
  mpz_class p, q;
  Real epsilon;
};

// The determinant-1 matrix built from two consecutive convergents:
//   k even: [[q_k, -p_k], [-q_{k-1},  p_{k-1}]]
//   k odd : [[q_k, -p_k], [ q_{k-1}, -p_{k-1}]]
struct ConvergentMatrix {
  long k;
  Mat matrix;
};

// Finite-window growth diagnostic: ratios log q_{k+1} / log q_k. The
// true growth exponent is not finitely computable, so the window records
// observations and carries an optional caller-asserted exact value.
struct OmegaWindow {
  long k_lo = 0, k_hi = 0;
  std::vector<std::pair<long, double>> ratios; // only k with q_k >= 2
  double max_ratio = 1.0, min_ratio = 1.0;
  std::optional<mpq_class> asserted;
};

// Continued-fraction engine over a Real slope. Digits come from the
// input's own digit list when it has one (finite lists terminate with a
// RationalInput error when exhausted), otherwise from the exact Gauss
// map; provably rational inputs are rejected for digit extraction.
// Tables are extended lazily and kept immutable once computed.
class ContinuedFraction {
public:
  explicit ContinuedFraction(Real x);

  const Real& value() const { return x_; }

  mpz_class digit(long k);            // a_k, k >= 0
  const mpz_class& p(long k);         // k >= -2
  const mpz_class& q(long k);         // k >= -2
  Real epsilon(long k);               // q_k x - p_k, k >= -1
  Real epsilon_abs(long k);

  // a_0..a_n (n + 1 digits)
  std::vector<mpz_class> partial_quotients(long n);
  std::vector<Convergent> convergents(long n); // k = 0..n
  ConvergentMatrix convergent_matrix(long k);  // k >= 1

  OmegaWindow omega_window(long k_lo, long k_hi,
                           std::optional<mpq_class> asserted = std::nullopt);

  // CSV rows k = 0..n with exact residual bounds 1/(2 q_{k+1}) and
  // 1/q_{k+1} as numerator/denominator pairs.
  std::string csv(long n);

private:
  void extend(long k);
  Real x_;
  bool echo_;
  std::vector<mpz_class> a_;
  std::vector<mpz_class> ptab_, qtab_; // index i holds p_{i-2}, q_{i-2}
  std::optional<Real> tail_;           // next complete quotient (Gauss path)
};

} // namespace sl2orbit
