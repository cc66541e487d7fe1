#pragma once

#include "sl2orbit/real.hpp"

#include <gmpxx.h>

#include <functional>
#include <string>
#include <vector>

namespace sl2orbit {

// Integer matrix [[v1, u1], [v2, u2]] with determinant 1 (checked on
// construction and after every product). Norm is the sup-norm over the
// four entries.
class Mat {
public:
  mpz_class v1, u1, v2, u2;

  Mat() : v1(1), u1(0), v2(0), u2(1) {}
  Mat(const mpz_class& a, const mpz_class& b, const mpz_class& c,
      const mpz_class& d);

  static Mat identity() { return Mat(); }
  static Mat gen_rotation();                  // J = [[0,-1],[1,0]]
  static Mat gen_shear();                     // U = [[1,1],[0,1]]
  static Mat shear_pow(const mpz_class& l);   // U^l = [[1,l],[0,1]]
  static Mat parse(const std::string& text);  // "[[v1,u1],[v2,u2]]"

  mpz_class det() const { return v1 * u2 - u1 * v2; }
  mpz_class norm() const;

  Mat operator*(const Mat& o) const;
  Mat operator-() const { return Mat(-v1, -u1, -v2, -u2); }
  Mat inverse() const { return Mat(u2, -u1, -v2, v1); }
  bool operator==(const Mat& o) const {
    return v1 == o.v1 && u1 == o.u1 && v2 == o.v2 && u2 == o.u2;
  }
  bool operator!=(const Mat& o) const { return !(*this == o); }

  std::string str() const;
};

// A point of the plane with exactly-representable coordinates.
struct PlanePoint {
  Real x1, x2;
  Real sup_norm() const;
};

// Left action: gamma * (x1, x2)^T.
PlanePoint apply(const Mat& g, const PlanePoint& p);

// Residual gamma * x - y, componentwise.
std::pair<Real, Real> residual(const Mat& g, const PlanePoint& x,
                               const PlanePoint& y);

// Visit every determinant-1 matrix with norm <= T exactly once, in
// ascending lexicographic order on (v2, u2, v1, u1). Strategy: coprime
// second rows, one extended-gcd lift, then the integer family
// (v1o + t*v2, u1o + t*u2) clamped to the entry box.
void enumerate_norm_bounded(const mpz_class& T,
                            const std::function<void(const Mat&)>& emit);
std::vector<Mat> collect_norm_bounded(const mpz_class& T);
mpz_class count_norm_bounded(const mpz_class& T);
std::string enumeration_csv(const mpz_class& T); // v1,u1,v2,u2,norm rows

// One named exact check: pass/fail plus a human-readable comparison.
struct Certificate {
  std::string name;
  bool pass;
  std::string detail;
};

// gamma = N * G * M with G = N^{-1} gamma M^{-1}; B1/B2 are rational
// upper bounds on the sup-norms of G's first/second column, attached
// when certification ran.
struct Factorization {
  Mat N, G, M;
  mpq_class B1, B2;
  std::vector<Certificate> certificates;
};

Factorization factorize(const Mat& gamma, const Mat& N, const Mat& M);

// Hypotheses under which the factor G = [[m, l], [m', l']] has certified
// small columns: T in the convergent-denominator window, gamma norm at
// most 2T, residual at most T^{-mu}, and s_j at least T^{mu/2}.
struct DecompositionScale {
  PlanePoint x, y;              // gamma x ~ y, slope of x at index k
  mpz_class T;                  // q_{k-1} q_k <= T <= q_k q_{k+1}
  mpq_class mu;                 // exponent in [0, 1]
  mpz_class q_km1, q_k, q_kp1;  // slope-of-x convergent denominators
  mpz_class s_j;                // slope-of-y convergent denominator
};

// factorize plus exact certification of the hypotheses and of
//   max(|m|,|m'|)  <= c s_j T^{1-mu} / q_k,
//   max(|l|,|l'|)  <= c s_j q_k T^{-mu},   c = 10 max(|y|, 1/|y|)
// (y the slope of the target). All comparisons are performed on b-th
// powers for mu = a/b, never on floating-point roots. Throws
// BoundViolated naming the first failed inequality.
Factorization factorize_certified(const Mat& gamma, const Mat& N,
                                  const Mat& M,
                                  const DecompositionScale& scale);

} // namespace sl2orbit
