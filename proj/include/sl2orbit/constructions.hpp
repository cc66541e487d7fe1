#pragma once

#include "sl2orbit/contfrac.hpp"
#include "sl2orbit/real.hpp"
#include "sl2orbit/sl2.hpp"

#include <gmpxx.h>

#include <optional>
#include <string>
#include <vector>

namespace sl2orbit {

// x and y moved (by powers of the rotation generator) into the frame
// where |x'| = |x'_2| and |y'| = |y'_2|. map_back turns a solution g
// for the primed pair into one for the originals; the residual
// sup-norm is unchanged because the rotation is a sup-norm isometry.
struct NormalizedPair {
  PlanePoint x, y;
  Mat pre;   // x' = pre * x
  Mat post;  // y  = post * y'
  Mat map_back(const Mat& g) const { return post * g * pre; }
};

NormalizedPair normalize(const PlanePoint& x, const PlanePoint& y);

// Canonical determinant-1 completion [[a, a'], [b, b']] of a primitive
// column (a, b): among all valid second columns pick the one
// minimizing (|a'|, |b'|) lexicographically, ties toward b' >= 0.
Mat complete_primitive(const mpz_class& a, const mpz_class& b);

// One constructed approximation gamma = N U^ell M_k: the exact
// residual gamma x - y, the trace of every choice made, and the named
// bound that was certified for it.
struct ApproxResult {
  Mat gamma;
  Real lam1, lam2; // gamma x - y, componentwise, exact
  mpz_class norm;
  Mat n_used;
  mpz_class ell;
  long k = 0;
  std::optional<long> j;
  std::string bound_name;
  Real bound_value;
  std::vector<Certificate> certificates;
  Real residual_sup() const; // max(|lam1|, |lam2|)
};

// Exact shift selector for N with second row (s, s'):
//   rho = y2 / (x2 s |eps_{k-1}|) - eps_k / |eps_{k-1}| - s'/s.
Real rho(const Mat& n, long k, const PlanePoint& x, const PlanePoint& y);

// The integer with |ell - rho| < 1 and |ell| <= |rho| (truncation
// toward zero; equals rho when rho is an integer).
mpz_class choose_ell_truncate(const Real& rho_value);
// The smallest integer >= rho.
mpz_class choose_ell_ceiling(const Real& rho_value);

// gamma = N U^ell M_k with the integer norm sandwich and the
// slope-form residual bound certified exactly (BoundViolated names the
// failed check — both are theorems, so a failure is a bug detector).
ApproxResult build_gamma(const Mat& n, const mpz_class& ell, long k,
                         const PlanePoint& x, const PlanePoint& y);

// gamma = M_k aimed at the origin: exact residual
// (x2 eps_k, x2 |eps_{k-1}|) plus the contraction certificate
// |gamma x| * |gamma| <= |x| (recorded, never thrown).
ApproxResult approx_origin(const PlanePoint& x, long k);

// Target with exactly rational slope a/b: N completes (a, b) and ell
// is chosen by truncation. Certifies the norm window (KTooSmall when k
// is not yet large enough — the caller retries with larger k), the
// residual ceiling 2 b |x2| / q_k, and the squared-exponent bound
// residual^2 |gamma| <= 12 max(|a|,|b|)^2 |x| |y|. A target on the
// horizontal axis (y2 = 0) is handled by one internal rotation.
ApproxResult approx_rational_slope(const PlanePoint& x, const PlanePoint& y,
                                   long k);

// Target with irrational slope: N_j is built from the j-th and
// (j-1)-st convergents of the slope, ell by truncation. Certifies the
// norm sandwich (lower half only inside its regime, recorded
// otherwise), the residual ceiling 2|y2|/(s_j s_{j+1}) + 5|x2| s_j/q_k,
// the convergent-gap bounds, the shear-size bracket, and the
// second-residual ceiling |x2| s_j / q_k.
ApproxResult approx_irrational_slope(const PlanePoint& x, const PlanePoint& y,
                                     long j, long k);

struct IndexPair {
  long j = 0, k = 0;
};

// Slow-growth regime: k is the largest index with
// |y2| q_{k-1} < |x2| s_{j0}^3, then j is maximal with
// |x2| s_j^3 <= |y2| q_k. Both window inequalities are exact.
IndexPair select_indices_small_omega(const PlanePoint& x, const PlanePoint& y,
                                     long j0);

// Fast-growth regime (omega > 2): every k in 3..k_max with
// q_{k-1}^omega <= q_k (compared on integer powers), paired with the
// maximal j satisfying |x2| s_j^2 <= |y2| q_k. StreamEmpty when no k
// qualifies — the slope is in the wrong regime for this driver.
std::vector<IndexPair> select_indices_large_omega(const PlanePoint& x,
                                                  const PlanePoint& y,
                                                  const mpq_class& omega,
                                                  long k_max);

// j maximal with s_j <= q_k^tau, tau in [1/3, 1/2], decided by exact
// powered comparison (s_j^b <= q_k^a for tau = a/b).
long select_indices_uniform(const PlanePoint& x, const PlanePoint& y, long k,
                            const mpq_class& tau);

// tau = omega / (2 omega + 1): the index rate used by the uniform
// driver; 1/3 at omega = 1, increasing toward 1/2.
mpq_class uniform_tau(const mpq_class& omega_y);

// Sign-constrained variant: gamma = Ntilde_j U^ell M_k with ell the
// ceiling of rho, k odd, and j defined by s_{j-1}^3 < q_k <= s_j^3.
// Ntilde_j has nonnegative entries and determinant 1. Certifies the
// slope-gap sign window and the second-residual chain exactly
// (BoundViolated on failure); records the five blocking conditions
// (v1 > 0, v2 > 0, lam1 > 0, lam2 > 0, and max|lam|^b |gamma|^a <= 1
// for mu = a/b) plus the index-window diagnostics. With require = true
// any failed blocking condition raises BoundNotYetReached naming it;
// with require = false the result carries the certificate list.
ApproxResult approx_signed(const PlanePoint& x, const PlanePoint& y, long k,
                           const mpq_class& mu, const mpq_class& eps,
                           bool require = true);

// Extra named certificates computed from a finished result (used by
// the drivers and the command-line reports):
//   residual^3 |gamma| <= 1715 sqrt(5) |x| |y|^2   (cube-exponent)
Certificate cube_exponent_certificate(const ApproxResult& r,
                                      const PlanePoint& x,
                                      const PlanePoint& y);
//   residual^2 q_k <= 49 |x2| |y2|                 (fast-growth square)
Certificate growth_residual_certificate(const ApproxResult& r,
                                        const PlanePoint& x,
                                        const PlanePoint& y);

} // namespace sl2orbit
