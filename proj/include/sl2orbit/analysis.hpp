#pragma once

#include "sl2orbit/real.hpp"
#include "sl2orbit/sl2.hpp"

#include <gmpxx.h>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sl2orbit {

// One best-approximation record: no matrix with norm <= this norm
// achieves a strictly smaller distance to the target.
struct ApproxRecord {
  Mat gamma;
  mpz_class norm;
  Real distance;
};

// D(budget) sample: the best distance over all norms <= budget, when a
// matrix inside the budget has been seen at all.
struct StaircasePoint {
  mpz_class budget;
  std::optional<Real> value;
  Mat argmin;
};

struct RecordSequence {
  std::vector<ApproxRecord> records; // distances strictly decreasing
  std::vector<StaircasePoint> staircase; // budgets ascending
  std::string source;
};

enum class StaircaseSource { oracle, constructions };

// Norm budget allowed for exhaustive scans: the SL2ORBIT_ORACLE_CAP
// environment variable when set (positive integer), otherwise 10^4.
mpz_class oracle_cap();

// Distance staircase on the given budgets.
//   oracle:        enumerate every matrix with norm <= max(t_grid)
//                  (subject to the cap) — exact minima, canonical
//                  argmins (smallest distance, then smallest norm,
//                  then first in (v2,u2,v1,u1) order).
//   constructions: run the driver ladder matching the target kind and
//                  take its records — an upper envelope of the truth.
RecordSequence staircase(const PlanePoint& x, const PlanePoint& y,
                         std::vector<mpz_class> t_grid,
                         StaircaseSource source,
                         std::optional<mpz_class> cap = std::nullopt);

// Pruned record survey up to t_max: a family-by-family scan whose
// candidate selection runs in double precision (fast, covers budgets
// far beyond exhaustive reach), after which every surviving record
// distance is recomputed exactly. Selection is a survey, not a proof:
// a borderline record candidate could in principle be missed, which is
// why exhaustive verification exists separately. Fills the staircase
// on the halving grid t_max, t_max/2, ..., >= 8.
RecordSequence record_survey(const PlanePoint& x, const PlanePoint& y,
                             const mpz_class& t_max,
                             std::optional<mpz_class> cap = std::nullopt);

// Empirical exponents read off a record sequence. With T the largest
// staircase budget: mu is the maximal -log(distance)/log(norm) over
// records in the tail window norm^4 >= T^3, and mu-hat is the minimal
// -log(D(T'))/log(T') over staircase budgets with T'^2 >= T. Window
// membership is decided by exact integer comparisons; the logarithms
// are double precision.
struct ExponentEstimate {
  double mu = 0.0;
  double mu_hat = 0.0;
  mpz_class t_ref;
  long mu_records_used = 0;
  long mu_hat_grid_used = 0;
  std::pair<mpz_class, double> mu_argmax{0, 0.0};
  std::pair<mpz_class, double> mu_hat_argmin{0, 0.0};
  std::vector<std::pair<mpz_class, double>> grid_exponents;
};

ExponentEstimate estimate_exponents(const RecordSequence& rs);

// Exact predicted exponents given asserted growth exponents (omega >= 1):
//   origin target:           (1, 1/w)                     [equalities]
//   rational-slope target:   (w/(w+1), 1/(w+1))           [equalities]
//   irrational-slope target: (1/3, (wy+1)/(2(2wy+1) wx))  [lower bounds]
std::pair<mpq_class, mpq_class> origin_exponents(const mpq_class& omega_x);
std::pair<mpq_class, mpq_class> rational_slope_exponents(
    const mpq_class& omega_x);
std::pair<mpq_class, mpq_class> irrational_slope_exponent_floors(
    const mpq_class& omega_x, const mpq_class& omega_y);

// Result of an exhaustive minimum-distance scan over every matrix with
// norm <= cap, checked against a certified lower bound.
struct ExtremeSearch {
  long k = 0;
  mpz_class cap;
  mpz_class examined;
  Mat argmin;
  Real min_distance;
  mpq_class floor_bound;
  bool pass = false;
  std::vector<Certificate> certificates;
};

// Exhaustive check that every matrix with norm <= floor(q_{k+1}/2)
// keeps |gamma x| >= 1/(2 q_k); returns the minimizer and the exact
// minimal distance.
ExtremeSearch verify_origin_floor(const PlanePoint& x, long k,
                                  std::optional<mpz_class> cap = std::nullopt);

// Exhaustive check that every matrix with norm <=
// floor(|y2| q_k q_{k+1} / 4) keeps |gamma x - y| >= 1/(4 b q_k), for a
// target with exact rational coordinates and reduced slope a/b.
// Requires q_k |y2| >= 12 b (PreconditionFailed otherwise).
ExtremeSearch verify_target_floor(const PlanePoint& x, const PlanePoint& y,
                                  long k,
                                  std::optional<mpz_class> cap = std::nullopt);

} // namespace sl2orbit
