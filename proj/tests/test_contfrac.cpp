#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sl2orbit/contfrac.hpp"
#include "sl2orbit/errors.hpp"
#include "sl2orbit/real.hpp"
#include "sl2orbit/sl2.hpp"

#include <gmpxx.h>

#include <string>
#include <vector>

using namespace sl2orbit;

namespace {

Real golden() { return parse_real("surd:(-1+1*sqrt(5))/2"); }
Real sqrt2() { return parse_real("surd:(0+1*sqrt(2))/1"); }
Real sqrt2m1() { return parse_real("surd:(-1+1*sqrt(2))/1"); }
Real neg_golden() { return parse_real("surd:(1-1*sqrt(5))/2"); }

std::vector<long> verified_range(long lo, long hi) {
  std::vector<long> ks;
  for (long k = lo; k <= hi; ++k) ks.push_back(k);
  return ks;
}

// Certified residual window: 1 <= |eps_k| * 2 q_{k+1} and
// |eps_k| * q_{k+1} <= 1, decided by exact sign evaluation.
void check_residual_window(ContinuedFraction& cf, long k) {
  Real e = cf.epsilon_abs(k);
  Real lower = e * Real(mpz_class(2 * cf.q(k + 1))) - Real(1);
  Real upper = e * Real(cf.q(k + 1)) - Real(1);
  CHECK(lower.sign() >= 0);
  CHECK(upper.sign() <= 0);
}

} // namespace

TEST_CASE("digit streams of the fixed quadratic slopes") {
  ContinuedFraction g(golden());
  CHECK(g.partial_quotients(5) ==
        std::vector<mpz_class>{0, 1, 1, 1, 1, 1});
  ContinuedFraction r2(sqrt2());
  CHECK(r2.partial_quotients(4) == std::vector<mpz_class>{1, 2, 2, 2, 2});
  ContinuedFraction r2m1(sqrt2m1());
  CHECK(r2m1.partial_quotients(4) == std::vector<mpz_class>{0, 2, 2, 2, 2});
  ContinuedFraction ng(neg_golden());
  CHECK(ng.partial_quotients(5) ==
        std::vector<mpz_class>{-1, 2, 1, 1, 1, 1});
}

TEST_CASE("convergent tables") {
  ContinuedFraction g(golden());
  const long fib_p[] = {0, 1, 1, 2, 3, 5, 8, 13, 21, 34, 55};
  const long fib_q[] = {1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89};
  for (long k = 0; k <= 10; ++k) {
    CHECK(g.p(k) == fib_p[k]);
    CHECK(g.q(k) == fib_q[k]);
  }
  CHECK(g.p(-1) == 1);
  CHECK(g.q(-1) == 0);
  CHECK(g.p(-2) == 0);
  CHECK(g.q(-2) == 1);

  ContinuedFraction r2(sqrt2());
  const long r2p[] = {1, 3, 7, 17, 41};
  const long r2q[] = {1, 2, 5, 12, 29};
  for (long k = 0; k <= 4; ++k) {
    CHECK(r2.p(k) == r2p[k]);
    CHECK(r2.q(k) == r2q[k]);
  }

  ContinuedFraction s(sqrt2m1());
  const long sp[] = {0, 1, 2, 5, 12};
  const long sq[] = {1, 2, 5, 12, 29};
  for (long k = 0; k <= 4; ++k) {
    CHECK(s.p(k) == sp[k]);
    CHECK(s.q(k) == sq[k]);
  }
}

TEST_CASE("signed residuals alternate and satisfy the two-sided window") {
  for (Real xi : {golden(), sqrt2m1()}) {
    ContinuedFraction cf(xi);
    CHECK(cf.epsilon(-1).compare(mpq_class(-1)) == 0);
    for (long k : verified_range(0, 12)) {
      const int s = cf.epsilon(k).sign();
      CHECK(s == ((k % 2 == 0) ? 1 : -1));
      check_residual_window(cf, k);
    }
  }
}

TEST_CASE("neighbor determinant identity") {
  ContinuedFraction ng(neg_golden());
  for (long k : verified_range(0, 12)) {
    mpz_class det = ng.p(k) * ng.q(k - 1) - ng.p(k - 1) * ng.q(k);
    CHECK(det == ((k % 2 == 0) ? -1 : 1));
  }
}

TEST_CASE("convergent matrices: frozen instances") {
  ContinuedFraction g(golden());
  CHECK(g.convergent_matrix(2).matrix == Mat(2, -1, -1, 1));
  CHECK(g.convergent_matrix(3).matrix == Mat(3, -2, 2, -1));
  CHECK(g.convergent_matrix(4).matrix == Mat(5, -3, -3, 2));
  CHECK(g.convergent_matrix(8).matrix == Mat(34, -21, -21, 13));
  ContinuedFraction ng(neg_golden());
  CHECK(ng.convergent_matrix(13).matrix == Mat(610, 377, 377, 233));
  CHECK_THROWS_AS(g.convergent_matrix(0), parse_error);
}

TEST_CASE("convergent matrices: determinant, norm, and slope action") {
  for (Real xi : {golden(), sqrt2m1()}) {
    ContinuedFraction cf(xi);
    PlanePoint x{xi, Real(1)};
    for (long k : verified_range(1, 10)) {
      Mat m = cf.convergent_matrix(k).matrix;
      CHECK(m.det() == 1);
      CHECK(m.norm() == cf.q(k)); // |slope| < 1 here
      PlanePoint image = apply(m, x);
      CHECK((image.x1 - cf.epsilon(k)).sign() == 0);
      CHECK((image.x2 - cf.epsilon_abs(k - 1)).sign() == 0);
    }
  }
}

TEST_CASE("digits recompute the tables bit-for-bit") {
  ContinuedFraction cf(sqrt2m1());
  auto digits = cf.partial_quotients(12);
  mpz_class pm2 = 0, pm1 = 1, qm2 = 1, qm1 = 0;
  auto conv = cf.convergents(12);
  REQUIRE(conv.size() == 13);
  for (std::size_t i = 0; i < digits.size(); ++i) {
    mpz_class pk = digits[i] * pm1 + pm2;
    mpz_class qk = digits[i] * qm1 + qm2;
    CHECK(pk == cf.p(static_cast<long>(i)));
    CHECK(qk == cf.q(static_cast<long>(i)));
    CHECK(conv[i].k == static_cast<long>(i));
    CHECK(conv[i].p == pk);
    CHECK(conv[i].q == qk);
    pm2 = pm1;
    pm1 = pk;
    qm2 = qm1;
    qm1 = qk;
  }
}

TEST_CASE("digit-list inputs echo their own digits") {
  // Periodic list: same engine output as the closed-form slope.
  ContinuedFraction echo(parse_real("cf:[1;] repeat:[2]"));
  CHECK(echo.partial_quotients(4) == std::vector<mpz_class>{1, 2, 2, 2, 2});
  for (long k : verified_range(0, 8)) check_residual_window(echo, k);

  // Finite list: digits echo until the list ends, then the expansion
  // has terminated and further digits do not exist.
  ContinuedFraction fin(parse_real("cf:[0;1,2]"));
  CHECK(fin.partial_quotients(2) == std::vector<mpz_class>{0, 1, 2});
  CHECK(fin.p(2) == 2);
  CHECK(fin.q(2) == 3);
  CHECK(fin.epsilon(2).sign() == 0);
  try {
    fin.partial_quotients(3);
    FAIL("terminating expansion must not yield a fourth digit");
  } catch (const rational_input_error& e) {
    CHECK(std::string(e.kind()) == "RationalInput");
    CHECK(e.exit_code() == 2);
  }
}

TEST_CASE("rational values are rejected for digit extraction") {
  ContinuedFraction cf(parse_real("rat:22/7"));
  try {
    cf.partial_quotients(3);
    FAIL("rational slope must be rejected");
  } catch (const rational_input_error& e) {
    CHECK(std::string(e.kind()) == "RationalInput");
    CHECK(e.exit_code() == 2);
  }
  ContinuedFraction bare(parse_real("22/7"));
  CHECK_THROWS_AS(bare.digit(0), rational_input_error);
}

TEST_CASE("interval inputs yield digits until the first ambiguous one") {
  ContinuedFraction cf(parse_real("dec:0.61803398875~1/100000000"));
  auto digits = cf.partial_quotients(8);
  CHECK(digits == std::vector<mpz_class>{0, 1, 1, 1, 1, 1, 1, 1, 1});
  try {
    cf.partial_quotients(40);
    FAIL("an interval of finite radius cannot determine 41 digits");
  } catch (const precision_exhausted_error& e) {
    CHECK(std::string(e.kind()) == "PrecisionExhausted");
    CHECK(e.exit_code() == 3);
  }
}

TEST_CASE("growth-ratio window over a fixed index range") {
  ContinuedFraction g(golden());
  OmegaWindow w = g.omega_window(5, 20);
  CHECK(w.ratios.size() == 16);
  CHECK(w.ratios.front().first == 5);
  CHECK(w.ratios.back().first == 20);
  CHECK(w.max_ratio == doctest::Approx(1.233480).epsilon(1e-4));
  CHECK(w.min_ratio == doctest::Approx(1.051739).epsilon(1e-4));
  CHECK(w.max_ratio <= 1.3);
  for (auto& [k, r] : w.ratios) {
    CHECK(r >= 1.0);
    CHECK(k >= 5);
  }
  CHECK_FALSE(w.asserted.has_value());
  OmegaWindow wa = g.omega_window(5, 8, mpq_class(1));
  REQUIRE(wa.asserted.has_value());
  CHECK(*wa.asserted == 1);
}

TEST_CASE("growth-ratio window flags fast digit growth") {
  // a_1 = 1 and a_{k+1} = 10 a_k
  Real fast = Real::from_cf_rule(0, [](long k) {
    mpz_class a = 1;
    for (long i = 1; i < k; ++i) a *= 10;
    return a;
  });
  ContinuedFraction cf(fast);
  OmegaWindow w = cf.omega_window(1, 6);
  REQUIRE(!w.ratios.empty());
  CHECK(w.ratios.front().first == 2); // q_1 = 1 has no ratio
  CHECK(w.ratios.front().second > 2.0);
  CHECK(w.max_ratio > 2.0);
}

TEST_CASE("csv emission with exact residual bounds") {
  ContinuedFraction g(golden());
  const std::string expected =
      "k,p,q,sign_eps,eps_lo_num,eps_lo_den,eps_hi_num,eps_hi_den\n"
      "0,0,1,+,1,2,1,1\n"
      "1,1,1,-,1,4,1,2\n"
      "2,1,2,+,1,6,1,3\n"
      "3,2,3,-,1,10,1,5\n";
  CHECK(g.csv(3) == expected);
}

TEST_CASE("rule-driven digits reach large denominators exactly") {
  // a_1 = 1, a_{k+1} = a_k^3 (so a_k = 2^(3^(k-2)) for k >= 2)
  Real liouville = Real::from_cf_rule(0, [](long k) {
    if (k == 1) return mpz_class(1);
    mpz_class e = 1;
    for (long i = 0; i < k - 2; ++i) e *= 3;
    mpz_class a;
    mpz_ui_pow_ui(a.get_mpz_t(), 2, e.get_ui());
    return a;
  });
  ContinuedFraction cf(liouville);
  CHECK(cf.partial_quotients(5) ==
        std::vector<mpz_class>{0, 1, 2, 8, 512, 134217728});
  CHECK(cf.q(5) == mpz_class("1718389571609"));
}
