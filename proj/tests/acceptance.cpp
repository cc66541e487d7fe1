// Acceptance gate: ten pinned end-to-end checks, one line of output
// each. Every inequality marked "exact" is decided by exact arithmetic
// (integer, rational, or quadratic-surd comparison) — never by floats.
// The process exits with the number of failed criteria.

#include "sl2orbit/analysis.hpp"
#include "sl2orbit/constructions.hpp"
#include "sl2orbit/contfrac.hpp"
#include "sl2orbit/errors.hpp"
#include "sl2orbit/real.hpp"
#include "sl2orbit/sl2.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace sl2orbit;

namespace {

int g_failures = 0;

using Clock = std::chrono::steady_clock;

// Certificates that record diagnostics; every other certificate is a
// certified theorem and must pass.
bool is_advisory(const std::string& name) {
  static const std::set<std::string> names = {
      "first-column-v1-positive", "first-column-v2-positive",
      "residual-1-positive",      "residual-2-positive",
      "size-bound",               "index-window-floor",
      "index-window-ceiling",     "index-window-next"};
  return names.count(name) > 0;
}

bool theorems_pass(const std::vector<Certificate>& certs) {
  for (const Certificate& c : certs)
    if (!c.pass && !is_advisory(c.name)) return false;
  return true;
}

void report(int idx, bool ok, double secs, double budget,
            const std::string& note) {
  bool timely = secs <= budget;
  bool all_ok = ok && timely;
  std::ostringstream line;
  line << "criterion " << idx << ": " << (all_ok ? "pass" : "FAIL") << " - "
       << note;
  if (!timely) line << " (over time budget)";
  line << " [" << std::fixed << std::setprecision(2) << secs << "s / "
       << std::setprecision(0) << budget << "s]";
  std::cout << line.str() << std::endl;
  if (!all_ok) ++g_failures;
}

template <typename Fn>
void criterion(int idx, double budget, Fn body) {
  Clock::time_point start = Clock::now();
  bool ok = false;
  std::string note;
  try {
    ok = body(note);
  } catch (const std::exception& e) {
    ok = false;
    note += std::string(" threw: ") + e.what();
  }
  double secs =
      std::chrono::duration<double>(Clock::now() - start).count();
  report(idx, ok, secs, budget, note);
}

PlanePoint golden_point() {
  return {parse_real("surd:(-1+1*sqrt(5))/2"), Real(1)};
}

PlanePoint root2_point() {
  return {parse_real("surd:(-1+1*sqrt(2))/1"), Real(1)};
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// ---- 1. origin driver: distinct matrices and the exact contraction law

bool crit_origin(std::string& note) {
  bool ok = true;
  for (const PlanePoint& x : {golden_point(), root2_point()}) {
    std::set<std::string> distinct;
    for (long k = 1; k <= 10; ++k) {
      ApproxResult r = approx_origin(x, k);
      distinct.insert(r.gamma.str());
      ok = ok && theorems_pass(r.certificates);
      // |gamma x| * |gamma| <= |x|, exact
      Real lhs = Real(r.norm) * r.residual_sup();
      ok = ok && (lhs - x.sup_norm()).sign() <= 0;
    }
    ok = ok && distinct.size() >= 10;
  }
  note = "origin driver: 10 distinct matrices per slope, contraction "
         "|gamma x| |gamma| <= |x| exact";
  return ok;
}

// ---- 2. rational-slope driver: squared-exponent law on the golden ladder

bool crit_rational(std::string& note) {
  PlanePoint x = golden_point();
  PlanePoint y{Real(1), Real(2)};
  // residual^2 |gamma| <= 12 max(|a|,|b|)^2 |x| |y| = 12 * 4 * 1 * 2
  Real bound(96);
  bool ok = true;
  mpz_class first_norm, last_norm;
  for (long k = 6; k <= 15; ++k) {
    ApproxResult r = approx_rational_slope(x, y, k);
    ok = ok && theorems_pass(r.certificates);
    Real lhs = r.residual_sup().pow_uint(2) * Real(r.norm);
    ok = ok && (lhs - bound).sign() <= 0;
    if (k == 6) first_norm = r.norm;
    last_norm = r.norm;
  }
  ok = ok && first_norm == 238 && last_norm == 1666664;
  note = "rational driver k=6..15: residual^2 |gamma| <= 96 exact, ladder "
         "norms 238.." + last_norm.get_str();
  return ok;
}

// ---- 3. slow-growth irrational driver: cube-exponent law

bool crit_irrational(std::string& note) {
  PlanePoint x = golden_point();
  PlanePoint y = root2_point();
  // residual^3 |gamma| <= 1715 sqrt(5) |x| |y|^2 with |x| = |y| = 1
  Real bound = parse_real("surd:(0+1715*sqrt(5))/1");
  bool ok = true;
  mpz_class last_norm;
  for (long j0 = 3; j0 <= 8; ++j0) {
    IndexPair jk = select_indices_small_omega(x, y, j0);
    ApproxResult r = approx_irrational_slope(x, y, jk.j, jk.k);
    r.certificates.push_back(cube_exponent_certificate(r, x, y));
    ok = ok && theorems_pass(r.certificates);
    Real lhs = r.residual_sup().pow_uint(3) * Real(r.norm);
    ok = ok && (lhs - bound).sign() <= 0;
    last_norm = r.norm;
  }
  ok = ok && last_norm == mpz_class("1100085797753737891");
  note = "slow-growth driver j0=3..8: residual^3 |gamma| <= 1715 sqrt(5) "
         "exact out to norm ~1.1e18";
  return ok;
}

// ---- 4. exhaustive origin floor at three indices

bool crit_origin_floor(std::string& note) {
  PlanePoint x = golden_point();
  const long ks[] = {4, 5, 6};
  const mpz_class examined[] = {180, 372, 1012};
  const mpq_class floors[] = {{1, 10}, {1, 16}, {1, 26}};
  bool ok = true;
  for (int i = 0; i < 3; ++i) {
    ExtremeSearch s = verify_origin_floor(x, ks[i]);
    ok = ok && s.pass && s.examined == examined[i] &&
         s.floor_bound == floors[i];
    for (const Certificate& c : s.certificates) ok = ok && c.pass;
    // min >= floor re-checked exactly against the rational bound
    ok = ok && (s.min_distance - Real(s.floor_bound)).sign() >= 0;
  }
  note = "exhaustive origin floor k=4,5,6: minima clear 1/(2 q_k) over "
         "180/372/1012 matrices, exact";
  return ok;
}

// ---- 5. exhaustive target floor on the deep instance

bool crit_target_floor(std::string& note) {
  PlanePoint x = golden_point();
  PlanePoint y{Real(1), Real(2)};
  ExtremeSearch s = verify_target_floor(x, y, 6);
  bool ok = s.pass && s.cap == 136 && s.examined == 180276 &&
            s.floor_bound == mpq_class(1, 104);
  for (const Certificate& c : s.certificates) ok = ok && c.pass;
  ok = ok && s.examined == count_norm_bounded(s.cap);
  ok = ok && (s.min_distance - Real(mpq_class(1, 104))).sign() >= 0;
  ok = ok && s.argmin == Mat(47, -28, 89, -53);
  note = "exhaustive target floor k=6: min over all 180276 matrices of "
         "norm <= 136 clears 1/104, exact";
  return ok;
}

// ---- 6. bilinear residual identity on random products

bool crit_identity(std::string& note) {
  PlanePoint x = golden_point();
  Real xi = x.x1 / x.x2;
  ContinuedFraction cf(xi);
  std::mt19937 rng(20260815u);
  std::uniform_int_distribution<long> coord(-9, 9);
  std::uniform_int_distribution<long> shear(-4, 4);
  std::uniform_int_distribution<long> ell_pick(-50, 50);
  std::uniform_int_distribution<long> k_pick(1, 12);
  std::uniform_int_distribution<long> y_num(-5, 5);
  std::uniform_int_distribution<long> y_den(1, 5);

  bool ok = true;
  int done = 0;
  while (done < 1000) {
    long a = coord(rng), b = coord(rng);
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), mpz_class(a).get_mpz_t(),
            mpz_class(b).get_mpz_t());
    if (g != 1) continue;
    Mat n = complete_primitive(a, b) * Mat::shear_pow(shear(rng));
    if (n.norm() > 50) continue;
    long ell = ell_pick(rng);
    long k = k_pick(rng);
    PlanePoint y{Real(y_num(rng)), Real(y_den(rng))};
    Real ys = y.x1 / y.x2;

    ApproxResult r = build_gamma(n, ell, k, x, y);
    const Mat& gm = r.gamma;
    // ys (v2 xi + u2) - (v1 xi + u1)
    //   = (s ys - t)(eps_k + ell |eps_{k-1}|) + (s' ys - t') |eps_{k-1}|
    Real lhs = ys * (Real(gm.v2) * xi + Real(gm.u2)) -
               (Real(gm.v1) * xi + Real(gm.u1));
    Real rhs = (Real(n.v2) * ys - Real(n.v1)) *
                   (cf.epsilon(k) + Real(ell) * cf.epsilon_abs(k - 1)) +
               (Real(n.u2) * ys - Real(n.u1)) * cf.epsilon_abs(k - 1);
    ok = ok && (lhs - rhs).sign() == 0;
    ok = ok && theorems_pass(r.certificates);
    ++done;
  }
  note = "bilinear residual identity exact on 1000 random "
         "(N, ell, k, target) products";
  return ok;
}

// ---- 7. factorization round-trip plus the certified instance

bool crit_factorization(std::string& note) {
  std::vector<Mat> ball = collect_norm_bounded(3);
  std::mt19937 rng(915u);
  std::uniform_int_distribution<std::size_t> pick(0, ball.size() - 1);
  std::uniform_int_distribution<long> shear(-6, 6);
  std::uniform_int_distribution<long> coord(-9, 9);
  std::uniform_int_distribution<long> k_pick(1, 12);
  PlanePoint x = golden_point();
  ContinuedFraction cf(x.x1 / x.x2);

  bool ok = true;
  int done = 0;
  while (done < 1000) {
    long a = coord(rng), b = coord(rng);
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), mpz_class(a).get_mpz_t(),
            mpz_class(b).get_mpz_t());
    if (g != 1) continue;
    Mat gamma = ball[pick(rng)] * Mat::shear_pow(shear(rng)) *
                ball[pick(rng)];
    Mat n = complete_primitive(a, b);
    Mat m = cf.convergent_matrix(k_pick(rng)).matrix;
    Factorization f = factorize(gamma, n, m);
    ok = ok && f.N == n && f.M == m && (f.N * f.G * f.M) == gamma;
    ++done;
  }

  // The certified instance: the norm-254 record aimed at (1,2).
  Mat gamma(-123, 77, -254, 159);
  Mat n(1, 0, 2, 1);
  Mat m(13, -8, -8, 5);
  DecompositionScale scale;
  scale.x = x;
  scale.y = PlanePoint{Real(1), Real(2)};
  scale.T = 136;
  scale.mu = mpq_class(1, 4);
  scale.q_km1 = 8;
  scale.q_k = 13;
  scale.q_kp1 = 21;
  scale.s_j = 2;
  Factorization f = factorize_certified(gamma, n, m, scale);
  ok = ok && f.G == Mat(1, 17, 0, 1) && (f.N * f.G * f.M) == gamma;
  for (const Certificate& c : f.certificates) ok = ok && c.pass;
  ok = ok && f.B1 == mpq_class(1600, 13) && f.B2 == mpq_class(520, 3);
  ok = ok && mpq_class(1) <= f.B1 && mpq_class(17) <= f.B2;

  note = "factorization N G M round-trips on 1000 random triples; "
         "certified column bounds hold on the deep record";
  return ok;
}

// ---- 8. sign-constrained driver in the positive quadrant

bool crit_signed(std::string& note) {
  PlanePoint x{parse_real("surd:(1-1*sqrt(5))/2"), Real(1)};
  PlanePoint y{Real(1), parse_real("surd:(1+1*sqrt(5))/2")};
  mpq_class mu(3, 10), eps(1, 10);
  std::vector<long> qualifying;
  bool ok = true;
  for (long k = 1; k <= 23; k += 2) {
    ApproxResult r = approx_signed(x, y, k, mu, eps, /*require=*/false);
    ok = ok && theorems_pass(r.certificates);
    bool blocked = false;
    for (const Certificate& c : r.certificates)
      if (!c.pass && is_advisory(c.name) &&
          c.name.rfind("index-window", 0) != 0)
        blocked = true;
    if (blocked) continue;
    // Re-check the qualifying conditions exactly, independent of the
    // recorded certificates: strict positivity and the size law
    // max(L1, L2) <= |gamma|^(-3/10)  <=>  max^10 |gamma|^3 <= 1.
    ok = ok && r.gamma.v1 > 0 && r.gamma.v2 > 0;
    ok = ok && r.lam1.sign() > 0 && r.lam2.sign() > 0;
    Real size = r.residual_sup().pow_uint(10) * Real(r.norm).pow_uint(3);
    ok = ok && (size - Real(1)).sign() <= 0;
    qualifying.push_back(k);
  }
  ok = ok && qualifying.size() >= 5;
  ok = ok && qualifying == std::vector<long>{1, 5, 7, 11, 13, 17, 19, 21, 23};
  note = "sign-constrained driver: " + std::to_string(qualifying.size()) +
         " odd indices <= 23 land in the open quadrant with "
         "max-residual <= |gamma|^(-3/10), exact";
  return ok;
}

// ---- 9. soft exponent window (declared tolerance, flags only)

bool crit_exponent_soft(std::string& note) {
  PlanePoint x = golden_point();
  PlanePoint y{Real(1), Real(2)};
  RecordSequence rs = record_survey(x, y, mpz_class(10000));
  ExponentEstimate est = estimate_exponents(rs);
  double mu_err = std::abs(est.mu - 0.5);
  double mu_hat_err = std::abs(est.mu_hat - 0.5);
  bool within = mu_err <= 0.15 && mu_hat_err <= 0.15;
  note = "soft exponent window at T=10^4: mu~" + fmt(est.mu) + " mu-hat~" +
         fmt(est.mu_hat) + " vs predicted 1/2 (tolerance 0.15)";
  if (!within)
    note += " FLAG: outside declared tolerance - investigate (soft check, "
            "not a rejection)";
  return true; // soft: a miss flags investigation, it does not fail the gate
}

// ---- 10. enumerator: direct-scan cross-check, nesting, negation closure

bool crit_enumerator(std::string& note) {
  // Route A: the production enumerator. Route B: a direct scan of all
  // 3^4 entry patterns with entries in {-1, 0, 1}.
  long direct = 0;
  for (int v1 = -1; v1 <= 1; ++v1)
    for (int u1 = -1; u1 <= 1; ++u1)
      for (int v2 = -1; v2 <= 1; ++v2)
        for (int u2 = -1; u2 <= 1; ++u2)
          if (v1 * u2 - u1 * v2 == 1) ++direct;
  bool ok = count_norm_bounded(1) == direct && direct == 20;

  const mpz_class budgets[] = {1, 2, 3, 5, 8};
  const mpz_class counts[] = {20, 52, 116, 308, 692};
  std::set<std::string> previous;
  for (int i = 0; i < 5; ++i) {
    std::vector<Mat> ball = collect_norm_bounded(budgets[i]);
    ok = ok && mpz_class(ball.size()) == counts[i] &&
         count_norm_bounded(budgets[i]) == counts[i];
    std::set<std::string> current;
    for (const Mat& g : ball) current.insert(g.str());
    for (const std::string& s : previous) ok = ok && current.count(s) > 0;
    // negation closure: -gamma has the same determinant and norm
    for (const Mat& g : ball)
      ok = ok && current.count(Mat(-g.v1, -g.u1, -g.v2, -g.u2).str()) > 0;
    previous = std::move(current);
  }
  note = "enumerator: unit-ball count 20 cross-checked by the 3^4 direct "
         "scan; balls nest and close under negation";
  return ok;
}

} // namespace

int main() {
  std::cout << "acceptance gate: certified plane-point approximation\n";
  criterion(1, 1.0, crit_origin);
  criterion(2, 1.0, crit_rational);
  criterion(3, 5.0, crit_irrational);
  criterion(4, 10.0, crit_origin_floor);
  criterion(5, 60.0, crit_target_floor);
  criterion(6, 10.0, crit_identity);
  criterion(7, 10.0, crit_factorization);
  criterion(8, 30.0, crit_signed);
  criterion(9, 300.0, crit_exponent_soft);
  criterion(10, 1.0, crit_enumerator);
  std::cout << (g_failures == 0 ? "all criteria pass"
                                : std::to_string(g_failures) +
                                      " criteria failed")
            << std::endl;
  return g_failures;
}
