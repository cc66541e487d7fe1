#include "sl2orbit/constructions.hpp"

#include "sl2orbit/errors.hpp"

#include <algorithm>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace sl2orbit {

namespace {

Real real_abs_max(const Real& a, const Real& b) {
  Real aa = a.abs();
  Real bb = b.abs();
  return aa.compare(bb) >= 0 ? aa : bb;
}

bool le(const Real& lhs, const Real& rhs) { return (rhs - lhs).sign() >= 0; }
bool lt(const Real& lhs, const Real& rhs) { return (rhs - lhs).sign() > 0; }

std::string cmp_detail(const Real& lhs, const char* rel, const Real& rhs) {
  std::ostringstream os;
  os.precision(12);
  os << lhs.to_double() << " " << rel << " " << rhs.to_double();
  return os.str();
}

std::string cmp_detail(const mpz_class& lo, const mpz_class& mid,
                       const mpz_class& hi) {
  std::ostringstream os;
  os << lo << " <= " << mid << " <= " << hi;
  return os.str();
}

bool exact_zero(const Real& r) {
  auto q = r.as_rational();
  return q && *q == 0;
}

Real slope_of(const PlanePoint& p) { return p.x1 / p.x2; }

mpq_class canonical(const mpq_class& q) {
  mpq_class c = q;
  c.canonicalize();
  return c;
}

// Exponent a/b unpacked to machine integers for mpz_pow_ui use.
std::pair<unsigned long, unsigned long> exponent_parts(const mpq_class& e,
                                                       const char* what) {
  mpq_class c = canonical(e);
  if (c.get_num().fits_ulong_p() == 0 || c.get_den().fits_ulong_p() == 0 ||
      c.get_den().get_ui() > 1000000UL)
    throw parse_error(std::string(what) + " has an unusably large numerator "
                                          "or denominator: " + c.get_str());
  return {c.get_num().get_ui(), c.get_den().get_ui()};
}

mpz_class ipow(const mpz_class& base, unsigned long e) {
  mpz_class out;
  mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), e);
  return out;
}

void record(std::vector<Certificate>& cs, std::string name, bool pass,
            std::string detail) {
  cs.push_back(Certificate{std::move(name), pass, std::move(detail)});
}

void record_or_throw(std::vector<Certificate>& cs, const std::string& name,
                     bool pass, const std::string& detail) {
  record(cs, name, pass, detail);
  if (!pass)
    throw bound_violated_error(name + " failed: " + detail);
}

} // namespace

Real ApproxResult::residual_sup() const { return real_abs_max(lam1, lam2); }

NormalizedPair normalize(const PlanePoint& x, const PlanePoint& y) {
  if (exact_zero(x.x2) || slope_of(x).is_rational())
    throw slope_rational_error(
        "the slope of x must be irrational for the orbit to approximate "
        "arbitrary targets");
  NormalizedPair np{x, y, Mat::identity(), Mat::identity()};
  if ((x.x1.abs() - x.x2.abs()).sign() > 0) {
    np.pre = Mat::gen_rotation();
    np.x = apply(np.pre, x);
  }
  bool y_zero = exact_zero(y.x1) && exact_zero(y.x2);
  if (!y_zero && (y.x1.abs() - y.x2.abs()).sign() > 0) {
    Mat rot = Mat::gen_rotation();
    np.post = rot.inverse();
    np.y = apply(rot, y);
  }
  return np;
}

Mat complete_primitive(const mpz_class& a, const mpz_class& b) {
  if (a == 0 && b == 0)
    throw parse_error("the zero column has no determinant-1 completion");
  mpz_class g, u, v;
  mpz_gcdext(g.get_mpz_t(), u.get_mpz_t(), v.get_mpz_t(), a.get_mpz_t(),
             b.get_mpz_t());
  if (g != 1)
    throw parse_error("column (" + a.get_str() + ", " + b.get_str() +
                      ") is not primitive (gcd " + g.get_str() + ")");
  // a u + b v = 1, so det [[a, -v], [b, u]] = a u - (-v) b = 1.
  mpz_class ap0 = -v, bp0 = u;
  auto key = [](const mpz_class& A, const mpz_class& B) {
    return std::make_tuple(mpz_class(abs(A)), mpz_class(abs(B)), B < 0);
  };
  mpz_class best_a = ap0, best_b = bp0;
  auto consider = [&](const mpz_class& m) {
    mpz_class ca = ap0 + m * a;
    mpz_class cb = bp0 + m * b;
    if (key(ca, cb) < key(best_a, best_b)) {
      best_a = ca;
      best_b = cb;
    }
  };
  // |a' + m a| (or |b' + m b| when a = 0) is minimized at one of the
  // two integers around the real root; both are checked under the full
  // lexicographic key.
  const mpz_class& pivot = (a != 0) ? a : b;
  const mpz_class& offset = (a != 0) ? ap0 : bp0;
  mpz_class neg = -offset, lo, hi;
  mpz_fdiv_q(lo.get_mpz_t(), neg.get_mpz_t(), pivot.get_mpz_t());
  mpz_cdiv_q(hi.get_mpz_t(), neg.get_mpz_t(), pivot.get_mpz_t());
  consider(lo);
  if (hi != lo)
    consider(hi);
  return Mat(a, best_a, b, best_b);
}

Real rho(const Mat& n, long k, const PlanePoint& x, const PlanePoint& y) {
  if (n.v2 == 0)
    throw zero_row_error(
        "the shift selector needs s != 0 in the second row (s, s') of N");
  if (k < 0)
    throw parse_error("the shift selector needs k >= 0");
  ContinuedFraction cf(slope_of(x));
  Real eps_k = cf.epsilon(k);
  Real eps_prev = cf.epsilon_abs(k - 1);
  mpq_class tail(n.u2, n.v2);
  tail.canonicalize();
  return y.x2 / (x.x2 * Real(n.v2) * eps_prev) - eps_k / eps_prev - Real(tail);
}

mpz_class choose_ell_truncate(const Real& rho_value) {
  if (rho_value.sign() >= 0)
    return rho_value.floor();
  return -((-rho_value).floor());
}

mpz_class choose_ell_ceiling(const Real& rho_value) {
  return -((-rho_value).floor());
}

ApproxResult build_gamma(const Mat& n, const mpz_class& ell, long k,
                         const PlanePoint& x, const PlanePoint& y) {
  if (k < 1)
    throw parse_error("the three-factor product needs k >= 1");
  Real xi = slope_of(x);
  ContinuedFraction cf(xi);
  Mat mk = cf.convergent_matrix(k).matrix;
  Mat gamma = n * Mat::shear_pow(ell) * mk;
  auto lam = residual(gamma, x, y);

  ApproxResult r;
  r.gamma = gamma;
  r.lam1 = lam.first;
  r.lam2 = lam.second;
  r.norm = gamma.norm();
  r.n_used = n;
  r.ell = ell;
  r.k = k;

  const mpz_class qk = cf.q(k);
  const mpz_class qk_prev = cf.q(k - 1);
  const mpz_class qk_next = cf.q(k + 1);

  // Integer norm sandwich:
  //   |ell q_{k-1} + (-1)^{k-1} q_k| |s| - |s'| q_{k-1}
  //     <= |gamma| <= |ell| |N| q_{k-1} + 2 |N| q_k.
  mpz_class signed_term = ell * qk_prev + ((k % 2 == 1) ? qk : mpz_class(-qk));
  mpz_class lower = abs(signed_term) * abs(n.v2) - abs(n.u2) * qk_prev;
  mpz_class nn = n.norm();
  mpz_class upper = abs(ell) * nn * qk_prev + 2 * nn * qk;
  std::string sandwich = cmp_detail(lower, r.norm, upper);
  record_or_throw(r.certificates, "norm-floor", lower <= r.norm, sandwich);
  record_or_throw(r.certificates, "norm-ceiling", r.norm <= upper, sandwich);

  // Slope-form residual bound with delta = |s y - t|, delta' = |s' y - t'|
  // for y the slope of the target:
  //   |v1 xi + u1 - y (v2 xi + u2)| <= delta |ell| / q_k
  //                                    + delta / q_{k+1} + delta' / q_k.
  Real ys = slope_of(y);
  Real delta = (Real(n.v2) * ys - Real(n.v1)).abs();
  Real delta_p = (Real(n.u2) * ys - Real(n.u1)).abs();
  Real lhs = (Real(gamma.v1) * xi + Real(gamma.u1) -
              ys * (Real(gamma.v2) * xi + Real(gamma.u2)))
                 .abs();
  Real rhs = delta * Real(mpz_class(abs(ell))) / Real(qk) +
             delta / Real(qk_next) + delta_p / Real(qk);
  record_or_throw(r.certificates, "slope-residual-bound", le(lhs, rhs),
                  cmp_detail(lhs, "<=", rhs));
  r.bound_name = "slope-residual-bound";
  r.bound_value = rhs;
  return r;
}

ApproxResult approx_origin(const PlanePoint& x, long k) {
  if (k < 1)
    throw parse_error("the origin step needs k >= 1");
  ContinuedFraction cf(slope_of(x));
  Mat mk = cf.convergent_matrix(k).matrix;
  PlanePoint origin{Real(0), Real(0)};
  auto lam = residual(mk, x, origin);

  ApproxResult r;
  r.gamma = mk;
  r.lam1 = lam.first;
  r.lam2 = lam.second;
  r.norm = mk.norm();
  r.n_used = Mat::identity();
  r.ell = 0;
  r.k = k;

  Real product = r.residual_sup() * Real(r.norm);
  Real cap = x.sup_norm();
  record(r.certificates, "origin-contraction", le(product, cap),
         cmp_detail(product, "<=", cap));
  r.bound_name = "origin-distance-ceiling";
  r.bound_value = cap / Real(r.norm);
  return r;
}

ApproxResult approx_rational_slope(const PlanePoint& x, const PlanePoint& y,
                                   long k) {
  if (exact_zero(y.x2)) {
    if (exact_zero(y.x1))
      throw parse_error(
          "the zero target belongs to the origin driver, not the slope one");
    // Horizontal targets: rotate the plane, solve for the rotated pair,
    // rotate the solution back. The sup-norm residual is unchanged.
    Mat rot = Mat::gen_rotation();
    PlanePoint y_rot = apply(rot, y);
    ApproxResult inner = approx_rational_slope(x, y_rot, k);
    Mat back = rot.inverse() * inner.gamma;
    auto lam = residual(back, x, y);
    inner.gamma = back;
    inner.lam1 = lam.first;
    inner.lam2 = lam.second;
    inner.norm = back.norm();
    inner.n_used = rot.inverse() * inner.n_used;
    return inner;
  }

  Real ys = slope_of(y);
  auto slope_q = ys.as_rational();
  if (!slope_q)
    throw parse_error(
        "the target slope is not exactly rational; use the irrational-slope "
        "driver");
  mpq_class ab = canonical(*slope_q);
  mpz_class a = ab.get_num(), b = ab.get_den();

  Mat n = complete_primitive(a, b);
  Real shift = rho(n, k, x, y);
  mpz_class ell = choose_ell_truncate(shift);
  ApproxResult r = build_gamma(n, ell, k, x, y);

  ContinuedFraction cf(slope_of(x));
  const mpz_class qk = cf.q(k);
  const mpz_class qq = cf.q(k - 1) * qk;
  Real ax2 = x.x2.abs();
  Real ay2 = y.x2.abs();

  // Norm window (|y2| / 2|x2|) q_{k-1} q_k <= |gamma|
  //                                        <= (3 |y2| / |x2|) q_{k-1} q_k,
  // compared after clearing denominators. Failure means this k is still
  // too small for the window to take hold.
  bool window_lo = le(ay2 * Real(qq), Real(mpz_class(2 * r.norm)) * ax2);
  bool window_hi = le(Real(r.norm) * ax2, Real(mpz_class(3 * qq)) * ay2);
  std::ostringstream wd;
  wd.precision(12);
  wd << (ay2 * Real(qq) / (ax2 * Real(2))).to_double() << " <= " << r.norm
     << " <= " << (Real(mpz_class(3 * qq)) * ay2 / ax2).to_double();
  record(r.certificates, "norm-window-floor", window_lo, wd.str());
  record(r.certificates, "norm-window-ceiling", window_hi, wd.str());
  if (!window_lo || !window_hi)
    throw k_too_small_error("the norm window is not yet valid at k = " +
                            std::to_string(k) + " (" + wd.str() +
                            "); retry with a larger k");

  Real resid = r.residual_sup();
  mpq_class scale(mpz_class(2 * b), qk);
  scale.canonicalize();
  Real resid_cap = Real(scale) * ax2;
  record_or_throw(r.certificates, "residual-ceiling", le(resid, resid_cap),
                  cmp_detail(resid, "<=", resid_cap));

  // Squared-exponent certificate:
  //   residual^2 |gamma| <= 12 max(|a|,|b|)^2 |x| |y|.
  mpz_class aa(abs(a)), bb(abs(b));
  mpz_class big = std::max(aa, bb);
  Real square_lhs = resid.pow_uint(2) * Real(r.norm);
  Real square_rhs = Real(mpz_class(12 * big * big)) * x.sup_norm() * y.sup_norm();
  record_or_throw(r.certificates, "exponent-half-square", le(square_lhs, square_rhs),
                  cmp_detail(square_lhs, "<=", square_rhs));

  r.bound_name = "residual-ceiling";
  r.bound_value = resid_cap;
  return r;
}

ApproxResult approx_irrational_slope(const PlanePoint& x, const PlanePoint& y,
                                     long j, long k) {
  if (j < 1 || k < 1)
    throw parse_error("the slope driver needs j >= 1 and k >= 1");
  Real ys = slope_of(y);
  if (exact_zero(y.x2) || ys.is_rational())
    throw slope_rational_error(
        "the target slope is rational; use the rational-slope driver");
  ContinuedFraction cfy(ys);
  const mpz_class sj = cfy.q(j);
  const mpz_class sj_prev = cfy.q(j - 1);
  const mpz_class sj_next = cfy.q(j + 1);
  const mpz_class tj = cfy.p(j);
  const mpz_class tj_prev = cfy.p(j - 1);
  const long sig = (j % 2 == 1) ? 1 : -1;
  Mat n(tj, mpz_class(sig * tj_prev), sj, mpz_class(sig * sj_prev));

  Real shift = rho(n, k, x, y);
  mpz_class ell = choose_ell_truncate(shift);
  ApproxResult r = build_gamma(n, ell, k, x, y);
  r.j = j;

  ContinuedFraction cfx(slope_of(x));
  const mpz_class qk = cfx.q(k);
  const mpz_class qk_prev = cfx.q(k - 1);
  Real ax2 = x.x2.abs();
  Real ay2 = y.x2.abs();

  // Norm sandwich. The lower half is a theorem only while
  // s_j |x2| <= |y2| q_{k-1}; outside that regime it is recorded as
  // not applicable.
  bool regime = le(Real(sj) * ax2, ay2 * Real(qk_prev));
  if (regime) {
    Real floor_val = (ay2 * Real(mpz_class(qk_prev * qk)) / ax2 -
                      Real(mpz_class(sj * qk)))
                         .abs() -
                     Real(mpz_class(4 * sj * qk_prev));
    record_or_throw(r.certificates, "norm-window-floor",
                    le(floor_val, Real(r.norm)),
                    cmp_detail(floor_val, "<=", Real(r.norm)));
  } else {
    record(r.certificates, "norm-window-floor", true,
           "not applicable: s_j |x2| exceeds |y2| q_{k-1}");
  }
  Real ceil_val = Real(mpz_class(2 * qk_prev * qk)) * ay2 / ax2 +
                  Real(mpz_class(4 * sj * qk));
  record_or_throw(r.certificates, "norm-window-ceiling",
                  le(Real(r.norm), ceil_val),
                  cmp_detail(Real(r.norm), "<=", ceil_val));

  // Residual ceiling 2 |y2| / (s_j s_{j+1}) + 5 |x2| s_j / q_k.
  Real resid = r.residual_sup();
  mpq_class gap(mpz_class(2), mpz_class(sj * sj_next));
  gap.canonicalize();
  mpq_class carry(mpz_class(5 * sj), qk);
  carry.canonicalize();
  Real resid_cap = Real(gap) * ay2 + Real(carry) * ax2;
  record_or_throw(r.certificates, "residual-ceiling", le(resid, resid_cap),
                  cmp_detail(resid, "<=", resid_cap));

  // Convergent gaps: |s_j y - t_j| <= 1/s_{j+1} and
  // |s_{j-1} y - t_{j-1}| <= 1/s_j.
  Real gap_j = (Real(sj) * ys - Real(tj)).abs();
  Real gap_prev = (Real(sj_prev) * ys - Real(tj_prev)).abs();
  mpq_class inv_next(mpz_class(1), sj_next);
  mpq_class inv_sj(mpz_class(1), sj);
  bool gaps_ok = le(gap_j, Real(inv_next)) && le(gap_prev, Real(inv_sj));
  record_or_throw(r.certificates, "convergent-gaps", gaps_ok,
                  cmp_detail(gap_j, "<=", Real(inv_next)) + " and " +
                      cmp_detail(gap_prev, "<=", Real(inv_sj)));

  // Shear size: (|y2|/|x2|) q_k / s_j - 3 <= |ell| <= 2 (|y2|/|x2|) q_k / s_j + 2.
  Real base = ay2 * Real(qk) / (ax2 * Real(sj));
  Real abs_ell = Real(mpz_class(abs(ell)));
  bool shear_ok = le(base - Real(3), abs_ell) &&
                  le(abs_ell, base * Real(2) + Real(2));
  record_or_throw(r.certificates, "shear-size", shear_ok,
                  cmp_detail(base - Real(3), "<=", abs_ell) + " and " +
                      cmp_detail(abs_ell, "<=", base * Real(2) + Real(2)));

  // Second residual: |lam2| <= |x2| s_j / q_k.
  mpq_class second(sj, qk);
  second.canonicalize();
  Real second_cap = ax2 * Real(second);
  record_or_throw(r.certificates, "second-residual-ceiling",
                  le(r.lam2.abs(), second_cap),
                  cmp_detail(r.lam2.abs(), "<=", second_cap));

  r.bound_name = "residual-ceiling";
  r.bound_value = resid_cap;
  return r;
}

IndexPair select_indices_small_omega(const PlanePoint& x, const PlanePoint& y,
                                     long j0) {
  if (j0 < 1)
    throw parse_error("the index seed needs j0 >= 1");
  Real ys = slope_of(y);
  if (exact_zero(y.x2) || ys.is_rational())
    throw slope_rational_error(
        "index selection needs an irrational target slope");
  ContinuedFraction cfx(slope_of(x));
  ContinuedFraction cfy(ys);
  Real ax2 = x.x2.abs();
  Real ay2 = y.x2.abs();

  // k largest with |y2| q_{k-1} < |x2| s_{j0}^3. Such k exists because
  // q_{-1} = 0; if even k = 1 fails the cube is too small.
  mpz_class cube = cfy.q(j0);
  cube = cube * cube * cube;
  Real cap = ax2 * Real(cube);
  long k = 0;
  for (long i = 1;; ++i) {
    if (lt(ay2 * Real(cfx.q(i - 1)), cap))
      k = i;
    else
      break;
  }
  if (k < 1)
    throw k_too_small_error(
        "no index k satisfies the cube window for j0 = " + std::to_string(j0));

  // j maximal with |x2| s_j^3 <= |y2| q_k; j >= j0 by the choice of k.
  Real qcap = ay2 * Real(cfx.q(k));
  long j = 0;
  for (long i = 1;; ++i) {
    mpz_class c = cfy.q(i);
    c = c * c * c;
    if (le(ax2 * Real(c), qcap))
      j = i;
    else
      break;
  }
  if (j < 1)
    throw k_too_small_error(
        "no index j fits under q_k for j0 = " + std::to_string(j0));
  return IndexPair{j, k};
}

std::vector<IndexPair> select_indices_large_omega(const PlanePoint& x,
                                                  const PlanePoint& y,
                                                  const mpq_class& omega,
                                                  long k_max) {
  mpq_class om = canonical(omega);
  if (!(om > 2))
    throw parse_error("the fast-growth driver needs omega > 2");
  if (k_max < 3)
    throw parse_error("the scan range needs k_max >= 3");
  auto [oa, ob] = exponent_parts(om, "omega");
  Real ys = slope_of(y);
  if (exact_zero(y.x2) || ys.is_rational())
    throw slope_rational_error(
        "index selection needs an irrational target slope");
  ContinuedFraction cfx(slope_of(x));
  ContinuedFraction cfy(ys);
  Real ax2 = x.x2.abs();
  Real ay2 = y.x2.abs();

  std::vector<IndexPair> out;
  for (long k = 3; k <= k_max; ++k) {
    // Growth test q_{k-1}^omega <= q_k on integer powers.
    if (ipow(cfx.q(k - 1), oa) > ipow(cfx.q(k), ob))
      continue;
    Real qcap = ay2 * Real(cfx.q(k));
    long j = 0;
    for (long i = 1;; ++i) {
      mpz_class s = cfy.q(i);
      if (le(ax2 * Real(mpz_class(s * s)), qcap))
        j = i;
      else
        break;
    }
    if (j >= 1)
      out.push_back(IndexPair{j, k});
  }
  if (out.empty())
    throw stream_empty_error(
        "no k in 3.." + std::to_string(k_max) +
        " passes the digit-growth test; the slope of x grows too slowly for "
        "this driver");
  return out;
}

long select_indices_uniform(const PlanePoint& x, const PlanePoint& y, long k,
                            const mpq_class& tau) {
  if (k < 1)
    throw parse_error("index selection needs k >= 1");
  mpq_class t = canonical(tau);
  if (t < mpq_class(1, 3) || t > mpq_class(1, 2))
    throw parse_error("the index rate tau must lie in [1/3, 1/2]");
  auto [ta, tb] = exponent_parts(t, "tau");
  Real ys = slope_of(y);
  if (exact_zero(y.x2) || ys.is_rational())
    throw slope_rational_error(
        "index selection needs an irrational target slope");
  ContinuedFraction cfx(slope_of(x));
  ContinuedFraction cfy(ys);
  mpz_class qpow = ipow(cfx.q(k), ta);
  long j = 0;
  for (long i = 1;; ++i) {
    if (ipow(cfy.q(i), tb) <= qpow)
      j = i;
    else
      break;
  }
  return j;
}

mpq_class uniform_tau(const mpq_class& omega_y) {
  mpq_class w = canonical(omega_y);
  if (!(w > 0))
    throw parse_error("the growth exponent must be positive");
  mpq_class denom = 2 * w + 1;
  mpq_class t = w / denom;
  t.canonicalize();
  return t;
}

ApproxResult approx_signed(const PlanePoint& x, const PlanePoint& y, long k,
                           const mpq_class& mu, const mpq_class& eps,
                           bool require) {
  if (y.x1.sign() <= 0 || y.x2.sign() <= 0)
    throw wrong_quadrant_error(
        "the sign-constrained construction needs y1 > 0 and y2 > 0");
  if (k < 1)
    throw parse_error("the sign-constrained construction needs k >= 1");
  if (k % 2 == 0)
    throw even_k_error("first-column positivity needs odd k");
  mpq_class mu_c = canonical(mu);
  if (!(mu_c > 0) || !(mu_c < mpq_class(1, 3)))
    throw parse_error("the size exponent mu must lie in (0, 1/3)");
  mpq_class eps_c = canonical(eps);
  if (!(eps_c > 0) || !(eps_c < mpq_class(1, 3)))
    throw parse_error("the window exponent must lie in (0, 1/3)");
  Real ys = slope_of(y);
  if (ys.is_rational())
    throw slope_rational_error(
        "the sign-constrained construction needs an irrational target slope");

  ContinuedFraction cfx(slope_of(x));
  ContinuedFraction cfy(ys);
  const mpz_class qk = cfx.q(k);
  if (qk == 1)
    throw k_too_small_error(
        "q_k = 1 admits no cube-window index j; increase k");

  // j smallest with q_k <= s_j^3 (so s_{j-1}^3 < q_k).
  long j = 1;
  while (true) {
    mpz_class c = cfy.q(j);
    c = c * c * c;
    if (c >= qk)
      break;
    ++j;
  }
  const mpz_class sj = cfy.q(j);
  const mpz_class sj_prev = cfy.q(j - 1);
  const mpz_class sj_next = cfy.q(j + 1);
  const mpz_class tj = cfy.p(j);
  const mpz_class tj_prev = cfy.p(j - 1);

  // Nonnegative-entry completion: columns are consecutive convergent
  // vectors of the slope, ordered by parity so the determinant is 1.
  Mat n = (j % 2 == 0) ? Mat(tj_prev, tj, sj_prev, sj)
                       : Mat(tj, tj_prev, sj, sj_prev);

  Real shift = rho(n, k, x, y);
  mpz_class ell = choose_ell_ceiling(shift);
  ApproxResult r = build_gamma(n, ell, k, x, y);
  r.j = j;

  // Slope-gap sign window for delta = s y - t built from the second
  // row (s, s') and first row (t, t') of N:
  //   delta < 0,  1/(2 s_{j+1}) < -delta <= 1/s_j,  |s' y - t'| <= 1/s_j.
  Real delta = Real(n.v2) * ys - Real(n.v1);
  Real delta_p = Real(n.u2) * ys - Real(n.u1);
  Real neg_delta = -delta;
  mpq_class half_next(mpz_class(1), mpz_class(2 * sj_next));
  mpq_class inv_sj(mpz_class(1), sj);
  bool signs_ok = delta.sign() < 0 && lt(Real(half_next), neg_delta) &&
                  le(neg_delta, Real(inv_sj)) &&
                  le(delta_p.abs(), Real(inv_sj));
  record_or_throw(r.certificates, "slope-gap-signs", signs_ok,
                  cmp_detail(Real(half_next), "<", neg_delta) + " and " +
                      cmp_detail(neg_delta, "<=", Real(inv_sj)) + " and " +
                      cmp_detail(delta_p.abs(), "<=", Real(inv_sj)));

  // Second-residual chain: lam2 <= |x2| s |eps_{k-1}| <= |x2| s_j / q_k.
  Real eps_prev = cfx.epsilon_abs(k - 1);
  Real mid = x.x2.abs() * Real(n.v2) * eps_prev;
  mpq_class second(sj, qk);
  second.canonicalize();
  Real second_cap = x.x2.abs() * Real(second);
  bool chain_ok = le(r.lam2, mid) && le(mid, second_cap);
  record_or_throw(r.certificates, "second-residual-window", chain_ok,
                  cmp_detail(r.lam2, "<=", mid) + " and " +
                      cmp_detail(mid, "<=", second_cap));

  // The five blocking conditions, recorded; require = true turns any
  // failure into BoundNotYetReached (a larger odd k may succeed).
  bool v1_pos = r.gamma.v1 > 0;
  bool v2_pos = r.gamma.v2 > 0;
  bool lam1_pos = r.lam1.sign() > 0;
  bool lam2_pos = r.lam2.sign() > 0;
  record(r.certificates, "first-column-v1-positive", v1_pos,
         "v1 = " + r.gamma.v1.get_str());
  record(r.certificates, "first-column-v2-positive", v2_pos,
         "v2 = " + r.gamma.v2.get_str());
  record(r.certificates, "residual-1-positive", lam1_pos,
         cmp_detail(Real(0), "<", r.lam1));
  record(r.certificates, "residual-2-positive", lam2_pos,
         cmp_detail(Real(0), "<", r.lam2));

  auto [ma, mb] = exponent_parts(mu_c, "mu");
  Real size_lhs = r.residual_sup().pow_uint(mb) * Real(ipow(r.norm, ma));
  bool size_ok = le(size_lhs, Real(1));
  record(r.certificates, "size-bound", size_ok,
         cmp_detail(size_lhs, "<=", Real(1)) + " (max|lam|^" +
             std::to_string(mb) + " |gamma|^" + std::to_string(ma) + ")");

  // Index-window diagnostics for eps = a/b (never blocking):
  //   s_{j-1}^3 >= q_k^{1-3eps}, s_j^3 <= q_k^{1+3eps},
  //   s_{j+1}^3 <= q_k^{1+6eps}, compared on b-th powers.
  auto [ea, eb] = exponent_parts(eps_c, "eps");
  unsigned long cube_e = 3 * eb;
  unsigned long lo_e = eb - 3 * ea;
  unsigned long mid_e = eb + 3 * ea;
  unsigned long hi_e = eb + 6 * ea;
  bool win_floor = ipow(sj_prev, cube_e) >= ipow(qk, lo_e);
  bool win_ceiling = ipow(sj, cube_e) <= ipow(qk, mid_e);
  bool win_next = ipow(sj_next, cube_e) <= ipow(qk, hi_e);
  record(r.certificates, "index-window-floor", win_floor,
         "s_{j-1}^" + std::to_string(cube_e) + " >= q_k^" +
             std::to_string(lo_e));
  record(r.certificates, "index-window-ceiling", win_ceiling,
         "s_j^" + std::to_string(cube_e) + " <= q_k^" + std::to_string(mid_e));
  record(r.certificates, "index-window-next", win_next,
         "s_{j+1}^" + std::to_string(cube_e) + " <= q_k^" +
             std::to_string(hi_e));

  r.bound_name = "second-residual-ceiling";
  r.bound_value = second_cap;

  if (require) {
    std::vector<std::string> failed;
    if (!v1_pos)
      failed.push_back("first-column-v1-positive");
    if (!v2_pos)
      failed.push_back("first-column-v2-positive");
    if (!lam1_pos)
      failed.push_back("residual-1-positive");
    if (!lam2_pos)
      failed.push_back("residual-2-positive");
    if (!size_ok)
      failed.push_back("size-bound");
    if (!failed.empty()) {
      std::string joined;
      for (const auto& f : failed) {
        if (!joined.empty())
          joined += ", ";
        joined += f;
      }
      throw bound_not_yet_reached_error(
          "conditions not yet satisfied at k = " + std::to_string(k) + ": " +
          joined + "; retry with a larger odd k");
    }
  }
  return r;
}

Certificate cube_exponent_certificate(const ApproxResult& r,
                                      const PlanePoint& x,
                                      const PlanePoint& y) {
  Real lhs = r.residual_sup().pow_uint(3) * Real(r.norm);
  Real rhs = Real(Surd::sqrt_of(5, 1715)) * x.sup_norm() *
             y.sup_norm().pow_uint(2);
  return Certificate{"exponent-third-cube", le(lhs, rhs),
                     cmp_detail(lhs, "<=", rhs)};
}

Certificate growth_residual_certificate(const ApproxResult& r,
                                        const PlanePoint& x,
                                        const PlanePoint& y) {
  ContinuedFraction cf(slope_of(x));
  Real lhs = r.residual_sup().pow_uint(2) * Real(cf.q(r.k));
  Real rhs = Real(49) * x.x2.abs() * y.x2.abs();
  return Certificate{"exponent-growth-square", le(lhs, rhs),
                     cmp_detail(lhs, "<=", rhs)};
}

} // namespace sl2orbit
