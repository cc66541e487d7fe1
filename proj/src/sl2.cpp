#include "sl2orbit/sl2.hpp"

#include "sl2orbit/errors.hpp"

#include <regex>
#include <sstream>

namespace sl2orbit {

namespace {

mpz_class abs_z(const mpz_class& v) { return v < 0 ? mpz_class(-v) : v; }

mpz_class max_z(const mpz_class& a, const mpz_class& b) { return a > b ? a : b; }

mpz_class pow_z(const mpz_class& base, unsigned long e) {
  mpz_class out;
  mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), e);
  return out;
}

} // namespace

Mat::Mat(const mpz_class& a, const mpz_class& b, const mpz_class& c,
         const mpz_class& d)
    : v1(a), u1(b), v2(c), u2(d) {
  if (det() != 1) {
    throw parse_error("matrix determinant must be 1: " + str());
  }
}

Mat Mat::gen_rotation() { return Mat(0, -1, 1, 0); }

Mat Mat::gen_shear() { return Mat(1, 1, 0, 1); }

Mat Mat::shear_pow(const mpz_class& l) { return Mat(1, l, 0, 1); }

mpz_class Mat::norm() const {
  return max_z(max_z(abs_z(v1), abs_z(u1)), max_z(abs_z(v2), abs_z(u2)));
}

Mat Mat::operator*(const Mat& o) const {
  return Mat(v1 * o.v1 + u1 * o.v2, v1 * o.u1 + u1 * o.u2,
             v2 * o.v1 + u2 * o.v2, v2 * o.u1 + u2 * o.u2);
}

std::string Mat::str() const {
  std::ostringstream os;
  os << "[[" << v1.get_str() << "," << u1.get_str() << "],[" << v2.get_str()
     << "," << u2.get_str() << "]]";
  return os.str();
}

Mat Mat::parse(const std::string& text) {
  std::string s;
  for (char ch : text) {
    if (ch != ' ') s.push_back(ch);
  }
  static const std::regex re(
      R"(^\[\[(-?[0-9]+),(-?[0-9]+)\],\[(-?[0-9]+),(-?[0-9]+)\]\]$)");
  std::smatch m;
  if (!std::regex_match(s, m, re)) {
    throw parse_error("matrix text must look like [[v1,u1],[v2,u2]]: " + text);
  }
  return Mat(mpz_class(m[1].str()), mpz_class(m[2].str()),
             mpz_class(m[3].str()), mpz_class(m[4].str()));
}

Real PlanePoint::sup_norm() const {
  Real a = x1.abs(), b = x2.abs();
  return a.compare(b) >= 0 ? a : b;
}

PlanePoint apply(const Mat& g, const PlanePoint& p) {
  return PlanePoint{Real(g.v1) * p.x1 + Real(g.u1) * p.x2,
                    Real(g.v2) * p.x1 + Real(g.u2) * p.x2};
}

std::pair<Real, Real> residual(const Mat& g, const PlanePoint& x,
                               const PlanePoint& y) {
  PlanePoint gx = apply(g, x);
  return {gx.x1 - y.x1, gx.x2 - y.x2};
}

namespace {

// t range for |c + t*d| <= T with d != 0, as [lo, hi] (possibly empty).
void family_range(const mpz_class& c, const mpz_class& d, const mpz_class& T,
                  mpz_class& lo, mpz_class& hi) {
  mpz_class a = -T - c, b = T - c; // want a <= t*d <= b
  if (d > 0) {
    mpz_cdiv_q(lo.get_mpz_t(), a.get_mpz_t(), d.get_mpz_t());
    mpz_fdiv_q(hi.get_mpz_t(), b.get_mpz_t(), d.get_mpz_t());
  } else {
    mpz_cdiv_q(lo.get_mpz_t(), b.get_mpz_t(), d.get_mpz_t());
    mpz_fdiv_q(hi.get_mpz_t(), a.get_mpz_t(), d.get_mpz_t());
  }
}

// Walk coprime second rows (v2, u2) in lexicographic order and hand the
// clamped t-interval of the lifted family to `family`.
void scan_families(
    const mpz_class& T,
    const std::function<void(const mpz_class& v2, const mpz_class& u2,
                             const mpz_class& v1o, const mpz_class& u1o,
                             const mpz_class& tlo, const mpz_class& thi)>&
        family) {
  if (T < 1) throw parse_error("norm bound must be >= 1");
  mpz_class g, a, b;
  for (mpz_class v2 = -T; v2 <= T; ++v2) {
    for (mpz_class u2 = -T; u2 <= T; ++u2) {
      mpz_gcd(g.get_mpz_t(), v2.get_mpz_t(), u2.get_mpz_t());
      if (g != 1) continue;
      // one solution of v1*u2 - u1*v2 = 1 via extended gcd
      mpz_gcdext(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t(), u2.get_mpz_t(),
                 v2.get_mpz_t());
      mpz_class v1o = a, u1o = -b;
      mpz_class tlo, thi;
      if (v2 == 0) {
        // v1 fixed at +-1; u1 = u1o + t*u2 sweeps every integer
        family_range(u1o, u2, T, tlo, thi);
      } else if (u2 == 0) {
        // u1 fixed at +-1; v1 = v1o + t*v2 sweeps every integer
        family_range(v1o, v2, T, tlo, thi);
      } else {
        mpz_class lo1, hi1, lo2, hi2;
        family_range(v1o, v2, T, lo1, hi1);
        family_range(u1o, u2, T, lo2, hi2);
        tlo = max_z(lo1, lo2);
        thi = hi1 < hi2 ? hi1 : hi2;
      }
      if (tlo <= thi) family(v2, u2, v1o, u1o, tlo, thi);
    }
  }
}

} // namespace

void enumerate_norm_bounded(const mpz_class& T,
                            const std::function<void(const Mat&)>& emit) {
  scan_families(T, [&](const mpz_class& v2, const mpz_class& u2,
                       const mpz_class& v1o, const mpz_class& u1o,
                       const mpz_class& tlo, const mpz_class& thi) {
    // emit with v1 ascending (u1 ascending for the v2 == 0 families)
    bool ascending = v2 > 0 || (v2 == 0 && u2 > 0);
    if (ascending) {
      for (mpz_class t = tlo; t <= thi; ++t) {
        emit(Mat(v1o + t * v2, u1o + t * u2, v2, u2));
      }
    } else {
      for (mpz_class t = thi; t >= tlo; --t) {
        emit(Mat(v1o + t * v2, u1o + t * u2, v2, u2));
      }
    }
  });
}

std::vector<Mat> collect_norm_bounded(const mpz_class& T) {
  std::vector<Mat> out;
  enumerate_norm_bounded(T, [&](const Mat& m) { out.push_back(m); });
  return out;
}

mpz_class count_norm_bounded(const mpz_class& T) {
  mpz_class n = 0;
  scan_families(T, [&](const mpz_class&, const mpz_class&, const mpz_class&,
                       const mpz_class&, const mpz_class& tlo,
                       const mpz_class& thi) { n += thi - tlo + 1; });
  return n;
}

std::string enumeration_csv(const mpz_class& T) {
  std::ostringstream os;
  os << "v1,u1,v2,u2,norm\n";
  enumerate_norm_bounded(T, [&](const Mat& m) {
    os << m.v1.get_str() << "," << m.u1.get_str() << "," << m.v2.get_str()
       << "," << m.u2.get_str() << "," << m.norm().get_str() << "\n";
  });
  return os.str();
}

Factorization factorize(const Mat& gamma, const Mat& N, const Mat& M) {
  Factorization f;
  f.N = N;
  f.M = M;
  f.G = N.inverse() * gamma * M.inverse();
  if (N * f.G * M != gamma) {
    throw bound_violated_error("factor round-trip failed for " + gamma.str());
  }
  f.B1 = 0;
  f.B2 = 0;
  return f;
}

Factorization factorize_certified(const Mat& gamma, const Mat& N,
                                  const Mat& M,
                                  const DecompositionScale& scale) {
  Factorization f = factorize(gamma, N, M);
  mpq_class mu = scale.mu;
  mu.canonicalize();
  if (mu < 0 || mu > 1) throw parse_error("exponent mu must lie in [0, 1]");
  mpz_class a = mu.get_num();
  unsigned long b = mpz_get_ui(mu.get_den().get_mpz_t());
  unsigned long au = mpz_get_ui(a.get_mpz_t());

  auto& certs = f.certificates;
  auto push = [&certs](const std::string& name, bool pass,
                       const std::string& detail) {
    certs.push_back({name, pass, detail});
  };

  const mpz_class& T = scale.T;
  mpz_class Ta = pow_z(T, au);        // T^a
  mpz_class Tba = pow_z(T, b - au);   // T^(b-a)

  bool window_ok = scale.q_km1 * scale.q_k <= T && T <= scale.q_k * scale.q_kp1;
  push("scale-window", window_ok,
       scale.q_km1.get_str() + "*" + scale.q_k.get_str() +
           " <= T <= " + scale.q_k.get_str() + "*" + scale.q_kp1.get_str());

  bool norm_ok = gamma.norm() <= 2 * T;
  push("gamma-norm", norm_ok, "|gamma| = " + gamma.norm().get_str() +
                                  " <= 2T = " + mpz_class(2 * T).get_str());

  auto [r1, r2] = residual(gamma, scale.x, scale.y);
  Real resid = r1.abs().compare(r2.abs()) >= 0 ? r1.abs() : r2.abs();
  bool resid_ok = (resid.pow_uint(b) * Real(Ta) - Real(1)).sign() <= 0;
  push("residual-size", resid_ok,
       "resid^" + std::to_string(b) + " * T^" + std::to_string(au) + " <= 1");

  bool sj_ok = pow_z(scale.s_j, 2 * b) >= Ta;
  push("denominator-floor", sj_ok,
       "s_j^" + std::to_string(2 * b) + " >= T^" + std::to_string(au));

  // c = 10 max(|y|, 1/|y|) with y the slope of the target
  Real slope = scale.y.x1 / scale.y.x2;
  Real aslope = slope.abs();
  Real c = Real(10) * (aslope.compare(mpq_class(1)) >= 0 ? aslope
                                                         : aslope.inverse());
  Real cb = c.pow_uint(b);

  mpz_class col1 = max_z(abs_z(f.G.v1), abs_z(f.G.v2));
  mpz_class col2 = max_z(abs_z(f.G.u1), abs_z(f.G.u2));
  mpz_class sjb = pow_z(scale.s_j, b);

  // (col1 * q_k)^b <= c^b s_j^b T^(b-a)
  mpz_class lhs1 = pow_z(col1 * scale.q_k, b);
  bool col1_ok = (Real(lhs1) - cb * Real(mpz_class(sjb * Tba))).sign() <= 0;
  push("first-column", col1_ok,
       "(" + col1.get_str() + "*q_k)^" + std::to_string(b) +
           " <= c^b s_j^b T^(b-a)");

  // col2^b T^a <= c^b (s_j q_k)^b
  mpz_class lhs2 = pow_z(col2, b) * Ta;
  bool col2_ok =
      (Real(lhs2) - cb * Real(pow_z(scale.s_j * scale.q_k, b))).sign() <= 0;
  push("second-column", col2_ok, col2.get_str() + "^" + std::to_string(b) +
                                     " * T^a <= c^b (s_j q_k)^b");

  // Display bounds: rational upper approximations of the exact bounds
  // c s_j T^(1-mu) / q_k and c s_j q_k T^-mu (certification above is
  // powered-exact; these are for reporting only).
  mpq_class c_hi = c.enclose(64).hi;
  mpz_class root_up;
  mpz_root(root_up.get_mpz_t(), Tba.get_mpz_t(), b);
  if (pow_z(root_up, b) < Tba) ++root_up;
  f.B1 = c_hi * mpq_class(scale.s_j * root_up) / mpq_class(scale.q_k);
  mpz_class root_dn;
  mpz_root(root_dn.get_mpz_t(), Ta.get_mpz_t(), b);
  f.B2 = c_hi * mpq_class(scale.s_j * scale.q_k) / mpq_class(root_dn);
  f.B1.canonicalize();
  f.B2.canonicalize();

  std::string failed;
  for (const auto& cert : certs) {
    if (!cert.pass) failed += (failed.empty() ? "" : ", ") + cert.name;
  }
  if (!failed.empty()) {
    throw bound_violated_error("certified factorization failed: " + failed);
  }
  return f;
}

} // namespace sl2orbit
