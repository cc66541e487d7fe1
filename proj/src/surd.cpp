#include "sl2orbit/surd.hpp"

#include "sl2orbit/errors.hpp"

#include <sstream>
#include <utility>
#include <vector>

namespace sl2orbit {

namespace {

constexpr unsigned long kTrialLimit = 1000000UL;

// Split d = square * core with core square-free (core's prime support is
// found by trial division; any cofactor surviving division by every prime
// below kTrialLimit is either a perfect square, a prime, or too large to
// classify, in which case we refuse rather than silently mis-canonicalize).
void split_square(const mpz_class& d, mpz_class& sq_root, mpz_class& core) {
  sq_root = 1;
  core = 1;
  mpz_class rest = d;
  for (unsigned long p = 2; p <= kTrialLimit && rest > 1; p += (p == 2 ? 1 : 2)) {
    if (!mpz_divisible_ui_p(rest.get_mpz_t(), p)) continue;
    unsigned e = 0;
    while (mpz_divisible_ui_p(rest.get_mpz_t(), p)) {
      mpz_divexact_ui(rest.get_mpz_t(), rest.get_mpz_t(), p);
      ++e;
    }
    for (unsigned i = 0; i + 1 < e; i += 2) sq_root *= p;
    if (e % 2 == 1) core *= p;
    // Once rest < p*p the remainder is 1 or prime; stop trial division.
    mpz_class pp;
    mpz_ui_pow_ui(pp.get_mpz_t(), p, 2);
    if (rest < pp) break;
  }
  if (rest > 1) {
    if (mpz_perfect_square_p(rest.get_mpz_t())) {
      mpz_class r;
      mpz_sqrt(r.get_mpz_t(), rest.get_mpz_t());
      sq_root *= r;
    } else {
      mpz_class limit_sq;
      mpz_ui_pow_ui(limit_sq.get_mpz_t(), kTrialLimit, 2);
      if (rest >= limit_sq && mpz_probab_prime_p(rest.get_mpz_t(), 40) == 0) {
        throw parse_error("sqrt radicand too large to canonicalize: " +
                          d.get_str());
      }
      core *= rest; // prime (or strong-probable-prime) cofactor
    }
  }
}

// Smallest factor > 1 of a square-free radicand built by split_square:
// every prime factor is below kTrialLimit except possibly one large one.
mpz_class some_prime_factor(const mpz_class& r) {
  for (unsigned long p = 2; p <= kTrialLimit; p += (p == 2 ? 1 : 2)) {
    if (mpz_divisible_ui_p(r.get_mpz_t(), p)) return mpz_class(p);
    mpz_class pp;
    mpz_ui_pow_ui(pp.get_mpz_t(), p, 2);
    if (r < pp) break;
  }
  return r;
}

// [lo, hi] with lo <= sqrt(r) <= hi and hi - lo = 2^-prec.
void sqrt_interval(const mpz_class& r, long prec, mpq_class& lo, mpq_class& hi) {
  mpz_class scaled = r;
  mpz_mul_2exp(scaled.get_mpz_t(), scaled.get_mpz_t(), 2 * prec);
  mpz_class root;
  mpz_sqrt(root.get_mpz_t(), scaled.get_mpz_t());
  mpz_class denom;
  mpz_ui_pow_ui(denom.get_mpz_t(), 2, prec);
  lo = mpq_class(root, denom);
  lo.canonicalize();
  hi = mpq_class(root + 1, denom);
  hi.canonicalize();
}

} // namespace

Surd::Surd(const mpq_class& v) {
  if (v != 0) terms_[mpz_class(1)] = v;
}

void Surd::add_term(const mpz_class& r, const mpq_class& c) {
  if (c == 0) return;
  auto it = terms_.find(r);
  if (it == terms_.end()) {
    terms_.emplace(r, c);
  } else {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Surd Surd::sqrt_of(const mpz_class& d, const mpq_class& c) {
  if (d < 0) throw parse_error("sqrt of negative integer: " + d.get_str());
  Surd out;
  if (d == 0 || c == 0) return out;
  mpz_class sq_root, core;
  split_square(d, sq_root, core);
  out.add_term(core, c * sq_root);
  return out;
}

Surd Surd::ratio(const mpz_class& num, const mpz_class& den) {
  if (den == 0) throw division_by_zero_error("rational with zero denominator");
  mpq_class q(num, den);
  q.canonicalize();
  return Surd(q);
}

bool Surd::is_rational() const {
  if (terms_.empty()) return true;
  return terms_.size() == 1 && terms_.begin()->first == 1;
}

std::optional<mpq_class> Surd::as_rational() const {
  if (terms_.empty()) return mpq_class(0);
  if (terms_.size() == 1 && terms_.begin()->first == 1)
    return terms_.begin()->second;
  return std::nullopt;
}

Surd Surd::operator-() const {
  Surd out;
  for (const auto& [r, c] : terms_) out.terms_.emplace(r, -c);
  return out;
}

Surd Surd::operator+(const Surd& o) const {
  Surd out = *this;
  for (const auto& [r, c] : o.terms_) out.add_term(r, c);
  return out;
}

Surd Surd::operator-(const Surd& o) const {
  Surd out = *this;
  for (const auto& [r, c] : o.terms_) out.add_term(r, -c);
  return out;
}

Surd Surd::operator*(const Surd& o) const {
  Surd out;
  for (const auto& [r1, c1] : terms_) {
    for (const auto& [r2, c2] : o.terms_) {
      // sqrt(r1)*sqrt(r2) = g*sqrt((r1/g)*(r2/g)) with g = gcd(r1, r2);
      // both quotients are coprime and square-free, so the product is too.
      mpz_class g;
      mpz_gcd(g.get_mpz_t(), r1.get_mpz_t(), r2.get_mpz_t());
      mpz_class rad = (r1 / g) * (r2 / g);
      out.add_term(rad, c1 * c2 * g);
    }
  }
  return out;
}

Surd Surd::inverse() const {
  if (terms_.empty()) throw division_by_zero_error("inverse of zero");
  // Multiply numerator and denominator by conjugates that flip the sign of
  // every term whose radicand is divisible by a chosen prime; each round
  // removes that prime from the denominator's radicands.
  Surd num(mpq_class(1));
  Surd den = *this;
  while (!den.is_rational()) {
    mpz_class target = 1;
    for (const auto& [r, c] : den.terms_) {
      (void)c;
      if (r > 1) {
        target = some_prime_factor(r);
        break;
      }
    }
    Surd conj;
    for (const auto& [r, c] : den.terms_) {
      conj.add_term(r, mpz_divisible_p(r.get_mpz_t(), target.get_mpz_t())
                           ? -c
                           : c);
    }
    num = num * conj;
    den = den * conj;
  }
  mpq_class dv = *den.as_rational();
  if (dv == 0) throw division_by_zero_error("inverse of zero");
  Surd out;
  for (const auto& [r, c] : num.terms_) out.add_term(r, c / dv);
  return out;
}

int Surd::sign() const {
  if (terms_.empty()) return 0;
  bool any_pos = false, any_neg = false;
  for (const auto& [r, c] : terms_) {
    (void)r;
    if (c > 0) any_pos = true;
    else any_neg = true;
  }
  if (!any_neg) return 1;
  if (!any_pos) return -1;
  // Mixed signs: refine a rational enclosure until it excludes zero.
  // A nonempty canonical form is never zero (square roots of distinct
  // square-free integers are linearly independent over Q), so this stops.
  for (long bits = 32;; bits *= 2) {
    mpq_class lo, hi;
    enclose(bits, lo, hi);
    if (lo > 0) return 1;
    if (hi < 0) return -1;
  }
}

mpz_class Surd::floor() const {
  if (auto q = as_rational()) {
    mpz_class out;
    mpz_fdiv_q(out.get_mpz_t(), q->get_num().get_mpz_t(),
               q->get_den().get_mpz_t());
    return out;
  }
  // Irrational values are never integers, so the enclosure eventually
  // lands strictly between consecutive integers.
  for (long bits = 32;; bits *= 2) {
    mpq_class lo, hi;
    enclose(bits, lo, hi);
    mpz_class flo, fhi;
    mpz_fdiv_q(flo.get_mpz_t(), lo.get_num().get_mpz_t(),
               lo.get_den().get_mpz_t());
    mpz_fdiv_q(fhi.get_mpz_t(), hi.get_num().get_mpz_t(),
               hi.get_den().get_mpz_t());
    if (flo == fhi) return flo;
  }
}

Surd Surd::pow_uint(unsigned long e) const {
  Surd acc(mpq_class(1));
  Surd base = *this;
  while (e > 0) {
    if (e & 1UL) acc = acc * base;
    base = base * base;
    e >>= 1UL;
  }
  return acc;
}

void Surd::enclose(long bits, mpq_class& lo, mpq_class& hi) const {
  // Each radical term contributes width |c|/2^prec, so prec = bits +
  // ceil(log2(sum |c|)) + 2 suffices in one pass. Using a precision that
  // grows monotonically with `bits` keeps successive enclosures nested
  // (dyadic floors refine monotonically).
  mpq_class coeff_sum(0);
  for (const auto& [r, c] : terms_) {
    if (r != 1) coeff_sum += c > 0 ? c : mpq_class(-c);
  }
  long slack = 2;
  if (coeff_sum > 0) {
    long nb = mpz_sizeinbase(coeff_sum.get_num().get_mpz_t(), 2);
    long db = mpz_sizeinbase(coeff_sum.get_den().get_mpz_t(), 2);
    slack += nb > db ? nb - db + 1 : 0;
  }
  long prec = bits + slack;
  mpq_class acc_lo(0), acc_hi(0);
  for (const auto& [r, c] : terms_) {
    if (r == 1) {
      acc_lo += c;
      acc_hi += c;
      continue;
    }
    mpq_class slo, shi;
    sqrt_interval(r, prec, slo, shi);
    if (c >= 0) {
      acc_lo += c * slo;
      acc_hi += c * shi;
    } else {
      acc_lo += c * shi;
      acc_hi += c * slo;
    }
  }
  lo = acc_lo;
  hi = acc_hi;
}

double Surd::to_double() const {
  if (terms_.empty()) return 0.0;
  mpq_class lo, hi;
  enclose(64, lo, hi);
  mpq_class mid = (lo + hi) / 2;
  return mid.get_d();
}

std::string Surd::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [r, c] : terms_) {
    mpq_class a = c > 0 ? c : mpq_class(-c);
    if (first) {
      if (c < 0) os << "-";
      first = false;
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    if (r == 1) {
      os << a.get_str();
    } else {
      if (a != 1) os << a.get_str() << "*";
      os << "sqrt(" << r.get_str() << ")";
    }
  }
  return os.str();
}

} // namespace sl2orbit
