#include "sl2orbit/contfrac.hpp"

#include "sl2orbit/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace sl2orbit {

ContinuedFraction::ContinuedFraction(Real x)
    : x_(std::move(x)), echo_(x_.has_cf_digits()) {
  // p_{-2}/q_{-2} = 0/1 and p_{-1}/q_{-1} = 1/0 seed the recurrence
  // p_k = a_k p_{k-1} + p_{k-2} uniformly from k = 0.
  ptab_ = {mpz_class(0), mpz_class(1)};
  qtab_ = {mpz_class(1), mpz_class(0)};
}

void ContinuedFraction::extend(long k) {
  while (static_cast<long>(a_.size()) <= k) {
    const long idx = static_cast<long>(a_.size());
    mpz_class a;
    if (echo_) {
      auto digits = x_.cf_digits(static_cast<std::size_t>(idx) + 1);
      if (static_cast<long>(digits.size()) <= idx) {
        std::ostringstream os;
        os << "expansion terminates after " << digits.size()
           << " digit(s); a_" << idx << " does not exist";
        throw rational_input_error(os.str());
      }
      a = digits[static_cast<std::size_t>(idx)];
    } else {
      if (x_.is_rational()) {
        throw rational_input_error(
            "value is rational; its expansion terminates and has no "
            "infinite digit stream");
      }
      if (idx == 0) tail_ = x_;
      a = tail_->floor();
      tail_ = tail_->reciprocal_shift(a);
    }
    if (idx >= 1 && a < 1) {
      std::ostringstream os;
      os << "digit a_" << idx << " = " << a << " violates a_k >= 1";
      throw parse_error(os.str());
    }
    a_.push_back(a);
    ptab_.push_back(a * ptab_[ptab_.size() - 1] + ptab_[ptab_.size() - 2]);
    qtab_.push_back(a * qtab_[qtab_.size() - 1] + qtab_[qtab_.size() - 2]);
  }
}

mpz_class ContinuedFraction::digit(long k) {
  if (k < 0) throw parse_error("digit index must be >= 0");
  extend(k);
  return a_[static_cast<std::size_t>(k)];
}

const mpz_class& ContinuedFraction::p(long k) {
  if (k < -2) throw parse_error("convergent index must be >= -2");
  if (k >= 0) extend(k);
  return ptab_[static_cast<std::size_t>(k + 2)];
}

const mpz_class& ContinuedFraction::q(long k) {
  if (k < -2) throw parse_error("convergent index must be >= -2");
  if (k >= 0) extend(k);
  return qtab_[static_cast<std::size_t>(k + 2)];
}

Real ContinuedFraction::epsilon(long k) {
  if (k < -1) throw parse_error("residual index must be >= -1");
  return Real(q(k)) * x_ - Real(p(k));
}

Real ContinuedFraction::epsilon_abs(long k) { return epsilon(k).abs(); }

std::vector<mpz_class> ContinuedFraction::partial_quotients(long n) {
  if (n < 0) throw parse_error("digit count bound must be >= 0");
  extend(n);
  return std::vector<mpz_class>(a_.begin(), a_.begin() + (n + 1));
}

std::vector<Convergent> ContinuedFraction::convergents(long n) {
  if (n < 0) throw parse_error("convergent count bound must be >= 0");
  extend(n);
  std::vector<Convergent> out;
  out.reserve(static_cast<std::size_t>(n) + 1);
  for (long k = 0; k <= n; ++k) out.push_back({k, p(k), q(k), epsilon(k)});
  return out;
}

ConvergentMatrix ContinuedFraction::convergent_matrix(long k) {
  if (k < 1) throw parse_error("convergent matrix needs k >= 1");
  extend(k);
  const mpz_class &pk = p(k), &qk = q(k), &pk1 = p(k - 1), &qk1 = q(k - 1);
  Mat m = (k % 2 == 0) ? Mat(qk, -pk, -qk1, pk1) : Mat(qk, -pk, qk1, -pk1);
  return {k, m};
}

OmegaWindow ContinuedFraction::omega_window(long k_lo, long k_hi,
                                            std::optional<mpq_class> asserted) {
  if (k_lo < 0 || k_hi < k_lo)
    throw parse_error("window needs 0 <= k_lo <= k_hi");
  extend(k_hi + 1);
  OmegaWindow w;
  w.k_lo = k_lo;
  w.k_hi = k_hi;
  w.asserted = std::move(asserted);
  bool first = true;
  for (long k = k_lo; k <= k_hi; ++k) {
    if (q(k) < 2) continue; // log q_k = 0, ratio undefined
    const double r = std::log(q(k + 1).get_d()) / std::log(q(k).get_d());
    w.ratios.emplace_back(k, r);
    if (first || r > w.max_ratio) w.max_ratio = r;
    if (first || r < w.min_ratio) w.min_ratio = r;
    first = false;
  }
  return w;
}

std::string ContinuedFraction::csv(long n) {
  if (n < 0) throw parse_error("row count bound must be >= 0");
  extend(n + 1);
  std::ostringstream os;
  os << "k,p,q,sign_eps,eps_lo_num,eps_lo_den,eps_hi_num,eps_hi_den\n";
  for (long k = 0; k <= n; ++k) {
    const char sgn = (k % 2 == 0) ? '+' : '-';
    os << k << ',' << p(k) << ',' << q(k) << ',' << sgn << ",1,"
       << mpz_class(2 * q(k + 1)) << ",1," << q(k + 1) << '\n';
  }
  return os.str();
}

} // namespace sl2orbit
