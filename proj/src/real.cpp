#include "sl2orbit/real.hpp"

#include "sl2orbit/errors.hpp"

#include <atomic>
#include <mutex>
#include <regex>
#include <sstream>

namespace sl2orbit {

namespace {

std::atomic<long> g_precision_cap{4096};

mpq_class pow2_inv(long bits) {
  mpz_class d;
  mpz_ui_pow_ui(d.get_mpz_t(), 2, bits);
  mpq_class q(1, d);
  q.canonicalize();
  return q;
}

mpz_class floor_div(const mpq_class& q) {
  mpz_class out;
  mpz_fdiv_q(out.get_mpz_t(), q.get_num().get_mpz_t(),
             q.get_den().get_mpz_t());
  return out;
}

} // namespace

struct RealNode {
  // Exact leaf (also set for folded continued fractions).
  std::optional<Surd> exact;
  // Continued-fraction input data, kept verbatim for echoing.
  bool has_cf = false;
  std::vector<mpz_class> cf_prefix; // digits as given, cf_prefix[0] = a0
  std::vector<mpz_class> cf_cycle;  // periodic tail (may be empty)
  std::function<mpz_class(long)> cf_rule; // digit k for k >= 1, if set
  // Cache for rule-backed digit streams and their convergents.
  mutable std::mutex mu;
  mutable std::vector<mpz_class> dig, ptab, qtab;
  // Fixed-enclosure leaf.
  std::optional<Interval> ball;
  // Derived node: op in {+,-,*} (binary), {n,q,a} (negate/inverse/abs).
  char op = 0;
  std::shared_ptr<const RealNode> lhs, rhs;
};

namespace {

void extend_rule_digits(const RealNode& n, std::size_t count) {
  // caller holds n.mu
  while (n.dig.size() < count) {
    long k = static_cast<long>(n.dig.size());
    mpz_class a = n.cf_rule(k);
    if (a < 1) throw parse_error("digit rule must return positive integers");
    n.dig.push_back(a);
  }
}

void extend_rule_convergents(const RealNode& n, std::size_t count) {
  // caller holds n.mu; keeps ptab/qtab aligned with dig
  extend_rule_digits(n, count);
  while (n.ptab.size() < count) {
    std::size_t k = n.ptab.size();
    if (k == 0) {
      n.ptab.push_back(n.dig[0]);
      n.qtab.push_back(1);
    } else if (k == 1) {
      n.ptab.push_back(n.dig[1] * n.dig[0] + 1);
      n.qtab.push_back(n.dig[1]);
    } else {
      n.ptab.push_back(n.dig[k] * n.ptab[k - 1] + n.ptab[k - 2]);
      n.qtab.push_back(n.dig[k] * n.qtab[k - 1] + n.qtab[k - 2]);
    }
  }
}

std::optional<Interval> eval_node(const RealNode& n, long bits);

std::optional<Interval> eval_rule_cf(const RealNode& n, long bits) {
  std::lock_guard<std::mutex> lock(n.mu);
  mpz_class target;
  mpz_ui_pow_ui(target.get_mpz_t(), 2, bits);
  extend_rule_convergents(n, 2);
  while (n.qtab[n.qtab.size() - 2] * n.qtab.back() < target) {
    extend_rule_convergents(n, n.qtab.size() + 1);
  }
  std::size_t k = n.qtab.size() - 1;
  mpq_class a(n.ptab[k - 1], n.qtab[k - 1]);
  mpq_class b(n.ptab[k], n.qtab[k]);
  a.canonicalize();
  b.canonicalize();
  return a <= b ? Interval{a, b} : Interval{b, a};
}

std::optional<Interval> combine(char op, const Interval& x,
                                const std::optional<Interval>& y) {
  switch (op) {
    case '+':
      return Interval{x.lo + y->lo, x.hi + y->hi};
    case '-':
      return Interval{x.lo - y->hi, x.hi - y->lo};
    case '*': {
      mpq_class c[4] = {x.lo * y->lo, x.lo * y->hi, x.hi * y->lo,
                        x.hi * y->hi};
      mpq_class lo = c[0], hi = c[0];
      for (int i = 1; i < 4; ++i) {
        if (c[i] < lo) lo = c[i];
        if (c[i] > hi) hi = c[i];
      }
      return Interval{lo, hi};
    }
    case 'n':
      return Interval{-x.hi, -x.lo};
    case 'q':
      if (x.lo > 0 || x.hi < 0) return Interval{1 / x.hi, 1 / x.lo};
      return std::nullopt;
    case 'a':
      if (x.lo >= 0) return x;
      if (x.hi <= 0) return Interval{-x.hi, -x.lo};
      return Interval{mpq_class(0), x.hi > -x.lo ? x.hi : -x.lo};
    default:
      throw std::logic_error("unknown derived op");
  }
}

std::optional<Interval> eval_node(const RealNode& n, long bits) {
  if (n.exact) {
    Interval iv;
    n.exact->enclose(bits, iv.lo, iv.hi);
    return iv;
  }
  if (n.ball) return n.ball;
  if (n.cf_rule) return eval_rule_cf(n, bits);
  auto a = eval_node(*n.lhs, bits + 2);
  if (!a) return std::nullopt;
  std::optional<Interval> b;
  if (n.rhs) {
    b = eval_node(*n.rhs, bits + 2);
    if (!b) return std::nullopt;
  }
  return combine(n.op, *a, b);
}

} // namespace

Real::Real(std::shared_ptr<const RealNode> node) : node_(std::move(node)) {}

Real::Real() : Real(mpq_class(0)) {}
Real::Real(long v) : Real(mpq_class(v)) {}
Real::Real(const mpz_class& v) : Real(mpq_class(v)) {}
Real::Real(const mpq_class& v) : Real(Surd(v)) {}

Real::Real(const Surd& v) {
  auto n = std::make_shared<RealNode>();
  n->exact = v;
  node_ = n;
}

Real Real::from_ball(const mpq_class& lo, const mpq_class& hi) {
  if (lo > hi) throw parse_error("enclosure with lo > hi");
  if (lo == hi) return Real(lo);
  auto n = std::make_shared<RealNode>();
  n->ball = Interval{lo, hi};
  return Real(std::shared_ptr<const RealNode>(n));
}

Real Real::from_cf(std::vector<mpz_class> digits, std::vector<mpz_class> cycle) {
  if (digits.empty()) throw parse_error("continued fraction needs a0");
  for (std::size_t i = 1; i < digits.size(); ++i) {
    if (digits[i] < 1)
      throw parse_error("continued-fraction digits a_k must be >= 1 for k >= 1");
  }
  for (const auto& b : cycle) {
    if (b < 1) throw parse_error("periodic tail digits must be >= 1");
  }
  auto n = std::make_shared<RealNode>();
  n->has_cf = true;
  n->cf_prefix = digits;
  n->cf_cycle = cycle;
  if (cycle.empty()) {
    // Finite expansion: fold back-to-front into an exact rational.
    mpq_class v(digits.back());
    for (std::size_t i = digits.size() - 1; i-- > 0;) {
      v = mpq_class(digits[i]) + 1 / v;
    }
    n->exact = Surd(v);
  } else {
    // Purely periodic tail t satisfies t = (A t + B)/(C t + D) where
    // [[A,B],[C,D]] is the product of [[b,1],[1,0]] over the cycle; take
    // the positive root and fold the prefix on top of it.
    mpz_class A = 1, B = 0, C = 0, D = 1;
    for (const auto& b : cycle) {
      mpz_class A2 = A * b + B, C2 = C * b + D;
      B = A;
      D = C;
      A = A2;
      C = C2;
    }
    mpz_class disc = (A - D) * (A - D) + 4 * B * C;
    Surd t = (Surd(mpz_class(A - D)) + Surd::sqrt_of(disc)) /
             Surd(mpz_class(2 * C));
    Surd v = t;
    for (std::size_t i = digits.size() - 1; i >= 1; --i) {
      v = Surd(digits[i]) + v.inverse();
    }
    n->exact = Surd(digits[0]) + v.inverse();
  }
  return Real(std::shared_ptr<const RealNode>(n));
}

Real Real::from_cf_rule(const mpz_class& a0,
                        std::function<mpz_class(long)> digit) {
  auto n = std::make_shared<RealNode>();
  n->has_cf = true;
  n->cf_prefix = {a0};
  n->cf_rule = std::move(digit);
  n->dig = {a0};
  return Real(std::shared_ptr<const RealNode>(n));
}

bool Real::is_exact() const { return node_->exact.has_value(); }

const Surd& Real::exact_value() const {
  if (!node_->exact) throw std::logic_error("exact_value on inexact Real");
  return *node_->exact;
}

bool Real::is_rational() const {
  return node_->exact && node_->exact->is_rational();
}

std::optional<mpq_class> Real::as_rational() const {
  if (node_->exact) return node_->exact->as_rational();
  return std::nullopt;
}

bool Real::has_cf_digits() const { return node_->has_cf; }

std::vector<mpz_class> Real::cf_digits(std::size_t count) const {
  const RealNode& n = *node_;
  if (!n.has_cf) throw std::logic_error("cf_digits on non-CF input");
  std::vector<mpz_class> out;
  if (n.cf_rule) {
    std::lock_guard<std::mutex> lock(n.mu);
    extend_rule_digits(n, count);
    out.assign(n.dig.begin(), n.dig.begin() + count);
    return out;
  }
  for (std::size_t i = 0; i < count; ++i) {
    if (i < n.cf_prefix.size()) {
      out.push_back(n.cf_prefix[i]);
    } else if (!n.cf_cycle.empty()) {
      out.push_back(n.cf_cycle[(i - n.cf_prefix.size()) % n.cf_cycle.size()]);
    } else {
      break; // finite expansion: return what exists
    }
  }
  return out;
}

Real derive(char op, const Real& a, const Real& b) {
  auto n = std::make_shared<RealNode>();
  n->op = op;
  n->lhs = a.node_;
  if (op == '+' || op == '-' || op == '*') n->rhs = b.node_;
  return Real(std::shared_ptr<const RealNode>(n));
}

Real Real::operator-() const {
  if (is_exact()) return Real(-exact_value());
  return derive('n', *this, *this);
}

Real Real::operator+(const Real& o) const {
  if (is_exact() && o.is_exact()) return Real(exact_value() + o.exact_value());
  return derive('+', *this, o);
}

Real Real::operator-(const Real& o) const {
  if (is_exact() && o.is_exact()) return Real(exact_value() - o.exact_value());
  return derive('-', *this, o);
}

Real Real::operator*(const Real& o) const {
  if (is_exact() && o.is_exact()) return Real(exact_value() * o.exact_value());
  if (is_exact() && exact_value().is_zero()) return Real();
  if (o.is_exact() && o.exact_value().is_zero()) return Real();
  return derive('*', *this, o);
}

Real Real::inverse() const {
  if (is_exact()) return Real(exact_value().inverse());
  return derive('q', *this, *this);
}

Real Real::operator/(const Real& o) const { return *this * o.inverse(); }

Real Real::abs() const {
  if (is_exact()) return Real(exact_value().abs());
  return derive('a', *this, *this);
}

Real Real::pow_uint(unsigned long e) const {
  if (is_exact()) return Real(exact_value().pow_uint(e));
  Real acc(1);
  Real base = *this;
  while (e > 0) {
    if (e & 1UL) acc = acc * base;
    base = base * base;
    e >>= 1UL;
  }
  return acc;
}

Real Real::reciprocal_shift(const mpz_class& a) const {
  return (*this - Real(a)).inverse();
}

long Real::precision_cap() { return g_precision_cap.load(); }

void Real::set_precision_cap(long bits) {
  if (bits < 64) throw parse_error("precision cap must be at least 64 bits");
  g_precision_cap.store(bits);
}

int Real::sign() const {
  if (is_exact()) return exact_value().sign();
  std::optional<Interval> prev;
  for (long b = 64; b <= precision_cap(); b *= 2) {
    auto iv = eval_node(*node_, b);
    if (iv) {
      if (iv->lo > 0) return 1;
      if (iv->hi < 0) return -1;
      if (iv->lo == 0 && iv->hi == 0) return 0;
      if (prev && prev->lo == iv->lo && prev->hi == iv->hi) break;
      prev = iv;
    }
  }
  throw precision_exhausted_error(
      "sign undecided within " + std::to_string(precision_cap()) + " bits");
}

int Real::compare(const mpq_class& r) const {
  if (is_exact()) return (exact_value() - Surd(r)).sign();
  std::optional<Interval> prev;
  for (long b = 64; b <= precision_cap(); b *= 2) {
    auto iv = eval_node(*node_, b);
    if (iv) {
      if (iv->lo > r) return 1;
      if (iv->hi < r) return -1;
      if (iv->lo == r && iv->hi == r) return 0;
      if (prev && prev->lo == iv->lo && prev->hi == iv->hi) break;
      prev = iv;
    }
  }
  throw precision_exhausted_error(
      "comparison against " + mpq_class(r).get_str() + " undecided within " +
      std::to_string(precision_cap()) + " bits");
}

int Real::compare(const Real& o) const {
  if (is_exact() && o.is_exact())
    return (exact_value() - o.exact_value()).sign();
  return (*this - o).sign();
}

mpz_class Real::floor() const {
  if (is_exact()) return exact_value().floor();
  std::optional<Interval> prev;
  for (long b = 64; b <= precision_cap(); b *= 2) {
    auto iv = eval_node(*node_, b);
    if (iv) {
      mpz_class flo = floor_div(iv->lo), fhi = floor_div(iv->hi);
      if (flo == fhi) return flo;
      if (prev && prev->lo == iv->lo && prev->hi == iv->hi) break;
      prev = iv;
    }
  }
  throw precision_exhausted_error(
      "floor undecided within " + std::to_string(precision_cap()) + " bits");
}

Interval Real::enclose(long bits) const {
  mpq_class goal = pow2_inv(bits);
  std::optional<Interval> best;
  for (long b = std::max(64L, bits); b <= std::max(precision_cap(), bits);
       b *= 2) {
    auto iv = eval_node(*node_, b);
    if (iv) {
      if (iv->width() <= goal) return *iv;
      if (best && best->lo == iv->lo && best->hi == iv->hi) return *iv;
      best = iv;
    }
  }
  if (best) return *best;
  throw precision_exhausted_error("no finite enclosure within " +
                                  std::to_string(precision_cap()) + " bits");
}

double Real::to_double() const {
  if (is_exact()) return exact_value().to_double();
  Interval iv = enclose(64);
  mpq_class mid = (iv.lo + iv.hi) / 2;
  return mid.get_d();
}

std::string Real::str() const {
  if (is_exact()) return exact_value().str();
  Interval iv = enclose(64);
  return "[" + iv.lo.get_str() + ", " + iv.hi.get_str() + "]";
}

namespace {

mpq_class decimal_to_mpq(const std::string& s) {
  static const std::regex re(
      R"(^([+-]?)([0-9]*)(?:\.([0-9]+))?(?:[eE]([+-]?[0-9]+))?$)");
  std::smatch m;
  if (!std::regex_match(s, m, re) || (m[2].str().empty() && m[3].str().empty()))
    throw parse_error("bad decimal literal: " + s);
  mpz_class intpart(m[2].str().empty() ? std::string("0") : m[2].str());
  std::string frac = m[3].str();
  mpz_class num = intpart;
  mpz_class den = 1;
  for (char ch : frac) {
    num = num * 10 + (ch - '0');
    den *= 10;
  }
  mpq_class q(num, den);
  q.canonicalize();
  if (m[4].matched) {
    long e = std::stol(m[4].str());
    mpz_class p10;
    mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(e < 0 ? -e : e));
    if (e >= 0) q *= mpq_class(p10);
    else q /= mpq_class(p10);
  }
  if (m[1].str() == "-") q = -q;
  return q;
}

std::vector<mpz_class> split_digit_list(const std::string& s) {
  std::vector<mpz_class> out;
  std::string cur;
  auto flush = [&]() {
    if (!cur.empty()) {
      out.emplace_back(cur);
      cur.clear();
    }
  };
  for (char ch : s) {
    if (ch == ',') flush();
    else if (ch != ' ') cur.push_back(ch);
  }
  flush();
  return out;
}

mpq_class parse_radius(const std::string& s) {
  static const std::regex frac(R"(^([0-9]+)/([0-9]+)$)");
  std::smatch m;
  mpq_class r;
  if (std::regex_match(s, m, frac)) {
    r = mpq_class(mpz_class(m[1].str()), mpz_class(m[2].str()));
    r.canonicalize();
  } else {
    r = decimal_to_mpq(s);
  }
  if (r <= 0) throw parse_error("enclosure radius must be positive: " + s);
  return r;
}

} // namespace

Real parse_real(const std::string& text) {
  std::smatch m;
  static const std::regex rat_re(R"(^rat:([+-]?[0-9]+)/([0-9]+)$)");
  if (std::regex_match(text, m, rat_re)) {
    mpz_class p(m[1].str()), q(m[2].str());
    if (q == 0) throw parse_error("zero denominator in " + text);
    mpq_class v(p, q);
    v.canonicalize();
    return Real(v);
  }
  static const std::regex surd_re(
      R"(^surd:\(([+-]?[0-9]+)([+-])([0-9]+)\*sqrt\(([0-9]+)\)\)/([+-]?[0-9]+)$)");
  if (std::regex_match(text, m, surd_re)) {
    mpz_class a(m[1].str()), b(m[3].str()), d(m[4].str()), c(m[5].str());
    if (m[2].str() == "-") b = -b;
    if (c == 0) throw parse_error("zero denominator in " + text);
    Surd v = (Surd(a) + Surd::sqrt_of(d, mpq_class(b))) * Surd::ratio(1, c);
    return Real(v);
  }
  static const std::regex cf_re(
      R"(^cf:\[([+-]?[0-9]+)(?:;([0-9, ]*))?\](?:\s*repeat:\[([0-9, ]+)\])?$)");
  if (std::regex_match(text, m, cf_re)) {
    std::vector<mpz_class> digits{mpz_class(m[1].str())};
    if (m[2].matched) {
      for (auto& d : split_digit_list(m[2].str())) digits.push_back(d);
    }
    std::vector<mpz_class> cycle;
    if (m[3].matched) cycle = split_digit_list(m[3].str());
    return Real::from_cf(std::move(digits), std::move(cycle));
  }
  static const std::regex dec_re(R"(^dec:([^~]+)~(.+)$)");
  if (std::regex_match(text, m, dec_re)) {
    mpq_class mid = decimal_to_mpq(m[1].str());
    mpq_class rad = parse_radius(m[2].str());
    return Real::from_ball(mid - rad, mid + rad);
  }
  static const std::regex bare_int(R"(^[+-]?[0-9]+$)");
  if (std::regex_match(text, m, bare_int)) return Real(mpz_class(text));
  static const std::regex bare_frac(R"(^([+-]?[0-9]+)/([0-9]+)$)");
  if (std::regex_match(text, m, bare_frac)) {
    mpz_class p(m[1].str()), q(m[2].str());
    if (q == 0) throw parse_error("zero denominator in " + text);
    mpq_class v(p, q);
    v.canonicalize();
    return Real(v);
  }
  static const std::regex bare_dec(R"(^[+-]?[0-9]*\.[0-9]+$)");
  if (std::regex_match(text, m, bare_dec)) return Real(decimal_to_mpq(text));
  throw parse_error("unrecognized real literal: " + text);
}

std::pair<Real, Real> parse_point(const std::string& text) {
  std::string s = text;
  // strip one optional layer of surrounding parentheses
  if (!s.empty() && s.front() == '(' && s.back() == ')') {
    int depth = 0;
    bool wraps = true;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '(' || s[i] == '[') ++depth;
      else if (s[i] == ')' || s[i] == ']') --depth;
      if (depth == 0 && i + 1 < s.size()) {
        wraps = false;
        break;
      }
    }
    if (wraps) s = s.substr(1, s.size() - 2);
  }
  int depth = 0;
  std::size_t cut = std::string::npos;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '(' || s[i] == '[') ++depth;
    else if (s[i] == ')' || s[i] == ']') --depth;
    else if (s[i] == ',' && depth == 0) {
      cut = i;
      break;
    }
  }
  if (cut == std::string::npos)
    throw parse_error("point needs two comma-separated coordinates: " + text);
  auto trim = [](std::string t) {
    std::size_t a = t.find_first_not_of(' ');
    std::size_t b = t.find_last_not_of(' ');
    if (a == std::string::npos) return std::string();
    return t.substr(a, b - a + 1);
  };
  return {parse_real(trim(s.substr(0, cut))), parse_real(trim(s.substr(cut + 1)))};
}

} // namespace sl2orbit
