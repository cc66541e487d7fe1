#include "sl2orbit/analysis.hpp"

#include "sl2orbit/constructions.hpp"
#include "sl2orbit/contfrac.hpp"
#include "sl2orbit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>
#include <vector>

namespace sl2orbit {

namespace {

Real sup_abs(const std::pair<Real, Real>& lam) {
  Real a = lam.first.abs();
  Real b = lam.second.abs();
  return (b - a).sign() > 0 ? b : a;
}

bool exact_zero(const Real& r) {
  if (!r.is_exact()) return false;
  auto q = r.as_rational();
  return q && *q == 0;
}

Real slope_of(const PlanePoint& p) { return p.x1 / p.x2; }

bool lex_less(const Mat& a, const Mat& b) {
  if (a.v2 != b.v2) return a.v2 < b.v2;
  if (a.u2 != b.u2) return a.u2 < b.u2;
  if (a.v1 != b.v1) return a.v1 < b.v1;
  return a.u1 < b.u1;
}

mpz_class ipow(const mpz_class& base, unsigned long e) {
  mpz_class out;
  mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), e);
  return out;
}

std::string approx_str(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

// Minimum-distance sweep over the full norm ball, with the canonical
// tie rule: smallest distance, then smallest norm, then first in
// (v2, u2, v1, u1) order (the enumeration order itself).
struct ScanResult {
  mpz_class examined = 0;
  Mat argmin;
  std::optional<Real> min;
  mpz_class min_norm = 0;
};

ScanResult scan_min(const PlanePoint& x, const PlanePoint& y,
                    const mpz_class& t) {
  ScanResult s;
  enumerate_norm_bounded(t, [&](const Mat& g) {
    s.examined += 1;
    Real d = sup_abs(residual(g, x, y));
    mpz_class n = g.norm();
    if (!s.min) {
      s.min = d;
      s.argmin = g;
      s.min_norm = n;
      return;
    }
    int c = d.compare(*s.min);
    if (c < 0 || (c == 0 && n < s.min_norm)) {
      s.min = d;
      s.argmin = g;
      s.min_norm = n;
    }
  });
  return s;
}

struct ExactCand {
  Mat g;
  mpz_class norm;
  Real dist;
};

// Strictly improving records from exact candidates, canonical order.
std::vector<ApproxRecord> reduce_records(std::vector<ExactCand> cands) {
  std::sort(cands.begin(), cands.end(),
            [](const ExactCand& a, const ExactCand& b) {
              if (a.norm != b.norm) return a.norm < b.norm;
              int c = a.dist.compare(b.dist);
              if (c != 0) return c < 0;
              return lex_less(a.g, b.g);
            });
  std::vector<ApproxRecord> recs;
  std::optional<Real> best;
  for (auto& c : cands) {
    if (!best || c.dist.compare(*best) < 0) {
      recs.push_back({c.g, c.norm, c.dist});
      best = c.dist;
    }
  }
  return recs;
}

std::vector<StaircasePoint> fill_grid(const std::vector<ApproxRecord>& recs,
                                      const std::vector<mpz_class>& budgets) {
  std::vector<StaircasePoint> out;
  std::size_t i = 0;
  std::optional<Real> cur;
  Mat arg;
  for (const auto& t : budgets) {
    while (i < recs.size() && recs[i].norm <= t) {
      cur = recs[i].distance;
      arg = recs[i].gamma;
      ++i;
    }
    out.push_back({t, cur, arg});
  }
  return out;
}

mpz_class effective_cap(const std::optional<mpz_class>& cap) {
  return cap ? *cap : oracle_cap();
}

std::vector<ApproxRecord> exhaustive_records(const PlanePoint& x,
                                             const PlanePoint& y,
                                             const mpz_class& t_max) {
  // Per norm keep the minimal distance; the lexicographic emission
  // order makes the first achiever the canonical one on ties.
  std::map<mpz_class, std::pair<Mat, Real>> per_norm;
  enumerate_norm_bounded(t_max, [&](const Mat& g) {
    Real d = sup_abs(residual(g, x, y));
    mpz_class n = g.norm();
    auto it = per_norm.find(n);
    if (it == per_norm.end()) {
      per_norm.emplace(n, std::make_pair(g, d));
    } else if (d.compare(it->second.second) < 0) {
      it->second = std::make_pair(g, d);
    }
  });
  std::vector<ApproxRecord> recs;
  std::optional<Real> best;
  for (auto& [n, md] : per_norm) {
    if (!best || md.second.compare(*best) < 0) {
      recs.push_back({md.first, n, md.second});
      best = md.second;
    }
  }
  return recs;
}

std::vector<ApproxRecord> construction_records(const PlanePoint& x,
                                               const PlanePoint& y,
                                               const mpz_class& t_max) {
  std::vector<ExactCand> cands;
  auto add = [&](const ApproxResult& r) {
    cands.push_back({r.gamma, r.norm, r.residual_sup()});
  };
  bool origin = exact_zero(y.x1) && exact_zero(y.x2);
  if (origin) {
    for (long k = 1; k <= 256; ++k) {
      ApproxResult r = approx_origin(x, k);
      if (r.norm > t_max) break;
      add(r);
    }
  } else {
    bool horizontal = exact_zero(y.x2);
    bool rational = horizontal;
    if (!horizontal) {
      Real s = slope_of(y);
      rational = s.is_exact() && s.as_rational().has_value();
    }
    if (rational) {
      for (long k = 1; k <= 256; ++k) {
        try {
          ApproxResult r = approx_rational_slope(x, y, k);
          if (r.norm > t_max) break;
          add(r);
        } catch (const k_too_small_error&) {
          continue;
        }
      }
    } else {
      for (long j0 = 1; j0 <= 64; ++j0) {
        try {
          IndexPair jk = select_indices_small_omega(x, y, j0);
          ApproxResult r = approx_irrational_slope(x, y, jk.j, jk.k);
          if (r.norm > t_max) break;
          add(r);
        } catch (const k_too_small_error&) {
          continue;
        }
      }
    }
  }
  return reduce_records(std::move(cands));
}

} // namespace

mpz_class oracle_cap() {
  if (const char* s = std::getenv("SL2ORBIT_ORACLE_CAP")) {
    try {
      mpz_class v(s);
      if (v > 0) return v;
    } catch (const std::invalid_argument&) {
    }
    throw parse_error(
        "SL2ORBIT_ORACLE_CAP must be a positive integer, got \"" +
        std::string(s) + "\"");
  }
  return mpz_class(10000);
}

RecordSequence staircase(const PlanePoint& x, const PlanePoint& y,
                         std::vector<mpz_class> t_grid,
                         StaircaseSource source,
                         std::optional<mpz_class> cap) {
  if (t_grid.empty()) throw parse_error("staircase needs at least one budget");
  for (const auto& t : t_grid)
    if (t < 1)
      throw parse_error("staircase budgets must be positive, got " +
                        t.get_str());
  std::sort(t_grid.begin(), t_grid.end());
  t_grid.erase(std::unique(t_grid.begin(), t_grid.end()), t_grid.end());
  const mpz_class t_max = t_grid.back();

  RecordSequence rs;
  if (source == StaircaseSource::oracle) {
    mpz_class allowed = effective_cap(cap);
    if (t_max > allowed)
      throw cap_exceeded_error("exhaustive staircase budget " +
                               t_max.get_str() + " exceeds the cap " +
                               allowed.get_str());
    rs.records = exhaustive_records(x, y, t_max);
    rs.source = "oracle";
  } else {
    rs.records = construction_records(x, y, t_max);
    rs.source = "constructions";
  }
  rs.staircase = fill_grid(rs.records, t_grid);
  return rs;
}

RecordSequence record_survey(const PlanePoint& x, const PlanePoint& y,
                             const mpz_class& t_max,
                             std::optional<mpz_class> cap) {
  if (t_max < 1)
    throw parse_error("survey budget must be positive, got " +
                      t_max.get_str());
  mpz_class allowed = effective_cap(cap);
  if (t_max > allowed)
    throw cap_exceeded_error("survey budget " + t_max.get_str() +
                             " exceeds the cap " + allowed.get_str());
  if (!t_max.fits_slong_p())
    throw parse_error("survey budget does not fit a machine word");
  const long T = t_max.get_si();

  const double x1f = x.x1.to_double();
  const double x2f = x.x2.to_double();
  const double y1f = y.x1.to_double();
  const double y2f = y.x2.to_double();
  if (x1f == 0.0 || x2f == 0.0)
    throw parse_error("survey needs both coordinates of x nonzero");

  struct SurveyCand {
    Mat g;
    long norm;
    double dist;
  };
  std::vector<SurveyCand> cands;
  // Min-heap of (norm, distance) used to advance the running best.
  std::priority_queue<std::pair<long, double>,
                      std::vector<std::pair<long, double>>,
                      std::greater<std::pair<long, double>>>
      heap;

  auto dist_f = [&](const Mat& g) {
    double a = g.v1.get_d() * x1f + g.u1.get_d() * x2f - y1f;
    double b = g.v2.get_d() * x1f + g.u2.get_d() * x2f - y2f;
    return std::max(std::abs(a), std::abs(b));
  };

  // Exhaustive double-precision warm-up on a small ball.
  const long warm = std::min<long>(64, T);
  enumerate_norm_bounded(mpz_class(warm), [&](const Mat& g) {
    double r = dist_f(g);
    long n = g.norm().get_si();
    cands.push_back({g, n, r});
    heap.push({n, r});
  });

  // Family scan: for each row maximum m, only rows whose second
  // residual can still beat the running best, lifted to the unique
  // shear family through that row and clipped to the two integer
  // shears bracketing the first-residual minimizer.
  double best = std::numeric_limits<double>::infinity();
  for (long m = warm + 1; m <= T; ++m) {
    while (!heap.empty() && heap.top().first <= m) {
      best = std::min(best, heap.top().second);
      heap.pop();
    }
    std::set<std::pair<long, long>> rows;
    auto span = [&](double c, double w, long lo_cap, long hi_cap,
                    const std::function<void(long)>& take) {
      if (!(w >= 0) || !(c - w > -9e15) || !(c + w < 9e15)) return;
      long lo = std::max(static_cast<long>(std::ceil(c - w)), lo_cap);
      long hi = std::min(static_cast<long>(std::floor(c + w)), hi_cap);
      for (long v = lo; v <= hi; ++v) take(v);
    };
    for (long v2 : {m, -m}) {
      double c = (y2f - static_cast<double>(v2) * x1f) / x2f;
      span(c, best / std::abs(x2f), -m, m, [&](long u2) {
        if (std::gcd(v2, u2) == 1) rows.insert({v2, u2});
      });
    }
    for (long u2 : {m, -m}) {
      double c = (y2f - static_cast<double>(u2) * x2f) / x1f;
      span(c, best / std::abs(x1f), -(m - 1), m - 1, [&](long v2) {
        if (std::gcd(v2, u2) == 1) rows.insert({v2, u2});
      });
    }
    for (const auto& [v2, u2] : rows) {
      double l2 = static_cast<double>(v2) * x1f +
                  static_cast<double>(u2) * x2f - y2f;
      if (std::abs(l2) >= best) continue;
      mpz_class g, bz, cz;
      mpz_class u2z(u2), v2z(v2);
      mpz_gcdext(g.get_mpz_t(), bz.get_mpz_t(), cz.get_mpz_t(),
                 u2z.get_mpz_t(), v2z.get_mpz_t());
      if (g != 1) continue;
      const long v1s = bz.get_si();
      const long u1s = -cz.get_si();
      double q = static_cast<double>(v2) * x1f + static_cast<double>(u2) * x2f;
      if (std::abs(q) < 1e-300) continue;
      double ts = -(static_cast<double>(v1s) * x1f +
                    static_cast<double>(u1s) * x2f - y1f) /
                  q;
      if (!(std::abs(ts) < 4e15)) continue;
      for (double tf : {std::floor(ts), std::ceil(ts)}) {
        long t = static_cast<long>(tf);
        long v1 = v1s + t * v2;
        long u1 = u1s + t * u2;
        long n = std::max(std::max(std::labs(v1), std::labs(u1)),
                          std::max(std::labs(v2), std::labs(u2)));
        if (n > T) continue;
        double r = std::max(std::abs(static_cast<double>(v1) * x1f +
                                     static_cast<double>(u1) * x2f - y1f),
                            std::abs(l2));
        cands.push_back(
            {Mat(mpz_class(v1), mpz_class(u1), v2z, u2z), n, r});
        heap.push({n, r});
      }
    }
  }

  // Double-precision record selection, canonical order.
  std::sort(cands.begin(), cands.end(),
            [](const SurveyCand& a, const SurveyCand& b) {
              if (a.norm != b.norm) return a.norm < b.norm;
              if (a.dist != b.dist) return a.dist < b.dist;
              return lex_less(a.g, b.g);
            });
  std::vector<ExactCand> picked;
  double run = std::numeric_limits<double>::infinity();
  for (const auto& c : cands) {
    if (c.dist < run) {
      picked.push_back(
          {c.g, mpz_class(c.norm), sup_abs(residual(c.g, x, y))});
      run = c.dist;
    }
  }

  RecordSequence rs;
  rs.source = "survey";
  rs.records = reduce_records(std::move(picked));
  std::vector<mpz_class> grid;
  for (mpz_class t = t_max; t >= 8; t /= 2) grid.push_back(t);
  std::reverse(grid.begin(), grid.end());
  rs.staircase = fill_grid(rs.records, grid);
  return rs;
}

ExponentEstimate estimate_exponents(const RecordSequence& rs) {
  if (rs.records.size() < 3)
    throw insufficient_data_error(
        "exponent estimation needs at least 3 records, got " +
        std::to_string(rs.records.size()));
  ExponentEstimate est;
  est.t_ref = rs.staircase.empty() ? rs.records.back().norm
                                   : rs.staircase.back().budget;
  const mpz_class t_cube = ipow(est.t_ref, 3);

  for (const auto& rec : rs.records) {
    if (rec.norm < 2) continue;
    if (ipow(rec.norm, 4) < t_cube) continue;
    double d = rec.distance.to_double();
    if (!(d > 0)) continue;
    double e = -std::log(d) / std::log(rec.norm.get_d());
    if (est.mu_records_used == 0 || e > est.mu) {
      est.mu = e;
      est.mu_argmax = {rec.norm, e};
    }
    est.mu_records_used += 1;
  }
  if (est.mu_records_used == 0)
    throw insufficient_data_error(
        "no records land in the tail window norm^4 >= T^3 for T = " +
        est.t_ref.get_str());

  for (const auto& pt : rs.staircase) {
    if (pt.budget < 2 || !pt.value) continue;
    double d = pt.value->to_double();
    if (!(d > 0)) continue;
    double e = -std::log(d) / std::log(pt.budget.get_d());
    est.grid_exponents.push_back({pt.budget, e});
    if (ipow(pt.budget, 2) < est.t_ref) continue;
    if (est.mu_hat_grid_used == 0 || e < est.mu_hat) {
      est.mu_hat = e;
      est.mu_hat_argmin = {pt.budget, e};
    }
    est.mu_hat_grid_used += 1;
  }
  if (est.mu_hat_grid_used == 0)
    throw insufficient_data_error(
        "no staircase budgets land in the window T'^2 >= T for T = " +
        est.t_ref.get_str());
  return est;
}

namespace {

void require_growth_exponent(const mpq_class& w, const char* which) {
  if (w < 1)
    throw parse_error(std::string(which) +
                      " growth exponent must be at least 1, got " +
                      w.get_str());
}

} // namespace

std::pair<mpq_class, mpq_class> origin_exponents(const mpq_class& omega_x) {
  require_growth_exponent(omega_x, "slope");
  return {mpq_class(1), mpq_class(1) / omega_x};
}

std::pair<mpq_class, mpq_class> rational_slope_exponents(
    const mpq_class& omega_x) {
  require_growth_exponent(omega_x, "slope");
  mpq_class denom = omega_x + 1;
  return {omega_x / denom, mpq_class(1) / denom};
}

std::pair<mpq_class, mpq_class> irrational_slope_exponent_floors(
    const mpq_class& omega_x, const mpq_class& omega_y) {
  require_growth_exponent(omega_x, "slope");
  require_growth_exponent(omega_y, "target-slope");
  mpq_class second =
      (omega_y + 1) / (mpq_class(2) * (mpq_class(2) * omega_y + 1) * omega_x);
  return {mpq_class(1, 3), second};
}

namespace {

ExtremeSearch finish_scan(long k, const mpz_class& t, ScanResult s,
                          const mpq_class& floor_bound) {
  ExtremeSearch out;
  out.k = k;
  out.cap = t;
  out.examined = s.examined;
  out.argmin = s.argmin;
  out.min_distance = *s.min;
  out.floor_bound = floor_bound;
  out.pass = out.min_distance.compare(floor_bound) >= 0;
  out.certificates.push_back(
      {"distance-floor", out.pass,
       "min distance ~ " + approx_str(out.min_distance.to_double()) +
           " vs floor " + floor_bound.get_str() + " over norm <= " +
           t.get_str()});
  mpz_class expect = count_norm_bounded(t);
  out.certificates.push_back(
      {"enumeration-count", s.examined == expect,
       "examined " + s.examined.get_str() + " of " + expect.get_str()});
  return out;
}

} // namespace

ExtremeSearch verify_origin_floor(const PlanePoint& x, long k,
                                  std::optional<mpz_class> cap) {
  if (k < 1) throw parse_error("origin floor check needs k >= 1");
  ContinuedFraction cf(slope_of(x));
  mpz_class t = cf.q(k + 1) / 2;
  mpz_class allowed = effective_cap(cap);
  if (t > allowed)
    throw cap_exceeded_error("norm ball " + t.get_str() +
                             " exceeds the cap " + allowed.get_str());
  PlanePoint origin{Real(0), Real(0)};
  ScanResult s = scan_min(x, origin, t);
  mpq_class fb(mpz_class(1), mpz_class(2 * cf.q(k)));
  return finish_scan(k, t, std::move(s), fb);
}

ExtremeSearch verify_target_floor(const PlanePoint& x, const PlanePoint& y,
                                  long k, std::optional<mpz_class> cap) {
  if (k < 1) throw parse_error("target floor check needs k >= 1");
  auto y1q = y.x1.as_rational();
  auto y2q = y.x2.as_rational();
  if (!y1q || !y2q)
    throw parse_error(
        "target floor check needs exact rational target coordinates");
  if (*y2q == 0)
    throw parse_error(
        "target floor check needs a target off the horizontal axis");
  mpq_class slope = *y1q / *y2q;
  mpz_class b = slope.get_den(); // positive in canonical form
  ContinuedFraction cf(slope_of(x));
  mpq_class y2_abs = abs(*y2q);
  mpq_class lhs = y2_abs * mpq_class(cf.q(k));
  if (lhs < mpq_class(mpz_class(12 * b)))
    throw precondition_failed_error(
        "q_k |y2| = " + lhs.get_str() + " is below 12 b = " +
        mpz_class(12 * b).get_str() + " at k = " + std::to_string(k));
  mpq_class ball = y2_abs * mpq_class(mpz_class(cf.q(k) * cf.q(k + 1))) / 4;
  mpz_class num = ball.get_num(), den = ball.get_den(), t;
  mpz_fdiv_q(t.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  mpz_class allowed = effective_cap(cap);
  if (t > allowed)
    throw cap_exceeded_error("norm ball " + t.get_str() +
                             " exceeds the cap " + allowed.get_str());
  ScanResult s = scan_min(x, y, t);
  mpq_class fb(mpz_class(1), mpz_class(4 * b * cf.q(k)));
  return finish_scan(k, t, std::move(s), fb);
}

} // namespace sl2orbit
