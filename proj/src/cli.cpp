#include "sl2orbit/cli.hpp"

#include "sl2orbit/analysis.hpp"
#include "sl2orbit/constructions.hpp"
#include "sl2orbit/contfrac.hpp"
#include "sl2orbit/errors.hpp"
#include "sl2orbit/real.hpp"
#include "sl2orbit/sl2.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace sl2orbit {

namespace {

using ordered_json = nlohmann::ordered_json;

// Everything the subcommands read. Shared flags live on the top-level
// app and fall through; method-specific flags live on their subcommand.
struct RunConfig {
  std::string xi_spec = "surd:(-1+1*sqrt(5))/2";
  std::string y_spec;
  std::string method;
  std::string k_spec;
  std::string j0_spec = "3";
  long k_max = 12;
  long n = 12;
  std::string omega_spec;
  std::string mu_spec = "3/10";
  std::string eps_spec = "1/10";
  std::string omega_x_spec = "1";
  std::string omega_y_spec = "1";
  std::string t_spec = "10000";
  bool t_given = false;
  std::string cap_spec;
  std::string format = "table";
  std::string source = "survey";
  long precision_bits = 0;
  unsigned long long seed = 0; // reserved for randomized self-checks
  bool count_only = false;
};

// Restores the global precision ceiling when a run() invocation ends,
// so embedding callers (the tests) never leak a lowered cap.
struct PrecisionCapGuard {
  long saved = Real::precision_cap();
  ~PrecisionCapGuard() { Real::set_precision_cap(saved); }
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

std::string fmt(const Real& r) { return fmt(r.to_double()); }

bool exact_zero(const Real& r) {
  if (!r.is_exact()) return false;
  auto q = r.as_rational();
  return q && *q == 0;
}

mpz_class parse_mpz_flag(const std::string& text, const char* flag) {
  try {
    return mpz_class(text);
  } catch (const std::invalid_argument&) {
    throw parse_error(std::string(flag) + ": '" + text +
                      "' is not an integer");
  }
}

mpq_class parse_mpq_flag(const std::string& text, const char* flag) {
  mpq_class q;
  try {
    q = mpq_class(text);
  } catch (const std::invalid_argument&) {
    throw parse_error(std::string(flag) + ": '" + text +
                      "' is not a rational (use p or p/q)");
  }
  if (q.get_den() == 0)
    throw parse_error(std::string(flag) + ": zero denominator in '" + text +
                      "'");
  q.canonicalize();
  return q;
}

long parse_long(const std::string& text, const char* flag) {
  try {
    std::size_t pos = 0;
    long v = std::stol(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw parse_error(std::string(flag) + ": '" + text +
                      "' is not an integer index");
  }
}

// Index ranges: "6", "6..12", "odd 9..21", "even 4..12". The parity
// prefix restricts the range to matching indices; a single value with
// the wrong parity is an error.
std::vector<long> parse_index_list(const std::string& spec, const char* flag) {
  std::string s = spec;
  auto strip = [](std::string& t) {
    while (!t.empty() && std::isspace(static_cast<unsigned char>(t.front())))
      t.erase(t.begin());
    while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back())))
      t.pop_back();
  };
  strip(s);
  int parity = -1;
  if (s.rfind("odd", 0) == 0) {
    parity = 1;
    s.erase(0, 3);
  } else if (s.rfind("even", 0) == 0) {
    parity = 0;
    s.erase(0, 4);
  }
  strip(s);
  if (s.empty()) throw parse_error(std::string(flag) + ": empty index range");
  long lo = 0, hi = 0;
  auto dots = s.find("..");
  if (dots == std::string::npos) {
    lo = hi = parse_long(s, flag);
  } else {
    lo = parse_long(s.substr(0, dots), flag);
    hi = parse_long(s.substr(dots + 2), flag);
  }
  if (hi < lo)
    throw parse_error(std::string(flag) + ": empty range " +
                      std::to_string(lo) + ".." + std::to_string(hi));
  long step = 1;
  if (parity >= 0) {
    step = 2;
    if (((lo % 2) + 2) % 2 != parity) {
      if (lo == hi)
        throw parse_error(std::string(flag) + ": " + std::to_string(lo) +
                          " does not have the requested parity");
      ++lo;
    }
    if (lo > hi)
      throw parse_error(std::string(flag) + ": no index of the requested "
                                            "parity in the range");
  }
  if ((hi - lo) / step + 1 > 4096)
    throw parse_error(std::string(flag) + ": range spans more than 4096 "
                                          "indices");
  std::vector<long> out;
  for (long k = lo; k <= hi; k += step) out.push_back(k);
  return out;
}

PlanePoint slope_point(const std::string& xi_spec) {
  return {parse_real(xi_spec), Real(1)};
}

PlanePoint point_arg(const std::string& y_spec) {
  auto pr = parse_point(y_spec);
  return {pr.first, pr.second};
}

std::optional<mpz_class> cap_flag(const RunConfig& cfg) {
  if (cfg.cap_spec.empty()) return std::nullopt;
  mpz_class cap = parse_mpz_flag(cfg.cap_spec, "--oracle-cap");
  if (cap <= 0) throw parse_error("--oracle-cap must be positive");
  return cap;
}

// Certificates that report diagnostics rather than certified theorems.
// A failed certificate outside this set means a certified bound did
// not hold — that is the bug-detector exit (4).
const std::set<std::string>& advisory_certificates() {
  static const std::set<std::string> names = {
      "first-column-v1-positive", "first-column-v2-positive",
      "residual-1-positive",      "residual-2-positive",
      "size-bound",               "index-window-floor",
      "index-window-ceiling",     "index-window-next"};
  return names;
}

// The sign-constrained driver is blocked at an index when any of these
// recorded conditions fails; the run still prints the row.
const std::set<std::string>& blocking_certificates() {
  static const std::set<std::string> names = {
      "first-column-v1-positive", "first-column-v2-positive",
      "residual-1-positive", "residual-2-positive", "size-bound"};
  return names;
}

std::string status_of(const ApproxResult& r) {
  std::vector<std::string> blocked;
  for (const Certificate& c : r.certificates)
    if (!c.pass && blocking_certificates().count(c.name))
      blocked.push_back(c.name);
  if (blocked.empty()) return "OK";
  std::string out = "BLOCKED(";
  for (std::size_t i = 0; i < blocked.size(); ++i) {
    if (i) out += "+";
    out += blocked[i];
  }
  out += ")";
  return out;
}

std::optional<std::string> fatal_certificate(
    const std::vector<ApproxResult>& results) {
  for (const ApproxResult& r : results)
    for (const Certificate& c : r.certificates)
      if (!c.pass && !advisory_certificates().count(c.name)) return c.name;
  return std::nullopt;
}

ordered_json real_json(const Real& r) {
  ordered_json j;
  j["str"] = r.str();
  j["approx"] = r.to_double();
  return j;
}

ordered_json cert_json(const Certificate& c) {
  ordered_json j;
  j["name"] = c.name;
  j["pass"] = c.pass;
  j["detail"] = c.detail;
  return j;
}

std::string csv_quote(const std::string& s) { return "\"" + s + "\""; }

// ---------------------------------------------------------------- convergents

int cmd_convergents(const RunConfig& cfg, std::ostream& out) {
  if (cfg.n < 0) throw parse_error("--n must be >= 0");
  if (cfg.n > 100000) throw parse_error("--n is capped at 100000");
  Real xi = parse_real(cfg.xi_spec);
  ContinuedFraction cf(xi);
  long n = cfg.n;
  if (cfg.format == "csv") {
    out << cf.csv(n);
    return 0;
  }
  if (cfg.format == "json") {
    ordered_json doc;
    doc["command"] = "convergents";
    doc["slope"] = real_json(cf.value());
    ordered_json rows = ordered_json::array();
    for (long k = 0; k <= n; ++k) {
      ordered_json row;
      row["k"] = k;
      row["a"] = cf.digit(k).get_str();
      row["p"] = cf.p(k).get_str();
      row["q"] = cf.q(k).get_str();
      row["sign"] = cf.epsilon(k).sign() >= 0 ? "+" : "-";
      mpz_class q_next = cf.q(k + 1);
      row["lower"] = mpq_class(mpq_class(1) / mpq_class(mpz_class(2 * q_next)))
                         .get_str();
      row["upper"] = mpq_class(mpq_class(1) / mpq_class(q_next)).get_str();
      row["eps"] = real_json(cf.epsilon(k));
      rows.push_back(std::move(row));
    }
    doc["convergents"] = std::move(rows);
    out << doc.dump(2) << "\n";
    return 0;
  }
  out << "slope ~ " << fmt(cf.value()) << "\n";
  for (long k = 0; k <= n; ++k) {
    out << "k=" << k << " a=" << cf.digit(k) << " p=" << cf.p(k)
        << " q=" << cf.q(k) << " sign=" << (cf.epsilon(k).sign() >= 0 ? '+' : '-')
        << " lower=1/" << mpz_class(2 * cf.q(k + 1)) << " upper=1/"
        << cf.q(k + 1) << " eps~" << fmt(cf.epsilon(k)) << "\n";
  }
  return 0;
}

// --------------------------------------------------------------------- approx

void write_approx_table(const std::vector<ApproxResult>& results,
                        bool with_status, std::ostream& out) {
  for (const ApproxResult& r : results) {
    long passed = 0;
    for (const Certificate& c : r.certificates) passed += c.pass ? 1 : 0;
    out << "k=" << r.k;
    if (r.j) out << " j=" << *r.j;
    out << " ell=" << r.ell << " norm=" << r.norm << " gamma=" << r.gamma.str()
        << " dist~" << fmt(r.residual_sup()) << " bound[" << r.bound_name
        << "]~" << fmt(r.bound_value) << " certs=" << passed << "/"
        << r.certificates.size();
    if (with_status) out << " status=" << status_of(r);
    out << "\n";
  }
}

void write_approx_csv(const std::vector<ApproxResult>& results,
                      bool with_status, std::ostream& out) {
  out << "k,j,ell,norm,gamma,dist,bound_name,bound,certs_passed,certs_total";
  if (with_status) out << ",status";
  out << "\n";
  for (const ApproxResult& r : results) {
    long passed = 0;
    for (const Certificate& c : r.certificates) passed += c.pass ? 1 : 0;
    out << r.k << ",";
    if (r.j) out << *r.j;
    out << "," << r.ell << "," << r.norm << "," << csv_quote(r.gamma.str())
        << "," << fmt(r.residual_sup()) << "," << r.bound_name << ","
        << fmt(r.bound_value) << "," << passed << "," << r.certificates.size();
    if (with_status) out << "," << status_of(r);
    out << "\n";
  }
}

ordered_json approx_json(const ApproxResult& r, bool with_status) {
  ordered_json j;
  j["k"] = r.k;
  if (r.j) j["j"] = *r.j;
  j["ell"] = r.ell.get_str();
  j["norm"] = r.norm.get_str();
  j["gamma"] = r.gamma.str();
  j["residual"] = ordered_json::array(
      {real_json(r.lam1), real_json(r.lam2)});
  j["dist"] = real_json(r.residual_sup());
  j["bound_name"] = r.bound_name;
  j["bound"] = real_json(r.bound_value);
  ordered_json certs = ordered_json::array();
  for (const Certificate& c : r.certificates) certs.push_back(cert_json(c));
  j["certificates"] = std::move(certs);
  if (with_status) j["status"] = status_of(r);
  return j;
}

int cmd_approx(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  PlanePoint x = slope_point(cfg.xi_spec);
  std::optional<PlanePoint> y;
  if (!cfg.y_spec.empty()) y = point_arg(cfg.y_spec);
  if (cfg.method == "origin") {
    if (y && !(exact_zero(y->x1) && exact_zero(y->x2)))
      throw parse_error("method origin always targets the origin; drop --y");
  } else if (!y) {
    throw parse_error("--y is required for method " + cfg.method);
  }

  std::vector<ApproxResult> results;
  if (cfg.method == "origin" || cfg.method == "rational" ||
      cfg.method == "signed") {
    if (cfg.k_spec.empty())
      throw parse_error("--k is required for method " + cfg.method);
  }
  if (cfg.method == "origin") {
    for (long k : parse_index_list(cfg.k_spec, "--k"))
      results.push_back(approx_origin(x, k));
  } else if (cfg.method == "rational") {
    for (long k : parse_index_list(cfg.k_spec, "--k"))
      results.push_back(approx_rational_slope(x, *y, k));
  } else if (cfg.method == "irrational-small-omega") {
    for (long j0 : parse_index_list(cfg.j0_spec, "--j0")) {
      if (j0 < 1) throw parse_error("--j0 indices must be >= 1");
      IndexPair jk = select_indices_small_omega(x, *y, j0);
      ApproxResult r = approx_irrational_slope(x, *y, jk.j, jk.k);
      r.certificates.push_back(cube_exponent_certificate(r, x, *y));
      results.push_back(std::move(r));
    }
  } else if (cfg.method == "irrational-large-omega") {
    if (cfg.omega_spec.empty())
      throw parse_error("--omega is required for method irrational-large-omega");
    mpq_class omega = parse_mpq_flag(cfg.omega_spec, "--omega");
    if (cfg.k_max < 3) throw parse_error("--k-max must be >= 3");
    for (const IndexPair& jk :
         select_indices_large_omega(x, *y, omega, cfg.k_max)) {
      ApproxResult r = approx_irrational_slope(x, *y, jk.j, jk.k);
      r.certificates.push_back(growth_residual_certificate(r, x, *y));
      results.push_back(std::move(r));
    }
  } else { // signed
    mpq_class mu = parse_mpq_flag(cfg.mu_spec, "--mu");
    mpq_class eps = parse_mpq_flag(cfg.eps_spec, "--eps");
    for (long k : parse_index_list(cfg.k_spec, "--k"))
      results.push_back(approx_signed(x, *y, k, mu, eps, /*require=*/false));
  }

  const bool with_status = cfg.method == "signed";
  if (cfg.format == "json") {
    ordered_json doc;
    doc["command"] = "approx";
    doc["method"] = cfg.method;
    doc["x"] = cfg.xi_spec;
    if (!cfg.y_spec.empty()) doc["y"] = cfg.y_spec;
    ordered_json rows = ordered_json::array();
    for (const ApproxResult& r : results)
      rows.push_back(approx_json(r, with_status));
    doc["results"] = std::move(rows);
    out << doc.dump(2) << "\n";
  } else if (cfg.format == "csv") {
    write_approx_csv(results, with_status, out);
  } else {
    write_approx_table(results, with_status, out);
  }

  if (auto bad = fatal_certificate(results)) {
    err << "BoundViolated: certified bound '" << *bad
        << "' failed; this indicates a bug, see the certificate detail\n";
    return 4;
  }
  if (with_status) {
    bool any_ok = false;
    for (const ApproxResult& r : results) any_ok |= status_of(r) == "OK";
    if (!any_ok) {
      err << "BoundNotYetReached: no index in the range met the sign and "
             "size conditions; retry with larger odd k\n";
      return 2;
    }
  }
  return 0;
}

// --------------------------------------------------------------------- verify

int cmd_verify(const RunConfig& cfg, const std::string& check,
               std::ostream& out) {
  if (cfg.k_spec.empty()) throw parse_error("--k is required for verify");
  PlanePoint x = slope_point(cfg.xi_spec);
  std::optional<PlanePoint> y;
  if (check == "target-floor") {
    if (cfg.y_spec.empty())
      throw parse_error("--y is required for verify target-floor");
    y = point_arg(cfg.y_spec);
  }
  std::optional<mpz_class> cap = cap_flag(cfg);

  std::vector<ExtremeSearch> rows;
  for (long k : parse_index_list(cfg.k_spec, "--k")) {
    rows.push_back(check == "origin-floor"
                       ? verify_origin_floor(x, k, cap)
                       : verify_target_floor(x, *y, k, cap));
  }

  bool all_pass = true;
  for (const ExtremeSearch& s : rows) {
    all_pass = all_pass && s.pass;
    for (const Certificate& c : s.certificates) all_pass = all_pass && c.pass;
  }

  if (cfg.format == "json") {
    ordered_json doc;
    doc["command"] = "verify";
    doc["check"] = check;
    doc["x"] = cfg.xi_spec;
    if (!cfg.y_spec.empty()) doc["y"] = cfg.y_spec;
    ordered_json arr = ordered_json::array();
    for (const ExtremeSearch& s : rows) {
      ordered_json j;
      j["k"] = s.k;
      j["ball"] = s.cap.get_str();
      j["examined"] = s.examined.get_str();
      j["argmin"] = s.argmin.str();
      j["min"] = real_json(s.min_distance);
      j["floor"] = s.floor_bound.get_str();
      j["pass"] = s.pass;
      ordered_json certs = ordered_json::array();
      for (const Certificate& c : s.certificates)
        certs.push_back(cert_json(c));
      j["certificates"] = std::move(certs);
      arr.push_back(std::move(j));
    }
    doc["results"] = std::move(arr);
    doc["pass"] = all_pass;
    out << doc.dump(2) << "\n";
  } else if (cfg.format == "csv") {
    out << "check,k,ball,examined,argmin,min,floor,pass\n";
    for (const ExtremeSearch& s : rows) {
      out << check << "," << s.k << "," << s.cap << "," << s.examined << ","
          << csv_quote(s.argmin.str()) << "," << fmt(s.min_distance) << ","
          << s.floor_bound << "," << (s.pass ? "true" : "false") << "\n";
    }
  } else {
    for (const ExtremeSearch& s : rows) {
      out << "check=" << check << " k=" << s.k << " ball=" << s.cap
          << " examined=" << s.examined << "\n";
      out << "  min distance ~ " << fmt(s.min_distance) << " ("
          << s.min_distance.str() << ") at gamma=" << s.argmin.str() << "\n";
      out << "  certified floor = " << s.floor_bound << "\n";
      for (const Certificate& c : s.certificates)
        out << "  certificate " << c.name << ": "
            << (c.pass ? "pass" : "FAIL") << " (" << c.detail << ")\n";
      out << "  result: " << (s.pass ? "PASS" : "FAIL") << "\n";
    }
  }
  return all_pass ? 0 : 4;
}

// ------------------------------------------------------------------ exponents

int cmd_exponents(const RunConfig& cfg, std::ostream& out) {
  PlanePoint x = slope_point(cfg.xi_spec);
  PlanePoint y =
      cfg.y_spec.empty() ? PlanePoint{Real(0), Real(0)} : point_arg(cfg.y_spec);
  mpz_class t_max = parse_mpz_flag(cfg.t_spec, "--T");
  if (t_max < 1) throw parse_error("--T must be >= 1");
  std::optional<mpz_class> cap = cap_flag(cfg);

  RecordSequence rs;
  if (cfg.source == "oracle") {
    std::vector<mpz_class> grid;
    for (mpz_class t = t_max; t >= 8; t /= 2) grid.push_back(t);
    if (grid.empty()) grid.push_back(t_max);
    std::reverse(grid.begin(), grid.end());
    rs = staircase(x, y, grid, StaircaseSource::oracle, cap);
  } else {
    rs = record_survey(x, y, t_max, cap);
  }
  ExponentEstimate est = estimate_exponents(rs);

  // Predicted exponents for the target class.
  const bool origin_target = exact_zero(y.x1) && exact_zero(y.x2);
  const bool rational_target =
      !origin_target &&
      (exact_zero(y.x2) ||
       (y.x2.sign() != 0 && (y.x1 / y.x2).as_rational().has_value()));
  mpq_class omega_x = parse_mpq_flag(cfg.omega_x_spec, "--omega-xi");
  mpq_class omega_y = parse_mpq_flag(cfg.omega_y_spec, "--omega-y");
  std::string kind;
  std::string comparison;
  std::pair<mpq_class, mpq_class> theory;
  if (origin_target) {
    kind = "origin";
    comparison = "equalities";
    theory = origin_exponents(omega_x);
  } else if (rational_target) {
    kind = "rational-slope";
    comparison = "equalities";
    theory = rational_slope_exponents(omega_x);
  } else {
    kind = "irrational-slope";
    comparison = "lower-bounds";
    theory = irrational_slope_exponent_floors(omega_x, omega_y);
  }

  if (cfg.format == "json") {
    ordered_json doc;
    doc["command"] = "exponents";
    doc["x"] = cfg.xi_spec;
    doc["y"] = cfg.y_spec.empty() ? "0,0" : cfg.y_spec;
    doc["T"] = t_max.get_str();
    doc["source"] = rs.source;
    ordered_json recs = ordered_json::array();
    for (const ApproxRecord& r : rs.records) {
      ordered_json j;
      j["norm"] = r.norm.get_str();
      j["gamma"] = r.gamma.str();
      j["dist"] = real_json(r.distance);
      recs.push_back(std::move(j));
    }
    doc["records"] = std::move(recs);
    ordered_json grid = ordered_json::array();
    for (const auto& [budget, value] : est.grid_exponents) {
      ordered_json j;
      j["budget"] = budget.get_str();
      j["exponent"] = value;
      grid.push_back(std::move(j));
    }
    doc["grid_exponents"] = std::move(grid);
    ordered_json e;
    e["mu"] = est.mu;
    e["mu_records_used"] = est.mu_records_used;
    e["mu_argmax_norm"] = est.mu_argmax.first.get_str();
    e["mu_hat"] = est.mu_hat;
    e["mu_hat_grid_used"] = est.mu_hat_grid_used;
    e["mu_hat_argmin_budget"] = est.mu_hat_argmin.first.get_str();
    e["t_ref"] = est.t_ref.get_str();
    doc["estimate"] = std::move(e);
    ordered_json th;
    th["kind"] = kind;
    th["comparison"] = comparison;
    th["mu"] = theory.first.get_str();
    th["mu_hat"] = theory.second.get_str();
    doc["theory"] = std::move(th);
    out << doc.dump(2) << "\n";
    return 0;
  }
  if (cfg.format == "csv") {
    out << "kind,n,distance,exponent\n";
    for (const ApproxRecord& r : rs.records)
      out << "record," << r.norm << "," << fmt(r.distance) << ",\n";
    for (const auto& [budget, value] : est.grid_exponents) {
      const StaircasePoint* pt = nullptr;
      for (const StaircasePoint& s : rs.staircase)
        if (s.budget == budget) pt = &s;
      out << "grid," << budget << ","
          << (pt && pt->value ? fmt(*pt->value) : std::string()) << ","
          << fmt(value) << "\n";
    }
    out << "estimate-mu," << est.mu_argmax.first << ",," << fmt(est.mu) << "\n";
    out << "estimate-mu-hat," << est.mu_hat_argmin.first << ",,"
        << fmt(est.mu_hat) << "\n";
    return 0;
  }
  out << "source=" << rs.source << " T=" << t_max
      << " records=" << rs.records.size() << "\n";
  for (const ApproxRecord& r : rs.records)
    out << "record norm=" << r.norm << " dist~" << fmt(r.distance)
        << " gamma=" << r.gamma.str() << "\n";
  for (const auto& [budget, value] : est.grid_exponents)
    out << "grid T'=" << budget << " exponent~" << fmt(value) << "\n";
  out << "mu~" << fmt(est.mu) << " (records in window: "
      << est.mu_records_used << ", argmax norm " << est.mu_argmax.first
      << ")\n";
  out << "mu-hat~" << fmt(est.mu_hat) << " (grid points in window: "
      << est.mu_hat_grid_used << ", argmin budget "
      << est.mu_hat_argmin.first << ")\n";
  out << "theory kind=" << kind << " mu=" << theory.first << " mu-hat="
      << theory.second << " comparison=" << comparison << "\n";
  return 0;
}

// ------------------------------------------------------------------ enumerate

int cmd_enumerate(const RunConfig& cfg, std::ostream& out) {
  if (!cfg.t_given) throw parse_error("--T is required for enumerate");
  mpz_class t_max = parse_mpz_flag(cfg.t_spec, "--T");
  if (t_max < 1) throw parse_error("--T must be >= 1");
  mpz_class cap = cap_flag(cfg).value_or(oracle_cap());
  if (t_max > cap)
    throw cap_exceeded_error("enumeration budget " + t_max.get_str() +
                             " exceeds the cap " + cap.get_str() +
                             "; raise --oracle-cap or SL2ORBIT_ORACLE_CAP");
  mpz_class count = count_norm_bounded(t_max);
  if (!cfg.count_only && count > 1000000)
    throw parse_error("enumeration would emit " + count.get_str() +
                      " rows; use --count-only or a smaller --T");
  if (cfg.format == "json") {
    ordered_json doc;
    doc["command"] = "enumerate";
    doc["T"] = t_max.get_str();
    doc["count"] = count.get_str();
    if (!cfg.count_only) {
      ordered_json arr = ordered_json::array();
      for (const Mat& g : collect_norm_bounded(t_max)) arr.push_back(g.str());
      doc["matrices"] = std::move(arr);
    }
    out << doc.dump(2) << "\n";
    return 0;
  }
  if (cfg.count_only) {
    if (cfg.format == "csv")
      out << "T,count\n" << t_max << "," << count << "\n";
    else
      out << "matrices with norm <= " << t_max << ": " << count << "\n";
    return 0;
  }
  out << enumeration_csv(t_max);
  return 0;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"certified approximation of plane points by integer "
               "matrices of determinant one"};
  app.name("sl2orbit");
  app.require_subcommand(1);

  app.add_option("--xi", cfg.xi_spec,
                 "slope of the moving point x = (xi, 1); accepts rat:, "
                 "surd:, cf:, dec: forms")
      ->capture_default_str();
  app.add_option("--y", cfg.y_spec,
                 "target point as 'y1,y2' (each coordinate in rat:/surd:/"
                 "cf:/dec: form; bare numbers are rationals)");
  app.add_option("--k", cfg.k_spec,
                 "convergent index or range: '6', '6..12', 'odd 9..21'");
  app.add_option("--T", cfg.t_spec, "norm budget")->capture_default_str();
  CLI::Option* t_opt = app.get_option("--T");
  app.add_option("--format", cfg.format, "output format")
      ->check(CLI::IsMember({"table", "json", "csv"}))
      ->capture_default_str();
  app.add_option("--oracle-cap", cfg.cap_spec,
                 "ceiling for exhaustive-search budgets (overrides "
                 "SL2ORBIT_ORACLE_CAP)");
  app.add_option("--precision-cap", cfg.precision_bits,
                 "max working precision in bits before PrecisionExhausted "
                 "(0 = library default)");
  app.add_option("--seed", cfg.seed,
                 "seed for randomized self-checks (reserved; all commands "
                 "here are deterministic)");

  CLI::App* conv = app.add_subcommand(
      "convergents", "continued-fraction digits, convergents, and the "
                     "two-sided error window of the slope");
  conv->add_option("--n", cfg.n, "largest index to print")
      ->capture_default_str();

  CLI::App* approx = app.add_subcommand(
      "approx", "build certified approximations gamma x ~ y");
  approx
      ->add_option("--method", cfg.method,
                   "construction driver: origin | rational | "
                   "irrational-small-omega | irrational-large-omega | signed")
      ->check(CLI::IsMember({"origin", "rational", "irrational-small-omega",
                             "irrational-large-omega", "signed"}))
      ->required();
  approx->add_option("--j0", cfg.j0_spec,
                     "seed index or range for irrational-small-omega")
      ->capture_default_str();
  approx->add_option("--k-max", cfg.k_max,
                     "largest k scanned by irrational-large-omega")
      ->capture_default_str();
  approx->add_option("--omega", cfg.omega_spec,
                     "growth exponent of the slope's denominators "
                     "(rational, > 2) for irrational-large-omega");
  approx->add_option("--mu", cfg.mu_spec,
                     "size exponent checked by the signed driver")
      ->capture_default_str();
  approx->add_option("--eps", cfg.eps_spec,
                     "margin parameter recorded by the signed driver")
      ->capture_default_str();

  CLI::App* verify = app.add_subcommand(
      "verify", "exhaustively check a certified distance floor");
  verify->require_subcommand(1);
  CLI::App* v_origin = verify->add_subcommand(
      "origin-floor", "min distance of the norm ball to the origin-aimed "
                      "point, against the floor 1/(2 q_k)");
  CLI::App* v_target = verify->add_subcommand(
      "target-floor", "min distance of the norm ball to a rational-slope "
                      "target, against the floor 1/(4 b q_k)");

  CLI::App* exponents = app.add_subcommand(
      "exponents", "record sequence, staircase grid, and approximation "
                   "exponent estimates");
  exponents->add_option("--source", cfg.source,
                        "record source: survey (pruned float scan, exact "
                        "re-check) or oracle (exhaustive, cap-guarded)")
      ->check(CLI::IsMember({"survey", "oracle"}))
      ->capture_default_str();
  exponents->add_option("--omega-xi", cfg.omega_x_spec,
                        "asserted irrationality exponent of xi for the "
                        "predicted values")
      ->capture_default_str();
  exponents->add_option("--omega-y", cfg.omega_y_spec,
                        "asserted irrationality exponent of the target slope "
                        "(irrational-slope targets only)")
      ->capture_default_str();

  CLI::App* enumerate = app.add_subcommand(
      "enumerate", "list or count the determinant-one matrices with norm "
                   "<= T");
  enumerate->add_flag("--count-only", cfg.count_only,
                      "print only the count");

  for (CLI::App* sub : {conv, approx, verify, exponents, enumerate})
    sub->fallthrough();
  for (CLI::App* sub : {v_origin, v_target}) sub->fallthrough();

  std::vector<const char*> argv_vec;
  argv_vec.push_back("sl2orbit");
  for (const std::string& a : args) argv_vec.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv_vec.size()),
              const_cast<char**>(argv_vec.data()));
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e, out, err);
    return rc == 0 ? 0 : 2;
  }

  PrecisionCapGuard guard;
  try {
    if (cfg.precision_bits < 0)
      throw parse_error("--precision-cap must be >= 0");
    if (cfg.precision_bits > 0) Real::set_precision_cap(cfg.precision_bits);
    cfg.t_given = t_opt->count() > 0;

    if (app.got_subcommand(conv)) return cmd_convergents(cfg, out);
    if (app.got_subcommand(approx)) return cmd_approx(cfg, out, err);
    if (app.got_subcommand(verify)) {
      return cmd_verify(
          cfg, verify->got_subcommand(v_origin) ? "origin-floor"
                                                : "target-floor",
          out);
    }
    if (app.got_subcommand(exponents)) return cmd_exponents(cfg, out);
    if (app.got_subcommand(enumerate)) return cmd_enumerate(cfg, out);
    err << "InternalError: no subcommand dispatched\n";
    return 2;
  } catch (const error& e) {
    err << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    err << "InputError: " << e.what() << "\n";
    return 2;
  }
}

} // namespace sl2orbit
