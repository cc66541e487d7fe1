#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "sl2orbit/errors.hpp"
#include "sl2orbit/sl2.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <tuple>
#include <vector>

using sl2orbit::apply;
using sl2orbit::collect_norm_bounded;
using sl2orbit::count_norm_bounded;
using sl2orbit::DecompositionScale;
using sl2orbit::enumerate_norm_bounded;
using sl2orbit::enumeration_csv;
using sl2orbit::factorize;
using sl2orbit::factorize_certified;
using sl2orbit::Mat;
using sl2orbit::parse_real;
using sl2orbit::PlanePoint;
using sl2orbit::Real;
using sl2orbit::residual;

namespace {

PlanePoint golden_point() {
  return PlanePoint{parse_real("surd:(-1+1*sqrt(5))/2"), Real(1)};
}

using Row = std::array<long, 4>; // v1, u1, v2, u2

Row row_of(const Mat& m) {
  return Row{m.v1.get_si(), m.u1.get_si(), m.v2.get_si(), m.u2.get_si()};
}

} // namespace

TEST_CASE("generator relations") {
  Mat J = Mat::gen_rotation(), U = Mat::gen_shear();
  Mat minus_id(-1, 0, 0, -1);
  CHECK(J * J == minus_id);
  Mat JU = J * U;
  CHECK(JU * JU * JU == minus_id);
  CHECK(Mat::shear_pow(3) == Mat(1, 3, 0, 1));
  CHECK(Mat::shear_pow(-2) * Mat::shear_pow(2) == Mat::identity());
  CHECK(J.inverse() * J == Mat::identity());
}

TEST_CASE("matrix text round-trip and validation") {
  Mat m(5, -3, -8, 5);
  CHECK(m.str() == "[[5,-3],[-8,5]]");
  CHECK(Mat::parse("[[5,-3],[-8,5]]") == m);
  CHECK(Mat::parse(" [[ 5, -3 ], [ -8, 5 ]] ") == m);
  CHECK(m.norm() == 8);
  CHECK((-m).norm() == 8);
  CHECK((-m).det() == 1);
  CHECK_THROWS_AS(Mat(1, 1, 1, 1), sl2orbit::parse_error);
  CHECK_THROWS_AS(Mat::parse("[[1,0],[0,2]]"), sl2orbit::parse_error);
  CHECK_THROWS_AS(Mat::parse("nonsense"), sl2orbit::parse_error);
}

TEST_CASE("plane action is exact") {
  PlanePoint x = golden_point();
  PlanePoint same = apply(Mat::identity(), x);
  CHECK((same.x1 - x.x1).sign() == 0);
  CHECK((same.x2 - x.x2).sign() == 0);

  PlanePoint jx = apply(Mat::gen_rotation(), x);
  CHECK((jx.x1 + x.x2).sign() == 0); // (-x2, x1)
  CHECK((jx.x2 - x.x1).sign() == 0);
  CHECK((jx.sup_norm() - x.sup_norm()).sign() == 0);

  // [[2,-1],[-1,1]] sends (xi, 1) to (2xi - 1, 1 - xi)
  Mat m2(2, -1, -1, 1);
  PlanePoint out = apply(m2, x);
  CHECK(out.x1.to_double() == doctest::Approx(0.2360679775).epsilon(1e-9));
  CHECK(out.x2.to_double() == doctest::Approx(0.3819660113).epsilon(1e-9));
}

TEST_CASE("norm-1 stream is exactly the frozen order") {
  const std::vector<Row> expected = {
      {-1, 0, -1, -1}, {0, 1, -1, -1}, {-1, 1, -1, 0}, {0, 1, -1, 0},
      {1, 1, -1, 0},   {0, 1, -1, 1},  {1, 0, -1, 1},  {-1, -1, 0, -1},
      {-1, 0, 0, -1},  {-1, 1, 0, -1}, {1, -1, 0, 1},  {1, 0, 0, 1},
      {1, 1, 0, 1},    {-1, 0, 1, -1}, {0, -1, 1, -1}, {-1, -1, 1, 0},
      {0, -1, 1, 0},   {1, -1, 1, 0},  {0, -1, 1, 1},  {1, 0, 1, 1}};
  std::vector<Row> got;
  for (const Mat& m : collect_norm_bounded(1)) got.push_back(row_of(m));
  CHECK(got == expected);
}

TEST_CASE("norm-1 stream equals the direct 81-pattern scan") {
  std::set<Row> direct;
  for (long a = -1; a <= 1; ++a)
    for (long b = -1; b <= 1; ++b)
      for (long c = -1; c <= 1; ++c)
        for (long d = -1; d <= 1; ++d)
          if (a * d - b * c == 1) direct.insert(Row{a, b, c, d});
  std::set<Row> streamed;
  for (const Mat& m : collect_norm_bounded(1)) streamed.insert(row_of(m));
  CHECK(streamed == direct);
  CHECK(direct.size() == 20);
}

TEST_CASE("stream counts, uniqueness, determinant, and negation closure") {
  const std::pair<long, long> counts[] = {{1, 20}, {2, 52}, {3, 116}, {5, 308}, {8, 692}};
  for (auto [T, expected] : counts) {
    std::set<Row> seen;
    long n = 0;
    enumerate_norm_bounded(T, [&](const Mat& m) {
      ++n;
      CHECK(m.det() == 1);
      CHECK(m.norm() <= T);
      seen.insert(row_of(m));
    });
    CHECK(n == expected);
    CHECK(static_cast<long>(seen.size()) == expected); // no duplicates
    CHECK(count_norm_bounded(T) == expected);
    for (const Row& r : seen) {
      CHECK(seen.count(Row{-r[0], -r[1], -r[2], -r[3]}) == 1);
    }
  }
}

TEST_CASE("streams nest: larger bound filtered equals smaller bound") {
  std::vector<Row> small;
  for (const Mat& m : collect_norm_bounded(2)) small.push_back(row_of(m));
  std::vector<Row> filtered;
  for (const Mat& m : collect_norm_bounded(5)) {
    if (m.norm() <= 2) filtered.push_back(row_of(m));
  }
  std::sort(small.begin(), small.end());
  std::sort(filtered.begin(), filtered.end());
  CHECK(small == filtered);
}

TEST_CASE("inverse action restores the point exactly") {
  PlanePoint x = golden_point();
  for (const Mat& m : collect_norm_bounded(2)) {
    PlanePoint back = apply(m.inverse(), apply(m, x));
    CHECK((back.x1 - x.x1).sign() == 0);
    CHECK((back.x2 - x.x2).sign() == 0);
  }
}

TEST_CASE("cross-determinant identities hold for every matrix") {
  // For x = (xi, 1) and any target (y1, y2), with (L1, L2) = gamma x - y:
  //   v1 y2 - v2 y1 = 1 + L1 v2 - L2 v1
  //   u1 y2 - u2 y1 = -xi + L1 u2 - L2 u1
  PlanePoint x = golden_point();
  PlanePoint y{Real(1), Real(2)};
  for (const Mat& g : collect_norm_bounded(3)) {
    auto [l1, l2] = residual(g, x, y);
    Real lhs1 = Real(g.v1) * y.x2 - Real(g.v2) * y.x1;
    Real rhs1 = Real(1) + l1 * Real(g.v2) - l2 * Real(g.v1);
    CHECK((lhs1 - rhs1).sign() == 0);
    Real lhs2 = Real(g.u1) * y.x2 - Real(g.u2) * y.x1;
    Real rhs2 = -x.x1 + l1 * Real(g.u2) - l2 * Real(g.u1);
    CHECK((lhs2 - rhs2).sign() == 0);
  }
}

TEST_CASE("plain factorization round-trips") {
  Mat N(1, 0, 2, 1);
  Mat M(13, -8, -8, 5);
  for (const Mat& g : collect_norm_bounded(2)) {
    auto f = factorize(g, N, M);
    CHECK(f.N * f.G * f.M == g);
  }
}

TEST_CASE("certified factorization on the frozen instance") {
  Mat gamma(-123, 77, -254, 159);
  Mat N(1, 0, 2, 1);
  Mat M(13, -8, -8, 5);
  DecompositionScale scale;
  scale.x = golden_point();
  scale.y = PlanePoint{Real(1), Real(2)};
  scale.T = 136;
  scale.mu = mpq_class(1, 4);
  scale.q_km1 = 8;
  scale.q_k = 13;
  scale.q_kp1 = 21;
  scale.s_j = 2;

  auto f = factorize_certified(gamma, N, M, scale);
  CHECK(f.G == Mat(1, 17, 0, 1));
  CHECK(f.N * f.G * f.M == gamma);
  for (const auto& c : f.certificates) CHECK(c.pass);
  CHECK(f.certificates.size() == 6);
  // display bounds: c = 20 exactly, T^(3/4) rounded up to 40, T^(1/4)
  // rounded down to 3
  CHECK(f.B1 == mpq_class(1600, 13));
  CHECK(f.B2 == mpq_class(520, 3));
  CHECK(mpq_class(1) <= f.B1);  // column 1 sup-norm is 1
  CHECK(mpq_class(17) <= f.B2); // column 2 sup-norm is 17
}

TEST_CASE("certified factorization rejects a broken scale window") {
  Mat gamma(-123, 77, -254, 159);
  Mat N(1, 0, 2, 1);
  Mat M(13, -8, -8, 5);
  DecompositionScale scale;
  scale.x = golden_point();
  scale.y = PlanePoint{Real(1), Real(2)};
  scale.T = 5000; // outside [q5 q6, q6 q7] = [104, 273]
  scale.mu = mpq_class(1, 4);
  scale.q_km1 = 8;
  scale.q_k = 13;
  scale.q_kp1 = 21;
  scale.s_j = 2;
  CHECK_THROWS_AS(factorize_certified(gamma, N, M, scale),
                  sl2orbit::bound_violated_error);
  try {
    factorize_certified(gamma, N, M, scale);
  } catch (const sl2orbit::error& e) {
    CHECK(e.exit_code() == 4);
    CHECK(std::string(e.what()).find("scale-window") != std::string::npos);
  }
}

TEST_CASE("enumeration CSV has header plus one row per matrix") {
  std::string csv = enumeration_csv(1);
  CHECK(csv.rfind("v1,u1,v2,u2,norm\n", 0) == 0);
  long rows = std::count(csv.begin(), csv.end(), '\n');
  CHECK(rows == 21);
  CHECK(csv.find("-1,0,-1,-1,1\n") != std::string::npos);
}
