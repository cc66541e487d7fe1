#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sl2orbit/cli.hpp"
#include "sl2orbit/contfrac.hpp"
#include "sl2orbit/real.hpp"

#include <json.hpp>

#include <sstream>
#include <string>
#include <vector>

using namespace sl2orbit;
using nlohmann::json;

namespace {

struct CliOut {
  int code = 0;
  std::string out, err;
};

CliOut run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  CliOut r;
  r.code = run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

long count_of(const std::string& hay, const std::string& needle) {
  long n = 0;
  for (std::size_t pos = hay.find(needle); pos != std::string::npos;
       pos = hay.find(needle, pos + needle.size()))
    ++n;
  return n;
}

const char* kGoldenNeg = "surd:(1-1*sqrt(5))/2";
const char* kSignedTarget = "1,surd:(1+1*sqrt(5))/2";

} // namespace

TEST_CASE("convergents command prints the error window") {
  SUBCASE("table rows carry digits, fractions, signs, and bounds") {
    CliOut r = run_cli({"convergents", "--n", "6"});
    CHECK(r.code == 0);
    CHECK(r.err.empty());
    CHECK(contains(r.out, "slope ~ 0.61803398875"));
    CHECK(contains(r.out,
                   "k=6 a=1 p=8 q=13 sign=+ lower=1/42 upper=1/21"));
    CHECK(count_of(r.out, "k=") == 7);
  }
  SUBCASE("csv output is the library emission, byte for byte") {
    CliOut r = run_cli({"convergents", "--n", "6", "--format", "csv"});
    CHECK(r.code == 0);
    ContinuedFraction cf(parse_real("surd:(-1+1*sqrt(5))/2"));
    CHECK(r.out == cf.csv(6));
  }
  SUBCASE("periodic digit form and closed form agree byte for byte") {
    CliOut surd = run_cli({"convergents", "--n", "10", "--format", "csv"});
    CliOut cf = run_cli({"convergents", "--xi", "cf:[0;1]repeat:[1]", "--n",
                         "10", "--format", "csv"});
    CHECK(surd.code == 0);
    CHECK(cf.code == 0);
    CHECK(surd.out == cf.out);
  }
  SUBCASE("json output parses and matches the table") {
    CliOut r = run_cli({"convergents", "--n", "6", "--format", "json"});
    CHECK(r.code == 0);
    json doc = json::parse(r.out);
    CHECK(doc["command"] == "convergents");
    CHECK(doc["convergents"].size() == 7);
    CHECK(doc["convergents"][6]["p"] == "8");
    CHECK(doc["convergents"][6]["q"] == "13");
    CHECK(doc["convergents"][6]["sign"] == "+");
    CHECK(doc["convergents"][6]["lower"] == "1/42");
    CHECK(doc["convergents"][5]["sign"] == "-");
  }
  SUBCASE("a rational slope is rejected with the input exit code") {
    CliOut r = run_cli({"convergents", "--xi", "rat:22/7"});
    CHECK(r.code == 2);
    CHECK(contains(r.err, "RationalInput"));
  }
}

TEST_CASE("approx command drives each construction") {
  SUBCASE("rational-slope ladder over an index range") {
    CliOut r = run_cli({"approx", "--method", "rational", "--y", "1,2",
                        "--k", "6..12"});
    CHECK(r.code == 0);
    CHECK(count_of(r.out, "k=") == 7);
    CHECK(contains(r.out, "norm=238"));
    CHECK(contains(r.out, "norm=5312"));
    CHECK(contains(r.out, "norm=91838"));
    CHECK(contains(r.out, "certs=7/7"));
  }
  SUBCASE("csv rows quote the matrix so the row stays five fields wide") {
    CliOut r = run_cli({"approx", "--method", "rational", "--y", "1,2",
                        "--k", "6", "--format", "csv"});
    CHECK(r.code == 0);
    CHECK(contains(
        r.out, "k,j,ell,norm,gamma,dist,bound_name,bound,certs_passed"));
    CHECK(contains(r.out, "\"[[-115,72],[-238,149]]\""));
  }
  SUBCASE("json results carry passing certificates") {
    CliOut r = run_cli({"approx", "--method", "rational", "--y", "1,2",
                        "--k", "9", "--format", "json"});
    CHECK(r.code == 0);
    json doc = json::parse(r.out);
    REQUIRE(doc["results"].size() == 1);
    const json& row = doc["results"][0];
    CHECK(row["norm"] == "5312");
    CHECK(row["gamma"] == "[[2639,-1630],[5312,-3281]]");
    REQUIRE(row["certificates"].size() > 0);
    for (const json& c : row["certificates"]) CHECK(c["pass"] == true);
  }
  SUBCASE("origin ladder walks the convergent matrices") {
    CliOut r = run_cli({"approx", "--method", "origin", "--k", "2..10"});
    CHECK(r.code == 0);
    CHECK(count_of(r.out, "k=") == 9);
    CHECK(contains(r.out, "norm=55"));
  }
  SUBCASE("origin method refuses a non-origin target") {
    CliOut r = run_cli(
        {"approx", "--method", "origin", "--k", "2", "--y", "1,2"});
    CHECK(r.code == 2);
    CHECK(contains(r.err, "ParseError"));
  }
  SUBCASE("slow-growth driver reaches the deep ladder") {
    CliOut r = run_cli({"approx", "--method", "irrational-small-omega",
                        "--y", "surd:(-1+1*sqrt(2))/1,1", "--j0", "3..4"});
    CHECK(r.code == 0);
    CHECK(count_of(r.out, "k=") == 2);
    CHECK(contains(r.out, "norm=5730701"));
    CHECK(contains(r.out, "norm=700046350"));
  }
  SUBCASE("fast-growth driver reports an empty stream on a slow slope") {
    CliOut r = run_cli({"approx", "--method", "irrational-large-omega",
                        "--y", "surd:(-1+1*sqrt(2))/1,1", "--omega", "5/2",
                        "--k-max", "8"});
    CHECK(r.code == 2);
    CHECK(contains(r.err, "StreamEmpty"));
  }
  SUBCASE("unknown method is a usage error") {
    CliOut r = run_cli({"approx", "--method", "sideways", "--k", "2"});
    CHECK(r.code == 2);
  }
}

TEST_CASE("signed driver reports blocked indices without aborting") {
  SUBCASE("an odd range prints every row and flags the blocked ones") {
    CliOut r = run_cli({"approx", "--method", "signed", "--xi", kGoldenNeg,
                        "--y", kSignedTarget, "--k", "odd 9..21", "--mu",
                        "3/10"});
    CHECK(r.code == 0);
    CHECK(count_of(r.out, "k=") == 7);
    CHECK(count_of(r.out, "status=OK") == 5);
    CHECK(count_of(r.out, "BLOCKED(size-bound)") == 2);
    CHECK(contains(r.out, "k=9 "));
    CHECK(contains(r.out, "norm=522501"));
  }
  SUBCASE("a range with no qualifying index exits with the retry code") {
    CliOut r = run_cli({"approx", "--method", "signed", "--xi", kGoldenNeg,
                        "--y", kSignedTarget, "--k", "3", "--mu", "3/10"});
    CHECK(r.code == 2);
    CHECK(contains(r.err, "BoundNotYetReached"));
    CHECK(contains(r.out, "status=BLOCKED"));
  }
  SUBCASE("an even index is rejected by the construction") {
    CliOut r = run_cli({"approx", "--method", "signed", "--xi", kGoldenNeg,
                        "--y", kSignedTarget, "--k", "4", "--mu", "3/10"});
    CHECK(r.code == 2);
    CHECK(contains(r.err, "EvenK"));
  }
}

TEST_CASE("verify commands run the exhaustive floor checks") {
  SUBCASE("origin floor at one index") {
    CliOut r = run_cli({"verify", "origin-floor", "--k", "6"});
    CHECK(r.code == 0);
    CHECK(contains(r.out, "ball=10"));
    CHECK(contains(r.out, "examined=1012"));
    CHECK(contains(r.out, "certified floor = 1/26"));
    CHECK(contains(r.out, "gamma=[[5,-3],[-8,5]]"));
    CHECK(contains(r.out, "result: PASS"));
  }
  SUBCASE("origin floor accepts an index range") {
    CliOut r = run_cli({"verify", "origin-floor", "--k", "4..6"});
    CHECK(r.code == 0);
    CHECK(count_of(r.out, "result: PASS") == 3);
    CHECK(contains(r.out, "certified floor = 1/10"));
    CHECK(contains(r.out, "certified floor = 1/16"));
  }
  SUBCASE("target floor reproduces the deep exhaustive instance") {
    CliOut r = run_cli({"verify", "target-floor", "--k", "6", "--y", "1,2"});
    CHECK(r.code == 0);
    CHECK(contains(r.out, "ball=136"));
    CHECK(contains(r.out, "examined=180276"));
    CHECK(contains(r.out, "certified floor = 1/104"));
    CHECK(contains(r.out, "gamma=[[47,-28],[89,-53]]"));
  }
  SUBCASE("target floor below its precondition is an input error") {
    CliOut r = run_cli({"verify", "target-floor", "--k", "4", "--y", "1,2"});
    CHECK(r.code == 2);
    CHECK(contains(r.err, "PreconditionFailed"));
  }
  SUBCASE("target floor without a target is an input error") {
    CliOut r = run_cli({"verify", "target-floor", "--k", "6"});
    CHECK(r.code == 2);
  }
  SUBCASE("json output carries the certificates") {
    CliOut r = run_cli(
        {"verify", "origin-floor", "--k", "5", "--format", "json"});
    CHECK(r.code == 0);
    json doc = json::parse(r.out);
    CHECK(doc["pass"] == true);
    REQUIRE(doc["results"].size() == 1);
    CHECK(doc["results"][0]["examined"] == "372");
    CHECK(doc["results"][0]["floor"] == "1/16");
    CHECK(doc["results"][0]["certificates"].size() == 2);
  }
  SUBCASE("a cap below the ball radius stops the scan") {
    CliOut r = run_cli(
        {"verify", "origin-floor", "--k", "8", "--oracle-cap", "5"});
    CHECK(r.code == 2);
    CHECK(contains(r.err, "CapExceeded"));
  }
}

TEST_CASE("exponents command estimates and predicts") {
  SUBCASE("survey source matches the deep frozen estimates") {
    CliOut r = run_cli({"exponents", "--y", "1,2", "--T", "10000",
                        "--format", "json"});
    CHECK(r.code == 0);
    json doc = json::parse(r.out);
    CHECK(doc["source"] == "survey");
    CHECK(doc["records"].size() == 7);
    CHECK(doc["estimate"]["mu"].get<double>() ==
          doctest::Approx(0.6457).epsilon(1e-3));
    CHECK(doc["estimate"]["mu_hat"].get<double>() ==
          doctest::Approx(0.5287).epsilon(1e-3));
    CHECK(doc["estimate"]["mu_argmax_norm"] == "1885");
    CHECK(doc["theory"]["kind"] == "rational-slope");
    CHECK(doc["theory"]["mu"] == "1/2");
    CHECK(doc["theory"]["mu_hat"] == "1/2");
    CHECK(doc["theory"]["comparison"] == "equalities");
  }
  SUBCASE("oracle source at the origin classifies and estimates") {
    CliOut r = run_cli({"exponents", "--source", "oracle", "--T", "100",
                        "--format", "json"});
    CHECK(r.code == 0);
    json doc = json::parse(r.out);
    CHECK(doc["source"] == "oracle");
    CHECK(doc["records"].size() == 10);
    CHECK(doc["estimate"]["mu"].get<double>() ==
          doctest::Approx(1.0917).epsilon(1e-3));
    CHECK(doc["estimate"]["mu_hat"].get<double>() ==
          doctest::Approx(0.9683).epsilon(1e-3));
    CHECK(doc["theory"]["kind"] == "origin");
    CHECK(doc["theory"]["mu"] == "1");
    CHECK(doc["theory"]["mu_hat"] == "1");
  }
  SUBCASE("irrational targets get floor predictions") {
    CliOut r = run_cli({"exponents", "--y", "surd:(-1+1*sqrt(2))/1,1",
                        "--T", "500", "--format", "json"});
    CHECK(r.code == 0);
    json doc = json::parse(r.out);
    CHECK(doc["theory"]["kind"] == "irrational-slope");
    CHECK(doc["theory"]["mu"] == "1/3");
    CHECK(doc["theory"]["mu_hat"] == "1/3");
    CHECK(doc["theory"]["comparison"] == "lower-bounds");
  }
  SUBCASE("a tiny budget is not enough data") {
    CliOut r = run_cli({"exponents", "--T", "4"});
    CHECK(r.code == 5);
    CHECK(contains(r.err, "InsufficientData"));
  }
  SUBCASE("csv rows label records, grid points, and estimates") {
    CliOut r = run_cli(
        {"exponents", "--y", "1,2", "--T", "200", "--format", "csv"});
    CHECK(r.code == 0);
    CHECK(contains(r.out, "kind,n,distance,exponent"));
    CHECK(contains(r.out, "record,89,0.0475974712451,"));
    CHECK(contains(r.out, "grid,200,"));
    CHECK(contains(r.out, "estimate-mu,"));
    CHECK(contains(r.out, "estimate-mu-hat,200,,"));
  }
  SUBCASE("emission is byte-stable across runs") {
    std::vector<std::string> args = {"exponents", "--y", "1,2",
                                     "--T", "2000", "--format", "json"};
    CliOut a = run_cli(args);
    CliOut b = run_cli(args);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    args.back() = "csv";
    CliOut c = run_cli(args);
    CliOut d = run_cli(args);
    CHECK(c.code == 0);
    CHECK(c.out == d.out);
  }
}

TEST_CASE("enumerate command lists and counts the norm ball") {
  SUBCASE("count of the unit ball") {
    CliOut r = run_cli({"enumerate", "--T", "1", "--count-only"});
    CHECK(r.code == 0);
    CHECK(contains(r.out, "matrices with norm <= 1: 20"));
  }
  SUBCASE("csv listing has one row per matrix plus a header") {
    CliOut r = run_cli({"enumerate", "--T", "1", "--format", "csv"});
    CHECK(r.code == 0);
    CHECK(count_of(r.out, "\n") == 21);
    CHECK(contains(r.out, "v1,u1,v2,u2,norm"));
    CHECK(contains(r.out, "1,0,0,1,1"));
  }
  SUBCASE("json listing carries the count") {
    CliOut r = run_cli({"enumerate", "--T", "2", "--format", "json"});
    CHECK(r.code == 0);
    json doc = json::parse(r.out);
    CHECK(doc["count"] == "52");
    CHECK(doc["matrices"].size() == 52);
  }
  SUBCASE("the budget is mandatory") {
    CliOut r = run_cli({"enumerate"});
    CHECK(r.code == 2);
  }
  SUBCASE("a budget past the cap is rejected") {
    CliOut r = run_cli({"enumerate", "--T", "20000", "--count-only"});
    CHECK(r.code == 2);
    CHECK(contains(r.err, "CapExceeded"));
  }
}

TEST_CASE("usage surface behaves like a well-mannered tool") {
  SUBCASE("help exits cleanly") {
    CliOut r = run_cli({"--help"});
    CHECK(r.code == 0);
    CHECK(contains(r.out, "Usage: sl2orbit"));
  }
  SUBCASE("a bare invocation asks for a subcommand") {
    CliOut r = run_cli({});
    CHECK(r.code == 2);
  }
  SUBCASE("an unknown flag is a usage error") {
    CliOut r = run_cli({"convergents", "--frobnicate"});
    CHECK(r.code == 2);
  }
  SUBCASE("an inverted range is rejected") {
    CliOut r = run_cli({"approx", "--method", "origin", "--k", "6..4"});
    CHECK(r.code == 2);
    CHECK(contains(r.err, "empty range"));
  }
  SUBCASE("a parity-tagged single index must match the parity") {
    CliOut r = run_cli({"approx", "--method", "origin", "--k", "even 3"});
    CHECK(r.code == 2);
    CHECK(contains(r.err, "parity"));
  }
  SUBCASE("the precision cap flag is accepted and restored") {
    long before = Real::precision_cap();
    CliOut r = run_cli(
        {"verify", "origin-floor", "--k", "4", "--precision-cap", "256"});
    CHECK(r.code == 0);
    CHECK(Real::precision_cap() == before);
  }
  SUBCASE("global flags may come before the subcommand") {
    CliOut r = run_cli({"--format", "csv", "convergents", "--n", "2"});
    CHECK(r.code == 0);
    CHECK(contains(r.out, "k,p,q,sign_eps"));
  }
}
