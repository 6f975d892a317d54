#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "gelfand/experiments.hpp"

using namespace gelfand;

namespace {

SweepOptions small(int jobs = 1) {
  SweepOptions o;
  o.intervals = 128;
  o.bisection.tol = 1e-5;
  o.jobs = jobs;
  return o;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_SUITE("experiments") {
  TEST_CASE("FNV-1a reference vectors") {
    CHECK(config_hash("") == "cbf29ce484222325");
    CHECK(config_hash("a") == "af63dc4c8601ec8c");
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
  }

  TEST_CASE("number formatting") {
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(format_number(-0.0) == "0");
    CHECK(format_number(0.0) == "0");
    CHECK(format_number(std::nan("")) == "nan");
    CHECK(format_number(-INFINITY) == "-inf");
    CHECK(std::stod(format_number(std::numbers::pi)) == std::numbers::pi);
  }

  TEST_CASE("sweep over A for a positive profile") {
    const auto r = sweep_A(FlowProfile::inverse_quadratic(), 2, {0.0, 2.0, 5.0},
                           Nonlinearity::exponential(), small());
    REQUIRE(r.rows.size() == 3);
    const auto psi = r.column("psi_max");
    CHECK(psi[0] == doctest::Approx(0.25).epsilon(1e-3));
    CHECK(psi[1] < psi[0]);
    CHECK(r.all_pass());
    CHECK(r.audit.monotonicity_violations == 0);
    CHECK_THROWS_AS(r.column("nope"), std::out_of_range);
  }

  TEST_CASE("amplitudes past the log budget are dropped with a note") {
    const auto r = sweep_A(FlowProfile::constant(-4.0), 2, {0.0, 1000.0},
                           Nonlinearity::exponential(), small());
    CHECK(r.rows.size() == 1);
    REQUIRE_FALSE(r.notes.empty());
    CHECK(r.notes.front().find("1000") != std::string::npos);
  }

  TEST_CASE("thread count does not change results") {
    const std::vector<double> amps{0.0, 1.0, 3.0, 6.0};
    const auto a = sweep_A(FlowProfile::plateau(0.5, 1.0, 1.0), 2, amps,
                           Nonlinearity::mems(2.0), small(1));
    const auto b = sweep_A(FlowProfile::plateau(0.5, 1.0, 1.0), 2, amps,
                           Nonlinearity::mems(2.0), small(3));
    CHECK(a.rows == b.rows);
    std::ostringstream sa, sb;
    write_csv(sa, a, "cfg");
    write_csv(sb, b, "cfg");
    CHECK(sa.str() == sb.str());
  }

  TEST_CASE("p = 1 reproduces the plain exponential interval") {
    const auto nl = Nonlinearity::exponential();
    const auto opts = small();
    const auto r = sweep_p(FlowProfile::constant(0.0), 0.0, 2, nl, {1.0, 2.0}, opts);
    REQUIRE(r.rows.size() == 2);
    ProblemSetup s;
    const auto iv = lambda_star_bisect(s, RadialGrid(2, opts.intervals), opts.bisection);
    CHECK(r.column("lambda_lo")[0] == doctest::Approx(iv.lo).epsilon(1e-12));
    CHECK(r.column("lambda_hi")[0] == doctest::Approx(iv.hi).epsilon(1e-12));
    // target 1 / (f(0) psi_max) = 4
    CHECK(r.column("target")[1] == doctest::Approx(4.0).epsilon(1e-3));
  }

  TEST_CASE("branch scan columns") {
    ProblemSetup s;
    const auto r = branch_scan(s, {0.5, 0.25}, small());
    REQUIRE(r.rows.size() == 2);
    const auto frac = r.column("fraction");
    CHECK(frac[0] == 0.25);
    CHECK(frac[1] == 0.5);
    // F^{-1}(F_total / 2) = ln 2 for e^t
    CHECK(r.column("uniform_bound")[1] == doctest::Approx(std::numbers::ln2).epsilon(1e-12));
    const auto err = r.column("torsion_error");
    CHECK(err[0] < err[1]);
    CHECK(r.all_pass());
  }

  TEST_CASE("csv layout") {
    ProblemSetup s;
    const auto r = branch_scan(s, {0.5}, small());
    std::ostringstream os;
    write_csv(os, r, "{\"x\":1}");
    const auto ls = lines(os.str());
    REQUIRE(ls.size() >= 4);
    CHECK(ls[0] == "# config-hash: " + config_hash("{\"x\":1}"));
    CHECK(ls[1] == "# config: {\"x\":1}");
    std::size_t header = 0;
    while (header < ls.size() && ls[header].rfind("#", 0) == 0) ++header;
    REQUIRE(header + 2 == ls.size());
    CHECK(ls[header].rfind("lambda,u_max", 0) == 0);
    const auto commas = [](const std::string& l) { return std::count(l.begin(), l.end(), ','); };
    CHECK(commas(ls[header]) == commas(ls[header + 1]));
  }
}
