#include <doctest.h>

#include <cmath>
#include <numbers>
#include <variant>

#include "gelfand/extremal.hpp"

using namespace gelfand;

TEST_SUITE("extremal") {
  TEST_CASE("planar Liouville extremal value is 2") {
    ProblemSetup s;
    const auto iv = lambda_star_bisect(s, RadialGrid(2, 1024), {1e-7});
    CHECK(iv.lo <= iv.hi);
    CHECK(iv.lo == doctest::Approx(2.0).epsilon(1e-4));
    CHECK(iv.hi == doctest::Approx(2.0).epsilon(1e-4));
    CHECK(iv.witness.converged);
    CHECK(iv.audit.monotonicity_violations == 0);
  }

  TEST_CASE("bounds for the planar Laplacian") {
    ProblemSetup s;
    BoundsOptions o;
    o.intervals = 1024;
    o.bisect = false;
    const auto b = bounds_report(s, o);
    const double j0 = 2.404825557695773;
    CHECK(b.psi_max == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(b.lower_basic == doctest::Approx(4.0 / std::numbers::e).epsilon(1e-9));
    CHECK(b.upper_F == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(b.upper_mu1 == doctest::Approx(j0 * j0 / std::numbers::e).epsilon(1e-5));
    CHECK(b.t_hat == doctest::Approx(1.0).epsilon(1e-7));
  }

  TEST_CASE("lambda(alpha) maximum against a closed form") {
    // psi = (1 - r^2)/4, f = e^t: beta(alpha) = 1/4 on [0, 4), so
    // lambda(alpha) = alpha - alpha^2/4 peaks at alpha = 2 with value 1.
    const auto tp = torsion(FlowProfile::constant(0.0), 0.0, 2, 1024);
    const auto nl = Nonlinearity::exponential();
    for (double a : {0.3, 1.0, 2.0, 3.5}) {
      CHECK(beta_of_alpha(tp, nl, a) == doctest::Approx(0.25).epsilon(1e-10));
      CHECK(lambda_of_alpha(tp, nl, a) == doctest::Approx(a - a * a / 4).epsilon(1e-10));
    }
    const auto m = maximize_lambda_of_alpha(tp, nl, 128);
    CHECK(m.alpha == doctest::Approx(2.0).epsilon(1e-5));
    CHECK(m.value == doctest::Approx(1.0).epsilon(1e-9));
  }

  TEST_CASE("lambda(alpha) maximum against brute force") {
    const auto tp = torsion(FlowProfile::inverse_quadratic(), 1.0, 2, 1024);
    const auto nl = Nonlinearity::mems(2.0);
    const double end = nl.F_total() / tp.psi_max;
    double best = 0.0;
    for (int k = 1; k < 20000; ++k) {
      best = std::max(best, lambda_of_alpha(tp, nl, end * k / 20000.0));
    }
    const auto m = maximize_lambda_of_alpha(tp, nl, 128);
    CHECK(m.value >= best * (1 - 1e-9));
    CHECK(m.value == doctest::Approx(best).epsilon(1e-6));
  }

  TEST_CASE("pointwise bounds hold along the branch") {
    ProblemSetup s;
    s.profile = FlowProfile::inverse_quadratic();
    s.amplitude = 1.0;
    const RadialGrid g(2, 512);
    const auto iv = lambda_star_bisect(s, g, {1e-6});
    const auto op = assemble(s.profile, s.amplitude, g);
    const auto tp = torsion(s.profile, s.amplitude, 2, 512);
    for (double frac : {0.2, 0.6, 0.9}) {
      const auto out = minimal_solution(op, s.nonlinearity, frac * iv.lo);
      REQUIRE(std::holds_alternative<BranchPoint>(out));
      for (const auto& v : verify_pointwise(std::get<BranchPoint>(out), tp, s.nonlinearity, iv.hi)) {
        INFO(v.name, " fraction ", frac, " margin ", v.worst_margin);
        if (v.applicable) CHECK(v.pass);
      }
    }
  }

  TEST_CASE("sandwich ordering") {
    ProblemSetup s;
    s.profile = FlowProfile::inverse_quadratic();
    s.amplitude = 1.0;
    BoundsOptions o;
    o.intervals = 512;
    const auto b = bounds_report(s, o);
    REQUIRE(b.has_interval);
    CHECK(b.sandwich_ok);
    CHECK(b.lower_basic <= b.lambda_star.hi);
    CHECK(b.lower_alpha <= b.lambda_star.hi);
    CHECK(b.lambda_star.lo <= b.upper_F);
  }

  TEST_CASE("linearization near the extremal value") {
    ProblemSetup s;
    const auto iv = lambda_star_bisect(s, RadialGrid(2, 256), {1e-8});
    const auto fv = fprime_extremal_check(iv.witness, s.nonlinearity);
    CHECK(fv.inf_growth == doctest::Approx(std::numbers::e).epsilon(1e-9));
    CHECK(fv.max_fprime > 1.0);
    CHECK(std::isfinite(iv.witness.kappa1));
    CHECK(iv.witness.kappa1 < 0.1);
  }

  TEST_CASE("a one-step budget still returns an ordered interval") {
    ProblemSetup s;
    BisectionOptions o;
    o.max_steps = 1;
    const auto iv = lambda_star_bisect(s, RadialGrid(2, 128), o);
    CHECK(iv.lo < iv.hi);
  }
}
