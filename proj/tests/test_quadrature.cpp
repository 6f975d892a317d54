#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gelfand/errors.hpp"
#include "gelfand/quadrature.hpp"

using namespace gelfand;
namespace q = gelfand::quadrature;

TEST_SUITE("quadrature") {
  TEST_CASE("simpson integrates smooth functions") {
    CHECK(q::adaptive_simpson([](double x) { return std::sin(x); }, 0.0, std::numbers::pi) ==
          doctest::Approx(2.0).epsilon(1e-12));
    CHECK(q::adaptive_simpson([](double x) { return std::exp(x); }, 0.0, 1.0) ==
          doctest::Approx(std::numbers::e - 1.0).epsilon(1e-12));
    CHECK(q::adaptive_simpson([](double x) { return std::pow(x, 7); }, 0.0, 2.0) ==
          doctest::Approx(32.0).epsilon(1e-9));
  }

  TEST_CASE("simpson handles an integrable endpoint singularity") {
    // int_0^1 x^{-1/2} dx = 2
    const double v = q::adaptive_simpson([](double x) { return x > 0 ? 1.0 / std::sqrt(x) : 0.0; },
                                         0.0, 1.0, {1e-10, 1e-300, 60});
    CHECK(v == doctest::Approx(2.0).epsilon(1e-4));
  }

  TEST_CASE("golden section finds interior and endpoint maxima") {
    auto m = q::golden_section_max([](double x) { return -(x - 0.3) * (x - 0.3); }, 0.0, 1.0);
    CHECK(m.argument == doctest::Approx(0.3).epsilon(1e-7));
    auto e = q::golden_section_max([](double x) { return x; }, 0.0, 1.0);
    CHECK(e.argument == doctest::Approx(1.0));
  }

  TEST_CASE("bisection root and missing sign change") {
    CHECK(q::bisect_root([](double x) { return x * x - 2.0; }, 0.0, 2.0) ==
          doctest::Approx(std::numbers::sqrt2).epsilon(1e-14));
    CHECK_THROWS_AS(q::bisect_root([](double x) { return x * x + 1.0; }, 0.0, 2.0), DomainError);
  }
}
