#include <doctest.h>

#include <cmath>
#include <random>

#include "gelfand/errors.hpp"
#include "gelfand/nonlinearity.hpp"

using namespace gelfand;

namespace {

// Composite Simpson with a fixed panel count; independent of the library.
template <class F>
double simpson(F f, double a, double b, int panels = 20000) {
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

}  // namespace

TEST_SUITE("nonlinearity") {
  TEST_CASE("sup t/f matches the calculus maximizer") {
    // d/dt [t/f] = 0  <=>  f = t f'
    const auto e = Nonlinearity::exponential().sup_ratio();
    CHECK(e.argmax == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(e.value == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));

    for (double p : {1.5, 2.0, 3.0}) {
      const double t = 1.0 / (p - 1.0);
      const auto s = Nonlinearity::power(p).sup_ratio();
      CHECK(s.argmax == doctest::Approx(t).epsilon(1e-7));
      CHECK(s.value == doctest::Approx(t / std::pow(1.0 + t, p)).epsilon(1e-12));
    }

    for (double qq : {2.0, 3.0}) {
      const double t = 1.0 / (1.0 + qq);
      const auto s = Nonlinearity::mems(qq).sup_ratio();
      CHECK(s.argmax == doctest::Approx(t).epsilon(1e-7));
      CHECK(s.value == doctest::Approx(t * std::pow(1.0 - t, qq)).epsilon(1e-12));
    }

    // t exp(-t^p) peaks at t = p^(-1/p).
    for (double p : {2.0, 4.0}) {
      const double t = std::pow(p, -1.0 / p);
      const auto s = Nonlinearity::exponential().compose_power(p).sup_ratio();
      CHECK(s.argmax == doctest::Approx(t).epsilon(1e-7));
      CHECK(s.value == doctest::Approx(t * std::exp(-std::pow(t, p))).epsilon(1e-10));
    }
  }

  TEST_CASE("linear power has an unattained supremum") {
    const auto s = Nonlinearity::power(1.0).sup_ratio();
    CHECK_FALSE(s.attained);
    CHECK(s.value == doctest::Approx(1.0).epsilon(1e-6));
  }

  TEST_CASE("F agrees with direct quadrature of 1/f") {
    const Nonlinearity kinds[] = {Nonlinearity::exponential(), Nonlinearity::power(2.5),
                                  Nonlinearity::mems(2.0),
                                  Nonlinearity::exponential().compose_power(3.0)};
    for (const auto& nl : kinds) {
      for (double t : {0.1, 0.5, 0.9}) {
        const double ref = simpson([&](double s) { return 1.0 / nl.f(s); }, 0.0, t);
        CHECK(nl.F(t) == doctest::Approx(ref).epsilon(1e-9));
      }
    }
  }

  TEST_CASE("F(a_f) totals") {
    CHECK(Nonlinearity::exponential().F_total() == doctest::Approx(1.0));
    CHECK(Nonlinearity::mems(2.0).F_total() == doctest::Approx(1.0 / 3.0));
    CHECK(Nonlinearity::power(3.0).F_total() == doctest::Approx(0.5));
    CHECK(std::isinf(Nonlinearity::power(1.0).F_total()));
    // int_0^inf exp(-t^p) dt = Gamma(1 + 1/p)
    for (double p : {2.0, 4.0, 8.0}) {
      CHECK(Nonlinearity::exponential().compose_power(p).F_total() ==
            doctest::Approx(std::tgamma(1.0 + 1.0 / p)).epsilon(1e-9));
    }
  }

  TEST_CASE("properties on random samples") {
    std::mt19937_64 rng(20240611);
    const Nonlinearity kinds[] = {Nonlinearity::exponential(), Nonlinearity::power(2.0),
                                  Nonlinearity::mems(2.0),
                                  Nonlinearity::exponential().compose_power(2.0)};
    for (const auto& nl : kinds) {
      // Keep F well conditioned: F flattens once 1/f is negligible.
      const double end = nl.is_singular() ? 0.999
                         : nl.kind() == NonlinearityKind::kPowerComposite ? 2.5 : 6.0;
      std::uniform_real_distribution<double> pick(0.0, end);
      const auto sup = nl.sup_ratio();
      for (int k = 0; k < 200; ++k) {
        const double t = pick(rng);
        const double s = pick(rng);
        INFO(nl.name(), " t=", t);
        CHECK(nl.F_inverse(nl.F(t)) == doctest::Approx(t).epsilon(1e-9));
        CHECK(t / nl.f(t) <= sup.value * (1.0 + 1e-12));
        // convexity: f at the midpoint lies under the chord
        CHECK(nl.f(0.5 * (t + s)) <= 0.5 * (nl.f(t) + nl.f(s)) * (1.0 + 1e-12));
        const double h = 1e-6 * std::max(1.0, t);
        if (t > h && t + h < end) {
          CHECK(nl.fprime(t) ==
                doctest::Approx((nl.f(t + h) - nl.f(t - h)) / (2 * h)).epsilon(1e-5));
        }
      }
    }
  }

  TEST_CASE("inf f/t is the reciprocal supremum") {
    const auto g = Nonlinearity::exponential().inf_growth();
    CHECK(g.value == doctest::Approx(std::exp(1.0)).epsilon(1e-10));
  }

  TEST_CASE("domain checks") {
    CHECK_THROWS_AS(Nonlinearity::exponential().f(-1.0), DomainError);
    CHECK_THROWS_AS(Nonlinearity::mems(2.0).f(1.0), DomainError);
    CHECK_THROWS_AS(Nonlinearity::mems(0.5), DomainError);
    CHECK_THROWS_AS(Nonlinearity::power(0.5), DomainError);
    CHECK_THROWS_AS(Nonlinearity::mems(2.0).compose_power(2.0), DomainError);
    CHECK_THROWS_AS(Nonlinearity::exponential().compose_power(0.5), DomainError);
    CHECK(Nonlinearity::mems(2.0).F_inverse(1.0 / 3.0) == doctest::Approx(1.0));
  }
}
