#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gelfand/errors.hpp"
#include "gelfand/radial_flow.hpp"

using namespace gelfand;

namespace {

template <class F>
double simpson(F f, double a, double b, int panels) {
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

// psi(0) for rho = c by two nested Simpson rules over exp(A c (s^2 - t^2) / 2).
double constant_psi_max(double c, double A, int N) {
  auto inner = [&](double t) {
    if (t == 0.0) return 0.0;
    return simpson([&](double s) {
      return std::pow(s / t, N - 1) * std::exp(A * c * (s * s - t * t) / 2.0);
    }, 0.0, t, 1000);
  };
  return simpson(inner, 0.0, 1.0, 1000);
}

}  // namespace

TEST_SUITE("radial_flow") {
  TEST_CASE("log weight of the inverse quadratic is ln(1 + r^2)") {
    const auto p = FlowProfile::inverse_quadratic();
    for (double r : {0.0, 0.25, 0.6, 1.0}) {
      CHECK(p.log_weight(r) == doctest::Approx(std::log1p(r * r)).epsilon(1e-12));
    }
  }

  TEST_CASE("log weight equals quadrature of s rho(s)") {
    const auto plateau = FlowProfile::plateau(0.3, 0.7, 2.0);
    // Jumps at 0.3 and 0.7; integrate the pieces.
    CHECK(plateau.log_weight(1.0) == doctest::Approx(2.0 * (0.09 / 2 + (1.0 - 0.49) / 2)));
    const auto tab = FlowProfile::tabulated({0.0, 0.5, 1.0}, {1.0, 2.0, 0.5}, 10.0);
    const double ref = simpson([&](double s) { return s * tab.rho(s); }, 0.0, 0.5, 200) +
                       simpson([&](double s) { return s * tab.rho(s); }, 0.5, 0.8, 200);
    CHECK(tab.log_weight(0.8) == doctest::Approx(ref).epsilon(1e-12));
    CHECK(plateau.rho(0.3) == doctest::Approx(1.0));
  }

  TEST_CASE("torsion closed forms") {
    // Laplacian: psi = (1 - r^2) / (2N)
    for (int N : {2, 3, 10}) {
      const auto tp = torsion(FlowProfile::constant(0.0), 0.0, N, 256);
      for (std::size_t i = 0; i < tp.nodes.size(); i += 37) {
        const double r = tp.nodes[i];
        CHECK(tp.psi[i] == doctest::Approx((1 - r * r) / (2.0 * N)).epsilon(1e-10));
        CHECK(tp.dpsi[i] == doctest::Approx(-r / N).epsilon(1e-10));
      }
    }
    // rho = 2/(1+r^2), A = 1, N = 2: psi(0) = (1 + ln 2) / 8
    CHECK(torsion_max(FlowProfile::inverse_quadratic(), 1.0, 2) ==
          doctest::Approx((1.0 + std::numbers::ln2) / 8.0).epsilon(1e-10));
  }

  TEST_CASE("constant profile torsion against nested Simpson") {
    for (double c : {-4.0, 1.0, 3.0}) {
      for (double A : {1.0, 5.0}) {
        INFO("c=", c, " A=", A);
        CHECK(torsion_max(FlowProfile::constant(c), A, 3) ==
              doctest::Approx(constant_psi_max(c, A, 3)).epsilon(1e-8));
      }
    }
  }

  TEST_CASE("torsion profile is decreasing and vanishes on the boundary") {
    const auto tp = torsion(FlowProfile::plateau(0.5, 1.0, 1.0), 20.0, 2, 512);
    CHECK(tp.psi.back() == 0.0);
    CHECK(tp.psi_max == tp.psi.front());
    for (std::size_t i = 1; i < tp.psi.size(); ++i) {
      CHECK(tp.psi[i] < tp.psi[i - 1]);
      CHECK(tp.dpsi[i] <= 0.0);
    }
    CHECK(tp.psi_max >= plateau_lower_constant(0.5, 1.0, 2));
    CHECK(tp.psi_max <= plateau_upper_constant(2));
  }

  TEST_CASE("plateau constant") {
    CHECK(plateau_lower_constant(0.5, 1.0, 2) ==
          doctest::Approx(0.5 * (0.375 - 0.25 * std::numbers::ln2)).epsilon(1e-12));
    CHECK(plateau_lower_constant(0.5, 1.0, 2) == doctest::Approx(0.1008566).epsilon(1e-6));
  }

  TEST_CASE("classification") {
    CHECK(FlowProfile::constant(-4.0).classify().regime == Regime::kNegativeSomewhere);
    CHECK(FlowProfile::inverse_quadratic().classify().regime == Regime::kPositiveNoPlateau);
    const auto info = FlowProfile::plateau(0.5, 1.0, 1.0).classify();
    CHECK(info.regime == Regime::kPositiveWithPlateau);
    CHECK(info.plateau_a == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(info.plateau_b == doctest::Approx(1.0).epsilon(1e-3));
  }

  TEST_CASE("errors") {
    CHECK_THROWS_AS(torsion(FlowProfile::constant(-4.0), 1000.0, 2, 64), OverflowError);
    CHECK_THROWS_AS(FlowProfile::tabulated({0.0, 0.5, 1.0}, {0.0, 10.0, 0.0}, 1.0), Error);
    CHECK_THROWS_AS(FlowProfile::tabulated({0.0, 0.5}, {0.0, 1.0}, 10.0), Error);
    CHECK_THROWS_AS(FlowProfile::plateau(0.7, 0.3, 1.0), Error);
  }
}
