#include <doctest.h>

#include <cmath>
#include <random>
#include <variant>

#include "gelfand/grid_solver.hpp"

using namespace gelfand;

namespace {

std::vector<double> dense_solve(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(a[i][k]) > std::abs(a[piv][k])) piv = i;
    }
    std::swap(a[k], a[piv]);
    std::swap(b[k], b[piv]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double m = a[i][k] / a[k][k];
      for (std::size_t j = k; j < n; ++j) a[i][j] -= m * a[k][j];
      b[i] -= m * b[k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t k = n; k-- > 0;) {
    double s = b[k];
    for (std::size_t j = k + 1; j < n; ++j) s -= a[k][j] * x[j];
    x[k] = s / a[k][k];
  }
  return x;
}

const BranchPoint& point(const BranchOutcome& o) { return std::get<BranchPoint>(o); }

}  // namespace

TEST_SUITE("grid_solver") {
  TEST_CASE("Thomas agrees with dense elimination") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const std::size_t n = 40;
    Tridiagonal t;
    t.sub.resize(n);
    t.diag.resize(n);
    t.sup.resize(n);
    std::vector<std::vector<double>> dense(n, std::vector<double>(n, 0.0));
    std::vector<double> rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
      t.sub[i] = i > 0 ? u(rng) : 0.0;
      t.sup[i] = i + 1 < n ? u(rng) : 0.0;
      t.diag[i] = 3.0 + u(rng);
      dense[i][i] = t.diag[i];
      if (i > 0) dense[i][i - 1] = t.sub[i];
      if (i + 1 < n) dense[i][i + 1] = t.sup[i];
      rhs[i] = u(rng);
    }
    const auto x = t.solve(rhs);
    const auto ref = dense_solve(dense, rhs);
    for (std::size_t i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(ref[i]).epsilon(1e-12));
    const auto back = t.apply(x);
    for (std::size_t i = 0; i < n; ++i) CHECK(back[i] == doctest::Approx(rhs[i]).epsilon(1e-12));
  }

  TEST_CASE("excess path matches the plain solve on a mild operator") {
    const auto op = assemble(FlowProfile::inverse_quadratic(), 3.0, RadialGrid(2, 64));
    auto plain = op.matrix;
    plain.excess.clear();
    std::vector<double> rhs(op.matrix.size(), 1.0);
    const auto a = op.matrix.solve(rhs);
    const auto b = plain.solve(rhs);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-10));
  }

  TEST_CASE("discrete Laplacian torsion is exact for the quadratic") {
    // For N >= 4 the rows next to the origin are upwinded and exactness is lost.
    for (int N : {2, 3}) {
      const RadialGrid g(N, 50);
      const auto psi = discrete_torsion(assemble(FlowProfile::constant(0.0), 0.0, g));
      for (int i = 0; i <= g.intervals; ++i) {
        const double r = g.node(i);
        CHECK(psi[i] == doctest::Approx((1 - r * r) / (2.0 * N)).epsilon(1e-11));
      }
    }
  }

  TEST_CASE("upwinding exactly where the central stencil loses its sign") {
    const RadialGrid g(2, 64);
    const double A = 1000.0;
    const auto op = assemble(FlowProfile::constant(1.0), A, g);
    int expected = 0;
    for (int i = 1; i < g.intervals; ++i) {
      const double r = g.node(i);
      if ((1.0 / r + A * r) * g.h() > 2.0) ++expected;
    }
    CHECK(expected > 0);
    CHECK(op.upwinded_rows == expected);
    for (std::size_t i = 0; i < op.matrix.size(); ++i) {
      CHECK(op.matrix.sub[i] <= 0.0);
      CHECK(op.matrix.sup[i] <= 0.0);
    }
    CHECK(assemble(FlowProfile::constant(1.0), 0.0, g).upwinded_rows == 0);
  }

  TEST_CASE("principal eigenvalue of the Laplacian") {
    // Dirichlet ball: j_{1/2,1}^2 = pi^2 for N = 3, j_{0,1}^2 for N = 2.
    const double mu3 = principal_mu1(assemble(FlowProfile::constant(0.0), 0.0, RadialGrid(3, 2048)));
    CHECK(mu3 == doctest::Approx(M_PI * M_PI).epsilon(1e-6));
    const double j0 = 2.404825557695773;
    const double mu2 = principal_mu1(assemble(FlowProfile::constant(0.0), 0.0, RadialGrid(2, 2048)));
    CHECK(mu2 == doctest::Approx(j0 * j0).epsilon(1e-6));
  }

  TEST_CASE("adjoint shares the principal eigenvalue") {
    for (double A : {0.0, 4.0, 25.0}) {
      const auto op = assemble(FlowProfile::inverse_quadratic(), A, RadialGrid(3, 256));
      CHECK(adjoint_mu1(op, 1e-12) == doctest::Approx(principal_mu1(op, 1e-12)).epsilon(1e-8));
    }
  }

  TEST_CASE("Liouville minimal solution in the plane") {
    // -Laplace u = lambda e^u on the unit disc:
    //   u = 2 ln((1 + mu) / (1 + mu r^2)), lambda = 8 mu / (1 + mu)^2.
    const double mu = 3.0 - 2.0 * std::sqrt(2.0);  // smaller root at lambda = 1
    const RadialGrid g(2, 1024);
    const auto op = assemble(FlowProfile::constant(0.0), 0.0, g);
    const auto out = minimal_solution(op, Nonlinearity::exponential(), 1.0);
    REQUIRE(std::holds_alternative<BranchPoint>(out));
    const auto& bp = point(out);
    CHECK(bp.converged);
    for (int i = 0; i <= g.intervals; i += 128) {
      const double r = g.node(i);
      CHECK(bp.u[i] == doctest::Approx(2.0 * std::log((1 + mu) / (1 + mu * r * r))).epsilon(1e-5));
    }
    CHECK(bp.kappa1 > 0.0);
    CHECK(bp.audit.monotonicity_violations == 0);
    for (std::size_t i = 1; i < bp.u.size(); ++i) CHECK(bp.u[i] <= bp.u[i - 1]);
  }

  TEST_CASE("no convergence above the extremal value") {
    const auto op = assemble(FlowProfile::constant(0.0), 0.0, RadialGrid(2, 128));
    const auto out = minimal_solution(op, Nonlinearity::exponential(), 2.5);
    REQUIRE(std::holds_alternative<NoConvergence>(out));
    CHECK_FALSE(std::get<NoConvergence>(out).describe().empty());
    const auto mems = minimal_solution(op, Nonlinearity::mems(2.0), 3.0);
    CHECK(std::holds_alternative<NoConvergence>(mems));
  }

  TEST_CASE("warm start reproduces the cold solution") {
    const auto op = assemble(FlowProfile::inverse_quadratic(), 2.0, RadialGrid(2, 256));
    const auto nl = Nonlinearity::exponential();
    const auto low = point(minimal_solution(op, nl, 1.0));
    const auto warm = point(minimal_solution(op, nl, 1.5, {}, low.u));
    const auto cold = point(minimal_solution(op, nl, 1.5));
    for (std::size_t i = 0; i < cold.u.size(); i += 32) {
      CHECK(warm.u[i] == doctest::Approx(cold.u[i]).epsilon(1e-8));
    }
  }
}
