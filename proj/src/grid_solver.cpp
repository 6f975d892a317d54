#include "gelfand/grid_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gelfand/errors.hpp"

namespace gelfand {

RadialGrid::RadialGrid(int dim_, int intervals_) : dim(dim_), intervals(intervals_) {
  if (dim < 2) throw DomainError("RadialGrid: dimension N must be >= 2");
  if (intervals < 16) throw DomainError("RadialGrid: need M >= 16 intervals");
}

std::vector<double> Tridiagonal::apply(std::span<const double> x) const {
  const std::size_t n = size();
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double v = diag[i] * x[i];
    if (i > 0) v += sub[i] * x[i - 1];
    if (i + 1 < n) v += sup[i] * x[i + 1];
    y[i] = v;
  }
  return y;
}

void Tridiagonal::shift_diagonal(std::size_t i, double delta) {
  diag[i] += delta;
  if (!excess.empty()) excess[i] += delta;
}

std::vector<double> Tridiagonal::solve(std::span<const double> rhs) const {
  const std::size_t n = size();
  if (!excess.empty()) {
    // e = 1 + c tracks the defect of the elimination multiplier from -1, so
    // pivot = diag - sub*c = excess - sup - sub*e with no cancellation for a
    // Z-matrix with nonnegative excess.
    std::vector<double> e(n), d(n);
    double carry = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double lower = i > 0 ? sub[i] : 0.0;
      const double pivot = excess[i] - sup[i] - lower * carry;
      if (pivot == 0.0 || !std::isfinite(pivot)) {
        throw SingularMatrixError("Thomas solve: zero pivot in row " + std::to_string(i));
      }
      e[i] = i + 1 < n ? (excess[i] - lower * carry) / pivot : 0.0;
      d[i] = (rhs[i] - (i > 0 ? lower * d[i - 1] : 0.0)) / pivot;
      carry = e[i];
    }
    // c = e - 1
    for (std::size_t i = n - 1; i-- > 0;) d[i] -= (e[i] - 1.0) * d[i + 1];
    return d;
  }
  std::vector<double> c(n), d(n);
  double pivot = diag[0];
  if (pivot == 0.0) throw SingularMatrixError("Thomas solve: zero pivot in row 0");
  c[0] = n > 1 ? sup[0] / pivot : 0.0;
  d[0] = rhs[0] / pivot;
  for (std::size_t i = 1; i < n; ++i) {
    pivot = diag[i] - sub[i] * c[i - 1];
    if (pivot == 0.0 || !std::isfinite(pivot)) {
      throw SingularMatrixError("Thomas solve: zero pivot in row " + std::to_string(i));
    }
    c[i] = i + 1 < n ? sup[i] / pivot : 0.0;
    d[i] = (rhs[i] - sub[i] * d[i - 1]) / pivot;
  }
  for (std::size_t i = n - 1; i-- > 0;) d[i] -= c[i] * d[i + 1];
  return d;
}

std::vector<double> DiscreteOperator::apply(std::span<const double> u) const {
  return matrix.apply(u.first(matrix.size()));
}

DiscreteOperator assemble(const FlowProfile& profile, double amplitude,
                          const RadialGrid& grid) {
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) {
    throw DomainError("assemble: amplitude A must be finite and >= 0");
  }
  const int n = grid.intervals;
  const double h = grid.h();
  const double inv_h2 = 1.0 / (h * h);
  DiscreteOperator op{grid, amplitude, {}, 0};
  auto& m = op.matrix;
  m.sub.assign(n, 0.0);
  m.diag.assign(n, 0.0);
  m.sup.assign(n, 0.0);

  // Delta u(0) = N u''(0) with the even extension u_{-1} = u_1.
  m.diag[0] = 2.0 * grid.dim * inv_h2;
  m.sup[0] = -2.0 * grid.dim * inv_h2;

  for (int i = 1; i < n; ++i) {
    const double r = grid.node(i);
    const double drift = (grid.dim - 1) / r + amplitude * r * profile.rho(r);
    double sub = -inv_h2 + drift / (2.0 * h);
    double sup = -inv_h2 - drift / (2.0 * h);
    double diag = 2.0 * inv_h2;
    if (sub > 0.0 || sup > 0.0) {
      ++op.upwinded_rows;
      if (drift > 0.0) {
        sub = -inv_h2;
        sup = -inv_h2 - drift / h;
        diag = 2.0 * inv_h2 + drift / h;
      } else {
        sub = -inv_h2 + drift / h;
        sup = -inv_h2;
        diag = 2.0 * inv_h2 - drift / h;
      }
    }
    if (!std::isfinite(sub) || !std::isfinite(sup) || !(diag > 0.0) || sub > 0.0 ||
        sup > 0.0) {
      std::ostringstream os;
      os << "assemble: row " << i << " cannot be given the M-matrix sign pattern";
      throw MeshError(os.str());
    }
    m.sub[i] = sub;
    m.sup[i] = sup;
    m.diag[i] = diag;
  }
  // Both stencils annihilate constants, so every row excess is exactly zero.
  m.excess.assign(n, 0.0);
  return op;
}

std::vector<double> solve_linear(const DiscreteOperator& op, std::span<const double> rhs) {
  const std::size_t n = op.matrix.size();
  if (rhs.size() < n) throw DomainError("solve_linear: rhs shorter than the grid");
  auto u = op.matrix.solve(rhs.first(n));
  u.push_back(0.0);
  return u;
}

std::vector<double> discrete_torsion(const DiscreteOperator& op) {
  std::vector<double> ones(op.grid.size(), 1.0);
  return solve_linear(op, ones);
}

IterationAudit& IterationAudit::operator+=(const IterationAudit& other) {
  steps_checked += other.steps_checked;
  monotonicity_violations += other.monotonicity_violations;
  domination_checked = domination_checked || other.domination_checked;
  domination_violations += other.domination_violations;
  worst_monotonicity = std::min(worst_monotonicity, other.worst_monotonicity);
  return *this;
}

std::string NoConvergence::describe() const {
  std::ostringstream os;
  switch (reason) {
    case Reason::kSingularCap:
      os << "iterate reached the singular cap";
      break;
    case Reason::kCeiling:
      os << "iterate exceeded the divergence ceiling";
      break;
    case Reason::kNonFinite:
      os << "non-finite iterate";
      break;
    case Reason::kStalled:
      os << "stalled";
      break;
    case Reason::kMaxIterations:
      os << "maximum iterations reached";
      break;
    case Reason::kResidual:
      os << "increment converged but residual above tolerance";
      break;
  }
  os << " (lambda=" << lambda << ", iterations=" << iterations << ", u_max=" << u_max
     << ")";
  return os.str();
}

namespace {

double sup_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double divergence_ceiling(const Nonlinearity& nl, const IterationOptions& opts) {
  if (!std::isnan(opts.ceiling)) return opts.ceiling;
  if (nl.is_singular()) return 1.0 - opts.singular_cap;
  const double total = nl.F_total();
  if (std::isfinite(total)) return nl.F_inverse(0.999999 * total);
  return 1e6;
}

}  // namespace

BranchOutcome minimal_solution(const DiscreteOperator& op, const Nonlinearity& nl,
                               double lambda, const IterationOptions& opts,
                               std::span<const double> initial) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw DomainError("minimal_solution: lambda must be finite and >= 0");
  }
  const std::size_t n = op.matrix.size();
  const std::size_t nodes = n + 1;
  std::vector<double> u(nodes, 0.0);
  if (!initial.empty()) {
    if (initial.size() != nodes) throw DomainError("minimal_solution: initial size");
    std::copy(initial.begin(), initial.end(), u.begin());
    u[n] = 0.0;
  }

  IterationAudit audit;
  const double ceiling = divergence_ceiling(nl, opts);
  const bool singular = nl.is_singular();

  auto fail = [&](NoConvergence::Reason reason, int it, double inc) -> BranchOutcome {
    return NoConvergence{reason, lambda, it, inc, sup_norm(u), audit};
  };

  if (lambda == 0.0 && initial.empty()) {
    BranchPoint bp;
    bp.lambda = 0.0;
    bp.u = u;
    bp.iterations = 1;
    bp.converged = true;
    bp.audit = audit;
    if (opts.compute_kappa) bp.kappa1 = linearized_kappa1(op, nl, 0.0, u, opts.eig_tol);
    return bp;
  }

  // Super-solution alpha psi with alpha psi_max = t_hat dominates every
  // iterate when lambda <= sup(t/f) / psi_max.
  std::vector<double> barrier;
  const auto ratio = nl.sup_ratio();
  {
    auto psi = discrete_torsion(op);
    const double psi_max = sup_norm(psi);
    if (ratio.attained && lambda <= ratio.value / psi_max) {
      const double alpha = ratio.argmax / psi_max;
      barrier.resize(nodes);
      for (std::size_t i = 0; i < nodes; ++i) barrier[i] = alpha * psi[i];
      audit.domination_checked = true;
    }
  }

  std::vector<double> f_prev(n), rhs(n);
  for (std::size_t i = 0; i < n; ++i) f_prev[i] = lambda * nl.f(u[i]);

  // First increment L^{-1}(lambda f(u_0)) - u_0, formed through the solve:
  // lambda f(u_0) - L u_0 loses everything to cancellation when u_0 is a
  // nearly converged warm start and the stencil is stiff. A sub-solution
  // start makes it nonnegative up to rounding.
  std::vector<double> delta = op.matrix.solve(f_prev);
  for (std::size_t i = 0; i < n; ++i) delta[i] = std::max(0.0, delta[i] - u[i]);

  double prev_increment = std::numeric_limits<double>::infinity();
  int stalling = 0;
  for (int it = 1; it <= opts.max_iterations; ++it) {
    if (it > 1) delta = op.matrix.solve(rhs);
    double increment = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      ++audit.steps_checked;
      if (delta[i] < -1e-13) {
        ++audit.monotonicity_violations;
      }
      audit.worst_monotonicity = std::min(audit.worst_monotonicity, delta[i]);
      u[i] += delta[i];
      increment = std::max(increment, std::abs(delta[i]));
    }
    const double u_max = sup_norm(u);
    if (!std::isfinite(u_max)) return fail(NoConvergence::Reason::kNonFinite, it, increment);
    if (singular && u_max > 1.0 - opts.singular_cap) {
      return fail(NoConvergence::Reason::kSingularCap, it, increment);
    }
    if (!singular && u_max > ceiling) {
      return fail(NoConvergence::Reason::kCeiling, it, increment);
    }
    if (!barrier.empty()) {
      for (std::size_t i = 0; i < n; ++i) {
        if (u[i] > barrier[i] + 1e-10 * (1.0 + barrier[i])) ++audit.domination_violations;
      }
    }

    if (increment <= opts.tol) {
      BranchPoint bp;
      bp.lambda = lambda;
      bp.iterations = it;
      bp.increment = increment;
      double fmax = 0.0;
      auto lu = op.matrix.apply(std::span<const double>(u).first(n));
      for (std::size_t i = 0; i < n; ++i) {
        const double source = lambda * nl.f(u[i]);
        fmax = std::max(fmax, source);
        bp.residual = std::max(bp.residual, std::abs(lu[i] - source));
      }
      if (bp.residual > opts.residual_tol * std::max(1.0, fmax)) {
        return fail(NoConvergence::Reason::kResidual, it, increment);
      }
      bp.u = u;
      bp.converged = true;
      bp.audit = audit;
      if (opts.compute_kappa) bp.kappa1 = linearized_kappa1(op, nl, lambda, u, opts.eig_tol);
      return bp;
    }

    if (increment > opts.stall_ratio * prev_increment) {
      if (++stalling >= opts.stall_window) {
        return fail(NoConvergence::Reason::kStalled, it, increment);
      }
    } else {
      stalling = 0;
    }
    prev_increment = increment;

    for (std::size_t i = 0; i < n; ++i) {
      const double fi = lambda * nl.f(u[i]);
      rhs[i] = std::max(0.0, fi - f_prev[i]);
      f_prev[i] = fi;
    }
  }
  return fail(NoConvergence::Reason::kMaxIterations, opts.max_iterations, prev_increment);
}

EigenEstimate principal_eigenvalue(const Tridiagonal& matrix, double tol,
                                   int max_iterations) {
  const std::size_t n = matrix.size();
  double gershgorin = std::numeric_limits<double>::infinity();
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double off = (i > 0 ? std::abs(matrix.sub[i]) : 0.0) +
                       (i + 1 < n ? std::abs(matrix.sup[i]) : 0.0);
    gershgorin = std::min(gershgorin, matrix.diag[i] - off);
    scale = std::max(scale, std::abs(matrix.diag[i]));
  }
  double shift = gershgorin - (1.0 + 1e-8 * scale);

  EigenEstimate est;
  std::vector<double> x(n, 1.0);
  Tridiagonal shifted = matrix;
  double previous = std::numeric_limits<double>::quiet_NaN();
  int settled = 0;
  for (int it = 1; it <= max_iterations; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      shifted.diag[i] = matrix.diag[i] - shift;
      if (!shifted.excess.empty()) shifted.excess[i] = matrix.excess[i] - shift;
    }
    auto y = shifted.solve(x);
    const std::size_t peak =
        static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
    if (!(y[peak] > 0.0) || !std::isfinite(y[peak])) {
      throw EigenIterationError("principal_eigenvalue: lost positivity of the iterate");
    }
    const double norm = y[peak];
    const double theta = shift + x[peak] / norm;
    for (auto& v : y) v /= norm;
    x = std::move(y);

    // Collatz-Wielandt bracket from the positive iterate.
    const auto tx = matrix.apply(x);
    double lower = std::numeric_limits<double>::infinity();
    double upper = -lower;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(x[i] > 0.0)) continue;
      const double r = tx[i] / x[i];
      lower = std::min(lower, r);
      upper = std::max(upper, r);
    }
    est = {theta, lower, upper, it, {}};

    if (std::abs(theta - previous) <= tol * std::max(1.0, std::abs(theta))) {
      if (++settled >= 2) {
        est.vector = std::move(x);
        return est;
      }
    } else {
      settled = 0;
    }
    previous = theta;
    const double gap = std::max(upper - lower, 1e-6 * std::abs(lower) + 1e-12);
    shift = std::max(shift, lower - gap);
  }
  throw EigenIterationError("principal_eigenvalue: no convergence within iteration budget");
}

double linearized_kappa1(const DiscreteOperator& op, const Nonlinearity& nl,
                         double lambda, std::span<const double> u, double tol) {
  Tridiagonal t = op.matrix;
  for (std::size_t i = 0; i < t.size(); ++i) t.shift_diagonal(i, -lambda * nl.fprime(u[i]));
  return principal_eigenvalue(t, tol).value;
}

double principal_mu1(const DiscreteOperator& op, double tol) {
  return principal_eigenvalue(op.matrix, tol).value;
}

Tridiagonal adjoint_matrix(const DiscreteOperator& op) {
  const auto& m = op.matrix;
  const std::size_t n = m.size();
  const double h = op.grid.h();
  const int dim = op.grid.dim;
  std::vector<double> w(n);
  w[0] = std::pow(0.5 * h, dim) / dim;
  for (std::size_t i = 1; i < n; ++i) {
    w[i] = std::pow(op.grid.node(static_cast<int>(i)), dim - 1) * h;
  }
  Tridiagonal adj;
  adj.diag = m.diag;
  adj.sub.assign(n, 0.0);
  adj.sup.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (i + 1 < n) adj.sup[i] = m.sub[i + 1] * w[i + 1] / w[i];
    if (i > 0) adj.sub[i] = m.sup[i - 1] * w[i - 1] / w[i];
  }
  return adj;
}

double adjoint_mu1(const DiscreteOperator& op, double tol) {
  return principal_eigenvalue(adjoint_matrix(op), tol).value;
}

}  // namespace gelfand
